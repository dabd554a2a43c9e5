//! Finite sample spaces, events, partitions and observation spaces.
//!
//! A finite Boolean algebra of events is determined by its atoms, so every
//! domain is stored as a [`Partition`] and every partial distribution as one
//! probability per atom. Events are bitsets over at most [`MAX_POINTS`]
//! sample points.

use std::collections::HashMap;
use std::fmt;

use crate::error::Error;
use crate::field::OrderedField;

/// Largest supported sample space.
pub const MAX_POINTS: usize = 64;

/// An ordered list of distinct sample point names.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampleSpace {
    labels: Vec<String>,
}

impl SampleSpace {
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Result<Self, Error> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::SampleSpace("a sample space needs at least one point".into()));
        }
        if labels.len() > MAX_POINTS {
            return Err(Error::SampleSpace(format!(
                "{} points exceed the supported maximum of {MAX_POINTS}",
                labels.len()
            )));
        }
        let mut seen = HashMap::new();
        for (i, l) in labels.iter().enumerate() {
            if let Some(j) = seen.insert(l.as_str(), i) {
                return Err(Error::SampleSpace(format!("label {l:?} repeats at positions {j} and {i}")));
            }
        }
        Ok(Self { labels })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn full(&self) -> Event {
        Event::full(self.len())
    }

    /// Human-readable name of an event, e.g. `{00,01}`.
    pub fn describe(&self, e: Event) -> String {
        let names: Vec<&str> = e.indices().map(|i| self.labels[i].as_str()).collect();
        format!("{{{}}}", names.join(","))
    }
}

/// A set of sample point indices.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Event(u64);

impl Event {
    pub const EMPTY: Event = Event(0);

    pub fn full(n: usize) -> Self {
        if n >= 64 {
            Event(u64::MAX)
        } else {
            Event((1u64 << n) - 1)
        }
    }

    pub fn singleton(i: usize) -> Self {
        Event(1u64 << i)
    }

    /// Builds an event over a space of `n` points.
    pub fn from_indices(indices: impl IntoIterator<Item = usize>, n: usize) -> Result<Self, Error> {
        let mut bits = 0u64;
        for i in indices {
            if i >= n || i >= MAX_POINTS {
                return Err(Error::IndexOutOfRange { index: i, size: n });
            }
            bits |= 1u64 << i;
        }
        Ok(Event(bits))
    }

    pub fn from_bits(bits: u64) -> Self {
        Event(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn contains(self, i: usize) -> bool {
        i < 64 && self.0 & (1u64 << i) != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn union(self, other: Event) -> Event {
        Event(self.0 | other.0)
    }

    pub fn intersection(self, other: Event) -> Event {
        Event(self.0 & other.0)
    }

    pub fn is_subset(self, other: Event) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn intersects(self, other: Event) -> bool {
        self.0 & other.0 != 0
    }

    /// Smallest member, if any.
    pub fn first(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    /// Members in increasing order.
    pub fn indices(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(i)
            }
        })
    }

    fn check_range(self, n: usize) -> Result<(), Error> {
        let outside = self.0 & !Event::full(n).0;
        if outside != 0 {
            return Err(Error::IndexOutOfRange { index: outside.trailing_zeros() as usize, size: n });
        }
        Ok(())
    }
}

impl fmt::Debug for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.indices()).finish()
    }
}

/// Pairwise-disjoint nonempty atoms covering a space of `n` points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    n: usize,
    atoms: Vec<Event>,
}

impl Partition {
    pub fn new(n: usize, atoms: Vec<Event>) -> Result<Self, Error> {
        if n == 0 || n > MAX_POINTS {
            return Err(Error::Partition(format!("space size {n} is outside 1..={MAX_POINTS}")));
        }
        let mut covered = Event::EMPTY;
        for (k, &a) in atoms.iter().enumerate() {
            a.check_range(n)?;
            if a.is_empty() {
                return Err(Error::Partition(format!("atom {k} is empty")));
            }
            if covered.intersects(a) {
                return Err(Error::Partition(format!("atom {k} overlaps an earlier atom")));
            }
            covered = covered.union(a);
        }
        if covered != Event::full(n) {
            let missing = Event::full(n).0 & !covered.0;
            return Err(Error::Partition(format!(
                "atoms do not cover point {}",
                missing.trailing_zeros()
            )));
        }
        Ok(Self { n, atoms })
    }

    /// The partition into singletons.
    pub fn discrete(n: usize) -> Result<Self, Error> {
        Self::new(n, (0..n).map(Event::singleton).collect())
    }

    /// The one-atom partition `{Ω}`.
    pub fn trivial(n: usize) -> Result<Self, Error> {
        Self::new(n, vec![Event::full(n)])
    }

    pub fn space_size(&self) -> usize {
        self.n
    }

    pub fn atoms(&self) -> &[Event] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Index of the atom containing point `i`.
    pub fn atom_of(&self, i: usize) -> Option<usize> {
        self.atoms.iter().position(|a| a.contains(i))
    }

    /// Same atoms in canonical order (by smallest member).
    pub fn canonical(&self) -> Partition {
        let mut atoms = self.atoms.clone();
        atoms.sort_by_key(|a| a.first());
        Partition { n: self.n, atoms }
    }

    /// Whether two partitions generate the same Boolean algebra.
    pub fn same_algebra(&self, other: &Partition) -> bool {
        self.canonical() == other.canonical()
    }
}

/// Whether `e` belongs to the Boolean algebra generated by `partition`,
/// i.e. is a union of its atoms.
pub fn event_in_algebra(partition: &Partition, e: Event) -> Result<bool, Error> {
    e.check_range(partition.n)?;
    Ok(partition.atoms.iter().all(|&a| a.is_subset(e) || !a.intersects(e)))
}

/// Partition generating the intersection of the two generated algebras.
///
/// Its atoms are the connected components of the overlap graph whose nodes
/// are the atoms of both partitions, two atoms being linked when they meet.
pub fn intersection_algebra(p1: &Partition, p2: &Partition) -> Result<Partition, Error> {
    if p1.n != p2.n {
        return Err(Error::MismatchedSpaces(p1.n, p2.n));
    }
    let k1 = p1.atoms.len();
    let mut parent: Vec<usize> = (0..k1 + p2.atoms.len()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (i, &a) in p1.atoms.iter().enumerate() {
        for (j, &b) in p2.atoms.iter().enumerate() {
            if a.intersects(b) {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, k1 + j));
                if ri != rj {
                    parent[ri] = rj;
                }
            }
        }
    }
    let mut blocks: Vec<(usize, Event)> = Vec::new();
    for (i, &a) in p1.atoms.iter().enumerate() {
        let root = find(&mut parent, i);
        match blocks.iter_mut().find(|(r, _)| *r == root) {
            Some((_, e)) => *e = e.union(a),
            None => blocks.push((root, a)),
        }
    }
    let mut atoms: Vec<Event> = blocks.into_iter().map(|(_, e)| e).collect();
    atoms.sort_by_key(|a| a.first());
    Partition::new(p1.n, atoms)
}

/// Common refinement of a family of partitions: points are grouped by the
/// tuple of atoms they fall into. Atoms are ordered by smallest member.
pub fn meet_all<'a>(n: usize, partitions: impl IntoIterator<Item = &'a Partition>) -> Result<Partition, Error> {
    let partitions: Vec<&Partition> = partitions.into_iter().collect();
    for p in &partitions {
        if p.n != n {
            return Err(Error::MismatchedSpaces(n, p.n));
        }
    }
    let mut groups: Vec<(Vec<usize>, Event)> = Vec::new();
    for point in 0..n {
        let signature: Vec<usize> = partitions
            .iter()
            .map(|p| p.atom_of(point).expect("partition covers the space"))
            .collect();
        match groups.iter_mut().find(|(s, _)| *s == signature) {
            Some((_, e)) => *e = e.union(Event::singleton(point)),
            None => groups.push((signature, Event::singleton(point))),
        }
    }
    Partition::new(n, groups.into_iter().map(|(_, e)| e).collect())
}

/// A probability distribution on the algebra generated by a partition.
#[derive(Clone, Debug, PartialEq)]
pub struct PartialDistribution<F> {
    name: String,
    partition: Partition,
    probs: Vec<F>,
}

impl<F: OrderedField> PartialDistribution<F> {
    pub fn new(name: impl Into<String>, partition: Partition, probs: Vec<F>) -> Result<Self, Error> {
        let name = name.into();
        let bad = |reason: String| Error::Distribution { name: name.clone(), reason };
        if probs.len() != partition.len() {
            return Err(bad(format!("{} probabilities for {} atoms", probs.len(), partition.len())));
        }
        if let Some((k, p)) = probs.iter().enumerate().find(|(_, p)| p.is_negative()) {
            return Err(bad(format!("atom {k} has negative probability {p}")));
        }
        let total = probs.iter().cloned().fold(F::zero(), |acc, p| acc + p);
        if !total.eq_field(&F::one()) {
            return Err(bad(format!("probabilities sum to {total}, not 1")));
        }
        Ok(Self { name, partition, probs })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn probs(&self) -> &[F] {
        &self.probs
    }

    /// Probability of an event in the domain, `None` outside it.
    pub fn prob_of(&self, e: Event) -> Option<F> {
        if !event_in_algebra(&self.partition, e).ok()? {
            return None;
        }
        Some(
            self.partition
                .atoms
                .iter()
                .zip(&self.probs)
                .filter(|(a, _)| a.is_subset(e))
                .fold(F::zero(), |acc, (_, p)| acc + p.clone()),
        )
    }
}

/// A sample space with a family of partial distributions.
///
/// Construction checks structure only; the consistency requirement is
/// examined by [`check_consistency`].
#[derive(Clone, Debug, PartialEq)]
pub struct ObservationSpace<F> {
    space: SampleSpace,
    tests: Vec<PartialDistribution<F>>,
}

impl<F: OrderedField> ObservationSpace<F> {
    pub fn new(space: SampleSpace, tests: Vec<PartialDistribution<F>>) -> Result<Self, Error> {
        for t in &tests {
            if t.partition.n != space.len() {
                return Err(Error::MismatchedSpaces(space.len(), t.partition.n));
            }
        }
        Ok(Self { space, tests })
    }

    pub fn space(&self) -> &SampleSpace {
        &self.space
    }

    pub fn tests(&self) -> &[PartialDistribution<F>] {
        &self.tests
    }

    pub fn test(&self, name: &str) -> Option<&PartialDistribution<F>> {
        self.tests.iter().find(|t| t.name == name)
    }

    /// Applies `f` to every probability, e.g. to move between fields.
    pub fn map_field<G: OrderedField>(&self, f: impl Fn(&F) -> G) -> Result<ObservationSpace<G>, Error> {
        let tests = self
            .tests
            .iter()
            .map(|t| PartialDistribution::new(t.name.clone(), t.partition.clone(), t.probs.iter().map(&f).collect()))
            .collect::<Result<Vec<_>, _>>()?;
        ObservationSpace::new(self.space.clone(), tests)
    }
}

/// One atom of a pairwise intersection algebra on which two tests disagree.
#[derive(Clone, Debug, PartialEq)]
pub struct Violation<F> {
    pub tests: (usize, usize),
    pub atom: Event,
    pub values: (F, F),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConsistencyReport<F> {
    pub violations: Vec<Violation<F>>,
}

impl<F> ConsistencyReport<F> {
    pub fn is_consistent(&self) -> bool {
        self.violations.is_empty()
    }

    /// Distinct test pairs with at least one violation.
    pub fn violating_pairs(&self) -> Vec<(usize, usize)> {
        let mut pairs: Vec<(usize, usize)> = self.violations.iter().map(|v| v.tests).collect();
        pairs.dedup();
        pairs
    }
}

/// Checks that every pair of tests agrees on the atoms of the intersection
/// of their domains. Agreement on those atoms implies agreement on every
/// shared event by additivity.
pub fn check_consistency<F: OrderedField>(os: &ObservationSpace<F>) -> ConsistencyReport<F> {
    let mut violations = Vec::new();
    for i in 0..os.tests.len() {
        for j in i + 1..os.tests.len() {
            let (ti, tj) = (&os.tests[i], &os.tests[j]);
            let meet = intersection_algebra(&ti.partition, &tj.partition).expect("tests share the sample space");
            for &atom in meet.atoms() {
                let pi = ti.prob_of(atom).expect("meet atoms lie in both domains");
                let pj = tj.prob_of(atom).expect("meet atoms lie in both domains");
                if !pi.eq_field(&pj) {
                    violations.push(Violation { tests: (i, j), atom, values: (pi, pj) });
                }
            }
        }
    }
    ConsistencyReport { violations }
}

/// Atoms of the algebra generated by all observable events; these are the
/// grounding variables.
pub fn common_refinement<F: OrderedField>(os: &ObservationSpace<F>) -> Partition {
    meet_all(os.space.len(), os.tests.iter().map(|t| &t.partition)).expect("tests share the sample space")
}
