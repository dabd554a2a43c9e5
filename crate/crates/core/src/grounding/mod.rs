//! Grounding problems: from an observation space to the affine set of all
//! signed groundings, and from there to nonnegative feasibility, vertices,
//! symmetric solutions and moments.

mod linalg;
mod simplex;
mod vertex;

use std::fmt;

use crate::algebra::{check_consistency, common_refinement, ObservationSpace};
use crate::error::Error;
use crate::field::{ExactField, OrderedField};

pub use vertex::{vertex_enumerate, DEFAULT_MAX_DIM};

/// `A x = b` with one column per grounding variable.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearSystem<F> {
    pub a: Vec<Vec<F>>,
    pub b: Vec<F>,
    /// Column labels (refinement atom names).
    pub labels: Vec<String>,
    /// Row labels: `test:atom` or `total`.
    pub row_labels: Vec<String>,
}

impl<F: OrderedField> LinearSystem<F> {
    pub fn new(a: Vec<Vec<F>>, b: Vec<F>, labels: Vec<String>, row_labels: Vec<String>) -> Result<Self, Error> {
        if a.len() != b.len() || a.len() != row_labels.len() {
            return Err(Error::Parameterization(format!(
                "{} rows, {} right-hand sides, {} row labels",
                a.len(),
                b.len(),
                row_labels.len()
            )));
        }
        if let Some(row) = a.iter().find(|row| row.len() != labels.len()) {
            return Err(Error::Parameterization(format!("row of length {} for {} variables", row.len(), labels.len())));
        }
        Ok(Self { a, b, labels, row_labels })
    }

    pub fn rows(&self) -> usize {
        self.a.len()
    }

    pub fn vars(&self) -> usize {
        self.labels.len()
    }

    pub fn var_index(&self, label: &str) -> Result<usize, Error> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownVariable(label.to_string()))
    }

    /// Whether `x` satisfies every equation exactly.
    pub fn satisfied_by(&self, x: &[F]) -> bool {
        x.len() == self.vars() && linalg::mat_vec(&self.a, x).iter().zip(&self.b).all(|(l, r)| l.eq_field(r))
    }

    /// Whether `A d = 0`.
    pub fn annihilates(&self, d: &[F]) -> bool {
        d.len() == self.vars() && linalg::mat_vec(&self.a, d).iter().all(OrderedField::is_zero)
    }

    fn with_row(mut self, row: Vec<F>, rhs: F, label: String) -> Self {
        self.a.push(row);
        self.b.push(rhs);
        self.row_labels.push(label);
        self
    }
}

/// Builds one equation per (test, atom) plus the total-mass equation. The
/// variables are the atoms of the common refinement.
pub fn assemble_system<F: OrderedField>(os: &ObservationSpace<F>) -> Result<LinearSystem<F>, Error> {
    let report = check_consistency(os);
    if !report.is_consistent() {
        return Err(Error::Inconsistent(report.violations.len()));
    }
    let refinement = common_refinement(os);
    let space = os.space();
    let labels: Vec<String> = refinement
        .atoms()
        .iter()
        .map(|&atom| match atom.len() {
            1 => space.labels()[atom.first().unwrap()].clone(),
            _ => space.describe(atom),
        })
        .collect();
    let mut a = Vec::new();
    let mut b = Vec::new();
    let mut row_labels = Vec::new();
    for test in os.tests() {
        for (&atom, p) in test.partition().atoms().iter().zip(test.probs()) {
            a.push(
                refinement
                    .atoms()
                    .iter()
                    .map(|v| if v.is_subset(atom) { F::one() } else { F::zero() })
                    .collect(),
            );
            b.push(p.clone());
            row_labels.push(format!("{}:{}", test.name(), space.describe(atom)));
        }
    }
    a.push(vec![F::one(); refinement.len()]);
    b.push(F::one());
    row_labels.push("total".into());
    LinearSystem::new(a, b, labels, row_labels)
}

/// Witness that a linear system has no solution at all: `yᵀA = 0`, `yᵀb ≠ 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct NoSolution<F> {
    pub y: Vec<F>,
}

impl<F: OrderedField> NoSolution<F> {
    pub fn verifies(&self, sys: &LinearSystem<F>) -> bool {
        if self.y.len() != sys.rows() {
            return false;
        }
        let combo_zero = (0..sys.vars()).all(|c| {
            let col: Vec<F> = sys.a.iter().map(|row| row[c].clone()).collect();
            linalg::dot(&self.y, &col).is_zero()
        });
        combo_zero && !linalg::dot(&self.y, &sys.b).is_zero()
    }
}

impl<F: OrderedField> fmt::Display for NoSolution<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ys: Vec<String> = self.y.iter().map(ToString::to_string).collect();
        write!(f, "no solution; row multipliers ({})", ys.join(", "))
    }
}

/// Every solution of a system: `particular + Σ tᵢ·basisᵢ`.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineSolutionSet<F> {
    pub particular: Vec<F>,
    pub basis: Vec<Vec<F>>,
    pub system: LinearSystem<F>,
}

impl<F: OrderedField> AffineSolutionSet<F> {
    pub fn labels(&self) -> &[String] {
        &self.system.labels
    }

    /// Null-space dimension.
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// The solution at parameters `t`.
    pub fn point(&self, t: &[F]) -> Vec<F> {
        assert_eq!(t.len(), self.dim(), "one parameter per basis vector");
        let mut x = self.particular.clone();
        for (ti, v) in t.iter().zip(&self.basis) {
            for (xi, vi) in x.iter_mut().zip(v) {
                *xi = xi.clone() + ti.clone() * vi.clone();
            }
        }
        x
    }

    pub fn contains(&self, x: &[F]) -> bool {
        self.system.satisfied_by(x)
    }

    /// Whether `d` is a direction of the set.
    pub fn contains_direction(&self, d: &[F]) -> bool {
        self.system.annihilates(d)
    }

    /// Same set of points, regardless of how it is parameterized.
    pub fn same_set(&self, other: &Self) -> bool {
        let n = self.system.vars();
        self.dim() == other.dim()
            && other.contains(&self.particular)
            && self.contains(&other.particular)
            && self.basis.iter().all(|v| other.contains_direction(v))
            && linalg::rank(&self.basis, n) == self.dim()
    }

    /// Re-expresses the set with a new particular solution and basis, which
    /// must describe the same points.
    pub fn reparameterize(&self, particular: Vec<F>, basis: Vec<Vec<F>>) -> Result<Self, Error> {
        let n = self.system.vars();
        if !self.contains(&particular) {
            return Err(Error::Parameterization("particular point is not a solution".into()));
        }
        if basis.len() != self.dim() {
            return Err(Error::Parameterization(format!("{} directions for dimension {}", basis.len(), self.dim())));
        }
        if !basis.iter().all(|v| self.contains_direction(v)) {
            return Err(Error::Parameterization("a direction leaves the solution set".into()));
        }
        if linalg::rank(&basis, n) != basis.len() {
            return Err(Error::Parameterization("directions are linearly dependent".into()));
        }
        Ok(Self { particular, basis, system: self.system.clone() })
    }

    /// Uses the listed variables themselves as parameters: the particular
    /// solution is zero on them and basis vector `j` is one on `vars[j]` and
    /// zero on the others.
    pub fn parameterize_by(&self, vars: &[&str]) -> Result<Self, Error> {
        let idx: Vec<usize> = vars.iter().map(|v| self.system.var_index(v)).collect::<Result<_, _>>()?;
        if idx.len() != self.dim() {
            return Err(Error::Parameterization(format!("{} parameters for dimension {}", idx.len(), self.dim())));
        }
        let k = idx.len();
        // Columns of B⁻¹ give the new basis: solve Bᵀ cⱼ = eⱼ where B[i][l] = basis_i[idx_l].
        let bt: Vec<Vec<F>> = (0..k).map(|l| (0..k).map(|i| self.basis[i][idx[l]].clone()).collect()).collect();
        let mut basis = Vec::with_capacity(k);
        for j in 0..k {
            let e: Vec<F> = (0..k).map(|l| if l == j { F::one() } else { F::zero() }).collect();
            let c = linalg::solve_square(&bt, &e)
                .ok_or_else(|| Error::Parameterization(format!("{vars:?} do not parameterize the set")))?;
            let mut u = vec![F::zero(); self.system.vars()];
            for (ci, bi) in c.iter().zip(&self.basis) {
                for (uj, bj) in u.iter_mut().zip(bi) {
                    *uj = uj.clone() + ci.clone() * bj.clone();
                }
            }
            basis.push(u);
        }
        let mut particular = self.particular.clone();
        for (l, &i) in idx.iter().enumerate() {
            let coef = self.particular[i].clone();
            for (pj, uj) in particular.iter_mut().zip(&basis[l]) {
                *pj = pj.clone() - coef.clone() * uj.clone();
            }
        }
        Ok(Self { particular, basis, system: self.system.clone() })
    }
}

/// Exact Gauss–Jordan elimination with full pivoting. Redundant rows are
/// kept and drop out during reduction.
pub fn solve_affine<F: OrderedField>(sys: &LinearSystem<F>) -> Result<AffineSolutionSet<F>, NoSolution<F>> {
    let n = sys.vars();
    let red = linalg::reduce(&sys.a, &sys.b, n);
    if let Some(i) = red.inconsistent_row() {
        return Err(NoSolution { y: red.ops[i].clone() });
    }
    let mut particular = vec![F::zero(); n];
    let mut is_pivot = vec![false; n];
    for (i, &c) in red.pivots.iter().enumerate() {
        particular[c] = red.rhs[i].clone();
        is_pivot[c] = true;
    }
    let basis = (0..n)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut v = vec![F::zero(); n];
            v[f] = F::one();
            for (i, &c) in red.pivots.iter().enumerate() {
                v[c] = -red.rows[i][f].clone();
            }
            v
        })
        .collect();
    Ok(AffineSolutionSet { particular, basis, system: sys.clone() })
}

/// Adds the equalities `x_i = x_j` and re-solves.
pub fn apply_constraints<F: OrderedField>(s: &AffineSolutionSet<F>, equalities: &[(&str, &str)]) -> Result<AffineSolutionSet<F>, Error> {
    let mut sys = s.system.clone();
    for &(u, v) in equalities {
        let (i, j) = (sys.var_index(u)?, sys.var_index(v)?);
        if i == j {
            continue;
        }
        let mut row = vec![F::zero(); sys.vars()];
        row[i] = F::one();
        row[j] = -F::one();
        sys = sys.with_row(row, F::zero(), format!("{u}={v}"));
    }
    solve_affine(&sys).map_err(|e| Error::Unsolvable(e.to_string()))
}

/// Farkas-type proof that `A x = b` has no solution with `x ≥ 0`:
/// `yᵀA ≥ 0` componentwise and `yᵀb < 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct FarkasCertificate<F> {
    pub y: Vec<F>,
}

impl<F: OrderedField> FarkasCertificate<F> {
    /// `yᵀA`, one entry per variable.
    pub fn combination(&self, sys: &LinearSystem<F>) -> Vec<F> {
        (0..sys.vars())
            .map(|c| {
                let col: Vec<F> = sys.a.iter().map(|row| row[c].clone()).collect();
                linalg::dot(&self.y, &col)
            })
            .collect()
    }

    pub fn bound(&self, sys: &LinearSystem<F>) -> F {
        linalg::dot(&self.y, &sys.b)
    }

    pub fn verifies(&self, sys: &LinearSystem<F>) -> bool {
        self.y.len() == sys.rows()
            && self.combination(sys).iter().all(OrderedField::is_nonnegative)
            && self.bound(sys).is_negative()
    }
}

/// Closed range of a single parameter; `None` bounds are infinite.
#[derive(Clone, Debug, PartialEq)]
pub struct Interval<F> {
    pub lower: Option<F>,
    pub upper: Option<F>,
    /// Set when some coordinate is negative regardless of the parameter.
    pub blocked: bool,
}

impl<F: OrderedField> Interval<F> {
    pub fn is_empty(&self) -> bool {
        self.blocked
            || matches!((&self.lower, &self.upper), (Some(m), Some(mm)) if m.cmp_field(mm) == std::cmp::Ordering::Greater)
    }

    pub fn contains(&self, t: &F) -> bool {
        !self.blocked
            && self.lower.as_ref().map_or(true, |m| m.cmp_field(t) != std::cmp::Ordering::Greater)
            && self.upper.as_ref().map_or(true, |mm| t.cmp_field(mm) != std::cmp::Ordering::Greater)
    }
}

impl<F: OrderedField> fmt::Display for Interval<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lo = self.lower.as_ref().map_or("-inf".to_string(), ToString::to_string);
        let hi = self.upper.as_ref().map_or("+inf".to_string(), ToString::to_string);
        write!(f, "[{lo}, {hi}]")?;
        if self.is_empty() {
            write!(f, " (empty)")?;
        }
        Ok(())
    }
}

/// For a one-dimensional set, the parameter range on which every coordinate
/// of `particular + t·basis₀` is nonnegative. Works over any field.
pub fn parametric_interval<F: OrderedField>(s: &AffineSolutionSet<F>) -> Option<Interval<F>> {
    if s.dim() != 1 {
        return None;
    }
    let mut interval: Interval<F> = Interval { lower: None, upper: None, blocked: false };
    for (p, n) in s.particular.iter().zip(&s.basis[0]) {
        if n.is_zero() {
            interval.blocked |= p.is_negative();
            continue;
        }
        let bound = -p.clone() / n.clone();
        if n.is_positive() {
            interval.lower = Some(match interval.lower.take() {
                Some(m) => m.max_field(bound),
                None => bound,
            });
        } else {
            interval.upper = Some(match interval.upper.take() {
                Some(mm) => mm.min_field(bound),
                None => bound,
            });
        }
    }
    Some(interval)
}

#[derive(Clone, Debug, PartialEq)]
pub enum Feasibility<F> {
    Witness(Vec<F>),
    Infeasible(FarkasCertificate<F>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct FeasibilityReport<F> {
    pub result: Feasibility<F>,
    /// Present when the null space is one-dimensional.
    pub interval: Option<Interval<F>>,
}

impl<F: OrderedField> FeasibilityReport<F> {
    pub fn is_feasible(&self) -> bool {
        matches!(self.result, Feasibility::Witness(_))
    }
}

/// Decides whether some grounding is nonnegative. Exact fields only.
pub fn nonneg_feasibility<F: ExactField>(s: &AffineSolutionSet<F>) -> FeasibilityReport<F> {
    let sys = &s.system;
    let result = match simplex::phase1(&sys.a, &sys.b, sys.vars()) {
        simplex::Phase1::Feasible(x) => Feasibility::Witness(x),
        simplex::Phase1::Infeasible(y) => Feasibility::Infeasible(FarkasCertificate { y }),
    };
    FeasibilityReport { result, interval: parametric_interval(s) }
}

/// One value per grounding variable, summing to one.
#[derive(Clone, Debug, PartialEq)]
pub struct SignedGrounding<F> {
    pub values: Vec<F>,
    pub labels: Vec<String>,
}

impl<F: OrderedField> SignedGrounding<F> {
    pub fn new(values: Vec<F>, labels: Vec<String>) -> Result<Self, Error> {
        if values.len() != labels.len() {
            return Err(Error::Parameterization(format!("{} values for {} labels", values.len(), labels.len())));
        }
        let total = values.iter().cloned().fold(F::zero(), |a, v| a + v);
        if !total.eq_field(&F::one()) {
            return Err(Error::Parameterization(format!("grounding sums to {total}, not 1")));
        }
        Ok(Self { values, labels })
    }

    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(OrderedField::is_nonnegative)
    }

    pub fn value(&self, label: &str) -> Option<&F> {
        self.labels.iter().position(|l| l == label).map(|i| &self.values[i])
    }
}

/// Variable permutation `i ↦ perm[i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self, Error> {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            if i >= images.len() || std::mem::replace(&mut seen[i], true) {
                return Err(Error::NotAutomorphism(format!("{images:?} is not a permutation")));
            }
        }
        Ok(Self(images))
    }

    pub fn identity(n: usize) -> Self {
        Self((0..n).collect())
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    /// `(πv)[π(i)] = v[i]`.
    pub fn apply<T: Clone>(&self, v: &[T]) -> Vec<T> {
        let mut out = v.to_vec();
        for (i, &j) in self.0.iter().enumerate() {
            out[j] = v[i].clone();
        }
        out
    }

    pub fn order(&self) -> usize {
        let mut k = 1;
        let mut cur = self.0.clone();
        while cur.iter().enumerate().any(|(i, &j)| i != j) {
            cur = cur.iter().map(|&j| self.0[j]).collect();
            k += 1;
        }
        k
    }

    /// Pairs `(i, π(i))` with `i < π(i)`; for an involution these are the
    /// equalities defining symmetric solutions.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.0.iter().enumerate().filter(|&(i, &j)| i < j).map(|(i, &j)| (i, j)).collect()
    }
}

/// Maps a solution to the average of its orbit under an automorphism.
#[derive(Clone, Debug)]
pub struct Symmetrizer {
    perm: Permutation,
}

impl Symmetrizer {
    /// For an involution this is `(v + πv)/2`.
    pub fn apply<F: OrderedField>(&self, v: &[F]) -> Vec<F> {
        let k = self.perm.order();
        let mut acc = v.to_vec();
        let mut cur = v.to_vec();
        for _ in 1..k {
            cur = self.perm.apply(&cur);
            for (a, c) in acc.iter_mut().zip(&cur) {
                *a = a.clone() + c.clone();
            }
        }
        let inv = F::one() / F::from_ratio(k as i64, 1);
        acc.into_iter().map(|a| a * inv.clone()).collect()
    }

    pub fn permutation(&self) -> &Permutation {
        &self.perm
    }
}

/// Checks that `perm` maps the equation set of the system onto itself and
/// returns the averaging map.
pub fn symmetrize<F: OrderedField>(s: &AffineSolutionSet<F>, perm: &Permutation) -> Result<Symmetrizer, Error> {
    let sys = &s.system;
    if perm.images().len() != sys.vars() {
        return Err(Error::NotAutomorphism(format!("{} images for {} variables", perm.images().len(), sys.vars())));
    }
    let mut unmatched: Vec<usize> = (0..sys.rows()).collect();
    for (row, rhs) in sys.a.iter().zip(&sys.b) {
        let image = perm.apply(row);
        let hit = unmatched
            .iter()
            .position(|&k| sys.b[k].eq_field(rhs) && sys.a[k].iter().zip(&image).all(|(x, y)| x.eq_field(y)));
        match hit {
            Some(pos) => {
                unmatched.swap_remove(pos);
            }
            None => {
                return Err(Error::NotAutomorphism(format!(
                    "image of an equation with right-hand side {rhs} is not an equation of the system"
                )))
            }
        }
    }
    Ok(Symmetrizer { perm: perm.clone() })
}

/// Mean and variance of a random variable under a signed grounding.
#[derive(Clone, Debug, PartialEq)]
pub struct Moments<F> {
    pub mean: F,
    /// `E[(X - E X)²]`, possibly negative; no square root is taken.
    pub variance: F,
}

pub fn signed_moments<F: OrderedField>(g: &SignedGrounding<F>, rv: &[F]) -> Result<Moments<F>, Error> {
    if rv.len() != g.values.len() {
        return Err(Error::Parameterization(format!("random variable has {} values for {} atoms", rv.len(), g.values.len())));
    }
    let mean = linalg::dot(&g.values, rv);
    let sq: Vec<F> = rv.iter().map(|x| (x.clone() - mean.clone()) * (x.clone() - mean.clone())).collect();
    let variance = linalg::dot(&g.values, &sq);
    Ok(Moments { mean, variance })
}

#[cfg(test)]
mod tests;
