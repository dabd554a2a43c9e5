//! Exact observation spaces for the worked examples.
//!
//! Probabilities are transcribed as exact field elements. The Feynman
//! spaces take Pauli expectations, which [`ExactQubit`] computes exactly
//! from rational complex amplitudes.

use std::fmt;
use std::str::FromStr;

use crate::algebra::{Event, ObservationSpace, PartialDistribution, Partition, SampleSpace};
use crate::error::Error;
use crate::field::{parse_rational, Approx, OrderedField, QuadExt, Rational};

fn partition_by(n: usize, classes: usize, class_of: impl Fn(usize) -> usize) -> Partition {
    let atoms = (0..classes)
        .map(|k| Event::from_indices((0..n).filter(|&i| class_of(i) == k), n).expect("indices in range"))
        .collect();
    Partition::new(n, atoms).expect("fixture partitions are valid")
}

fn build<F: OrderedField>(labels: Vec<String>, tests: Vec<(&str, Partition, Vec<F>)>) -> Result<ObservationSpace<F>, Error> {
    let space = SampleSpace::new(labels)?;
    let tests = tests
        .into_iter()
        .map(|(name, p, probs)| PartialDistribution::new(name, p, probs))
        .collect::<Result<Vec<_>, _>>()?;
    ObservationSpace::new(space, tests)
}

fn sign_labels(bits: usize) -> Vec<String> {
    (0..1usize << bits)
        .map(|i| (0..bits).rev().map(|b| if i >> b & 1 == 1 { '+' } else { '-' }).collect())
        .collect()
}

fn r<F: OrderedField>(n: i64, d: i64) -> F {
    F::from_ratio(n, d)
}

/// Boxes with bits `(l, r)`; tests: left window, right window, `l = r`.
pub fn piponi<F: OrderedField>() -> ObservationSpace<F> {
    let labels = ["00", "01", "10", "11"].map(String::from).to_vec();
    // Point index i = 2l + r.
    let left = partition_by(4, 2, |i| i >> 1);
    let right = partition_by(4, 2, |i| i & 1);
    let equal = partition_by(4, 2, |i| usize::from((i >> 1) != (i & 1)));
    build(
        labels,
        vec![
            ("left", left, vec![r(0, 1), r(1, 1)]),
            ("right", right, vec![r(0, 1), r(1, 1)]),
            ("equal", equal, vec![r(0, 1), r(1, 1)]),
        ],
    )
    .expect("piponi fixture is valid")
}

fn check_expectation<F: OrderedField>(name: &str, v: &F) -> Result<(), Error> {
    if v.abs().cmp_field(&F::one()) == std::cmp::Ordering::Greater {
        return Err(Error::Quantum(format!("⟨{name}⟩ = {v} lies outside [-1, 1]")));
    }
    Ok(())
}

fn pm<F: OrderedField>(v: &F) -> Vec<F> {
    let half = F::from_ratio(1, 2);
    vec![(F::one() + v.clone()) * half.clone(), (F::one() - v.clone()) * half]
}

/// Tests `Z` and `X` on one qubit; points `++, +-, -+, --` (Z first).
pub fn feynman2<F: OrderedField>(z: F, x: F) -> Result<ObservationSpace<F>, Error> {
    check_expectation("Z", &z)?;
    check_expectation("X", &x)?;
    // Label order ++, +-, -+, --: class 0 is '+'.
    let zt = partition_by(4, 2, |i| i >> 1);
    let xt = partition_by(4, 2, |i| i & 1);
    let labels = ["++", "+-", "-+", "--"].map(String::from).to_vec();
    build(labels, vec![("Z", zt, pm(&z)), ("X", xt, pm(&x))])
}

/// Tests `X`, `Y`, `Z` on one qubit; points `--- … +++` (X first, `+` as
/// binary one). Each test lists its `-` atom first.
pub fn feynman3<F: OrderedField>(x: F, y: F, z: F) -> Result<ObservationSpace<F>, Error> {
    for (n, v) in [("X", &x), ("Y", &y), ("Z", &z)] {
        check_expectation(n, v)?;
    }
    let minus_plus = |v: &F| {
        let mut p = pm(v);
        p.reverse();
        p
    };
    build(
        sign_labels(3),
        vec![
            ("X", partition_by(8, 2, |i| i >> 2 & 1), minus_plus(&x)),
            ("Y", partition_by(8, 2, |i| i >> 1 & 1), minus_plus(&y)),
            ("Z", partition_by(8, 2, |i| i & 1), minus_plus(&z)),
        ],
    )
}

fn quad(q: (i64, i64), s: (i64, i64)) -> QuadExt {
    let s: Rational = r(s.0, s.1);
    if s.is_zero() {
        return QuadExt::rational(r(q.0, q.1));
    }
    QuadExt::new(r(q.0, q.1), s, 2).expect("2 is square-free")
}

fn schneider_tests(ac: Vec<QuadExt>) -> Result<ObservationSpace<QuadExt>, Error> {
    let quarter = quad((1, 4), (0, 1));
    let hi = quad((1, 4), (1, 8));
    let lo = quad((1, 4), (-1, 8));
    // Point abc in binary, '+' as one, a most significant.
    build(
        sign_labels(3),
        vec![
            ("AB", partition_by(8, 4, |i| i >> 1), vec![quarter.clone(), quarter.clone(), quarter.clone(), quarter]),
            ("BC", partition_by(8, 4, |i| i & 3), vec![hi.clone(), lo.clone(), lo, hi]),
            ("AC", partition_by(8, 4, |i| (i >> 2) << 1 | (i & 1)), ac),
        ],
    )
}

/// Three polarizer orientations `A, B, C` at mutual angles π/4, π/8, 3π/8
/// on a maximally entangled photon pair, reduced to the symmetric tests
/// `AB`, `BC`, `AC`. Lives over `ℚ(√2)`.
pub fn schneider() -> ObservationSpace<QuadExt> {
    let hi = quad((1, 4), (1, 8));
    let lo = quad((1, 4), (-1, 8));
    schneider_tests(vec![lo.clone(), hi.clone(), hi, lo]).expect("schneider fixture is valid")
}

/// Schneider's space with `P_AC(-*-)` and `P_AC(+*-)` both set to 1/4, so
/// the `AC` test still sums to one but disagrees with `AB` on the value of
/// `A`.
pub fn schneider_perturbed() -> ObservationSpace<QuadExt> {
    let quarter = quad((1, 4), (0, 1));
    let hi = quad((1, 4), (1, 8));
    let lo = quad((1, 4), (-1, 8));
    schneider_tests(vec![quarter.clone(), hi, quarter, lo]).expect("perturbed fixture is structurally valid")
}

/// Hardy's two-qubit experiment. Points are `Z_A X_A Z_B X_B` in binary,
/// with detector symbol 0 for outcome `+1` and 1 for `-1`.
pub fn hardy<F: OrderedField>() -> ObservationSpace<F> {
    let labels: Vec<String> = (0..16).map(|i| format!("{i:04b}")).collect();
    let bit = |i: usize, pos: usize| i >> (3 - pos) & 1;
    let pair = move |p: usize, q: usize| move |i: usize| 2 * bit(i, p) + bit(i, q);
    build(
        labels,
        vec![
            ("ZZ", partition_by(16, 4, pair(0, 2)), vec![r(1, 3), r(1, 3), r(1, 3), r(0, 1)]),
            ("ZX", partition_by(16, 4, pair(0, 3)), vec![r(0, 1), r(2, 3), r(1, 6), r(1, 6)]),
            ("XZ", partition_by(16, 4, pair(1, 2)), vec![r(0, 1), r(1, 6), r(2, 3), r(1, 6)]),
            ("XX", partition_by(16, 4, pair(1, 3)), vec![r(1, 12), r(1, 12), r(1, 12), r(3, 4)]),
        ],
    )
    .expect("hardy fixture is valid")
}

/// The qubit swap `Z_A X_A Z_B X_B → Z_B X_B Z_A X_A` on Hardy's points.
pub fn hardy_swap() -> Vec<usize> {
    (0..16).map(|i| (i & 3) << 2 | i >> 2).collect()
}

/// A complex number with rational parts.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexRational {
    pub re: Rational,
    pub im: Rational,
}

impl ComplexRational {
    fn norm_sqr(&self) -> Rational {
        &self.re * &self.re + &self.im * &self.im
    }
}

impl FromStr for ComplexRational {
    type Err = Error;

    /// `re`, `im i`, `re+im i`, `re-im i`; a bare `i` is the unit.
    fn from_str(text: &str) -> Result<Self, Error> {
        let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let Some(body) = t.strip_suffix('i') else {
            return Ok(Self { re: parse_rational(&t)?, im: Rational::zero() });
        };
        let split = body.char_indices().filter(|&(i, c)| i > 0 && (c == '+' || c == '-')).map(|(i, _)| i).last();
        let (re_text, im_text) = match split {
            Some(i) => (&body[..i], &body[i..]),
            None => ("0", body),
        };
        let im = match im_text {
            "" | "+" => Rational::one(),
            "-" => -Rational::one(),
            other => parse_rational(other)?,
        };
        Ok(Self { re: parse_rational(re_text)?, im })
    }
}

impl fmt::Display for ComplexRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", self.re),
            (true, false) => write!(f, "{} i", self.im),
            (false, false) if self.im < Rational::zero() => write!(f, "{}-{} i", self.re, -self.im.clone()),
            (false, false) => write!(f, "{}+{} i", self.re, self.im),
        }
    }
}

/// A qubit `a|0⟩ + b|1⟩` with rational complex amplitudes, not necessarily
/// normalized; expectations are divided by `|a|² + |b|²` exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactQubit {
    pub a: ComplexRational,
    pub b: ComplexRational,
}

impl ExactQubit {
    pub fn zero_state() -> Self {
        Self {
            a: ComplexRational { re: Rational::one(), im: Rational::zero() },
            b: ComplexRational { re: Rational::zero(), im: Rational::zero() },
        }
    }

    fn norm(&self) -> Rational {
        self.a.norm_sqr() + self.b.norm_sqr()
    }

    /// `(⟨X⟩, ⟨Y⟩, ⟨Z⟩)`
    pub fn expectations(&self) -> (Rational, Rational, Rational) {
        let n = self.norm();
        let two: Rational = r(2, 1);
        // conj(a)·b
        let re = &self.a.re * &self.b.re + &self.a.im * &self.b.im;
        let im = &self.a.re * &self.b.im - &self.a.im * &self.b.re;
        (&two * re / &n, two * im / &n, (self.a.norm_sqr() - self.b.norm_sqr()) / n)
    }

    pub fn amplitudes(&self) -> [num_complex::Complex64; 2] {
        let f = |z: &ComplexRational| num_complex::Complex64::new(z.re.to_f64(), z.im.to_f64());
        [f(&self.a), f(&self.b)]
    }
}

impl FromStr for ExactQubit {
    type Err = Error;

    /// Two amplitude literals separated by a comma, e.g. `3/5,4/5 i`.
    fn from_str(text: &str) -> Result<Self, Error> {
        let (a, b) = text
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("state {text:?} needs two comma-separated amplitudes")))?;
        let q = Self { a: a.parse()?, b: b.parse()? };
        if q.norm().is_zero() {
            return Err(Error::Parse(format!("state {text:?} is the zero vector")));
        }
        Ok(q)
    }
}

impl fmt::Display for ExactQubit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.a, self.b)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FixtureName {
    Piponi,
    Feynman2,
    Feynman3,
    Schneider,
    Hardy,
}

impl FixtureName {
    pub const ALL: [FixtureName; 5] =
        [FixtureName::Piponi, FixtureName::Feynman2, FixtureName::Feynman3, FixtureName::Schneider, FixtureName::Hardy];

    pub fn takes_state(self) -> bool {
        matches!(self, FixtureName::Feynman2 | FixtureName::Feynman3)
    }
}

impl fmt::Display for FixtureName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FixtureName::Piponi => "piponi",
            FixtureName::Feynman2 => "feynman2",
            FixtureName::Feynman3 => "feynman3",
            FixtureName::Schneider => "schneider",
            FixtureName::Hardy => "hardy",
        })
    }
}

impl FromStr for FixtureName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        Self::ALL
            .into_iter()
            .find(|n| n.to_string() == s)
            .ok_or_else(|| Error::UnknownFixture(s.to_string()))
    }
}

/// An observation space over a field chosen at runtime.
#[derive(Clone, Debug, PartialEq)]
pub enum AnySpace {
    Rational(ObservationSpace<Rational>),
    Quadratic(ObservationSpace<QuadExt>),
    Float(ObservationSpace<Approx>),
}

/// Builds a fixture; the Feynman spaces use `state` (default `|0⟩`).
pub fn fixture(name: FixtureName, state: Option<&ExactQubit>) -> Result<AnySpace, Error> {
    let q = state.cloned().unwrap_or_else(ExactQubit::zero_state);
    let (x, y, z) = q.expectations();
    Ok(match name {
        FixtureName::Piponi => AnySpace::Rational(piponi()),
        FixtureName::Feynman2 => AnySpace::Rational(feynman2(z, x)?),
        FixtureName::Feynman3 => AnySpace::Rational(feynman3(x, y, z)?),
        FixtureName::Schneider => AnySpace::Quadratic(schneider()),
        FixtureName::Hardy => AnySpace::Rational(hardy()),
    })
}
