//! Number systems the solvers run over.
//!
//! Every solver is generic over [`OrderedField`]. Two exact instances are
//! shipped, [`Rational`] and [`QuadExt`] (values `q + s·√d`), plus the
//! tolerance-tagged float [`Approx`]. Algorithms that must produce exact
//! certificates (simplex, vertex enumeration) additionally require the
//! [`ExactField`] marker, which `Approx` does not implement.
//!
//! The dynamic [`Scalar`] enum and [`FieldKind`] are used at the edges
//! (documents, CLI) where the field is only known at runtime.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;

use crate::error::Error;

/// Arbitrary-precision rational, always in lowest terms with a positive
/// denominator.
pub type Rational = BigRational;

/// An ordered field with decidable sign.
pub trait OrderedField:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialEq
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    /// `num / den`; `den` must be nonzero.
    fn from_ratio(num: i64, den: i64) -> Self;
    fn from_rational(r: &Rational) -> Self;
    /// Sign relative to zero. For `Approx` this honours the tolerance.
    fn sign(&self) -> Ordering;
    /// Rough magnitude used for pivot selection and printing.
    fn to_f64(&self) -> f64;

    fn is_zero(&self) -> bool {
        self.sign() == Ordering::Equal
    }
    fn is_positive(&self) -> bool {
        self.sign() == Ordering::Greater
    }
    fn is_negative(&self) -> bool {
        self.sign() == Ordering::Less
    }
    fn is_nonnegative(&self) -> bool {
        self.sign() != Ordering::Less
    }
    fn abs(&self) -> Self {
        if self.is_negative() {
            -self.clone()
        } else {
            self.clone()
        }
    }
    /// Field comparison: `self` vs `other` via the sign of the difference.
    fn cmp_field(&self, other: &Self) -> Ordering {
        (self.clone() - other.clone()).sign()
    }
    fn eq_field(&self, other: &Self) -> bool {
        self.cmp_field(other) == Ordering::Equal
    }
    fn max_field(self, other: Self) -> Self {
        if self.cmp_field(&other) == Ordering::Less {
            other
        } else {
            self
        }
    }
    fn min_field(self, other: Self) -> Self {
        if self.cmp_field(&other) == Ordering::Greater {
            other
        } else {
            self
        }
    }
}

/// Fields with exact arithmetic and exact sign decisions.
pub trait ExactField: OrderedField {}

impl OrderedField for Rational {
    fn zero() -> Self {
        num_traits::Zero::zero()
    }
    fn one() -> Self {
        num_traits::One::one()
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        Rational::new(BigInt::from(num), BigInt::from(den))
    }
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn sign(&self) -> Ordering {
        if Signed::is_positive(self) {
            Ordering::Greater
        } else if Signed::is_negative(self) {
            Ordering::Less
        } else {
            Ordering::Equal
        }
    }
    fn to_f64(&self) -> f64 {
        num_traits::ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

impl ExactField for Rational {}

/// Parses `"n"` or `"n/d"`, allowing a leading `+`.
pub fn parse_rational(text: &str) -> Result<Rational, Error> {
    let t = text.trim();
    let t = t.strip_prefix('+').unwrap_or(t);
    if t.is_empty() {
        return Err(Error::Parse(format!("empty rational literal in {text:?}")));
    }
    let r = Rational::from_str(t).map_err(|_| Error::Parse(format!("bad rational literal {text:?}")))?;
    Ok(r)
}

fn is_square_free(d: u64) -> bool {
    if d < 2 {
        return false;
    }
    let mut k = 2u64;
    while k.saturating_mul(k) <= d {
        if d % (k * k) == 0 {
            return false;
        }
        k += 1;
    }
    true
}

/// An element `q + s·√d` of the real quadratic field `ℚ(√d)`.
///
/// `d` is a square-free integer ≥ 2. Elements with `s = 0` are rational and
/// combine with any `d`; internally they carry `d = 0`. Combining two
/// irrational elements with different `d` panics: the two values live in
/// different fields.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadExt {
    q: Rational,
    s: Rational,
    d: u64,
}

impl QuadExt {
    pub fn new(q: Rational, s: Rational, d: u64) -> Result<Self, Error> {
        if !is_square_free(d) {
            return Err(Error::Field(format!("√{d} does not generate a quadratic field (d must be square-free and ≥ 2)")));
        }
        Ok(Self::normalized(q, s, d))
    }

    pub fn rational(q: Rational) -> Self {
        Self { q, s: Rational::zero(), d: 0 }
    }

    /// `√d` itself.
    pub fn sqrt(d: u64) -> Result<Self, Error> {
        Self::new(Rational::zero(), Rational::one(), d)
    }

    fn normalized(q: Rational, s: Rational, d: u64) -> Self {
        if s.is_zero() {
            Self { q, s, d: 0 }
        } else {
            Self { q, s, d }
        }
    }

    pub fn rational_part(&self) -> &Rational {
        &self.q
    }
    pub fn surd_part(&self) -> &Rational {
        &self.s
    }
    /// The radicand, or `None` for a rational element.
    pub fn radicand(&self) -> Option<u64> {
        (self.d != 0).then_some(self.d)
    }

    fn join_radicand(&self, other: &Self) -> u64 {
        match (self.d, other.d) {
            (0, d) | (d, 0) => d,
            (a, b) if a == b => a,
            (a, b) => panic!("cannot combine elements of ℚ(√{a}) and ℚ(√{b})"),
        }
    }

    /// `q - s·√d`.
    pub fn conjugate(&self) -> Self {
        Self::normalized(self.q.clone(), -self.s.clone(), self.d)
    }

    /// Field norm `q² - s²d`.
    pub fn norm(&self) -> Rational {
        &self.q * &self.q - &self.s * &self.s * Rational::from_integer(BigInt::from(self.d))
    }
}

impl Add for QuadExt {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let d = self.join_radicand(&rhs);
        Self::normalized(self.q + rhs.q, self.s + rhs.s, d)
    }
}

impl Sub for QuadExt {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let d = self.join_radicand(&rhs);
        Self::normalized(self.q - rhs.q, self.s - rhs.s, d)
    }
}

impl Neg for QuadExt {
    type Output = Self;
    fn neg(self) -> Self {
        Self::normalized(-self.q, -self.s, self.d)
    }
}

impl Mul for QuadExt {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let d = self.join_radicand(&rhs);
        let dd = Rational::from_integer(BigInt::from(d));
        let q = &self.q * &rhs.q + &self.s * &rhs.s * dd;
        let s = &self.q * &rhs.s + &self.s * &rhs.q;
        Self::normalized(q, s, d)
    }
}

impl Div for QuadExt {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        let norm = rhs.norm();
        assert!(!norm.is_zero(), "division by zero in quadratic field");
        let inv = rhs.conjugate();
        let num = self * inv;
        Self::normalized(num.q / &norm, num.s / &norm, num.d)
    }
}

impl OrderedField for QuadExt {
    fn zero() -> Self {
        Self::rational(Rational::zero())
    }
    fn one() -> Self {
        Self::rational(Rational::one())
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        Self::rational(<Rational as OrderedField>::from_ratio(num, den))
    }
    fn from_rational(r: &Rational) -> Self {
        Self::rational(r.clone())
    }
    fn sign(&self) -> Ordering {
        let sq = OrderedField::sign(&self.q);
        let ss = OrderedField::sign(&self.s);
        match (sq, ss) {
            (_, Ordering::Equal) => sq,
            (Ordering::Equal, _) => ss,
            _ if sq == ss => sq,
            _ => {
                // Opposite signs: the larger of q² and s²d wins. Equality would
                // make √d rational.
                let d = Rational::from_integer(BigInt::from(self.d));
                let q2 = &self.q * &self.q;
                let s2d = &self.s * &self.s * d;
                if q2 > s2d {
                    sq
                } else {
                    ss
                }
            }
        }
    }
    fn to_f64(&self) -> f64 {
        self.q.to_f64() + self.s.to_f64() * (self.d as f64).sqrt()
    }
}

impl ExactField for QuadExt {}

impl fmt::Display for QuadExt {
    /// Canonical text: `q`, `s r`, `q+s r` or `q-s r` where `r` stands for `√d`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.s.is_zero() {
            return write!(f, "{}", self.q);
        }
        if self.q.is_zero() {
            return write!(f, "{} r", self.s);
        }
        if Signed::is_negative(&self.s) {
            write!(f, "{}-{} r", self.q, -self.s.clone())
        } else {
            write!(f, "{}+{} r", self.q, self.s)
        }
    }
}

/// Parses quadratic scalar text over `ℚ(√d)`: `q`, `q+s r`, `q-s r`, `s r`.
/// A bare `r` or `-r` means `±√d`.
pub fn parse_quadratic(text: &str, d: u64) -> Result<QuadExt, Error> {
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let Some(body) = t.strip_suffix('r') else {
        let q = parse_rational(&t)?;
        return Ok(QuadExt::rational(q));
    };
    // Split at the last sign that is not the leading one.
    let split = body
        .char_indices()
        .filter(|&(i, c)| i > 0 && (c == '+' || c == '-'))
        .map(|(i, _)| i)
        .last();
    let (q_text, s_text) = match split {
        Some(i) => (&body[..i], &body[i..]),
        None => ("0", body),
    };
    let s = match s_text {
        "" | "+" => Rational::one(),
        "-" => -Rational::one(),
        other => parse_rational(other)?,
    };
    let q = parse_rational(q_text)?;
    QuadExt::new(q, s, d).map_err(|e| Error::Parse(format!("{text:?}: {e}")))
}

/// Default tolerance for [`Approx`] values.
pub const DEFAULT_TOLERANCE: f64 = 1e-12;

/// A float tagged with the tolerance under which it counts as zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Approx {
    pub value: f64,
    pub tol: f64,
}

impl Approx {
    pub fn new(value: f64) -> Self {
        Self { value, tol: DEFAULT_TOLERANCE }
    }
    pub fn with_tolerance(value: f64, tol: f64) -> Self {
        Self { value, tol }
    }
    fn wrap(value: f64, a: &Self, b: &Self) -> Self {
        Self { value, tol: a.tol.max(b.tol) }
    }
}

impl From<f64> for Approx {
    fn from(value: f64) -> Self {
        Self::new(value)
    }
}

impl Add for Approx {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::wrap(self.value + rhs.value, &self, &rhs)
    }
}
impl Sub for Approx {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::wrap(self.value - rhs.value, &self, &rhs)
    }
}
impl Mul for Approx {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self::wrap(self.value * rhs.value, &self, &rhs)
    }
}
impl Div for Approx {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        Self::wrap(self.value / rhs.value, &self, &rhs)
    }
}
impl Neg for Approx {
    type Output = Self;
    fn neg(self) -> Self {
        Self { value: -self.value, tol: self.tol }
    }
}

impl fmt::Display for Approx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl OrderedField for Approx {
    fn zero() -> Self {
        Self::new(0.0)
    }
    fn one() -> Self {
        Self::new(1.0)
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        Self::new(num as f64 / den as f64)
    }
    fn from_rational(r: &Rational) -> Self {
        Self::new(OrderedField::to_f64(r))
    }
    fn sign(&self) -> Ordering {
        if self.value > self.tol {
            Ordering::Greater
        } else if self.value < -self.tol {
            Ordering::Less
        } else {
            Ordering::Equal
        }
    }
    fn to_f64(&self) -> f64 {
        self.value
    }
}

/// The field a document or scalar belongs to, known at runtime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FieldKind {
    Rational,
    Quadratic(u64),
    Float,
}

impl FieldKind {
    pub fn parse_scalar(&self, text: &str) -> Result<Scalar, Error> {
        match *self {
            FieldKind::Rational => parse_rational(text).map(Scalar::Rational),
            FieldKind::Quadratic(d) => parse_quadratic(text, d).map(Scalar::Quad),
            FieldKind::Float => {
                let t = text.trim();
                let v = if let Some((n, d)) = t.split_once('/') {
                    let n: f64 = n.trim().parse().map_err(|_| Error::Parse(format!("bad float literal {text:?}")))?;
                    let d: f64 = d.trim().parse().map_err(|_| Error::Parse(format!("bad float literal {text:?}")))?;
                    n / d
                } else {
                    t.parse().map_err(|_| Error::Parse(format!("bad float literal {text:?}")))?
                };
                Ok(Scalar::Float(Approx::new(v)))
            }
        }
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self, FieldKind::Float)
    }
}

impl fmt::Display for FieldKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldKind::Rational => write!(f, "rational"),
            FieldKind::Quadratic(d) => write!(f, "quadratic:{d}"),
            FieldKind::Float => write!(f, "float"),
        }
    }
}

impl FromStr for FieldKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s.trim() {
            "rational" => Ok(FieldKind::Rational),
            "float" => Ok(FieldKind::Float),
            other => {
                let d = other
                    .strip_prefix("quadratic:")
                    .and_then(|d| d.parse::<u64>().ok())
                    .ok_or_else(|| Error::Parse(format!("unknown field {other:?}; expected rational, quadratic:<d> or float")))?;
                if !is_square_free(d) {
                    return Err(Error::Parse(format!("quadratic:{d} is not a quadratic field (d must be square-free and ≥ 2)")));
                }
                Ok(FieldKind::Quadratic(d))
            }
        }
    }
}

/// A value from one of the shipped fields.
#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Rational(Rational),
    Quad(QuadExt),
    Float(Approx),
}

impl Scalar {
    pub fn kind(&self) -> FieldKind {
        match self {
            Scalar::Rational(_) => FieldKind::Rational,
            Scalar::Quad(q) => FieldKind::Quadratic(q.radicand().unwrap_or(0)),
            Scalar::Float(_) => FieldKind::Float,
        }
    }

    /// Arithmetic between scalars of one field. Mixing fields is an error.
    pub fn checked_add(&self, other: &Scalar) -> Result<Scalar, Error> {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Ok(Scalar::Rational(a + b)),
            (Scalar::Float(a), Scalar::Float(b)) => Ok(Scalar::Float(*a + *b)),
            (Scalar::Quad(a), Scalar::Quad(b)) => match (a.radicand(), b.radicand()) {
                (Some(x), Some(y)) if x != y => Err(Error::MixedFields(format!("ℚ(√{x}) and ℚ(√{y})"))),
                _ => Ok(Scalar::Quad(a.clone() + b.clone())),
            },
            (a, b) => Err(Error::MixedFields(format!("{} and {}", a.kind(), b.kind()))),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Rational(r) => OrderedField::to_f64(r),
            Scalar::Quad(q) => q.to_f64(),
            Scalar::Float(a) => a.value,
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(r) => write!(f, "{r}"),
            Scalar::Quad(q) => write!(f, "{q}"),
            Scalar::Float(a) => write!(f, "{a}"),
        }
    }
}

/// Conversion of a typed field element to canonical scalar text and back.
pub trait ScalarText: OrderedField {
    fn field_kind_of(values: &[Self]) -> FieldKind;
    fn into_scalar(self) -> Scalar;
}

impl ScalarText for Rational {
    fn field_kind_of(_: &[Self]) -> FieldKind {
        FieldKind::Rational
    }
    fn into_scalar(self) -> Scalar {
        Scalar::Rational(self)
    }
}

impl ScalarText for QuadExt {
    fn field_kind_of(values: &[Self]) -> FieldKind {
        FieldKind::Quadratic(values.iter().find_map(QuadExt::radicand).unwrap_or(2))
    }
    fn into_scalar(self) -> Scalar {
        Scalar::Quad(self)
    }
}

impl ScalarText for Approx {
    fn field_kind_of(_: &[Self]) -> FieldKind {
        FieldKind::Float
    }
    fn into_scalar(self) -> Scalar {
        Scalar::Float(self)
    }
}
