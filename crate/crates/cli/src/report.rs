//! Command results, rendered as text or as JSON with `--json`.

use std::fmt;

use serde::Serialize;

use crate::document::to_canonical_json;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Report {
    Check(CheckReport),
    Ground(GroundReport),
    Ks(KsReport),
    Wigner(WignerReport),
    /// A document printed verbatim in both modes.
    #[serde(skip)]
    Document(String),
}

impl Report {
    pub fn render(&self, json: bool) -> String {
        match self {
            Report::Document(text) => text.clone(),
            _ if json => to_canonical_json(self),
            _ => self.to_string(),
        }
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Report::Check(r) => r.fmt(f),
            Report::Ground(r) => r.fmt(f),
            Report::Ks(r) => r.fmt(f),
            Report::Wigner(r) => r.fmt(f),
            Report::Document(t) => f.write_str(t),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub consistent: bool,
    pub field: String,
    pub points: usize,
    pub tests: Vec<String>,
    /// One entry per disagreeing pair of tests.
    pub violations: Vec<PairViolation>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairViolation {
    pub tests: [String; 2],
    pub atoms: Vec<AtomDisagreement>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AtomDisagreement {
    pub atom: Vec<String>,
    pub values: [String; 2],
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let summary = format!("{} tests over {} points ({})", self.tests.len(), self.points, self.field);
        if self.consistent {
            return writeln!(f, "consistent: {summary}");
        }
        let n = self.violations.len();
        writeln!(f, "inconsistent: {summary}; {n} violation{}", if n == 1 { "" } else { "s" })?;
        for v in &self.violations {
            writeln!(f, "  {} vs {}:", v.tests[0], v.tests[1])?;
            for a in &v.atoms {
                writeln!(f, "    {{{}}}: {} vs {}", a.atom.join(","), a.values[0], a.values[1])?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GroundReport {
    pub field: String,
    pub labels: Vec<String>,
    pub particular: Vec<String>,
    pub null_dim: usize,
    pub basis: Vec<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub symmetry: Option<SymmetryReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nonneg: Option<NonnegReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<Vec<String>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SymmetryReport {
    pub equalities: Vec<[String; 2]>,
    pub full_null_dim: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NonnegReport {
    pub feasible: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub interval: Option<IntervalReport>,
}

/// Row multipliers `y` with `yᵀA ≥ 0` and `yᵀb < 0`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertificateReport {
    pub multipliers: Vec<RowMultiplier>,
    pub combination: Vec<String>,
    pub bound: String,
    pub verified: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RowMultiplier {
    pub row: String,
    pub y: String,
}

/// Range of `t` in `particular + t·basis[0]`; `None` bounds are infinite.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntervalReport {
    pub lower: Option<String>,
    pub upper: Option<String>,
    pub empty: bool,
}

impl fmt::Display for IntervalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lo = self.lower.as_deref().unwrap_or("-inf");
        let hi = self.upper.as_deref().unwrap_or("+inf");
        write!(f, "Interval({lo}, {hi})")?;
        if self.empty {
            write!(f, " empty")?;
        }
        Ok(())
    }
}

fn tuple(v: &[String]) -> String {
    format!("({})", v.join(", "))
}

impl fmt::Display for GroundReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "field: {}", self.field)?;
        writeln!(f, "variables: {}", tuple(&self.labels))?;
        if let Some(s) = &self.symmetry {
            let eqs: Vec<String> = s.equalities.iter().map(|[a, b]| format!("{a}={b}")).collect();
            writeln!(f, "symmetric under: {}", eqs.join(" "))?;
            writeln!(f, "full null dimension: {}", s.full_null_dim)?;
        }
        writeln!(f, "particular: {}", tuple(&self.particular))?;
        writeln!(f, "null dimension: {}", self.null_dim)?;
        for (k, v) in self.basis.iter().enumerate() {
            writeln!(f, "basis[{k}]: {}", tuple(v))?;
        }
        if let Some(n) = &self.nonneg {
            if let Some(w) = &n.witness {
                writeln!(f, "nonnegative: Witness {}", tuple(w))?;
            }
            if let Some(c) = &n.certificate {
                let verified = if c.verified { "verified" } else { "NOT verified" };
                writeln!(f, "nonnegative: Infeasible (certificate {verified})")?;
                for m in &c.multipliers {
                    writeln!(f, "  y[{}] = {}", m.row, m.y)?;
                }
                writeln!(f, "  yᵀA = {}", tuple(&c.combination))?;
                writeln!(f, "  yᵀb = {}", c.bound)?;
            }
            if let Some(i) = &n.interval {
                writeln!(f, "parameter: {i}")?;
            }
        }
        if let Some(vs) = &self.vertices {
            writeln!(f, "vertices: {}", vs.len())?;
            for v in vs {
                writeln!(f, "  {}", tuple(v))?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KsReport {
    pub bases: usize,
    pub vectors: usize,
    /// `NoneFound` or `Selection`.
    pub outcome: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub selection: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parity: Option<ParityReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParityReport {
    pub bases: usize,
    pub vectors: usize,
}

impl fmt::Display for KsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.outcome)?;
        if let Some(p) = &self.parity {
            write!(f, "; parity obstruction: {} bases, each vector in exactly two bases", p.bases)?;
        }
        writeln!(f)?;
        if let Some(s) = &self.selection {
            for (k, v) in s.iter().enumerate() {
                writeln!(f, "  basis {k}: {v}")?;
            }
        }
        writeln!(f, "frame: {} bases, {} vectors", self.bases, self.vectors)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WignerReport {
    pub state: String,
    pub hbar: f64,
    /// `[lo, hi, n]` per axis.
    pub x: (f64, f64, usize),
    pub p: (f64, f64, usize),
    pub integral: f64,
    pub normalization_residual: f64,
    pub imag_residue: f64,
    pub min: PointValue,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub origin: Option<PointValue>,
    pub marginals: Vec<MarginalReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verify: Option<VerifyReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reconstruct: Option<ReconstructReport>,
    pub files: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointValue {
    pub x: f64,
    pub p: f64,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MarginalReport {
    pub a: f64,
    pub b: f64,
    pub integral: f64,
    /// Largest gap to the quantum density of `aX + bP`.
    pub max_deviation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub directions: usize,
    pub max_marginal_deviation: f64,
    pub max_normalization_residual: f64,
    pub imag_residue: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReconstructReport {
    pub rays: usize,
    pub max_deviation: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub origin: Option<f64>,
}

impl fmt::Display for WignerReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "state: {} (hbar = {})", self.state, self.hbar)?;
        writeln!(
            f,
            "grid: x [{}, {}] x {}, p [{}, {}] x {}",
            self.x.0, self.x.1, self.x.2, self.p.0, self.p.1, self.p.2
        )?;
        writeln!(f, "integral: {:.12} (residual {:.3e})", self.integral, self.normalization_residual)?;
        writeln!(f, "imaginary residue: {:.3e}", self.imag_residue)?;
        writeln!(f, "min: {:.9} at (x, p) = ({}, {})", self.min.value, self.min.x, self.min.p)?;
        if let Some(o) = &self.origin {
            writeln!(f, "value at ({}, {}): {:.9}", o.x, o.p, o.value)?;
        }
        for m in &self.marginals {
            writeln!(
                f,
                "marginal a={} b={}: integral {:.9}, max deviation from quantum density {:.3e}",
                m.a, m.b, m.integral, m.max_deviation
            )?;
        }
        if let Some(v) = &self.verify {
            writeln!(
                f,
                "verify: {} directions, max marginal deviation {:.3e}, max normalization residual {:.3e}, imaginary residue {:.3e}: {}",
                v.directions,
                v.max_marginal_deviation,
                v.max_normalization_residual,
                v.imag_residue,
                if v.passed { "pass" } else { "FAIL" }
            )?;
        }
        if let Some(r) = &self.reconstruct {
            write!(f, "reconstruct: {} rays, max deviation {:.3e}", r.rays, r.max_deviation)?;
            if let Some(o) = r.origin {
                write!(f, ", value at origin {o:.9}")?;
            }
            writeln!(f)?;
        }
        for file in &self.files {
            writeln!(f, "wrote {file}")?;
        }
        Ok(())
    }
}
