//! The five commands. Each returns an [`Outcome`] or a [`CliError`] whose
//! exit code classifies the failure.

use std::fs;
use std::path::{Path, PathBuf};

use obspace::algebra::{check_consistency, ObservationSpace};
use obspace::field::{Approx, ExactField, FieldKind, OrderedField, ScalarText};
use obspace::fixtures::{self, AnySpace, ExactQubit, FixtureName};
use obspace::grounding::{
    apply_constraints, assemble_system, nonneg_feasibility, solve_affine, symmetrize, vertex_enumerate, AffineSolutionSet,
    Feasibility, Permutation, DEFAULT_MAX_DIM,
};
use obspace::ks::{cabello_frame, parity_obstruction, rigid_selection_search, MeasurementFrame};
use obspace::wigner::{
    default_z_axis, directions, marginal_density, qm_line_density, reconstruct_from_marginals, wigner_density, Grid,
    WaveFunction,
};

use crate::document::{text, texts, PermutationDocument, SpaceDocument};
use crate::report::*;
use crate::{read_file, CliError, Outcome};

/// Directions used by `wigner --verify`.
pub const VERIFY_DIRECTIONS: usize = 16;
/// Largest accepted gap between a Wigner marginal and the quantum density.
pub const MARGINAL_TOLERANCE: f64 = 1e-4;
/// Largest accepted deviation of any integral from one.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-6;
/// Largest accepted imaginary part of the Wigner integral.
pub const REALNESS_TOLERANCE: f64 = 1e-10;

pub fn load_space(path: &Path) -> Result<SpaceDocument, CliError> {
    SpaceDocument::from_json(&read_file(path)?)
}

fn check_typed<F: ScalarText>(os: &ObservationSpace<F>) -> CheckReport {
    let report = check_consistency(os);
    let names: Vec<String> = os.tests().iter().map(|t| t.name().to_string()).collect();
    let labels = os.space().labels();
    let violations = report
        .violating_pairs()
        .into_iter()
        .map(|(i, j)| PairViolation {
            tests: [names[i].clone(), names[j].clone()],
            atoms: report
                .violations
                .iter()
                .filter(|v| v.tests == (i, j))
                .map(|v| AtomDisagreement {
                    atom: v.atom.indices().map(|k| labels[k].clone()).collect(),
                    values: [text(&v.values.0), text(&v.values.1)],
                })
                .collect(),
        })
        .collect();
    let all: Vec<F> = os.tests().iter().flat_map(|t| t.probs().iter().cloned()).collect();
    CheckReport {
        consistent: report.is_consistent(),
        field: F::field_kind_of(&all).to_string(),
        points: os.space().len(),
        tests: names,
        violations,
    }
}

/// `check`: exit 0 iff the space is consistent.
pub fn check(doc: &SpaceDocument, field: Option<FieldKind>) -> Result<Outcome, CliError> {
    let report = match doc.to_space(field)? {
        AnySpace::Rational(os) => check_typed(&os),
        AnySpace::Quadratic(os) => check_typed(&os),
        AnySpace::Float(os) => check_typed(&os),
    };
    let negative = !report.consistent;
    Ok(Outcome::new(Report::Check(report), negative))
}

#[derive(Clone, Debug)]
pub struct GroundOptions {
    pub nonneg: bool,
    pub vertices: bool,
    pub max_dim: usize,
    pub symmetric: Option<PermutationDocument>,
    pub field: Option<FieldKind>,
}

impl Default for GroundOptions {
    fn default() -> Self {
        Self { nonneg: false, vertices: false, max_dim: DEFAULT_MAX_DIM, symmetric: None, field: None }
    }
}

fn solve_typed<F: ScalarText>(
    os: &ObservationSpace<F>,
    opts: &GroundOptions,
) -> Result<(AffineSolutionSet<F>, Option<SymmetryReport>), CliError> {
    let sys = assemble_system(os)?;
    let full = solve_affine(&sys).map_err(|w| CliError::Negative(format!("no grounding exists: {w}")))?;
    let Some(doc) = &opts.symmetric else {
        return Ok((full, None));
    };
    let labels = full.labels().to_vec();
    let perm = Permutation::new(doc.resolve(&labels)?)?;
    symmetrize(&full, &perm)?;
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for (i, &j) in perm.images().iter().enumerate() {
        let key = (i.min(j), i.max(j));
        if i != j && !pairs.contains(&key) {
            pairs.push(key);
        }
    }
    let eqs: Vec<(&str, &str)> = pairs.iter().map(|&(i, j)| (labels[i].as_str(), labels[j].as_str())).collect();
    let sym = apply_constraints(&full, &eqs).map_err(|e| CliError::Negative(e.to_string()))?;
    let report = SymmetryReport {
        equalities: eqs.iter().map(|(a, b)| [a.to_string(), b.to_string()]).collect(),
        full_null_dim: full.dim(),
    };
    Ok((sym, Some(report)))
}

fn base_report<F: ScalarText>(set: &AffineSolutionSet<F>, symmetry: Option<SymmetryReport>) -> GroundReport {
    let mut all = set.particular.clone();
    all.extend(set.basis.iter().flatten().cloned());
    GroundReport {
        field: F::field_kind_of(&all).to_string(),
        labels: set.labels().to_vec(),
        particular: texts(&set.particular),
        null_dim: set.dim(),
        basis: set.basis.iter().map(|v| texts(v)).collect(),
        symmetry,
        nonneg: None,
        vertices: None,
    }
}

fn nonneg_typed<F: ScalarText + ExactField>(set: &AffineSolutionSet<F>) -> NonnegReport {
    let report = nonneg_feasibility(set);
    let sys = &set.system;
    let interval = report.interval.as_ref().map(|i| IntervalReport {
        lower: i.lower.as_ref().map(text),
        upper: i.upper.as_ref().map(text),
        empty: i.is_empty(),
    });
    match &report.result {
        Feasibility::Witness(w) => NonnegReport { feasible: true, witness: Some(texts(w)), certificate: None, interval },
        Feasibility::Infeasible(cert) => NonnegReport {
            feasible: false,
            witness: None,
            certificate: Some(CertificateReport {
                multipliers: cert
                    .y
                    .iter()
                    .zip(&sys.row_labels)
                    .filter(|(y, _)| !y.is_zero())
                    .map(|(y, row)| RowMultiplier { row: row.clone(), y: text(y) })
                    .collect(),
                combination: texts(&cert.combination(sys)),
                bound: text(&cert.bound(sys)),
                verified: cert.verifies(sys),
            }),
            interval,
        },
    }
}

fn ground_exact<F: ScalarText + ExactField>(os: &ObservationSpace<F>, opts: &GroundOptions) -> Result<Outcome, CliError> {
    let (set, symmetry) = solve_typed(os, opts)?;
    let mut report = base_report(&set, symmetry);
    let mut negative = false;
    if opts.nonneg {
        let n = nonneg_typed(&set);
        negative |= !n.feasible;
        report.nonneg = Some(n);
    }
    if opts.vertices {
        let vs = vertex_enumerate(&set, opts.max_dim)?;
        negative |= vs.is_empty();
        report.vertices = Some(vs.iter().map(|g| texts(&g.values)).collect());
    }
    Ok(Outcome::new(Report::Ground(report), negative))
}

fn ground_float(os: &ObservationSpace<Approx>, opts: &GroundOptions) -> Result<Outcome, CliError> {
    if opts.nonneg || opts.vertices {
        return Err(CliError::Usage(
            "--nonneg and --vertices need an exact field (rational or quadratic:<d>), not float".into(),
        ));
    }
    let (set, symmetry) = solve_typed(os, opts)?;
    Ok(Outcome::new(Report::Ground(base_report(&set, symmetry)), false))
}

/// `ground`: the affine set of all groundings, optionally restricted to
/// symmetric ones, with nonnegative feasibility and vertices on request.
pub fn ground(doc: &SpaceDocument, opts: &GroundOptions) -> Result<Outcome, CliError> {
    match doc.to_space(opts.field)? {
        AnySpace::Rational(os) => ground_exact(&os, opts),
        AnySpace::Quadratic(os) => ground_exact(&os, opts),
        AnySpace::Float(os) => ground_float(&os, opts),
    }
}

#[derive(Clone, Debug, Default)]
pub struct ExampleOptions {
    pub name: String,
    /// Qubit amplitudes `a,b` for the Feynman spaces.
    pub state: Option<String>,
    /// Emit the fixture's automorphism as a permutation document instead.
    pub automorphism: bool,
    pub field: Option<FieldKind>,
}

fn to_float<F: OrderedField>(os: &ObservationSpace<F>) -> Result<ObservationSpace<Approx>, CliError> {
    Ok(os.map_field(|v| Approx::new(v.to_f64()))?)
}

/// `example`: a fixture as a canonical space document.
pub fn example(opts: &ExampleOptions) -> Result<Outcome, CliError> {
    let name: FixtureName = opts.name.parse()?;
    if opts.state.is_some() && !name.takes_state() {
        return Err(CliError::Usage(format!("{name} takes no --state")));
    }
    let state = opts.state.as_deref().map(str::parse::<ExactQubit>).transpose()?;
    if opts.automorphism {
        if name != FixtureName::Hardy {
            return Err(CliError::Usage(format!("no automorphism is recorded for {name}")));
        }
        let labels: Vec<String> = fixtures::hardy::<obspace::field::Rational>().space().labels().to_vec();
        let doc = PermutationDocument::from_indices(&labels, &fixtures::hardy_swap());
        return Ok(Outcome::new(Report::Document(doc.to_json()), false));
    }
    let space = fixtures::fixture(name, state.as_ref())?;
    let space = match (opts.field, space) {
        (None, s) => s,
        (Some(FieldKind::Float), AnySpace::Rational(os)) => AnySpace::Float(to_float(&os)?),
        (Some(FieldKind::Float), AnySpace::Quadratic(os)) => AnySpace::Float(to_float(&os)?),
        (Some(k), s) if k.to_string() == SpaceDocument::from_any(&s).field => s,
        (Some(k), s) => {
            return Err(CliError::Usage(format!(
                "{name} lives in the {} field and cannot be written as {k}",
                SpaceDocument::from_any(&s).field
            )))
        }
    };
    Ok(Outcome::new(Report::Document(SpaceDocument::from_any(&space).to_json()), false))
}

#[derive(Clone, Debug, Default)]
pub struct KsOptions {
    /// A frame document; the embedded Cabello frame when absent.
    pub frame: Option<PathBuf>,
    /// Treat the absence of a rigid selection as a negative finding.
    pub require_selection: bool,
}

/// `ks`: search for a rigid selection and try the parity argument.
pub fn ks(opts: &KsOptions) -> Result<Outcome, CliError> {
    let frame = match &opts.frame {
        Some(path) => MeasurementFrame::from_json(&read_file(path)?)?,
        None => cabello_frame(),
    };
    let selection = rigid_selection_search(&frame);
    let parity = parity_obstruction(&frame).map(|w| ParityReport { bases: w.bases, vectors: w.vectors });
    let negative = opts.require_selection && selection.is_none();
    let report = KsReport {
        bases: frame.bases.len(),
        vectors: frame.vector_ids().len(),
        outcome: if selection.is_some() { "Selection" } else { "NoneFound" }.into(),
        selection: selection.map(|s| s.chosen),
        parity,
    };
    Ok(Outcome::new(Report::Ks(report), negative))
}

#[derive(Clone, Debug)]
pub struct WignerOptions {
    pub state: String,
    pub hbar: f64,
    pub grid: Grid,
    pub marginals: Vec<(f64, f64)>,
    pub verify: bool,
    pub reconstruct: Option<usize>,
    pub out: Option<PathBuf>,
}

impl Default for WignerOptions {
    fn default() -> Self {
        Self {
            state: "gaussian".into(),
            hbar: 1.0,
            grid: Grid::default_grid(),
            marginals: Vec::new(),
            verify: false,
            reconstruct: None,
            out: None,
        }
    }
}

/// Parses `a,b`.
pub fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("{s:?} should read a,b"))?;
    let parse = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("{t:?} is not a number"));
    Ok((parse(a)?, parse(b)?))
}

struct Writer {
    dir: Option<PathBuf>,
    files: Vec<String>,
}

impl Writer {
    fn write(&mut self, name: &str, contents: &str) -> Result<(), CliError> {
        let Some(dir) = &self.dir else { return Ok(()) };
        let path = dir.join(name);
        fs::write(&path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        self.files.push(path.display().to_string());
        Ok(())
    }
}

/// `wigner`: the phase-space density of a state, its marginals, and the
/// forward and reconstruction checks against quantum mechanics.
pub fn wigner(opts: &WignerOptions) -> Result<Outcome, CliError> {
    let psi = WaveFunction::from_spec(&opts.state, opts.hbar)?;
    let field = wigner_density(&psi, &opts.grid)?;
    if let Some(dir) = &opts.out {
        fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    }
    let mut out = Writer { dir: opts.out.clone(), files: Vec::new() };
    out.write("field.txt", &field.to_text())?;

    let integral = field.integral();
    let (value, x, p) = field.min();
    let g = &field.grid;
    let origin = match (g.x.nearest(0.0), g.p.nearest(0.0)) {
        (Some(ix), Some(ip)) => Some(PointValue { x: g.x.node(ix), p: g.p.node(ip), value: field.value(ix, ip) }),
        _ => None,
    };

    let line = |a: f64, b: f64| -> Result<_, CliError> {
        let z = default_z_axis(&field.grid, a, b);
        Ok((marginal_density(&field, a, b, z)?, qm_line_density(&psi, a, b, z)?))
    };
    let mut marginals = Vec::new();
    for (k, &(a, b)) in opts.marginals.iter().enumerate() {
        let (m, q) = line(a, b)?;
        out.write(&format!("marginal_{k}.txt"), &m.to_text())?;
        out.write(&format!("quantum_{k}.txt"), &q.to_text())?;
        marginals.push(MarginalReport { a, b, integral: m.integral(), max_deviation: m.max_abs_diff(&q) });
    }

    let mut negative = false;
    let verify = if opts.verify {
        let mut dev: f64 = 0.0;
        let mut norm: f64 = (integral - 1.0).abs();
        for (a, b) in directions(VERIFY_DIRECTIONS) {
            let (m, q) = line(a, b)?;
            dev = dev.max(m.max_abs_diff(&q));
            norm = norm.max((m.integral() - 1.0).abs()).max((q.integral() - 1.0).abs());
        }
        let passed = dev < MARGINAL_TOLERANCE && norm < NORMALIZATION_TOLERANCE && field.imag_residue < REALNESS_TOLERANCE;
        negative |= !passed;
        Some(VerifyReport {
            directions: VERIFY_DIRECTIONS,
            max_marginal_deviation: dev,
            max_normalization_residual: norm,
            imag_residue: field.imag_residue,
            passed,
        })
    } else {
        None
    };

    let reconstruct = match opts.reconstruct {
        Some(rays) => {
            let rec = reconstruct_from_marginals(&psi, rays, &opts.grid)?;
            out.write("reconstruction.txt", &rec.to_text())?;
            let origin = match (g.x.nearest(0.0), g.p.nearest(0.0)) {
                (Some(ix), Some(ip)) => Some(rec.value(ix, ip)),
                _ => None,
            };
            Some(ReconstructReport { rays, max_deviation: rec.max_abs_diff(&field)?, origin })
        }
        None => None,
    };

    let report = WignerReport {
        state: opts.state.clone(),
        hbar: opts.hbar,
        x: (g.x.lo, g.x.hi, g.x.n),
        p: (g.p.lo, g.p.hi, g.p.n),
        integral,
        normalization_residual: (integral - 1.0).abs(),
        imag_residue: field.imag_residue,
        min: PointValue { x, p, value },
        origin,
        marginals,
        verify,
        reconstruct,
        files: out.files,
    };
    Ok(Outcome::new(Report::Wigner(report), negative))
}
