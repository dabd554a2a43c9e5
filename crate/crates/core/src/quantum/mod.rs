//! Qubit and two-qubit states, observables, Born probabilities and the
//! product construction that models a multi-test experiment by an
//! observation space.

pub mod fixtures;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::algebra::{Event, ObservationSpace, PartialDistribution, Partition, SampleSpace, MAX_POINTS};
use crate::error::Error;
use crate::field::{Approx, OrderedField};
use crate::grounding::SignedGrounding;

/// Tolerance for normalization, hermiticity and projector checks.
pub const EPS: f64 = 1e-12;
const PROJECTOR_TOL: f64 = 1e-10;
const EIGEN_GROUP_TOL: f64 = 1e-9;

pub type CMatrix = DMatrix<Complex64>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// A pure state of one or two qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct QState {
    amps: DVector<Complex64>,
}

impl QState {
    pub fn new(amps: Vec<Complex64>) -> Result<Self, Error> {
        if amps.len() != 2 && amps.len() != 4 {
            return Err(Error::Quantum(format!("state dimension {} is not 2 or 4", amps.len())));
        }
        let norm2: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm2.sqrt() - 1.0).abs() > EPS {
            return Err(Error::Quantum(format!("state norm {} is not 1", norm2.sqrt())));
        }
        Ok(Self { amps: DVector::from_vec(amps) })
    }

    /// Scales nonzero amplitudes to unit norm.
    pub fn normalized(amps: Vec<Complex64>) -> Result<Self, Error> {
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::Quantum("zero or non-finite amplitudes".into()));
        }
        Self::new(amps.into_iter().map(|a| a / norm).collect())
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amps
    }

    /// `⟨ψ|M|ψ⟩`
    pub fn expectation(&self, m: &CMatrix) -> Complex64 {
        (self.amps.adjoint() * m * &self.amps)[(0, 0)]
    }
}

/// A Hermitian matrix together with its spectral decomposition.
#[derive(Clone, Debug)]
pub struct Observable {
    matrix: CMatrix,
    /// Distinct eigenvalues in descending order with their projectors.
    spectrum: Vec<(f64, CMatrix)>,
}

pub fn pauli_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
}

pub fn pauli_y() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)])
}

pub fn pauli_z() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)])
}

fn is_hermitian(m: &CMatrix) -> bool {
    m.is_square() && (m - m.adjoint()).iter().all(|z| z.norm() <= EPS * (1.0 + m.norm()))
}

fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

impl Observable {
    /// General Hermitian matrix; eigenvalues closer than 1e-9 are merged and
    /// each eigenspace basis is re-orthogonalized before forming projectors.
    pub fn from_matrix(matrix: CMatrix) -> Result<Self, Error> {
        if !is_hermitian(&matrix) {
            return Err(Error::Quantum("observable is not Hermitian".into()));
        }
        let n = matrix.nrows();
        let eig = SymmetricEigen::new(matrix.clone());
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
        let mut groups: Vec<(f64, Vec<DVector<Complex64>>)> = Vec::new();
        for i in order {
            let val = eig.eigenvalues[i];
            let vec = eig.eigenvectors.column(i).into_owned();
            match groups.last_mut() {
                Some((v, vs)) if (*v - val).abs() < EIGEN_GROUP_TOL => vs.push(vec),
                _ => groups.push((val, vec![vec])),
            }
        }
        let mut done: Vec<DVector<Complex64>> = Vec::new();
        let spectrum = groups
            .into_iter()
            .map(|(val, vecs)| {
                let mut proj = CMatrix::zeros(n, n);
                for mut v in vecs {
                    for u in &done {
                        let overlap = u.dotc(&v);
                        v -= u * overlap;
                    }
                    let norm = v.norm();
                    v /= c(norm, 0.0);
                    proj += &v * v.adjoint();
                    done.push(v);
                }
                (val, proj)
            })
            .collect();
        Ok(Self { matrix, spectrum })
    }

    fn pauli(m: CMatrix) -> Self {
        let id = CMatrix::identity(2, 2);
        let plus = (&id + &m) * c(0.5, 0.0);
        let minus = (&id - &m) * c(0.5, 0.0);
        Self { matrix: m, spectrum: vec![(1.0, plus), (-1.0, minus)] }
    }

    pub fn x() -> Self {
        Self::pauli(pauli_x())
    }

    pub fn y() -> Self {
        Self::pauli(pauli_y())
    }

    pub fn z() -> Self {
        Self::pauli(pauli_z())
    }

    /// `cos 2θ Z + sin 2θ X`: a linear polarizer at angle θ, whose `+1`
    /// eigenvector is `(cos θ, sin θ)`.
    pub fn polarizer(theta: f64) -> Self {
        let (s, co) = (2.0 * theta).sin_cos();
        let m = pauli_z() * c(co, 0.0) + pauli_x() * c(s, 0.0);
        let v = DVector::from_vec(vec![c(theta.cos(), 0.0), c(theta.sin(), 0.0)]);
        let w = DVector::from_vec(vec![c(-theta.sin(), 0.0), c(theta.cos(), 0.0)]);
        Self { matrix: m, spectrum: vec![(1.0, &v * v.adjoint()), (-1.0, &w * w.adjoint())] }
    }

    /// `A ⊗ B` with eigenvalue products merged.
    pub fn tensor(a: &Observable, b: &Observable) -> Self {
        let mut spectrum: Vec<(f64, CMatrix)> = Vec::new();
        for (va, pa) in &a.spectrum {
            for (vb, pb) in &b.spectrum {
                let v = va * vb;
                let p = kron(pa, pb);
                match spectrum.iter_mut().find(|(w, _)| (w - v).abs() < EIGEN_GROUP_TOL) {
                    Some((_, q)) => *q += p,
                    None => spectrum.push((v, p)),
                }
            }
        }
        spectrum.sort_by(|x, y| y.0.total_cmp(&x.0));
        Self { matrix: kron(&a.matrix, &b.matrix), spectrum }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn spectrum(&self) -> &[(f64, CMatrix)] {
        &self.spectrum
    }
}

/// Born probability of each eigenvalue, in descending eigenvalue order.
pub fn born_probabilities(state: &QState, obs: &Observable) -> Result<Vec<(f64, f64)>, Error> {
    if state.dim() != obs.dim() {
        return Err(Error::Quantum(format!("state dimension {} vs observable dimension {}", state.dim(), obs.dim())));
    }
    if !is_hermitian(&obs.matrix) {
        return Err(Error::Quantum("observable is not Hermitian".into()));
    }
    Ok(obs.spectrum.iter().map(|(v, p)| (*v, state.expectation(p).re)).collect())
}

/// A projective measurement with labeled outcomes.
#[derive(Clone, Debug)]
pub struct Measurement {
    outcomes: Vec<(String, CMatrix)>,
}

impl Measurement {
    pub fn new(outcomes: Vec<(String, CMatrix)>) -> Result<Self, Error> {
        let Some(n) = outcomes.first().map(|(_, p)| p.nrows()) else {
            return Err(Error::Quantum("measurement without outcomes".into()));
        };
        let mut sum = CMatrix::zeros(n, n);
        for (k, (label, p)) in outcomes.iter().enumerate() {
            if p.nrows() != n || !p.is_square() {
                return Err(Error::Quantum(format!("projector {label:?} has the wrong shape")));
            }
            if (p * p - p).norm() > PROJECTOR_TOL || (p - p.adjoint()).norm() > PROJECTOR_TOL {
                return Err(Error::Quantum(format!("{label:?} is not an orthogonal projector")));
            }
            if outcomes[..k].iter().any(|(l, _)| l == label) {
                return Err(Error::Quantum(format!("outcome label {label:?} repeats")));
            }
            for (other, q) in &outcomes[..k] {
                if (p * q).norm() > PROJECTOR_TOL {
                    return Err(Error::Quantum(format!("projectors {other:?} and {label:?} overlap")));
                }
            }
            sum += p;
        }
        if (sum - CMatrix::identity(n, n)).norm() > PROJECTOR_TOL {
            return Err(Error::Quantum("projectors do not sum to the identity".into()));
        }
        Ok(Self { outcomes })
    }

    /// Outcomes of an observable, labeled `+`/`-` when the spectrum is
    /// `{1, -1}` and by the eigenvalue otherwise.
    pub fn of(obs: &Observable) -> Self {
        let pm = obs.spectrum.len() == 2
            && (obs.spectrum[0].0 - 1.0).abs() < EIGEN_GROUP_TOL
            && (obs.spectrum[1].0 + 1.0).abs() < EIGEN_GROUP_TOL;
        let outcomes = obs
            .spectrum
            .iter()
            .enumerate()
            .map(|(k, (v, p))| {
                let label = if pm { ["+", "-"][k].to_string() } else { format!("{v}") };
                (label, p.clone())
            })
            .collect();
        Self { outcomes }
    }

    /// Outcomes of an observable with caller-chosen labels, one per
    /// eigenvalue in descending order.
    pub fn labeled(obs: &Observable, labels: &[&str]) -> Result<Self, Error> {
        if labels.len() != obs.spectrum.len() {
            return Err(Error::Quantum(format!("{} labels for {} eigenvalues", labels.len(), obs.spectrum.len())));
        }
        Self::new(labels.iter().zip(&obs.spectrum).map(|(l, (_, p))| (l.to_string(), p.clone())).collect())
    }

    /// Joint local measurement on two subsystems; labels are concatenated.
    pub fn product(a: &Measurement, b: &Measurement) -> Self {
        let outcomes = a
            .outcomes
            .iter()
            .flat_map(|(la, pa)| b.outcomes.iter().map(move |(lb, pb)| (format!("{la}{lb}"), kron(pa, pb))))
            .collect();
        Self { outcomes }
    }

    pub fn outcomes(&self) -> &[(String, CMatrix)] {
        &self.outcomes
    }

    pub fn dim(&self) -> usize {
        self.outcomes[0].1.nrows()
    }

    pub fn probabilities(&self, state: &QState) -> Result<Vec<f64>, Error> {
        if state.dim() != self.dim() {
            return Err(Error::Quantum(format!("state dimension {} vs measurement dimension {}", state.dim(), self.dim())));
        }
        Ok(self.outcomes.iter().map(|(_, p)| state.expectation(p).re).collect())
    }
}

/// A state and the tests that may be run on it.
#[derive(Clone, Debug)]
pub struct MultiTestExperiment {
    pub state: QState,
    pub tests: Vec<(String, Measurement)>,
}

impl MultiTestExperiment {
    pub fn new(state: QState, tests: Vec<(String, Measurement)>) -> Result<Self, Error> {
        if let Some((name, _)) = tests.iter().find(|(_, m)| m.dim() != state.dim()) {
            return Err(Error::Quantum(format!("test {name:?} does not act on the state's space")));
        }
        if tests.is_empty() {
            return Err(Error::Quantum("experiment without tests".into()));
        }
        Ok(Self { state, tests })
    }
}

/// Product construction: one sample point per choice of an outcome for
/// every test (test 0 most significant), one cylinder atom per outcome.
pub fn build_observation_space(exp: &MultiTestExperiment) -> Result<ObservationSpace<Approx>, Error> {
    let radices: Vec<usize> = exp.tests.iter().map(|(_, m)| m.outcomes.len()).collect();
    let size = radices.iter().try_fold(1usize, |acc, &r| acc.checked_mul(r).filter(|&s| s <= MAX_POINTS));
    let Some(size) = size else {
        return Err(Error::Quantum(format!("product of outcome counts {radices:?} exceeds {MAX_POINTS} points")));
    };
    let digits = |point: usize| -> Vec<usize> {
        let mut rest = point;
        let mut d = vec![0; radices.len()];
        for (k, &r) in radices.iter().enumerate().rev() {
            d[k] = rest % r;
            rest /= r;
        }
        d
    };
    let joined = exp.tests.iter().any(|(_, m)| m.outcomes.iter().any(|(l, _)| l.chars().count() > 1));
    let labels: Vec<String> = (0..size)
        .map(|point| {
            let parts: Vec<&str> = digits(point)
                .iter()
                .zip(&exp.tests)
                .map(|(&d, (_, m))| m.outcomes[d].0.as_str())
                .collect();
            parts.join(if joined { "," } else { "" })
        })
        .collect();
    let space = SampleSpace::new(labels)?;
    let mut tests = Vec::new();
    for (k, (name, m)) in exp.tests.iter().enumerate() {
        let atoms: Vec<Event> = (0..radices[k])
            .map(|r| Event::from_indices((0..size).filter(|&pt| digits(pt)[k] == r), size))
            .collect::<Result<_, _>>()?;
        let probs = m.probabilities(&exp.state)?;
        let partition = Partition::new(size, atoms)?;
        tests.push(PartialDistribution::new(name.clone(), partition, probs.into_iter().map(Approx::new).collect())?);
    }
    ObservationSpace::new(space, tests)
}

/// The product measure on a product-structured space: every point gets the
/// product of the probabilities of the atoms containing it.
pub fn product_grounding<F: OrderedField>(os: &ObservationSpace<F>) -> Result<SignedGrounding<F>, Error> {
    let n = os.space().len();
    let expected = os.tests().iter().try_fold(1usize, |acc, t| acc.checked_mul(t.partition().len()));
    if expected != Some(n) {
        return Err(Error::NotProduct(format!("{n} points but the atom counts multiply to {expected:?}")));
    }
    let mut signatures: Vec<Vec<usize>> = Vec::with_capacity(n);
    let mut values = Vec::with_capacity(n);
    for point in 0..n {
        let sig: Vec<usize> = os.tests().iter().map(|t| t.partition().atom_of(point).expect("atoms cover")).collect();
        if signatures.contains(&sig) {
            return Err(Error::NotProduct(format!("points share the atom signature {sig:?}")));
        }
        values.push(
            sig.iter()
                .zip(os.tests())
                .fold(F::one(), |acc, (&a, t)| acc * t.probs()[a].clone()),
        );
        signatures.push(sig);
    }
    SignedGrounding::new(values, os.space().labels().to_vec())
}

/// The canonical nonnegative grounding of the three-test Pauli space:
/// `f_i = (1±x)/2 · (1±y)/2 · (1±z)/2`, signs read from point `i = xyz` in
/// binary with `+` as one.
pub fn feynman3_canonical<F: OrderedField>(x: F, y: F, z: F) -> Result<[F; 8], Error> {
    for (name, v) in [("x", &x), ("y", &y), ("z", &z)] {
        if v.abs().cmp_field(&F::one()) == std::cmp::Ordering::Greater {
            return Err(Error::Quantum(format!("⟨{}⟩ = {v} lies outside [-1, 1]", name.to_uppercase())));
        }
    }
    let half = F::from_ratio(1, 2);
    let factor = |v: &F, plus: bool| {
        if plus {
            (F::one() + v.clone()) * half.clone()
        } else {
            (F::one() - v.clone()) * half.clone()
        }
    };
    Ok(std::array::from_fn(|i| {
        factor(&x, i & 4 != 0) * factor(&y, i & 2 != 0) * factor(&z, i & 1 != 0)
    }))
}
