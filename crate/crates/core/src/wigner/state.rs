use std::fmt;
use std::path::Path;

use num_complex::Complex64;

use crate::error::Error;

/// Amplitude below which a state counts as zero.
pub const SUPPORT_THRESHOLD: f64 = 1e-12;
/// Amplitude above which a grid must contain the state.
pub const COVERAGE_THRESHOLD: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub enum StateKind {
    /// The `n`-th Hermite function; `n = 0` is the Gaussian ground state.
    Hermite(u32),
    /// Samples `(x, ψ(x))`, interpolated by local cubics and zero outside.
    Sampled { xs: Vec<f64>, values: Vec<Complex64> },
}

/// A one-dimensional wave function with its numerical extent in position
/// and momentum.
#[derive(Clone, Debug)]
pub struct WaveFunction {
    kind: StateKind,
    hbar: f64,
    support: (f64, f64),
    coverage: (f64, f64),
    /// Half-width of the momentum support.
    p_support: f64,
    p_coverage: f64,
}

/// Normalized Hermite function `ψ_n(x)` by the stable three-term recurrence.
pub fn hermite_function(n: u32, x: f64) -> f64 {
    let mut prev = std::f64::consts::PI.powf(-0.25) * (-x * x / 2.0).exp();
    if n == 0 {
        return prev;
    }
    let mut cur = std::f64::consts::SQRT_2 * x * prev;
    for k in 1..n {
        let k = k as f64;
        let next = (2.0 / (k + 1.0)).sqrt() * x * cur - (k / (k + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Largest `|x|` with `|ψ_n(x)| ≥ threshold`.
fn hermite_extent(n: u32, threshold: f64) -> f64 {
    let mut x = 60.0;
    while x > 0.0 && hermite_function(n, x).abs() < threshold {
        x -= 0.01;
    }
    x + 0.01
}

fn cis(t: f64) -> Complex64 {
    Complex64::from_polar(1.0, t)
}

impl WaveFunction {
    pub fn gaussian(hbar: f64) -> Result<Self, Error> {
        Self::hermite(0, hbar)
    }

    pub fn hermite(n: u32, hbar: f64) -> Result<Self, Error> {
        check_hbar(hbar)?;
        if n > 40 {
            return Err(Error::WaveFunction(format!("hermite:{n} is beyond the supported order 40")));
        }
        let s = hermite_extent(n, SUPPORT_THRESHOLD);
        let c = hermite_extent(n, COVERAGE_THRESHOLD);
        // The momentum wave function is ħ^{-1/2} (-i)^n ψ_n(p/ħ).
        Ok(Self { kind: StateKind::Hermite(n), hbar, support: (-s, s), coverage: (-c, c), p_support: hbar * s, p_coverage: hbar * c })
    }

    /// Samples sorted by `x`; the state is rescaled to unit norm.
    pub fn sampled(xs: Vec<f64>, values: Vec<Complex64>, hbar: f64) -> Result<Self, Error> {
        check_hbar(hbar)?;
        if xs.len() != values.len() || xs.len() < 4 {
            return Err(Error::WaveFunction("a sampled state needs at least 4 points".into()));
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) || xs.iter().any(|x| !x.is_finite()) {
            return Err(Error::WaveFunction("sample positions must be finite and strictly increasing".into()));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::WaveFunction("sample values must be finite".into()));
        }
        let norm2: f64 = xs.windows(2).zip(values.windows(2)).map(|(x, v)| 0.5 * (x[1] - x[0]) * (v[0].norm_sqr() + v[1].norm_sqr())).sum();
        if norm2 <= 0.0 {
            return Err(Error::WaveFunction("sampled state is zero".into()));
        }
        let scale = norm2.sqrt();
        let values: Vec<Complex64> = values.into_iter().map(|v| v / scale).collect();
        let extent = |threshold: f64| {
            let inside: Vec<usize> = (0..xs.len()).filter(|&i| values[i].norm() >= threshold).collect();
            let lo = inside.first().map_or(xs[0], |&i| xs[i.saturating_sub(1)]);
            let hi = inside.last().map_or(xs[xs.len() - 1], |&i| xs[(i + 1).min(xs.len() - 1)]);
            (lo, hi)
        };
        let support = extent(SUPPORT_THRESHOLD);
        let coverage = extent(COVERAGE_THRESHOLD);
        let mut psi = Self { kind: StateKind::Sampled { xs, values }, hbar, support, coverage, p_support: 0.0, p_coverage: 0.0 };
        let (ps, pc) = psi.scan_momentum();
        psi.p_support = ps;
        psi.p_coverage = pc;
        Ok(psi)
    }

    /// Reads two columns `x Re ψ` or three columns `x Re ψ Im ψ`; blank
    /// lines and `#` comments are skipped.
    pub fn from_text(text: &str, hbar: f64) -> Result<Self, Error> {
        let mut xs = Vec::new();
        let mut values = Vec::new();
        for (no, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let cols: Vec<f64> = line
                .split_whitespace()
                .map(str::parse)
                .collect::<Result<_, _>>()
                .map_err(|e| Error::Parse(format!("line {}: {e}", no + 1)))?;
            let (x, re, im) = match cols[..] {
                [x, re] => (x, re, 0.0),
                [x, re, im] => (x, re, im),
                _ => return Err(Error::Parse(format!("line {}: expected 2 or 3 columns, found {}", no + 1, cols.len()))),
            };
            xs.push(x);
            values.push(Complex64::new(re, im));
        }
        Self::sampled(xs, values, hbar)
    }

    pub fn from_file(path: &Path, hbar: f64) -> Result<Self, Error> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_text(&text, hbar)
    }

    /// `gaussian`, `hermite:<n>` or `sampled:<file>`.
    pub fn from_spec(spec: &str, hbar: f64) -> Result<Self, Error> {
        if spec == "gaussian" {
            return Self::gaussian(hbar);
        }
        if let Some(n) = spec.strip_prefix("hermite:") {
            let n = n.parse().map_err(|_| Error::Parse(format!("bad Hermite order in {spec:?}")))?;
            return Self::hermite(n, hbar);
        }
        if let Some(path) = spec.strip_prefix("sampled:") {
            return Self::from_file(Path::new(path), hbar);
        }
        Err(Error::Parse(format!("unknown state {spec:?}; expected gaussian, hermite:<n> or sampled:<file>")))
    }

    pub fn kind(&self) -> &StateKind {
        &self.kind
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// Interval outside which `|ψ| < 1e-12`.
    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    /// Interval outside which `|ψ| < 1e-8`.
    pub fn coverage(&self) -> (f64, f64) {
        self.coverage
    }

    /// Momentum half-width outside which the momentum wave function is negligible.
    pub fn momentum_support(&self) -> f64 {
        self.p_support
    }

    pub fn momentum_coverage(&self) -> f64 {
        self.p_coverage
    }

    /// Largest wave number `p/ħ` present in the state.
    pub fn k_max(&self) -> f64 {
        self.p_support / self.hbar
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        match &self.kind {
            StateKind::Hermite(n) => Complex64::new(hermite_function(*n, x), 0.0),
            StateKind::Sampled { xs, values } => interpolate_complex(xs, values, x),
        }
    }

    /// `χ(p) = (2πħ)^{-1/2} ∫ ψ(x) e^{-ipx/ħ} dx`.
    pub fn momentum(&self, p: f64) -> Complex64 {
        match &self.kind {
            StateKind::Hermite(n) => {
                let phase = match n % 4 {
                    0 => Complex64::new(1.0, 0.0),
                    1 => Complex64::new(0.0, -1.0),
                    2 => Complex64::new(-1.0, 0.0),
                    _ => Complex64::new(0.0, 1.0),
                };
                phase * hermite_function(*n, p / self.hbar) / self.hbar.sqrt()
            }
            StateKind::Sampled { .. } => {
                let k = p / self.hbar;
                let step = self.position_step(k.abs());
                let integral = trapezoid(self.support, step, |x| self.eval(x) * cis(-k * x));
                integral / (2.0 * std::f64::consts::PI * self.hbar).sqrt()
            }
        }
    }

    /// Quadrature step in `x` for integrands `ψ(x)·e^{-ikx}` with `|k| ≤ extra`.
    pub(crate) fn position_step(&self, extra: f64) -> f64 {
        let step = match &self.kind {
            StateKind::Sampled { xs, .. } => xs.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min) / 2.0,
            StateKind::Hermite(_) => 0.05,
        };
        step.min(std::f64::consts::PI / (2.0 * (self.k_max() + extra).max(1e-9)))
    }

    fn scan_momentum(&self) -> (f64, f64) {
        let StateKind::Sampled { xs, .. } = &self.kind else { unreachable!() };
        let dx = xs.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
        let k_nyquist = std::f64::consts::PI / dx;
        let n = 400;
        let norm = (2.0 * std::f64::consts::PI * self.hbar).sqrt();
        let quad = dx / 2.0;
        let mags: Vec<(f64, f64)> = (0..=n)
            .map(|i| {
                let k = k_nyquist * i as f64 / n as f64;
                let v = trapezoid(self.support, quad, |x| self.eval(x) * cis(-k * x)) / norm;
                let w = trapezoid(self.support, quad, |x| self.eval(x) * cis(k * x)) / norm;
                (k * self.hbar, v.norm().max(w.norm()) * self.hbar.sqrt())
            })
            .collect();
        let last_above = |t: f64| mags.iter().filter(|(_, m)| *m >= t).map(|(p, _)| *p).fold(0.0, f64::max);
        let dp = k_nyquist * self.hbar / n as f64;
        (last_above(SUPPORT_THRESHOLD) + dp, last_above(COVERAGE_THRESHOLD) + dp)
    }
}

impl fmt::Display for WaveFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            StateKind::Hermite(0) => write!(f, "gaussian"),
            StateKind::Hermite(n) => write!(f, "hermite:{n}"),
            StateKind::Sampled { xs, .. } => write!(f, "sampled ({} points)", xs.len()),
        }
    }
}

fn check_hbar(hbar: f64) -> Result<(), Error> {
    if !(hbar > 0.0 && hbar.is_finite()) {
        return Err(Error::WaveFunction(format!("ħ must be positive, got {hbar}")));
    }
    Ok(())
}

/// `∫ f` over `[lo, hi]` by the trapezoid rule with nodes spaced at most `step`.
pub(crate) fn trapezoid(range: (f64, f64), step: f64, f: impl Fn(f64) -> Complex64) -> Complex64 {
    let (lo, hi) = range;
    if hi <= lo {
        return Complex64::new(0.0, 0.0);
    }
    let n = ((hi - lo) / step).ceil().max(1.0) as usize;
    let h = (hi - lo) / n as f64;
    let mut sum = (f(lo) + f(hi)) * 0.5;
    for i in 1..n {
        sum += f(lo + i as f64 * h);
    }
    sum * h
}

/// Four-point Lagrange interpolation on sorted nodes; zero outside.
fn interpolate_complex(xs: &[f64], ys: &[Complex64], x: f64) -> Complex64 {
    let n = xs.len();
    if x < xs[0] || x > xs[n - 1] {
        return Complex64::new(0.0, 0.0);
    }
    let i = xs.partition_point(|&v| v <= x).clamp(1, n - 1) - 1;
    let start = i.saturating_sub(1).min(n - 4);
    let mut acc = Complex64::new(0.0, 0.0);
    for j in start..start + 4 {
        let mut w = 1.0;
        for k in start..start + 4 {
            if k != j {
                w *= (x - xs[k]) / (xs[j] - xs[k]);
            }
        }
        acc += ys[j] * w;
    }
    acc
}
