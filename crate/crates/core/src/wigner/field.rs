use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::Error;

/// `n` uniformly spaced nodes from `lo` to `hi` inclusive.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl Axis {
    pub fn new(lo: f64, hi: f64, n: usize) -> Result<Self, Error> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) || n < 2 {
            return Err(Error::Parse(format!("bad axis [{lo}, {hi}] with {n} nodes")));
        }
        Ok(Self { lo, hi, n })
    }

    pub fn step(&self) -> f64 {
        (self.hi - self.lo) / (self.n - 1) as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        if i + 1 == self.n {
            self.hi
        } else {
            self.lo + i as f64 * self.step()
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(|i| self.node(i))
    }

    /// Trapezoid weight of node `i`.
    pub fn weight(&self, i: usize) -> f64 {
        if i == 0 || i + 1 == self.n {
            self.step() / 2.0
        } else {
            self.step()
        }
    }

    /// Index of the node closest to `x`, if `x` lies on the axis.
    pub fn nearest(&self, x: f64) -> Option<usize> {
        if x < self.lo - self.step() / 2.0 || x > self.hi + self.step() / 2.0 {
            return None;
        }
        Some(((x - self.lo) / self.step()).round().clamp(0.0, (self.n - 1) as f64) as usize)
    }
}

impl FromStr for Axis {
    type Err = Error;

    /// `lo,hi,n`
    fn from_str(s: &str) -> Result<Self, Error> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let [lo, hi, n] = parts[..] else {
            return Err(Error::Parse(format!("axis {s:?} must read lo,hi,n")));
        };
        let f = |t: &str| t.parse::<f64>().map_err(|_| Error::Parse(format!("bad number {t:?} in {s:?}")));
        let n = n.parse::<usize>().map_err(|_| Error::Parse(format!("bad node count {n:?} in {s:?}")))?;
        Axis::new(f(lo)?, f(hi)?, n)
    }
}

/// A rectangular phase-space grid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub x: Axis,
    pub p: Axis,
}

impl Grid {
    pub fn square(lo: f64, hi: f64, n: usize) -> Result<Self, Error> {
        let a = Axis::new(lo, hi, n)?;
        Ok(Self { x: a, p: a })
    }

    /// The grid used when none is given: `[-8, 8]²` with 257 nodes per axis,
    /// so the origin is a node.
    pub fn default_grid() -> Self {
        Self::square(-8.0, 8.0, 257).expect("valid default grid")
    }

    /// Same extent, `2(n-1)+1` nodes per axis.
    pub fn refined(&self) -> Self {
        let r = |a: Axis| Axis { n: 2 * (a.n - 1) + 1, ..a };
        Self { x: r(self.x), p: r(self.p) }
    }

    /// Largest distance from the origin to a grid corner.
    pub fn corner_radius(&self) -> f64 {
        let x = self.x.lo.abs().max(self.x.hi.abs());
        let p = self.p.lo.abs().max(self.p.hi.abs());
        x.hypot(p)
    }
}

impl FromStr for Grid {
    type Err = Error;

    /// `lo,hi,n` for both axes or `x_lo,x_hi,n_x,p_lo,p_hi,n_p`; `default`
    /// selects [`Grid::default_grid`] and a bare `n` its range with `n` nodes.
    fn from_str(s: &str) -> Result<Self, Error> {
        if s.trim() == "default" {
            return Ok(Self::default_grid());
        }
        let parts: Vec<&str> = s.split(',').collect();
        match parts.len() {
            1 => {
                let n = s.trim().parse().map_err(|_| Error::Parse(format!("bad node count {s:?}")))?;
                let d = Self::default_grid();
                Self::square(d.x.lo, d.x.hi, n)
            }
            3 => {
                let a: Axis = s.parse()?;
                Ok(Self { x: a, p: a })
            }
            6 => Ok(Self { x: parts[..3].join(",").parse()?, p: parts[3..].join(",").parse()? }),
            _ => Err(Error::Parse(format!("grid {s:?} must read n, lo,hi,n or x_lo,x_hi,n_x,p_lo,p_hi,n_p"))),
        }
    }
}

/// How a field is evaluated between grid nodes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Interpolation {
    Linear,
    /// Four-point Lagrange, falling back to linear next to the boundary.
    #[default]
    Cubic,
}

/// Real values on a grid, stored row by row with `x` as the row index.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseSpaceField {
    pub grid: Grid,
    pub hbar: f64,
    pub values: Vec<f64>,
    /// Largest imaginary part discarded when the values were computed.
    pub imag_residue: f64,
}

impl PhaseSpaceField {
    pub fn value(&self, ix: usize, ip: usize) -> f64 {
        self.values[ix * self.grid.p.n + ip]
    }

    pub fn row(&self, ix: usize) -> &[f64] {
        &self.values[ix * self.grid.p.n..(ix + 1) * self.grid.p.n]
    }

    /// Value at `(x_ix, p)` for off-grid `p`; zero outside the grid.
    pub fn along_p(&self, ix: usize, p: f64, interp: Interpolation) -> f64 {
        interpolate(self.grid.p, |ip| self.value(ix, ip), p, interp)
    }

    /// Value at `(x, p_ip)` for off-grid `x`; zero outside the grid.
    pub fn along_x(&self, x: f64, ip: usize, interp: Interpolation) -> f64 {
        interpolate(self.grid.x, |ix| self.value(ix, ip), x, interp)
    }

    /// `∬ f dx dp` by the trapezoid rule.
    pub fn integral(&self) -> f64 {
        let mut total = 0.0;
        for ix in 0..self.grid.x.n {
            let row: f64 = self.row(ix).iter().enumerate().map(|(ip, v)| v * self.grid.p.weight(ip)).sum();
            total += row * self.grid.x.weight(ix);
        }
        total
    }

    /// Smallest value and its position.
    pub fn min(&self) -> (f64, f64, f64) {
        let (k, v) = self
            .values
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |(bk, bv), (k, &v)| if v < bv { (k, v) } else { (bk, bv) });
        let (ix, ip) = (k / self.grid.p.n, k % self.grid.p.n);
        (v, self.grid.x.node(ix), self.grid.p.node(ip))
    }

    pub fn max_abs_diff(&self, other: &PhaseSpaceField) -> Result<f64, Error> {
        if self.grid != other.grid {
            return Err(Error::Parse("fields live on different grids".into()));
        }
        Ok(self.values.iter().zip(&other.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
    }

    /// Header `x_lo x_hi n_x p_lo p_hi n_p hbar`, then one line per `x` node.
    pub fn to_text(&self) -> String {
        let g = &self.grid;
        let mut out = format!("{:e} {:e} {} {:e} {:e} {} {:e}\n", g.x.lo, g.x.hi, g.x.n, g.p.lo, g.p.hi, g.p.n, self.hbar);
        for ix in 0..g.x.n {
            let line: Vec<String> = self.row(ix).iter().map(|v| format!("{v:e}")).collect();
            let _ = writeln!(out, "{}", line.join(" "));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, Error> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header: Vec<&str> = lines.next().ok_or_else(|| Error::Parse("empty field file".into()))?.split_whitespace().collect();
        if header.len() != 7 {
            return Err(Error::Parse(format!("field header has {} entries, expected 7", header.len())));
        }
        let num = |t: &str| t.parse::<f64>().map_err(|_| Error::Parse(format!("bad header entry {t:?}")));
        let count = |t: &str| t.parse::<usize>().map_err(|_| Error::Parse(format!("bad header count {t:?}")));
        let grid = Grid { x: Axis::new(num(header[0])?, num(header[1])?, count(header[2])?)?, p: Axis::new(num(header[3])?, num(header[4])?, count(header[5])?)? };
        let hbar = num(header[6])?;
        let mut values = Vec::with_capacity(grid.x.n * grid.p.n);
        for (row, line) in lines.enumerate() {
            let vals: Vec<f64> = line
                .split_whitespace()
                .map(str::parse)
                .collect::<Result<_, _>>()
                .map_err(|e| Error::Parse(format!("field row {row}: {e}")))?;
            if vals.len() != grid.p.n {
                return Err(Error::Parse(format!("field row {row} has {} values, expected {}", vals.len(), grid.p.n)));
            }
            values.extend(vals);
        }
        if values.len() != grid.x.n * grid.p.n {
            return Err(Error::Parse(format!("field has {} rows, expected {}", values.len() / grid.p.n, grid.x.n)));
        }
        Ok(Self { grid, hbar, values, imag_residue: 0.0 })
    }
}

pub(crate) fn interpolate(axis: Axis, at: impl Fn(usize) -> f64, x: f64, interp: Interpolation) -> f64 {
    let h = axis.step();
    let u = (x - axis.lo) / h;
    if u < 0.0 || u > (axis.n - 1) as f64 {
        return 0.0;
    }
    let i = (u.floor() as usize).min(axis.n - 2);
    let t = u - i as f64;
    if interp == Interpolation::Linear || i == 0 || i + 2 >= axis.n {
        return at(i) * (1.0 - t) + at(i + 1) * t;
    }
    // Nodes i-1, i, i+1, i+2 at offsets -1, 0, 1, 2.
    let (f0, f1, f2, f3) = (at(i - 1), at(i), at(i + 1), at(i + 2));
    let w0 = -t * (t - 1.0) * (t - 2.0) / 6.0;
    let w1 = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
    let w2 = -(t + 1.0) * t * (t - 2.0) / 2.0;
    let w3 = (t + 1.0) * t * (t - 1.0) / 6.0;
    f0 * w0 + f1 * w1 + f2 * w2 + f3 * w3
}

/// A density of `z = a x + b p` sampled on a `z` axis.
#[derive(Clone, Debug, PartialEq)]
pub struct LineDensity {
    pub z: Axis,
    pub values: Vec<f64>,
    pub a: f64,
    pub b: f64,
}

impl LineDensity {
    pub fn integral(&self) -> f64 {
        self.values.iter().enumerate().map(|(i, v)| v * self.z.weight(i)).sum()
    }

    /// `∫_lo^hi g` with endpoints snapped to the nearest nodes.
    pub fn probability(&self, lo: f64, hi: f64) -> f64 {
        let (Some(i), Some(j)) = (self.z.nearest(lo.max(self.z.lo)), self.z.nearest(hi.min(self.z.hi))) else {
            return 0.0;
        };
        if j <= i {
            return 0.0;
        }
        let h = self.z.step();
        (i..j).map(|k| 0.5 * h * (self.values[k] + self.values[k + 1])).sum()
    }

    pub fn max_abs_diff(&self, other: &LineDensity) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    /// Two columns `z g(z)` after a `# a b` header.
    pub fn to_text(&self) -> String {
        let mut out = format!("# a={} b={}\n", self.a, self.b);
        for (z, v) in self.z.nodes().zip(&self.values) {
            let _ = writeln!(out, "{z:e} {v:e}");
        }
        out
    }
}
