//! Phase-space densities of one-dimensional wave functions.
//!
//! [`wigner_density`] tabulates Wigner's density on a grid,
//! [`marginal_density`] integrates a field along the lines `ax + bp = z`,
//! and [`qm_line_density`] computes the quantum density of `aX + bP`
//! directly from the wave function. [`reconstruct_from_marginals`] goes the
//! other way: it rebuilds the field from characteristic values sampled on
//! rays through the origin.
//!
//! ```
//! use obspace::wigner::{wigner_point, WaveFunction};
//!
//! let psi = WaveFunction::hermite(1, 1.0).unwrap();
//! let w = wigner_point(&psi, 0.0, 0.0);
//! assert!((w + 1.0 / std::f64::consts::PI).abs() < 1e-9);
//! ```

mod field;
mod state;

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::Error;
pub use field::{Axis, Grid, Interpolation, LineDensity, PhaseSpaceField};
pub use state::{hermite_function, StateKind, WaveFunction, COVERAGE_THRESHOLD, SUPPORT_THRESHOLD};

use field::interpolate;
use state::trapezoid;

/// Fewest rays accepted by [`reconstruct_from_marginals`].
pub const MIN_RAYS: usize = 8;

/// Directions `(cos θ, sin θ)` with `θ = jπ/count`.
pub fn directions(count: usize) -> Vec<(f64, f64)> {
    (0..count).map(|j| {
        let t = j as f64 * PI / count as f64;
        (t.cos(), t.sin())
    })
    .collect()
}

fn cis(t: f64) -> Complex64 {
    Complex64::from_polar(1.0, t)
}

/// Checks that `grid` covers the state and samples its density finely enough.
pub fn check_grid(psi: &WaveFunction, grid: &Grid) -> Result<(), Error> {
    let hbar = psi.hbar();
    let (lo, hi) = psi.support();
    let (clo, chi) = psi.coverage();
    let pc = psi.momentum_coverage();
    let dx_max = PI * hbar / (2.0 * psi.momentum_support().max(1e-9));
    let dp_max = PI * hbar / (hi - lo);
    let need = |axis: &Axis, step: f64| ((axis.hi - axis.lo) / step).ceil() as usize + 1;
    let mut problems = Vec::new();
    if grid.x.lo > clo || grid.x.hi < chi {
        problems.push(format!("x range must contain [{clo:.3}, {chi:.3}]"));
    }
    if grid.p.lo > -pc || grid.p.hi < pc {
        problems.push(format!("p range must contain [{:.3}, {:.3}]", -pc, pc));
    }
    if grid.x.step() > dx_max {
        problems.push(format!("x needs at least {} nodes (step ≤ {dx_max:.4})", need(&grid.x, dx_max)));
    }
    if grid.p.step() > dp_max {
        problems.push(format!("p needs at least {} nodes (step ≤ {dp_max:.4})", need(&grid.p, dp_max)));
    }
    if problems.is_empty() {
        Ok(())
    } else {
        Err(Error::Nyquist(problems.join("; ")))
    }
}

/// The integrand `ψ*(x + βħ/2) ψ(x − βħ/2)` on nodes `kΔβ`, `|k| ≤ K`, where
/// `K` keeps both arguments inside the support.
fn beta_samples(psi: &WaveFunction, x: f64, dbeta: f64) -> Vec<Complex64> {
    let hbar = psi.hbar();
    let (lo, hi) = psi.support();
    if x <= lo || x >= hi {
        return Vec::new();
    }
    let window = 2.0 / hbar * (x - lo).min(hi - x);
    let k_max = (window / dbeta).floor() as i64;
    (-k_max..=k_max)
        .map(|k| {
            let b = k as f64 * dbeta;
            psi.eval(x + b * hbar / 2.0).conj() * psi.eval(x - b * hbar / 2.0)
        })
        .collect()
}

fn beta_step(psi: &WaveFunction, p_max: f64) -> f64 {
    PI / (p_max + psi.momentum_support()).max(1e-9)
}

/// `w(x, p) = (1/2π) ∫ ψ*(x + βħ/2) ψ(x − βħ/2) e^{iβp} dβ` at one point.
pub fn wigner_point(psi: &WaveFunction, x: f64, p: f64) -> f64 {
    let db = beta_step(psi, p.abs());
    let samples = beta_samples(psi, x, db);
    let k0 = (samples.len() / 2) as i64;
    let sum: Complex64 = samples.iter().enumerate().map(|(i, f)| f * cis((i as i64 - k0) as f64 * db * p)).sum();
    sum.re * db / (2.0 * PI)
}

/// Wigner's density of `psi` on `grid`, rows computed in parallel.
pub fn wigner_density(psi: &WaveFunction, grid: &Grid) -> Result<PhaseSpaceField, Error> {
    check_grid(psi, grid)?;
    let p_max = grid.p.lo.abs().max(grid.p.hi.abs());
    let db = beta_step(psi, p_max);
    let (lo, hi) = psi.support();
    let k_limit = (2.0 / psi.hbar() * (hi - lo) / 2.0 / db).ceil() as usize + 1;
    let ps: Vec<f64> = grid.p.nodes().collect();
    // table[k][j] = e^{i k Δβ p_j}
    let table: Vec<Vec<Complex64>> = (0..=k_limit).map(|k| ps.iter().map(|&p| cis(k as f64 * db * p)).collect()).collect();
    let rows: Vec<(Vec<f64>, f64)> = (0..grid.x.n)
        .into_par_iter()
        .map(|ix| {
            let samples = beta_samples(psi, grid.x.node(ix), db);
            let k0 = samples.len() / 2;
            let mut row = vec![0.0; ps.len()];
            let mut residue: f64 = 0.0;
            for (j, out) in row.iter_mut().enumerate() {
                let mut sum = Complex64::new(0.0, 0.0);
                for (i, f) in samples.iter().enumerate() {
                    let c = if i >= k0 { table[i - k0][j] } else { table[k0 - i][j].conj() };
                    sum += f * c;
                }
                let value = sum * db / (2.0 * PI);
                residue = residue.max(value.im.abs());
                *out = value.re;
            }
            (row, residue)
        })
        .collect();
    let imag_residue = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    let values = rows.into_iter().flat_map(|r| r.0).collect();
    Ok(PhaseSpaceField { grid: *grid, hbar: psi.hbar(), values, imag_residue })
}

fn check_direction(a: f64, b: f64) -> Result<(), Error> {
    if a == 0.0 && b == 0.0 || !a.is_finite() || !b.is_finite() {
        return Err(Error::DegenerateDirection);
    }
    Ok(())
}

/// A `z` axis wide enough for `ax + bp` over the whole grid.
pub fn default_z_axis(grid: &Grid, a: f64, b: f64) -> Axis {
    let x = grid.x.lo.abs().max(grid.x.hi.abs());
    let p = grid.p.lo.abs().max(grid.p.hi.abs());
    let z = a.abs() * x + b.abs() * p;
    Axis { lo: -z, hi: z, n: grid.x.n.max(grid.p.n) }
}

/// `g(z) = ∬ f(x, p) δ(z − ax − bp) dx dp` with cubic interpolation.
pub fn marginal_density(f: &PhaseSpaceField, a: f64, b: f64, z: Axis) -> Result<LineDensity, Error> {
    marginal_density_with(f, a, b, z, Interpolation::Cubic)
}

/// [`marginal_density`] with a chosen interpolation. Lines are integrated
/// over the nodes of `x` when `|b| ≥ |a|` and over the nodes of `p`
/// otherwise; the field counts as zero off the grid.
pub fn marginal_density_with(f: &PhaseSpaceField, a: f64, b: f64, z: Axis, interp: Interpolation) -> Result<LineDensity, Error> {
    check_direction(a, b)?;
    let g = &f.grid;
    let values = z
        .nodes()
        .map(|zv| {
            if b.abs() >= a.abs() {
                (0..g.x.n).map(|ix| g.x.weight(ix) * f.along_p(ix, (zv - a * g.x.node(ix)) / b, interp)).sum::<f64>() / b.abs()
            } else {
                (0..g.p.n).map(|ip| g.p.weight(ip) * f.along_x((zv - b * g.p.node(ip)) / a, ip, interp)).sum::<f64>() / a.abs()
            }
        })
        .collect();
    Ok(LineDensity { z, values, a, b })
}

/// The density of `aX + bP` in state `psi`.
///
/// For `|b| ≥ |a|` the state is multiplied by the chirp `e^{iax²/(2bħ)}`,
/// which turns `aX + bP` into `b` times momentum; otherwise the momentum
/// wave function is multiplied by `e^{−ibp²/(2aħ)}`, which turns it into
/// `a` times position.
pub fn qm_line_density(psi: &WaveFunction, a: f64, b: f64, z: Axis) -> Result<LineDensity, Error> {
    check_direction(a, b)?;
    let hbar = psi.hbar();
    let z_max = z.lo.abs().max(z.hi.abs());
    let values = if b == 0.0 {
        z.nodes().map(|zv| psi.eval(zv / a).norm_sqr() / a.abs()).collect()
    } else if b.abs() >= a.abs() {
        let (lo, hi) = psi.support();
        let x_max = lo.abs().max(hi.abs());
        let c = a / (2.0 * b * hbar);
        let bandwidth = psi.k_max() + 2.0 * c.abs() * x_max + z_max / (b.abs() * hbar);
        let nodes = uniform_nodes((lo, hi), PI / (2.0 * bandwidth).max(1e-9));
        let table: Vec<Complex64> = nodes.iter().map(|&(x, w)| psi.eval(x) * cis(c * x * x) * w).collect();
        line_values(&z, &nodes, &table, |zv| zv / (b * hbar), b.abs(), hbar)
    } else {
        let p_max = psi.momentum_support();
        let (lo, hi) = psi.support();
        let c = -b / (2.0 * a * hbar);
        let bandwidth = (hi - lo).max(lo.abs().max(hi.abs())) / hbar + 2.0 * c.abs() * p_max + z_max / (a.abs() * hbar);
        let nodes = uniform_nodes((-p_max, p_max), PI / (2.0 * bandwidth).max(1e-9));
        let table: Vec<Complex64> = nodes.iter().map(|&(p, w)| psi.momentum(p) * cis(c * p * p) * w).collect();
        line_values(&z, &nodes, &table, |zv| -zv / (a * hbar), a.abs(), hbar)
    };
    Ok(LineDensity { z, values, a, b })
}

fn uniform_nodes(range: (f64, f64), step: f64) -> Vec<(f64, f64)> {
    let (lo, hi) = range;
    let n = ((hi - lo) / step).ceil().max(1.0) as usize;
    let h = (hi - lo) / n as f64;
    (0..=n).map(|i| (lo + i as f64 * h, if i == 0 || i == n { h / 2.0 } else { h })).collect()
}

/// `|(2πħ)^{-1/2} Σ t_j e^{−i k(z) u_j}|² / scale` for every `z`.
fn line_values(z: &Axis, nodes: &[(f64, f64)], table: &[Complex64], k: impl Fn(f64) -> f64 + Sync, scale: f64, hbar: f64) -> Vec<f64> {
    let zs: Vec<f64> = z.nodes().collect();
    zs.par_iter()
        .map(|&zv| {
            let kv = k(zv);
            let sum: Complex64 = nodes.iter().zip(table).map(|(&(u, _), t)| t * cis(-kv * u)).sum();
            sum.norm_sqr() / (2.0 * PI * hbar) / scale
        })
        .collect()
}

/// `⟨ψ| e^{−i(αX + βP)} |ψ⟩ = e^{iαβħ/2} ∫ ψ*(y) e^{−iαy} ψ(y − βħ) dy`.
pub fn weyl_characteristic(psi: &WaveFunction, alpha: f64, beta: f64) -> Complex64 {
    let hbar = psi.hbar();
    let (lo, hi) = psi.support();
    let shift = beta * hbar;
    let range = (lo.max(lo + shift), hi.min(hi + shift));
    let step = psi.position_step(alpha.abs());
    let integral = trapezoid(range, step, |y| psi.eval(y).conj() * cis(-alpha * y) * psi.eval(y - shift));
    cis(alpha * beta * hbar / 2.0) * integral
}

/// `(1/2π) ∬ f(x, p) e^{−i(αx + βp)} dx dp` by the trapezoid rule.
pub fn phase_space_ft(f: &PhaseSpaceField, alpha: f64, beta: f64) -> Complex64 {
    let g = &f.grid;
    let p_phase: Vec<Complex64> = (0..g.p.n).map(|ip| cis(-beta * g.p.node(ip)) * g.p.weight(ip)).collect();
    let total: Complex64 = (0..g.x.n)
        .map(|ix| {
            let row: Complex64 = f.row(ix).iter().zip(&p_phase).map(|(v, c)| c * *v).sum();
            row * cis(-alpha * g.x.node(ix)) * g.x.weight(ix)
        })
        .sum();
    total / (2.0 * PI)
}

impl LineDensity {
    /// `(2π)^{-1/2} ∫ g(z) e^{−iζz} dz`.
    pub fn fourier(&self, zeta: f64) -> Complex64 {
        let sum: Complex64 = self.z.nodes().zip(&self.values).enumerate().map(|(i, (zv, v))| cis(-zeta * zv) * (*v * self.z.weight(i))).sum();
        sum / (2.0 * PI).sqrt()
    }
}

/// `|∫ g(z) e^{−iζz} dz − ⟨ψ|e^{−iζ(aX + bP)}|ψ⟩|`, with `g` from
/// [`qm_line_density`] on an axis chosen from the state's extent.
pub fn characteristic_consistency(psi: &WaveFunction, a: f64, b: f64, zeta: f64) -> Result<f64, Error> {
    check_direction(a, b)?;
    let (lo, hi) = psi.support();
    let extent = a.abs() * lo.abs().max(hi.abs()) + b.abs() * psi.momentum_support();
    let step = 0.05f64.min(PI / (4.0 * (zeta.abs() + 1.0)));
    let n = (2.0 * extent / step).ceil() as usize + 1;
    let g = qm_line_density(psi, a, b, Axis::new(-extent, extent, n)?)?;
    let lhs = g.fourier(zeta) * (2.0 * PI).sqrt();
    Ok((lhs - weyl_characteristic(psi, a * zeta, b * zeta)).norm())
}

/// Rebuilds Wigner's density from the characteristic function sampled on
/// `rays` lines through the origin, by filtered back projection.
///
/// Each ray `θ_j = jπ/rays` contributes the ramp-filtered profile
/// `G_j(s) = ∫ W(ζ e_j) |ζ| e^{iζs} dζ`, evaluated by the trapezoid rule with
/// an endpoint correction for the kink of `|ζ|` at the origin. The profiles
/// are tabulated on a fine `s` grid and summed over rays at every node.
pub fn reconstruct_from_marginals(psi: &WaveFunction, rays: usize, grid: &Grid) -> Result<PhaseSpaceField, Error> {
    if rays < MIN_RAYS {
        return Err(Error::Nyquist(format!("reconstruction needs at least {MIN_RAYS} rays, got {rays}")));
    }
    let hbar = psi.hbar();
    let (lo, hi) = psi.support();
    let r_max = grid.corner_radius();
    let radius = (2.0 * psi.k_max()).max((hi - lo) / hbar);
    let state_radius = lo.abs().max(hi.abs()).hypot(psi.momentum_support());
    let h = (radius / (2 * rays) as f64).min(PI / (r_max + state_radius));
    let n_r = (radius / h).ceil() as usize;
    let dirs = directions(rays);

    let samples: Vec<Vec<Complex64>> = dirs
        .par_iter()
        .map(|&(c, s)| (1..=n_r).map(|k| weyl_characteristic(psi, k as f64 * h * c, k as f64 * h * s)).collect())
        .collect();
    let w0 = weyl_characteristic(psi, 0.0, 0.0);

    let threshold = 1e-6 * w0.norm();
    let effective = samples
        .iter()
        .flat_map(|ray| ray.iter().enumerate().filter(|(_, w)| w.norm() >= threshold).map(|(k, _)| (k + 1) as f64 * h))
        .fold(0.0, f64::max);
    if ((2 * rays) as f64) < effective * r_max {
        let needed = (effective * r_max / 2.0).ceil() as usize;
        return Err(Error::Nyquist(format!("{rays} rays undersample the characteristic function on this grid; need at least {needed}")));
    }

    let ds = grid.x.step().min(grid.p.step()) / 4.0;
    let n_s = (2.0 * r_max / ds).ceil() as usize + 1;
    let s_axis = Axis { lo: -r_max, hi: r_max, n: n_s };
    let correction = h * h * w0 / 12.0;
    let profiles: Vec<Vec<f64>> = samples
        .par_iter()
        .map(|ray| {
            s_axis
                .nodes()
                .map(|s| {
                    let sum: Complex64 = ray.iter().enumerate().map(|(k, w)| {
                        let zeta = (k + 1) as f64 * h;
                        w * zeta * cis(zeta * s)
                    })
                    .sum();
                    2.0 * (sum * h + correction).re
                })
                .collect()
        })
        .collect();

    let scale = 1.0 / (4.0 * PI * PI) * (PI / rays as f64);
    let values: Vec<f64> = (0..grid.x.n)
        .into_par_iter()
        .flat_map_iter(|ix| {
            let x = grid.x.node(ix);
            let profiles = &profiles;
            let dirs = &dirs;
            (0..grid.p.n).map(move |ip| {
                let p = grid.p.node(ip);
                let total: f64 = profiles
                    .iter()
                    .zip(dirs)
                    .map(|(g, &(c, s))| interpolate(s_axis, |i| g[i], x * c + p * s, Interpolation::Cubic))
                    .sum();
                total * scale
            })
        })
        .collect();
    Ok(PhaseSpaceField { grid: *grid, hbar, values, imag_residue: 0.0 })
}

/// Largest deviation between the marginal of `field` along `(a, b)` and the
/// quantum density of `aX + bP`.
pub fn marginal_deviation(psi: &WaveFunction, field: &PhaseSpaceField, a: f64, b: f64) -> Result<f64, Error> {
    let z = default_z_axis(&field.grid, a, b);
    let m = marginal_density(field, a, b, z)?;
    let q = qm_line_density(psi, a, b, z)?;
    Ok(m.max_abs_diff(&q))
}
