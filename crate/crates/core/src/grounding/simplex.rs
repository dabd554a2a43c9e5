//! Phase-1 simplex over an exact field with Bland's rule.

use crate::field::ExactField;

pub(crate) enum Phase1<F> {
    Feasible(Vec<F>),
    /// Multipliers `y` with `yᵀA ≥ 0` and `yᵀb < 0`.
    Infeasible(Vec<F>),
}

/// Decides whether `A x = b, x ≥ 0` has a solution.
///
/// Rows with negative right-hand side are negated, one artificial variable
/// per row starts basic, and the sum of artificials is minimized. At the
/// optimum, the simplex multipliers `u = c_Bᵀ B⁻¹` are read off the
/// artificial block of the tableau.
pub(crate) fn phase1<F: ExactField>(a: &[Vec<F>], b: &[F], n: usize) -> Phase1<F> {
    let m = a.len();
    let width = n + m;
    let mut flip = vec![false; m];
    let mut t: Vec<Vec<F>> = Vec::with_capacity(m);
    let mut rhs: Vec<F> = Vec::with_capacity(m);
    for i in 0..m {
        flip[i] = b[i].is_negative();
        let sgn = |v: &F| if flip[i] { -v.clone() } else { v.clone() };
        let mut row: Vec<F> = a[i].iter().map(sgn).collect();
        row.extend((0..m).map(|j| if i == j { F::one() } else { F::zero() }));
        t.push(row);
        rhs.push(sgn(&b[i]));
    }
    let mut basis: Vec<usize> = (n..width).collect();
    let cost = |j: usize| if j >= n { F::one() } else { F::zero() };

    loop {
        // Reduced cost r_j = c_j - Σ_i c_{B(i)} t[i][j].
        let entering = (0..width).find(|&j| {
            if basis.contains(&j) {
                return false;
            }
            let z = basis
                .iter()
                .enumerate()
                .filter(|&(_, &bj)| bj >= n)
                .fold(F::zero(), |acc, (i, _)| acc + t[i][j].clone());
            (cost(j) - z).is_negative()
        });
        let Some(e) = entering else { break };
        let mut leave: Option<(usize, F)> = None;
        for i in 0..m {
            if !t[i][e].is_positive() {
                continue;
            }
            let ratio = rhs[i].clone() / t[i][e].clone();
            leave = match leave {
                None => Some((i, ratio)),
                Some((k, best)) => match ratio.cmp_field(&best) {
                    std::cmp::Ordering::Less => Some((i, ratio)),
                    std::cmp::Ordering::Equal if basis[i] < basis[k] => Some((i, ratio)),
                    _ => Some((k, best)),
                },
            };
        }
        let (l, _) = leave.expect("phase-1 objective is bounded below by zero");
        pivot(&mut t, &mut rhs, l, e);
        basis[l] = e;
    }

    let objective = basis
        .iter()
        .enumerate()
        .filter(|&(_, &bj)| bj >= n)
        .fold(F::zero(), |acc, (i, _)| acc + rhs[i].clone());
    if objective.is_zero() {
        let mut x = vec![F::zero(); n];
        for (i, &bj) in basis.iter().enumerate() {
            if bj < n {
                x[bj] = rhs[i].clone();
            }
        }
        return Phase1::Feasible(x);
    }
    let y = (0..m)
        .map(|k| {
            let u = basis
                .iter()
                .enumerate()
                .filter(|&(_, &bj)| bj >= n)
                .fold(F::zero(), |acc, (i, _)| acc + t[i][n + k].clone());
            if flip[k] {
                u
            } else {
                -u
            }
        })
        .collect();
    Phase1::Infeasible(y)
}

fn pivot<F: ExactField>(t: &mut [Vec<F>], rhs: &mut [F], l: usize, e: usize) {
    let inv = F::one() / t[l][e].clone();
    for v in t[l].iter_mut() {
        *v = v.clone() * inv.clone();
    }
    rhs[l] = rhs[l].clone() * inv;
    let prow = t[l].clone();
    let prhs = rhs[l].clone();
    for i in 0..t.len() {
        if i == l || t[i][e].is_zero() {
            continue;
        }
        let f = t[i][e].clone();
        for (v, p) in t[i].iter_mut().zip(&prow) {
            if !p.is_zero() {
                *v = v.clone() - f.clone() * p.clone();
            }
        }
        rhs[i] = rhs[i].clone() - f * prhs.clone();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{OrderedField, Rational};
    use crate::grounding::linalg::{dot, mat_vec};

    fn r(n: i64) -> Rational {
        Rational::from_ratio(n, 1)
    }

    #[test]
    fn finds_nonnegative_point() {
        // x0 + x1 = 1, x0 - x1 = 0
        let a = vec![vec![r(1), r(1)], vec![r(1), r(-1)]];
        let b = vec![r(1), r(0)];
        match phase1(&a, &b, 2) {
            Phase1::Feasible(x) => {
                assert_eq!(mat_vec(&a, &x), b);
                assert!(x.iter().all(|v| v.is_nonnegative()));
            }
            Phase1::Infeasible(_) => panic!("system is feasible"),
        }
    }

    #[test]
    fn certificate_for_negative_requirement() {
        // x0 + x1 = -1 has no nonnegative solution.
        let a = vec![vec![r(1), r(1)]];
        let b = vec![r(-1)];
        let Phase1::Infeasible(y) = phase1(&a, &b, 2) else { panic!("expected infeasible") };
        for c in 0..2 {
            assert!(dot(&y, &[a[0][c].clone()]).is_nonnegative());
        }
        assert!(dot(&y, &b).is_negative());
    }
}
