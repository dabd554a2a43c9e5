//! Vertices of the nonnegative part of a small affine solution set.

use super::{linalg, AffineSolutionSet, SignedGrounding};
use crate::error::Error;
use crate::field::ExactField;

/// Largest null-space dimension accepted by default.
pub const DEFAULT_MAX_DIM: usize = 6;

/// Enumerates the vertices of `{x in s : x ≥ 0}`.
///
/// With `x = p + N t`, a vertex is a feasible `t` at which `dim` linearly
/// independent constraints `p_i + N_i t ≥ 0` are tight. Every subset of
/// `dim` constraints is tried and duplicates are dropped. An empty result
/// means the polytope is empty.
pub fn vertex_enumerate<F: ExactField>(s: &AffineSolutionSet<F>, max_dim: usize) -> Result<Vec<SignedGrounding<F>>, Error> {
    let k = s.dim();
    if k > max_dim {
        return Err(Error::DimensionCap { dim: k, cap: max_dim });
    }
    let labels = s.labels().to_vec();
    let n = s.particular.len();
    if k == 0 {
        return Ok(if s.particular.iter().all(|v| v.is_nonnegative()) {
            vec![SignedGrounding { values: s.particular.clone(), labels }]
        } else {
            Vec::new()
        });
    }
    let rows: Vec<Vec<F>> = (0..n).map(|i| s.basis.iter().map(|v| v[i].clone()).collect()).collect();
    let mut found: Vec<Vec<F>> = Vec::new();
    let mut subset: Vec<usize> = (0..k).collect();
    loop {
        let a: Vec<Vec<F>> = subset.iter().map(|&i| rows[i].clone()).collect();
        let b: Vec<F> = subset.iter().map(|&i| -s.particular[i].clone()).collect();
        if let Some(t) = linalg::solve_square(&a, &b) {
            let x = s.point(&t);
            if x.iter().all(|v| v.is_nonnegative()) && !found.iter().any(|y| y.iter().zip(&x).all(|(u, v)| u.eq_field(v))) {
                found.push(x);
            }
        }
        if !next_subset(&mut subset, n) {
            break;
        }
    }
    Ok(found.into_iter().map(|values| SignedGrounding { values, labels: labels.clone() }).collect())
}

/// Advances to the next `k`-subset of `0..n` in lexicographic order.
fn next_subset(subset: &mut [usize], n: usize) -> bool {
    let k = subset.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if subset[i] < n - k + i {
            subset[i] += 1;
            for j in i + 1..k {
                subset[j] = subset[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subsets_are_binomial() {
        let mut s = vec![0, 1, 2];
        let mut count = 1;
        while next_subset(&mut s, 6) {
            count += 1;
        }
        assert_eq!(count, 20);
    }
}
