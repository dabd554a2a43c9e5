//! Exact Gauss–Jordan elimination with full pivoting.

use crate::field::OrderedField;

/// Reduced row echelon data for `[A | b]`, with the row operations tracked
/// so that a zero row of `A` yields the multipliers that produced it.
pub(crate) struct Reduction<F> {
    /// Pivot column of each of the first `rank` rows; rows are scaled so the
    /// pivot entry is one and every other row is zero in that column.
    pub pivots: Vec<usize>,
    pub rows: Vec<Vec<F>>,
    pub rhs: Vec<F>,
    /// `ops[i]` expresses reduced row `i` as a combination of the original rows.
    pub ops: Vec<Vec<F>>,
}

impl<F: OrderedField> Reduction<F> {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// First reduced row that reads `0 = c` with `c ≠ 0`.
    pub fn inconsistent_row(&self) -> Option<usize> {
        (self.rank()..self.rows.len()).find(|&i| !self.rhs[i].is_zero())
    }
}

/// Picks, among rows `r ≥ from` and unused columns, the entry of largest
/// magnitude (first on ties).
fn choose_pivot<F: OrderedField>(rows: &[Vec<F>], from: usize, used: &[bool]) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize, f64)> = None;
    for (r, row) in rows.iter().enumerate().skip(from) {
        for (c, v) in row.iter().enumerate() {
            if used[c] || v.is_zero() {
                continue;
            }
            let mag = v.to_f64().abs();
            if best.map_or(true, |(_, _, m)| mag > m) {
                best = Some((r, c, mag));
            }
        }
    }
    best.map(|(r, c, _)| (r, c))
}

pub(crate) fn reduce<F: OrderedField>(a: &[Vec<F>], b: &[F], ncols: usize) -> Reduction<F> {
    let m = a.len();
    let mut rows: Vec<Vec<F>> = a.to_vec();
    let mut rhs: Vec<F> = b.to_vec();
    let mut ops: Vec<Vec<F>> = (0..m)
        .map(|i| (0..m).map(|j| if i == j { F::one() } else { F::zero() }).collect())
        .collect();
    let mut used = vec![false; ncols];
    let mut pivots = Vec::new();
    for k in 0..m.min(ncols) {
        let Some((r, c)) = choose_pivot(&rows, k, &used) else { break };
        rows.swap(k, r);
        rhs.swap(k, r);
        ops.swap(k, r);
        used[c] = true;
        let inv = F::one() / rows[k][c].clone();
        scale(&mut rows[k], &inv);
        rhs[k] = rhs[k].clone() * inv.clone();
        scale(&mut ops[k], &inv);
        for i in 0..m {
            if i == k || rows[i][c].is_zero() {
                continue;
            }
            let factor = rows[i][c].clone();
            let (pivot_row, pivot_rhs, pivot_ops) = (rows[k].clone(), rhs[k].clone(), ops[k].clone());
            axpy(&mut rows[i], &factor, &pivot_row);
            rows[i][c] = F::zero();
            rhs[i] = rhs[i].clone() - factor.clone() * pivot_rhs;
            axpy(&mut ops[i], &factor, &pivot_ops);
        }
        pivots.push(c);
    }
    Reduction { pivots, rows, rhs, ops }
}

fn scale<F: OrderedField>(v: &mut [F], s: &F) {
    for x in v.iter_mut() {
        *x = x.clone() * s.clone();
    }
}

/// `v -= s * w`
fn axpy<F: OrderedField>(v: &mut [F], s: &F, w: &[F]) {
    for (x, y) in v.iter_mut().zip(w) {
        if !y.is_zero() {
            *x = x.clone() - s.clone() * y.clone();
        }
    }
}

/// Unique solution of a square system, `None` when singular.
pub(crate) fn solve_square<F: OrderedField>(a: &[Vec<F>], b: &[F]) -> Option<Vec<F>> {
    let n = b.len();
    let red = reduce(a, b, n);
    if red.rank() < n {
        return None;
    }
    let mut x = vec![F::zero(); n];
    for (i, &c) in red.pivots.iter().enumerate() {
        x[c] = red.rhs[i].clone();
    }
    Some(x)
}

pub(crate) fn mat_vec<F: OrderedField>(a: &[Vec<F>], x: &[F]) -> Vec<F> {
    a.iter().map(|row| dot(row, x)).collect()
}

pub(crate) fn dot<F: OrderedField>(u: &[F], v: &[F]) -> F {
    u.iter()
        .zip(v)
        .filter(|(a, b)| !a.is_zero() && !b.is_zero())
        .fold(F::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
}

/// Rank of a list of vectors.
pub(crate) fn rank<F: OrderedField>(vectors: &[Vec<F>], ncols: usize) -> usize {
    let zeros = vec![F::zero(); vectors.len()];
    reduce(vectors, &zeros, ncols).rank()
}
