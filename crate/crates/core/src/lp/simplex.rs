//! Dense two-phase primal simplex for `max c·x` subject to `A x = b`, `x >= 0`.

use crate::error::{Error, Result};

const PIVOT_EPS: f64 = 1e-11;
const COST_EPS: f64 = 1e-10;
/// Phase-one residual above which the system is declared infeasible.
pub const FEASIBILITY_TOL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub value: f64,
    pub x: Vec<f64>,
    /// Multipliers `y` with `A^T y >= c` and `b·y = value` at optimality.
    pub dual: Vec<f64>,
    pub pivots: usize,
}

struct Tableau {
    rows: Vec<Vec<f64>>,
    obj: Vec<f64>,
    basis: Vec<usize>,
    pivots: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c];
        for v in self.rows[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                let f = row[c];
                if f != 0.0 {
                    for (v, &q) in row.iter_mut().zip(&pivot_row) {
                        *v -= f * q;
                    }
                }
            }
        }
        let f = self.obj[c];
        if f != 0.0 {
            for (v, &q) in self.obj.iter_mut().zip(&pivot_row) {
                *v -= f * q;
            }
        }
        self.basis[r] = c;
        self.pivots += 1;
    }

    /// Bland's rule: lowest-index improving column, lowest-index basic variable
    /// among ratio ties.
    fn optimize(&mut self, allowed: usize, max_pivots: usize) -> Result<()> {
        let rhs = self.obj.len() - 1;
        loop {
            let Some(c) = (0..allowed).find(|&j| self.obj[j] < -COST_EPS) else {
                return Ok(());
            };
            let mut best: Option<(f64, usize, usize)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if row[c] > PIVOT_EPS {
                    let ratio = row[rhs] / row[c];
                    let better = match best {
                        None => true,
                        Some((r, _, b)) => ratio < r - PIVOT_EPS || (ratio <= r + PIVOT_EPS && self.basis[i] < b),
                    };
                    if better {
                        best = Some((ratio, i, self.basis[i]));
                    }
                }
            }
            let Some((_, r, _)) = best else {
                return Err(Error::domain("linear program is unbounded"));
            };
            if self.pivots >= max_pivots {
                return Err(Error::resource(format!("simplex exceeded {max_pivots} pivots")));
            }
            self.pivot(r, c);
        }
    }
}

/// Solve `max c·x` s.t. `a x = b`, `x >= 0`. Rows are dense.
pub fn maximize(a: &[Vec<f64>], b: &[f64], c: &[f64]) -> Result<LpSolution> {
    let m = a.len();
    let n = c.len();
    if b.len() != m || a.iter().any(|row| row.len() != n) {
        return Err(Error::structural("constraint matrix, bounds and objective disagree in size"));
    }
    let width = n + m + 1;
    let mut sign = vec![1.0; m];
    let mut rows = Vec::with_capacity(m);
    for i in 0..m {
        if b[i] < 0.0 {
            sign[i] = -1.0;
        }
        let mut row = vec![0.0; width];
        for j in 0..n {
            row[j] = sign[i] * a[i][j];
        }
        row[n + i] = 1.0;
        row[width - 1] = sign[i] * b[i];
        rows.push(row);
    }
    // phase one: maximize -(sum of artificials)
    let mut obj = vec![0.0; width];
    for row in &rows {
        for j in 0..n {
            obj[j] -= row[j];
        }
        obj[width - 1] -= row[width - 1];
    }
    let max_pivots = 50 * (n + m).max(10);
    let mut t = Tableau { rows, obj, basis: (n..n + m).collect(), pivots: 0 };
    t.optimize(n, max_pivots)?;
    if -t.obj[width - 1] > FEASIBILITY_TOL {
        return Err(Error::domain(format!("linear program is infeasible (residual {})", -t.obj[width - 1])));
    }
    // drive artificials out of the basis; rows that cannot be cleared are redundant
    let mut r = 0;
    while r < t.rows.len() {
        if t.basis[r] >= n {
            if let Some(c) = (0..n).find(|&j| t.rows[r][j].abs() > 1e-9) {
                t.pivot(r, c);
            } else {
                t.rows.remove(r);
                t.basis.remove(r);
                continue;
            }
        }
        r += 1;
    }
    // phase two, artificial columns kept for dual recovery but never entered
    let mut obj = vec![0.0; width];
    for j in 0..n {
        obj[j] = -c[j];
    }
    t.obj = obj;
    for i in 0..t.rows.len() {
        let f = t.obj[t.basis[i]];
        if f != 0.0 {
            let row = t.rows[i].clone();
            for (v, q) in t.obj.iter_mut().zip(row) {
                *v -= f * q;
            }
        }
    }
    t.optimize(n, max_pivots)?;

    let mut x = vec![0.0; n];
    for (i, &bv) in t.basis.iter().enumerate() {
        if bv < n {
            x[bv] = t.rows[i][width - 1].max(0.0);
        }
    }
    let dual = (0..m).map(|i| sign[i] * t.obj[n + i]).collect();
    Ok(LpSolution { value: t.obj[width - 1], x, dual, pivots: t.pivots })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_lp() {
        // max x + y, x + y + s = 1, x - t = 0.25
        let a = vec![vec![1.0, 1.0, 1.0, 0.0], vec![1.0, 0.0, 0.0, -1.0]];
        let s = maximize(&a, &[1.0, 0.25], &[1.0, 1.0, 0.0, 0.0]).unwrap();
        assert!((s.value - 1.0).abs() < 1e-12);
        assert!(s.x[0] >= 0.25 - 1e-12);
        let bound: f64 = s.dual.iter().zip([1.0, 0.25]).map(|(y, b)| y * b).sum();
        assert!((bound - s.value).abs() < 1e-9);
    }

    #[test]
    fn redundant_and_negative_rows() {
        let a = vec![vec![1.0, 1.0], vec![-2.0, -2.0], vec![1.0, -1.0]];
        let s = maximize(&a, &[1.0, -2.0, 0.0], &[3.0, 1.0]).unwrap();
        assert!((s.value - 2.0).abs() < 1e-12);
        assert!((s.x[0] - 0.5).abs() < 1e-12);
        for j in 0..2 {
            let col: f64 = (0..3).map(|i| a[i][j] * s.dual[i]).sum();
            assert!(col >= [3.0, 1.0][j] - 1e-9);
        }
    }

    #[test]
    fn infeasible_and_unbounded() {
        assert!(matches!(maximize(&[vec![1.0]], &[-1.0], &[1.0]), Err(Error::Domain(_))));
        assert!(matches!(maximize(&[vec![1.0, -1.0]], &[0.0], &[1.0, 0.0]), Err(Error::Domain(_))));
    }
}
