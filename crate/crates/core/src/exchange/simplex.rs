//! Dense two-phase primal simplex with Bland's anti-cycling rule.
//!
//! Solves `min cᵀx  s.t.  A x ≤ b,  x ≥ 0` for any sign of `b`. Intended for
//! desk-scale problems (a few hundred columns).

use thiserror::Error;

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum LpError {
    #[error("linear program is infeasible")]
    Infeasible,
    #[error("linear program is unbounded")]
    Unbounded,
    #[error("simplex iteration limit reached")]
    IterationLimit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub value: f64,
}

const PIVOT_TOL: f64 = 1e-11;

struct Tableau {
    /// `rows × (cols + 1)`, last column is the right-hand side.
    t: Vec<Vec<f64>>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> f64 {
        self.t[i][self.cols]
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.t[row][col];
        for v in self.t[row].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.t[row].clone();
        for (i, r) in self.t.iter_mut().enumerate() {
            if i == row {
                continue;
            }
            let f = r[col];
            if f != 0.0 {
                for (v, pv) in r.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                r[col] = 0.0;
            }
        }
        self.basis[row] = col;
    }

    /// Minimize `cost · x` over columns allowed by `allowed`.
    fn optimize(&mut self, cost: &[f64], allowed: &dyn Fn(usize) -> bool, tol: f64) -> Result<(), LpError> {
        let m = self.t.len();
        let limit = 50_000 + 100 * (self.cols + m);
        for _ in 0..limit {
            // reduced costs r_j = c_j - c_B B^-1 A_j
            let mut entering = None;
            for j in 0..self.cols {
                if !allowed(j) || self.basis.contains(&j) {
                    continue;
                }
                let mut r = cost[j];
                for i in 0..m {
                    let a = self.t[i][j];
                    if a != 0.0 {
                        r -= cost[self.basis[i]] * a;
                    }
                }
                if r < -tol {
                    entering = Some(j);
                    break;
                }
            }
            let Some(col) = entering else {
                return Ok(());
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..m {
                let a = self.t[i][col];
                if a > PIVOT_TOL {
                    let ratio = self.rhs(i).max(0.0) / a;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((k, best)) => {
                            if ratio < best - 1e-12 * best.abs().max(1.0)
                                || (ratio <= best + 1e-12 * best.abs().max(1.0)
                                    && self.basis[i] < self.basis[k])
                            {
                                Some((i, ratio))
                            } else {
                                Some((k, best))
                            }
                        }
                    };
                }
            }
            let Some((row, _)) = leave else {
                return Err(LpError::Unbounded);
            };
            self.pivot(row, col);
        }
        Err(LpError::IterationLimit)
    }
}

/// Minimize `cᵀx` subject to `A x ≤ b`, `x ≥ 0`.
pub fn minimize(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> Result<LpSolution, LpError> {
    let n = c.len();
    let m = b.len();
    assert_eq!(a.len(), m, "row count mismatch");
    let scale = b.iter().fold(1.0_f64, |s, v| s.max(v.abs()));
    let cscale = c.iter().fold(1.0_f64, |s, v| s.max(v.abs()));

    let negative: Vec<usize> = (0..m).filter(|&i| b[i] < 0.0).collect();
    let n_art = negative.len();
    let cols = n + m + n_art;
    let mut t = vec![vec![0.0; cols + 1]; m];
    let mut basis = vec![0; m];
    let mut art = 0;
    for i in 0..m {
        assert_eq!(a[i].len(), n, "column count mismatch in row {i}");
        let sign = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            t[i][j] = sign * a[i][j];
        }
        t[i][n + i] = sign;
        t[i][cols] = sign * b[i];
        if sign < 0.0 {
            t[i][n + m + art] = 1.0;
            basis[i] = n + m + art;
            art += 1;
        } else {
            basis[i] = n + i;
        }
    }
    let mut tab = Tableau { t, basis, cols };
    let is_art = |j: usize| j >= n + m;

    if n_art > 0 {
        let mut phase1 = vec![0.0; cols];
        for c in phase1.iter_mut().skip(n + m) {
            *c = 1.0;
        }
        tab.optimize(&phase1, &|_| true, 1e-12)?;
        let infeas: f64 = (0..m)
            .filter(|&i| is_art(tab.basis[i]))
            .map(|i| tab.rhs(i))
            .sum();
        if infeas > 1e-9 * scale {
            return Err(LpError::Infeasible);
        }
        // drive zero-level artificials out of the basis where possible
        for i in 0..m {
            if is_art(tab.basis[i]) {
                if let Some(j) = (0..n + m).find(|&j| tab.t[i][j].abs() > 1e-9) {
                    tab.pivot(i, j);
                }
            }
        }
    }

    let mut cost = vec![0.0; cols];
    cost[..n].copy_from_slice(c);
    tab.optimize(&cost, &|j| !is_art(j), 1e-12 * cscale)?;

    let mut x = vec![0.0; n];
    for i in 0..m {
        let j = tab.basis[i];
        if j < n {
            x[j] = tab.rhs(i).max(0.0);
        }
    }
    let value = c.iter().zip(&x).map(|(ci, xi)| ci * xi).sum();
    Ok(LpSolution { x, value })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_maximization() {
        // max 3x + 5y, x ≤ 4, 2y ≤ 12, 3x + 2y ≤ 18 -> (2, 6), 36
        let s = minimize(
            &[-3.0, -5.0],
            &[vec![1.0, 0.0], vec![0.0, 2.0], vec![3.0, 2.0]],
            &[4.0, 12.0, 18.0],
        )
        .unwrap();
        assert!((s.x[0] - 2.0).abs() < 1e-9);
        assert!((s.x[1] - 6.0).abs() < 1e-9);
        assert!((s.value + 36.0).abs() < 1e-9);
    }

    #[test]
    fn covering_needs_phase_one() {
        // min 2x + y  s.t. x + y ≥ 3, x ≥ 1  -> x = 1, y = 2, value 4
        let s = minimize(&[2.0, 1.0], &[vec![-1.0, -1.0], vec![-1.0, 0.0]], &[-3.0, -1.0]).unwrap();
        assert!((s.value - 4.0).abs() < 1e-9);
        assert!((s.x[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn detects_infeasible_and_unbounded() {
        // x ≤ 1 and x ≥ 2
        assert_eq!(
            minimize(&[1.0], &[vec![1.0], vec![-1.0]], &[1.0, -2.0]),
            Err(LpError::Infeasible)
        );
        assert_eq!(minimize(&[-1.0], &[vec![-1.0]], &[0.0]), Err(LpError::Unbounded));
    }

    #[test]
    fn degenerate_problem_terminates() {
        // classic cycling example under Dantzig's rule
        let c = [-0.75, 150.0, -0.02, 6.0];
        let a = vec![
            vec![0.25, -60.0, -0.04, 9.0],
            vec![0.5, -90.0, -0.02, 3.0],
            vec![0.0, 0.0, 1.0, 0.0],
        ];
        let s = minimize(&c, &a, &[0.0, 0.0, 1.0]).unwrap();
        assert!((s.value + 0.05).abs() < 1e-9);
    }

    #[test]
    fn empty_problem() {
        let s = minimize(&[], &[], &[]).unwrap();
        assert!(s.x.is_empty());
        assert_eq!(s.value, 0.0);
    }
}
