//! Dense primal simplex for `maximize c·x  s.t.  A x ≤ b, x ≥ 0` with `b ≥ 0`.
//!
//! With a non-negative right-hand side the origin is feasible, so the slack
//! basis is a valid starting point and no phase one is needed. The tableau is
//! kept in dictionary form (one row per constraint, one column per non-basic
//! variable) and pivots follow Bland's rule, which rules out cycling on the
//! heavily degenerate Fortet-Mourier programs.

use crate::error::{Error, Result};

const PIVOT_EPS: f64 = 1e-12;

/// Tolerance on primal feasibility and objective reproduction.
pub const LP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    pub pivots: usize,
}

/// Row-major dictionary: `x_{basic[i]} = b[i] - Σ_j a[i][j] x_{nonbasic[j]}`,
/// `z = v + Σ_j c[j] x_{nonbasic[j]}`.
struct Dictionary {
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
    c: Vec<f64>,
    v: f64,
    basic: Vec<usize>,
    nonbasic: Vec<usize>,
}

impl Dictionary {
    fn pivot(&mut self, row: usize, col: usize) {
        let piv = self.a[row][col];
        let inv = 1.0 / piv;
        {
            let r = &mut self.a[row];
            for (j, v) in r.iter_mut().enumerate() {
                if j != col {
                    *v *= inv;
                }
            }
            r[col] = inv;
        }
        self.b[row] *= inv;
        let pivot_row = self.a[row].clone();
        let pivot_b = self.b[row];

        for i in 0..self.a.len() {
            if i == row {
                continue;
            }
            let coef = self.a[i][col];
            if coef == 0.0 {
                continue;
            }
            self.b[i] -= coef * pivot_b;
            let r = &mut self.a[i];
            for (j, v) in r.iter_mut().enumerate() {
                if j != col {
                    *v -= coef * pivot_row[j];
                }
            }
            r[col] = -coef * pivot_row[col];
        }

        let coef = self.c[col];
        self.v += coef * pivot_b;
        for (j, v) in self.c.iter_mut().enumerate() {
            if j != col {
                *v -= coef * pivot_row[j];
            }
        }
        self.c[col] = -coef * pivot_row[col];

        std::mem::swap(&mut self.basic[row], &mut self.nonbasic[col]);
    }

    /// Bland: lowest-index improving variable enters.
    fn entering(&self) -> Option<usize> {
        self.c
            .iter()
            .enumerate()
            .filter(|(_, &cj)| cj > PIVOT_EPS)
            .min_by_key(|(j, _)| self.nonbasic[*j])
            .map(|(j, _)| j)
    }

    /// Minimum ratio test; ties go to the lowest-index basic variable.
    fn leaving(&self, col: usize) -> Option<usize> {
        let mut best: Option<(f64, usize, usize)> = None;
        for (i, row) in self.a.iter().enumerate() {
            let aij = row[col];
            if aij <= PIVOT_EPS {
                continue;
            }
            let ratio = self.b[i].max(0.0) / aij;
            let better = match best {
                None => true,
                Some((r, _, var)) => ratio < r - PIVOT_EPS || (ratio <= r + PIVOT_EPS && self.basic[i] < var),
            };
            if better {
                best = Some((ratio, i, self.basic[i]));
            }
        }
        best.map(|(_, i, _)| i)
    }
}

/// Solves `max c·x, A x ≤ b, x ≥ 0`. Requires `b ≥ 0`; reports an error for an
/// unbounded program or a solution that fails the feasibility re-check.
pub fn maximize(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> Result<LpSolution> {
    let n = c.len();
    let m = b.len();
    if a.len() != m || a.iter().any(|row| row.len() != n) {
        return Err(Error::Lp("constraint matrix shape mismatch".into()));
    }
    if b.iter().any(|&bi| bi < 0.0 || !bi.is_finite()) {
        return Err(Error::Lp("right-hand side must be finite and non-negative".into()));
    }

    let mut d = Dictionary {
        a: a.to_vec(),
        b: b.to_vec(),
        c: c.to_vec(),
        v: 0.0,
        basic: (n..n + m).collect(),
        nonbasic: (0..n).collect(),
    };

    let max_pivots = 50 * (n + m).max(1) * (n + m).max(1);
    let mut pivots = 0;
    while let Some(col) = d.entering() {
        let row = d
            .leaving(col)
            .ok_or_else(|| Error::Lp("objective is unbounded".into()))?;
        d.pivot(row, col);
        pivots += 1;
        if pivots > max_pivots {
            return Err(Error::Lp(format!("no convergence after {pivots} pivots")));
        }
    }

    let mut x = vec![0.0; n];
    for (i, &var) in d.basic.iter().enumerate() {
        if var < n {
            x[var] = d.b[i].max(0.0);
        }
    }

    for (i, row) in a.iter().enumerate() {
        let lhs: f64 = row.iter().zip(&x).map(|(aij, xj)| aij * xj).sum();
        if lhs > b[i] + LP_TOL {
            return Err(Error::Lp(format!("constraint {i} violated by {:e}", lhs - b[i])));
        }
    }
    let objective: f64 = c.iter().zip(&x).map(|(ci, xi)| ci * xi).sum();
    if (objective - d.v).abs() > LP_TOL * (1.0 + d.v.abs()) {
        return Err(Error::Lp(format!(
            "objective mismatch: tableau {} vs recomputed {objective}",
            d.v
        )));
    }
    Ok(LpSolution { x, objective, pivots })
}
