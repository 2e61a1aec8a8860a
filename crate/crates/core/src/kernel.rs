//! Transition kernels and the Markov operator `P` / dual operator `U` they
//! induce:
//!
//! ```text
//! Pμ(A)  = ⟨π(·, A), μ⟩
//! Uf(x)  = ⟨f, π(x, ·)⟩
//! ```

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{DiscreteMeasure, ScalarField};
use crate::rational::{fmt_rational, int, parse_rational, Rational};
use crate::space::{FiniteMetric, MetricSpace, SpaceKind};

/// Default cap on the support size of an iterate.
pub const DEFAULT_SUPPORT_CAP: usize = 100_000;

/// A transition probability `x ↦ π(x, ·)` with finitely supported rows.
pub trait TransitionKernel: Send + Sync {
    fn metric(&self) -> &MetricSpace;

    /// The row `π(x, ·)`, a probability measure.
    fn row(&self, x: &Rational) -> Result<DiscreteMeasure>;

    fn space(&self) -> SpaceKind {
        self.metric().kind()
    }
}

fn check_space(k: &dyn TransitionKernel, mu: &DiscreteMeasure) -> Result<()> {
    if k.space() != mu.space() {
        return Err(Error::SpaceMismatch {
            left: k.space(),
            right: mu.space(),
        });
    }
    Ok(())
}

/// `Pμ = Σ_i w_i π(x_i, ·)`.
pub fn apply_p(k: &dyn TransitionKernel, mu: &DiscreteMeasure) -> Result<DiscreteMeasure> {
    check_space(k, mu)?;
    let mut out = DiscreteMeasure::zero(mu.space());
    for (x, w) in mu.atoms() {
        let row = k.row(x)?;
        debug_assert!(row.is_probability(), "row at {x} is not a probability measure");
        for (y, p) in row.atoms() {
            out.add_atom(y.clone(), w * p);
        }
    }
    Ok(out)
}

/// `Uf(x) = ⟨f, π(x, ·)⟩`.
pub fn apply_u(k: &dyn TransitionKernel, f: &ScalarField, x: &Rational) -> Result<f64> {
    Ok(k.row(x)?.pair(f))
}

pub fn iterate_p(k: &dyn TransitionKernel, mu: &DiscreteMeasure, n: usize) -> Result<DiscreteMeasure> {
    iterate_p_capped(k, mu, n, DEFAULT_SUPPORT_CAP)
}

/// `P^n μ`, failing once an iterate's support exceeds `cap` points.
pub fn iterate_p_capped(
    k: &dyn TransitionKernel,
    mu: &DiscreteMeasure,
    n: usize,
    cap: usize,
) -> Result<DiscreteMeasure> {
    check_space(k, mu)?;
    let mut cur = mu.clone();
    for _ in 0..n {
        cur = apply_p(k, &cur)?;
        if cur.len() > cap {
            return Err(Error::SupportBudgetExceeded { size: cur.len(), cap });
        }
    }
    Ok(cur)
}

/// `[μ, Pμ, …, P^n μ]`.
pub fn trajectory(
    k: &dyn TransitionKernel,
    mu: &DiscreteMeasure,
    n: usize,
    cap: usize,
) -> Result<Vec<DiscreteMeasure>> {
    check_space(k, mu)?;
    let mut out = Vec::with_capacity(n + 1);
    out.push(mu.clone());
    for _ in 0..n {
        let next = apply_p(k, out.last().expect("non-empty"))?;
        if next.len() > cap {
            return Err(Error::SupportBudgetExceeded { size: next.len(), cap });
        }
        out.push(next);
    }
    Ok(out)
}

/// `U^n f(x)` through the measure route `⟨f, P^n δ_x⟩`.
pub fn iterate_u(k: &dyn TransitionKernel, f: &ScalarField, x: &Rational, n: usize) -> Result<f64> {
    let delta = DiscreteMeasure::dirac(k.space(), x.clone())?;
    Ok(iterate_p(k, &delta, n)?.pair(f))
}

/// `U^n f(x)` by unrolling `U^n f(x) = Σ_y π(x, {y}) U^{n-1} f(y)`.
///
/// Independent of [`iterate_u`]: no measure is ever assembled. Values of
/// `U^j f(y)` are memoized per `(y, j)`, so the cost is the number of
/// distinct points reachable from `x` rather than the number of paths.
pub fn dual_iterate(k: &dyn TransitionKernel, f: &ScalarField, x: &Rational, n: usize) -> Result<f64> {
    let mut memo = HashMap::new();
    dual_rec(k, f, x, n, &mut memo)
}

fn dual_rec(
    k: &dyn TransitionKernel,
    f: &ScalarField,
    x: &Rational,
    n: usize,
    memo: &mut HashMap<(Rational, usize), f64>,
) -> Result<f64> {
    if n == 0 {
        return Ok(f.eval(x));
    }
    if let Some(v) = memo.get(&(x.clone(), n)) {
        return Ok(*v);
    }
    let row = k.row(x)?;
    let mut acc = 0.0;
    for (y, p) in row.atoms() {
        acc += crate::rational::to_f64(p) * dual_rec(k, f, y, n - 1, memo)?;
    }
    memo.insert((x.clone(), n), acc);
    Ok(acc)
}

/// Kernel on a finite metric space given by its transition matrix.
#[derive(Debug, Clone)]
pub struct FiniteKernel {
    metric: MetricSpace,
    rows: Vec<DiscreteMeasure>,
}

/// JSON row table: `{"distances": [[..]], "rows": [["p/q", ...], ...]}` where
/// `rows[i][j] = π(i, {j})`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelFile {
    pub distances: Vec<Vec<f64>>,
    pub rows: Vec<Vec<String>>,
}

impl FiniteKernel {
    pub fn new(metric: FiniteMetric, matrix: Vec<Vec<Rational>>) -> Result<Self> {
        let n = metric.len();
        let space = SpaceKind::Finite(n);
        if matrix.len() != n {
            return Err(Error::InvalidArgument(format!(
                "{} rows for a space of {n} points",
                matrix.len()
            )));
        }
        let mut rows = Vec::with_capacity(n);
        for (i, entries) in matrix.into_iter().enumerate() {
            let point = fmt_rational(&int(i as i64));
            if entries.len() != n {
                return Err(Error::InvalidKernelRow {
                    point,
                    reason: format!("{} entries, expected {n}", entries.len()),
                });
            }
            let row =
                DiscreteMeasure::from_atoms(space, entries.into_iter().enumerate().map(|(j, p)| (int(j as i64), p)))?;
            if !row.is_probability() {
                return Err(Error::InvalidKernelRow {
                    point,
                    reason: "entries must be non-negative and sum to 1".into(),
                });
            }
            rows.push(row);
        }
        Ok(FiniteKernel {
            metric: MetricSpace::Finite(metric),
            rows,
        })
    }

    pub fn from_file(file: &KernelFile) -> Result<Self> {
        let metric = FiniteMetric::new(file.distances.clone())?;
        let matrix = file
            .rows
            .iter()
            .enumerate()
            .map(|(i, row)| {
                row.iter()
                    .enumerate()
                    .map(|(j, s)| parse_rational(&format!("rows[{i}][{j}]"), s))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(metric, matrix)
    }

    pub fn parse(json: &str) -> Result<Self> {
        Self::from_file(&serde_json::from_str(json)?)
    }
}

impl TransitionKernel for FiniteKernel {
    fn metric(&self) -> &MetricSpace {
        &self.metric
    }

    fn row(&self, x: &Rational) -> Result<DiscreteMeasure> {
        self.space().check(x)?;
        let i: usize = num::ToPrimitive::to_usize(&x.to_integer()).expect("checked index");
        Ok(self.rows[i].clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn walk() -> FiniteKernel {
        // lazy walk on a path of three points
        let json = r#"{
            "distances": [[0, 1, 2], [1, 0, 1], [2, 1, 0]],
            "rows": [["1/2", "1/2", "0"], ["1/4", "1/2", "1/4"], ["0", "1/2", "1/2"]]
        }"#;
        FiniteKernel::parse(json).unwrap()
    }

    #[test]
    fn finite_kernel_rows() {
        let k = walk();
        let r = k.row(&int(1)).unwrap();
        assert_eq!(r.weight_at(&int(0)), rat(1, 4));
        assert!(k.row(&int(3)).is_err());
    }

    #[test]
    fn rejects_non_stochastic_rows() {
        let json = r#"{"distances": [[0, 1], [1, 0]], "rows": [["1/2", "1/3"], ["0", "1"]]}"#;
        assert!(matches!(FiniteKernel::parse(json), Err(Error::InvalidKernelRow { .. })));
    }

    #[test]
    fn zero_measure_stays_zero() {
        let k = walk();
        let z = DiscreteMeasure::zero(k.space());
        assert!(apply_p(&k, &z).unwrap().is_empty());
    }

    #[test]
    fn iterate_zero_steps_is_identity() {
        let k = walk();
        let mu = DiscreteMeasure::from_atoms(k.space(), [(int(0), rat(1, 3)), (int(2), rat(2, 3))]).unwrap();
        assert_eq!(iterate_p(&k, &mu, 0).unwrap(), mu);
    }

    #[test]
    fn support_cap_is_enforced() {
        let k = walk();
        let mu = DiscreteMeasure::dirac(k.space(), int(0)).unwrap();
        assert!(matches!(
            iterate_p_capped(&k, &mu, 3, 2),
            Err(Error::SupportBudgetExceeded { size: 3, cap: 2 })
        ));
    }

    #[test]
    fn measure_and_dual_routes_agree() {
        let k = walk();
        let f = ScalarField::new("sq", |x| crate::rational::to_f64(x).powi(2));
        for n in 0..8 {
            for x in 0..3 {
                let a = iterate_u(&k, &f, &int(x), n).unwrap();
                let b = dual_iterate(&k, &f, &int(x), n).unwrap();
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn space_mismatch() {
        let k = walk();
        let mu = DiscreteMeasure::dirac(SpaceKind::Circle, int(0)).unwrap();
        assert!(matches!(apply_p(&k, &mu), Err(Error::SpaceMismatch { .. })));
    }
}
