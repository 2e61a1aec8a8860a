//! Fortet-Mourier (bounded-Lipschitz) norm of finitely supported signed
//! measures.
//!
//! For `μ = Σ_i w_i δ_{x_i}` the supremum of `|⟨f, μ⟩|` over `f` with values in
//! `[0,1]` and Lipschitz constant at most one only depends on the values
//! `f_i = f(x_i)`: any vector satisfying `0 ≤ f_i ≤ 1` and
//! `f_i − f_j ≤ ρ(x_i, x_j)` extends to such a function on the whole space
//! (McShane extension, clipped to `[0,1]`). The norm is therefore the larger
//! of two linear programs, `max ±Σ w_i f_i` over that polytope.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lp::{self, LP_TOL};
use crate::measure::{difference, DiscreteMeasure};
use crate::rational::{fmt_rational, to_f64, Rational};
use crate::space::MetricSpace;

/// Largest support handed to the dense LP.
pub const MAX_FM_SUPPORT: usize = 200;

/// Largest support the grid oracle enumerates.
pub const MAX_ORACLE_SUPPORT: usize = 4;

/// The data of one Fortet-Mourier program.
#[derive(Debug, Clone)]
pub struct FmProblem {
    points: Vec<Rational>,
    weights: Vec<Rational>,
    dist: Vec<Vec<f64>>,
}

impl FmProblem {
    pub fn new(mu: &DiscreteMeasure, space: &MetricSpace) -> Result<Self> {
        if mu.space() != space.kind() {
            return Err(Error::SpaceMismatch {
                left: mu.space(),
                right: space.kind(),
            });
        }
        let (points, weights): (Vec<_>, Vec<_>) = mu.atoms().map(|(x, w)| (x.clone(), w.clone())).unzip();
        let dist = points
            .iter()
            .map(|x| points.iter().map(|y| space.distance(x, y)).collect())
            .collect();
        Ok(FmProblem { points, weights, dist })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn weights_f64(&self) -> Vec<f64> {
        self.weights.iter().map(to_f64).collect()
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.dist[i][j]
    }

    /// Maximizes `sign · Σ w_i f_i` over the Lipschitz box.
    fn solve_signed(&self, sign: f64) -> Result<lp::LpSolution> {
        let n = self.len();
        let c: Vec<f64> = self.weights_f64().into_iter().map(|w| sign * w).collect();
        let mut a = Vec::new();
        let mut b = Vec::new();
        for i in 0..n {
            let mut row = vec![0.0; n];
            row[i] = 1.0;
            a.push(row);
            b.push(1.0);
        }
        for i in 0..n {
            for j in 0..n {
                // pairs at distance ≥ 1 are implied by the box
                if i == j || self.dist[i][j] >= 1.0 {
                    continue;
                }
                let mut row = vec![0.0; n];
                row[i] = 1.0;
                row[j] = -1.0;
                a.push(row);
                b.push(self.dist[i][j]);
            }
        }
        lp::maximize(&c, &a, &b)
    }

    /// Largest violation of the box and Lipschitz constraints by `f`.
    pub fn max_violation(&self, f: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, &fi) in f.iter().enumerate() {
            worst = worst.max(-fi).max(fi - 1.0);
            for (j, &fj) in f.iter().enumerate() {
                worst = worst.max(fi - fj - self.dist[i][j]);
            }
        }
        worst
    }

    pub fn objective(&self, f: &[f64]) -> f64 {
        self.weights_f64().iter().zip(f).map(|(w, fi)| w * fi).sum()
    }
}

/// Optimal value and a maximizing test function (values on the support).
#[derive(Debug, Clone, Serialize)]
pub struct FmSolution {
    pub value: f64,
    #[serde(serialize_with = "serialize_points")]
    pub points: Vec<Rational>,
    pub witness: Vec<f64>,
}

fn serialize_points<S: serde::Serializer>(points: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(points.iter().map(fmt_rational))
}

/// `‖μ‖_FM` by linear programming, with an optimal witness.
pub fn fm_norm(mu: &DiscreteMeasure, space: &MetricSpace) -> Result<FmSolution> {
    let problem = FmProblem::new(mu, space)?;
    if problem.is_empty() {
        return Ok(FmSolution {
            value: 0.0,
            points: vec![],
            witness: vec![],
        });
    }
    if problem.len() > MAX_FM_SUPPORT {
        return Err(Error::FmSupportTooLarge {
            size: problem.len(),
            cap: MAX_FM_SUPPORT,
        });
    }
    let plus = problem.solve_signed(1.0)?;
    let minus = problem.solve_signed(-1.0)?;
    let best = if plus.objective >= minus.objective { plus } else { minus };

    if problem.max_violation(&best.x) > LP_TOL {
        return Err(Error::Lp("witness violates the Lipschitz box".into()));
    }
    Ok(FmSolution {
        value: problem.objective(&best.x).abs(),
        points: problem.points,
        witness: best.x,
    })
}

/// `‖μ − ν‖_FM`.
pub fn fm_distance(mu: &DiscreteMeasure, nu: &DiscreteMeasure, space: &MetricSpace) -> Result<FmSolution> {
    fm_norm(&difference(mu, nu)?, space)
}

/// Grid lower bound on `‖μ‖_FM`: the best `|Σ w_i f_i|` over
/// `f ∈ {0, step, 2·step, …}^n` that satisfies the Lipschitz box exactly.
///
/// The search enumerates every grid value of the first `n − 2` coordinates;
/// the last two are then maximized over the lattice points of a polygon cut
/// out by axis-parallel and diagonal lines with integer offsets, whose
/// vertices are themselves lattice points with one coordinate on an
/// axis-parallel side. Result is exact for the grid and independent of the
/// simplex code.
pub fn fm_norm_oracle(mu: &DiscreteMeasure, space: &MetricSpace, step: f64) -> Result<f64> {
    if !(step > 0.0 && step <= 0.1) {
        return Err(Error::InvalidArgument(format!("oracle step {step} outside (0, 0.1]")));
    }
    let problem = FmProblem::new(mu, space)?;
    let n = problem.len();
    if n > MAX_ORACLE_SUPPORT {
        return Err(Error::OracleSupportTooLarge(n));
    }
    if n == 0 {
        return Ok(0.0);
    }
    let top = (1.0 / step + 1e-9).floor() as i64;
    let caps: Vec<Vec<i64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| ((problem.distance(i, j) / step + 1e-9).floor() as i64).min(top))
                .collect()
        })
        .collect();
    let w = problem.weights_f64();

    let search = GridSearch { n, top, caps: &caps };
    let hi = search.best(&w);
    let neg: Vec<f64> = w.iter().map(|x| -x).collect();
    let lo = search.best(&neg);
    Ok(hi.max(lo) * step)
}

struct GridSearch<'a> {
    n: usize,
    top: i64,
    caps: &'a [Vec<i64>],
}

impl GridSearch<'_> {
    /// `max Σ w_i g_i` over feasible integer vectors `g`.
    fn best(&self, w: &[f64]) -> f64 {
        let mut prefix = Vec::with_capacity(self.n);
        self.descend(w, &mut prefix, 0.0)
    }

    /// Feasible range of coordinate `k` given the fixed prefix.
    fn range(&self, k: usize, prefix: &[i64]) -> (i64, i64) {
        let mut lo = 0;
        let mut hi = self.top;
        for (j, &g) in prefix.iter().enumerate() {
            lo = lo.max(g - self.caps[j][k]);
            hi = hi.min(g + self.caps[k][j]);
        }
        (lo, hi)
    }

    fn descend(&self, w: &[f64], prefix: &mut Vec<i64>, acc: f64) -> f64 {
        let k = prefix.len();
        let remaining = self.n - k;
        if remaining <= 2 {
            return acc + self.tail(w, prefix);
        }
        let (lo, hi) = self.range(k, prefix);
        let mut best = f64::NEG_INFINITY;
        for g in lo..=hi {
            prefix.push(g);
            best = best.max(self.descend(w, prefix, acc + w[k] * g as f64));
            prefix.pop();
        }
        best
    }

    /// Exact optimum over the last one or two coordinates.
    fn tail(&self, w: &[f64], prefix: &[i64]) -> f64 {
        let k = prefix.len();
        let (l1, u1) = self.range(k, prefix);
        if l1 > u1 {
            return f64::NEG_INFINITY;
        }
        let pick = |wk: f64, lo: i64, hi: i64| if wk >= 0.0 { hi } else { lo };
        if self.n - k == 1 {
            return w[k] * pick(w[k], l1, u1) as f64;
        }
        let (l2, u2) = self.range(k + 1, prefix);
        if l2 > u2 {
            return f64::NEG_INFINITY;
        }
        let c12 = self.caps[k][k + 1];
        let c21 = self.caps[k + 1][k];
        let mut best = f64::NEG_INFINITY;
        // first coordinate on a side of its box, second optimal on the slice
        for g1 in [l1, u1] {
            let lo = l2.max(g1 - c12);
            let hi = u2.min(g1 + c21);
            if lo <= hi {
                let g2 = pick(w[k + 1], lo, hi);
                best = best.max(w[k] * g1 as f64 + w[k + 1] * g2 as f64);
            }
        }
        for g2 in [l2, u2] {
            let lo = l1.max(g2 - c21);
            let hi = u1.min(g2 + c12);
            if lo <= hi {
                let g1 = pick(w[k], lo, hi);
                best = best.max(w[k] * g1 as f64 + w[k + 1] * g2 as f64);
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use crate::space::{FiniteMetric, SpaceKind};

    type Atom = ((i64, i64), (i64, i64));

    fn circle(atoms: &[Atom]) -> DiscreteMeasure {
        DiscreteMeasure::from_atoms(
            SpaceKind::Circle,
            atoms.iter().map(|&((p, q), (a, b))| (rat(p, q), rat(a, b))),
        )
        .unwrap()
    }

    /// Brute-force oracle over every grid vector, used to check the
    /// pruned search on tiny instances.
    fn naive_grid(problem: &FmProblem, step: f64) -> f64 {
        let n = problem.len();
        let top = (1.0 / step + 1e-9).floor() as i64;
        let w = problem.weights_f64();
        let mut best: f64 = 0.0;
        let mut g = vec![0i64; n];
        loop {
            let f: Vec<f64> = g.iter().map(|&v| v as f64 * step).collect();
            let feasible =
                (0..n).all(|i| (0..n).all(|j| g[i] - g[j] <= ((problem.distance(i, j) / step + 1e-9).floor() as i64)));
            if feasible {
                let v: f64 = w.iter().zip(&f).map(|(a, b)| a * b).sum();
                best = best.max(v.abs());
            }
            let mut k = 0;
            while k < n && g[k] == top {
                g[k] = 0;
                k += 1;
            }
            if k == n {
                break;
            }
            g[k] += 1;
        }
        best
    }

    #[test]
    fn two_point_formula() {
        let mu = circle(&[((0, 1), (1, 1)), ((1, 8), (-1, 1))]);
        let rho = MetricSpace::Circle.distance(&int(0), &rat(1, 8));
        let sol = fm_norm(&mu, &MetricSpace::Circle).unwrap();
        assert!((sol.value - rho.min(1.0)).abs() < 1e-9);

        let far = circle(&[((0, 1), (1, 1)), ((1, 2), (-1, 1))]);
        assert!((fm_norm(&far, &MetricSpace::Circle).unwrap().value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_measure_has_zero_norm() {
        let z = DiscreteMeasure::zero(SpaceKind::Circle);
        assert_eq!(fm_norm(&z, &MetricSpace::Circle).unwrap().value, 0.0);
        assert_eq!(fm_norm_oracle(&z, &MetricSpace::Circle, 0.01).unwrap(), 0.0);
    }

    #[test]
    fn three_point_circle_against_oracle() {
        let mu = circle(&[((0, 1), (1, 1)), ((1, 4), (-1, 2)), ((3, 4), (-1, 2))]);
        let lp = fm_norm(&mu, &MetricSpace::Circle).unwrap().value;
        let grid = fm_norm_oracle(&mu, &MetricSpace::Circle, 1e-3).unwrap();
        assert!(grid <= lp + 1e-9);
        assert!(lp - grid <= 2e-3, "lp {lp} grid {grid}");
        // both quarter points sit at chord √2 > 1, so the norm is 1
        assert!((lp - 1.0).abs() < 1e-9);
    }

    #[test]
    fn oracle_single_atom_and_far_pair() {
        let single = circle(&[((1, 3), (3, 4))]);
        assert!((fm_norm_oracle(&single, &MetricSpace::Circle, 0.05).unwrap() - 0.75).abs() < 1e-12);
        let far = DiscreteMeasure::from_atoms(SpaceKind::RealLine, [(int(0), int(1)), (int(3), int(-1))]).unwrap();
        assert!((fm_norm_oracle(&far, &MetricSpace::RealLine, 0.01).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn oracle_argument_checks() {
        let mu = circle(&[((0, 1), (1, 1))]);
        assert!(fm_norm_oracle(&mu, &MetricSpace::Circle, 0.2).is_err());
        assert!(fm_norm_oracle(&mu, &MetricSpace::Circle, 0.0).is_err());
        let five = circle(&[
            ((0, 1), (1, 1)),
            ((1, 5), (1, 1)),
            ((2, 5), (1, 1)),
            ((3, 5), (1, 1)),
            ((4, 5), (1, 1)),
        ]);
        assert!(matches!(
            fm_norm_oracle(&five, &MetricSpace::Circle, 0.1),
            Err(Error::OracleSupportTooLarge(5))
        ));
    }

    #[test]
    fn pruned_search_matches_brute_force() {
        let cases = [
            circle(&[((0, 1), (1, 1)), ((1, 16), (-1, 2)), ((3, 16), (-1, 2))]),
            circle(&[
                ((0, 1), (2, 3)),
                ((1, 32), (-1, 1)),
                ((1, 8), (1, 3)),
                ((1, 2), (-1, 5)),
            ]),
            circle(&[((1, 7), (1, 4)), ((2, 7), (-3, 4)), ((3, 50), (1, 2))]),
        ];
        for mu in &cases {
            let problem = FmProblem::new(mu, &MetricSpace::Circle).unwrap();
            let fast = fm_norm_oracle(mu, &MetricSpace::Circle, 0.05).unwrap();
            let slow = naive_grid(&problem, 0.05);
            assert!((fast - slow).abs() < 1e-12, "{fast} vs {slow}");
        }
    }

    #[test]
    fn zero_mass_sign_symmetry() {
        // for zero total mass, f ↦ 1 − f maps one sign program onto the other
        let mu = circle(&[((0, 1), (1, 2)), ((1, 10), (1, 2)), ((1, 2), (-1, 1))]);
        let p = FmProblem::new(&mu, &MetricSpace::Circle).unwrap();
        let plus = p.solve_signed(1.0).unwrap().objective;
        let minus = p.solve_signed(-1.0).unwrap().objective;
        assert!((plus - minus).abs() < 1e-9);
    }

    #[test]
    fn witness_is_feasible_and_optimal() {
        let mu = circle(&[((0, 1), (1, 3)), ((1, 9), (-1, 1)), ((1, 5), (2, 3)), ((2, 3), (-1, 4))]);
        let sol = fm_norm(&mu, &MetricSpace::Circle).unwrap();
        let p = FmProblem::new(&mu, &MetricSpace::Circle).unwrap();
        assert!(p.max_violation(&sol.witness) <= 1e-9);
        assert!((p.objective(&sol.witness).abs() - sol.value).abs() <= 1e-9);
    }

    #[test]
    fn finite_space() {
        let metric = MetricSpace::Finite(FiniteMetric::new(vec![vec![0.0, 0.25], vec![0.25, 0.0]]).unwrap());
        let mu = DiscreteMeasure::from_atoms(SpaceKind::Finite(2), [(int(0), int(1)), (int(1), int(-1))]).unwrap();
        assert!((fm_norm(&mu, &metric).unwrap().value - 0.25).abs() < 1e-12);
    }

    #[test]
    fn space_mismatch_is_an_error() {
        let mu = circle(&[((0, 1), (1, 1))]);
        assert!(matches!(
            fm_norm(&mu, &MetricSpace::RealLine),
            Err(Error::SpaceMismatch { .. })
        ));
    }
}
