//! Lipschitz approximation of a continuous function on a compact set from a
//! finite cover by balls of radius `r/2`.
//!
//! With centers `x_1 … x_N`,
//!
//! ```text
//! d_i(x) = 1 / (max{l (ρ(x, x_i) − r/2), 0} + 1)
//! p_i(x) = (d_i(x) + c/N) / (Σ_j d_j(x) + c)
//! L(x)   = Σ_i p_i(x) f(x_i)
//! ```
//!
//! and on the compact set `|L − f| ≤ δ + 2‖f‖(N−1)(1/(l r/2 + 1) + c/N)`,
//! where `δ` bounds the oscillation of `f` over pairs at distance `≤ r`.
//! Points are double-precision coordinates of a [`MetricSpace`].

use crate::error::{Error, Result};
use crate::space::MetricSpace;

/// Centers, cover radius, smoothing parameters and sampled values of `f`.
#[derive(Debug, Clone)]
pub struct CoverSpec {
    pub space: MetricSpace,
    pub centers: Vec<f64>,
    pub r: f64,
    pub c: f64,
    pub l: f64,
    pub fvals: Vec<f64>,
    pub fbound: f64,
    pub delta: f64,
}

impl CoverSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if self.centers.is_empty() {
            return bad("cover needs at least one center".into());
        }
        if self.centers.len() != self.fvals.len() {
            return bad(format!(
                "{} centers but {} function values",
                self.centers.len(),
                self.fvals.len()
            ));
        }
        for (name, v) in [("r", self.r), ("c", self.c), ("l", self.l)] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("{name} must be positive, got {v}"));
            }
        }
        if let Some(v) = self.fvals.iter().find(|v| v.abs() > self.fbound) {
            return bad(format!("|f| = {} exceeds the declared bound {}", v.abs(), self.fbound));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    fn proximity(&self, x: f64) -> Vec<f64> {
        self.centers
            .iter()
            .map(|&xi| {
                let rho = self.space.distance_coords(x, xi);
                1.0 / ((self.l * (rho - self.r / 2.0)).max(0.0) + 1.0)
            })
            .collect()
    }

    /// The probability vector `p(x)`.
    pub fn partition_weights(&self, x: f64) -> Vec<f64> {
        let n = self.len() as f64;
        let d = self.proximity(x);
        let denom: f64 = d.iter().sum::<f64>() + self.c;
        d.into_iter().map(|di| (di + self.c / n) / denom).collect()
    }

    /// `L(x) = Σ_i p_i(x) f(x_i)`.
    pub fn eval(&self, x: f64) -> f64 {
        self.partition_weights(x)
            .iter()
            .zip(&self.fvals)
            .map(|(p, v)| p * v)
            .sum()
    }

    pub fn error_bound(&self) -> f64 {
        error_bound(self.delta, self.fbound, self.len(), self.r, self.c, self.l)
    }
}

pub fn partition_weights(spec: &CoverSpec, x: f64) -> Vec<f64> {
    spec.partition_weights(x)
}

pub fn lip_eval(spec: &CoverSpec, x: f64) -> f64 {
    spec.eval(x)
}

/// `δ + 2‖f‖(N−1)(1/(l r/2 + 1) + c/N)`.
pub fn error_bound(delta: f64, fbound: f64, n: usize, r: f64, c: f64, l: f64) -> f64 {
    let n_f = n as f64;
    delta + 2.0 * fbound * (n_f - 1.0) * (1.0 / (l * r / 2.0 + 1.0) + c / n_f)
}

/// Picks `(c, l)` with `error_bound(..) < epsilon`: each of the two bracket
/// terms is held at or below `(ε − δ) / (8‖f‖(N−1))`, so the excess over `δ`
/// is at most `(ε − δ)/2`.
pub fn choose_parameters(delta: f64, fbound: f64, n: usize, r: f64, epsilon: f64) -> Result<(f64, f64)> {
    if delta.is_nan() || delta >= epsilon {
        return Err(Error::DeltaNotBelowEpsilon { delta, epsilon });
    }
    if n == 0 || r.is_nan() || r <= 0.0 {
        return Err(Error::InvalidArgument("need N ≥ 1 and r > 0".into()));
    }
    if n == 1 || fbound == 0.0 {
        return Ok((1.0, 1.0));
    }
    let share = (epsilon - delta) / (8.0 * fbound * (n as f64 - 1.0));
    // 1/(l r/2 + 1) ≤ share
    let l = (2.0 / r) * (1.0 / share - 1.0).max(1.0);
    // c/N ≤ share
    let c = share * n as f64;
    Ok((c, l))
}

/// Greedy farthest-point cover of `grid`: starting from the first grid point,
/// repeatedly adds the grid point farthest from the chosen centers until every
/// grid point lies within `r/2` of one. Returns grid indices.
pub fn greedy_cover(grid: &[f64], space: &MetricSpace, r: f64) -> Vec<usize> {
    if grid.is_empty() {
        return vec![];
    }
    let mut centers = vec![0];
    let mut nearest: Vec<f64> = grid.iter().map(|&x| space.distance_coords(x, grid[0])).collect();
    loop {
        let (far, &gap) = nearest
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .expect("non-empty grid");
        if gap <= r / 2.0 {
            return centers;
        }
        centers.push(far);
        for (d, &x) in nearest.iter_mut().zip(grid) {
            *d = d.min(space.distance_coords(x, grid[far]));
        }
    }
}

/// Grid proxy for the modulus of continuity at `r`: the largest
/// `|f(a) − f(b)|` over grid pairs with `ρ(a, b) ≤ r`.
pub fn grid_modulus(grid: &[f64], fvals: &[f64], space: &MetricSpace, r: f64) -> f64 {
    let mut delta: f64 = 0.0;
    for i in 0..grid.len() {
        for j in i + 1..grid.len() {
            if space.distance_coords(grid[i], grid[j]) <= r {
                delta = delta.max((fvals[i] - fvals[j]).abs());
            }
        }
    }
    delta
}

/// Full pipeline on a sampled compact set: cover at radius `r`, measured
/// `δ`, parameters from [`choose_parameters`].
pub fn build(grid: &[f64], f: impl Fn(f64) -> f64, space: &MetricSpace, r: f64, epsilon: f64) -> Result<CoverSpec> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument("empty grid".into()));
    }
    let values: Vec<f64> = grid.iter().map(|&x| f(x)).collect();
    let fbound = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let delta = grid_modulus(grid, &values, space, r);
    let idx = greedy_cover(grid, space, r);
    let (c, l) = choose_parameters(delta, fbound, idx.len(), r, epsilon)?;
    let spec = CoverSpec {
        space: space.clone(),
        centers: idx.iter().map(|&i| grid[i]).collect(),
        r,
        c,
        l,
        fvals: idx.iter().map(|&i| values[i]).collect(),
        fbound,
        delta,
    };
    spec.validate()?;
    Ok(spec)
}

/// `K` points `0, 1/K, …, (K−1)/K` of the circle.
pub fn circle_grid(k: usize) -> Vec<f64> {
    (0..k).map(|i| i as f64 / k as f64).collect()
}
