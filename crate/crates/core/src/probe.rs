//! Diagnostics for the e-property and asymptotic stability.
//!
//! The supremum over `n ∈ ℕ` in `sup_n |U^n f(x) − U^n f(z)|` is truncated at
//! `n_max` and taken over `n ≥ 1`. Every reported value is computed from exact
//! iterates `P^n δ_x`; the pairing with `f` is exact whenever `f` has an
//! exact evaluator.

use num::{Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::examples::circle::ex1_closed_form;
use crate::examples::svc::{Ex2Kernel, SvcClassification, SvcTree};
use crate::fm::fm_distance;
use crate::kernel::{iterate_p, trajectory, TransitionKernel, DEFAULT_SUPPORT_CAP};
use crate::measure::{DiscreteMeasure, ScalarField};
use crate::rational::{fmt_rational, fmt_real, int, pow2, rat, to_f64, Rational};
use crate::space::{SpaceKind, UnitRational};

/// `(U f(x), U² f(x), …, U^{n_max} f(x))`, plus exact values when available.
fn dual_series(
    k: &dyn TransitionKernel,
    f: &ScalarField,
    x: &Rational,
    n_max: usize,
) -> Result<(Vec<f64>, Option<Vec<Rational>>)> {
    let delta = DiscreteMeasure::dirac(k.space(), x.clone())?;
    let traj = trajectory(k, &delta, n_max, DEFAULT_SUPPORT_CAP)?;
    let approx = traj[1..].iter().map(|mu| mu.pair(f)).collect();
    let exact = if f.has_exact() {
        traj[1..].iter().map(|mu| mu.pair_exact(f)).collect()
    } else {
        None
    };
    Ok((approx, exact))
}

/// `|U^n f(x_m) − U^n f(z)|` for each approach point `x_m` and `1 ≤ n ≤ n_max`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModulusReport {
    #[serde(serialize_with = "ser_rational")]
    pub z: Rational,
    #[serde(serialize_with = "ser_rationals")]
    pub approach: Vec<Rational>,
    pub n_max: usize,
    /// `values[m][n-1]`.
    pub values: Vec<Vec<f64>>,
    pub modulus: Vec<f64>,
    /// Step `n` at which each supremum is first attained.
    pub argmax: Vec<usize>,
    /// Exact suprema, when `f` is exactly evaluable.
    #[serde(skip)]
    pub exact_modulus: Option<Vec<Rational>>,
}

fn ser_rational<S: serde::Serializer>(x: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_rational(x))
}

fn ser_rationals<S: serde::Serializer>(xs: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(xs.iter().map(fmt_rational))
}

impl ModulusReport {
    /// One row per `(m, n)`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("m,x,n,value\n");
        for (m, (x, row)) in self.approach.iter().zip(&self.values).enumerate() {
            for (i, v) in row.iter().enumerate() {
                out.push_str(&format!("{},{},{},{}\n", m + 1, fmt_rational(x), i + 1, fmt_real(*v)));
            }
        }
        out
    }

    /// Modulus per approach point.
    pub fn summary_json(&self) -> serde_json::Value {
        let rows: Vec<_> = self
            .approach
            .iter()
            .enumerate()
            .map(|(m, x)| {
                let mut row = json!({
                    "m": m + 1,
                    "x": fmt_rational(x),
                    "modulus": fmt_real(self.modulus[m]),
                    "argmax": self.argmax[m],
                });
                if let Some(exact) = &self.exact_modulus {
                    row["exact"] = json!(fmt_rational(&exact[m]));
                }
                row
            })
            .collect();
        json!({ "z": fmt_rational(&self.z), "n_max": self.n_max, "rows": rows })
    }

    pub fn summary_csv(&self) -> String {
        let mut out = String::from("m,x,modulus,argmax\n");
        for (m, x) in self.approach.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{},{}\n",
                m + 1,
                fmt_rational(x),
                fmt_real(self.modulus[m]),
                self.argmax[m]
            ));
        }
        out
    }
}

/// Truncated equicontinuity modulus of `(U^n f)` at `z` along `approach`.
pub fn equicontinuity_modulus(
    k: &dyn TransitionKernel,
    f: &ScalarField,
    z: &Rational,
    approach: &[Rational],
    n_max: usize,
) -> Result<ModulusReport> {
    if n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    if approach.is_empty() {
        return Err(Error::InvalidArgument("approach sequence is empty".into()));
    }
    let (fz, fz_exact) = dual_series(k, f, z, n_max)?;
    let rows: Vec<(Vec<f64>, Option<Vec<Rational>>)> = approach
        .par_iter()
        .map(|x| dual_series(k, f, x, n_max))
        .collect::<Result<_>>()?;

    let mut values = Vec::with_capacity(rows.len());
    let mut modulus = Vec::with_capacity(rows.len());
    let mut argmax = Vec::with_capacity(rows.len());
    let mut exact_modulus = fz_exact.as_ref().map(|_| Vec::with_capacity(rows.len()));
    for (fx, fx_exact) in rows {
        let diffs: Vec<f64> = match (&fx_exact, &fz_exact) {
            (Some(a), Some(b)) => a.iter().zip(b).map(|(p, q)| to_f64(&(p - q).abs())).collect(),
            _ => fx.iter().zip(&fz).map(|(p, q)| (p - q).abs()).collect(),
        };
        let (best, &sup) = diffs
            .iter()
            .enumerate()
            .fold((0, &0.0), |acc, (i, v)| if *v > *acc.1 { (i, v) } else { acc });
        if let (Some(out), Some(a), Some(b)) = (exact_modulus.as_mut(), &fx_exact, &fz_exact) {
            let sup_exact = a
                .iter()
                .zip(b)
                .map(|(p, q)| (p - q).abs())
                .max()
                .unwrap_or_else(Rational::zero);
            out.push(sup_exact);
        }
        modulus.push(sup);
        argmax.push(best + 1);
        values.push(diffs);
    }
    Ok(ModulusReport {
        z: z.clone(),
        approach: approach.to_vec(),
        n_max,
        values,
        modulus,
        argmax,
        exact_modulus,
    })
}

/// `x_n = z + 2^{-K-n}`, `n = 1..=count`, for dyadic `z` with expansion
/// length `K`.
pub fn dyadic_approach(z: &UnitRational, count: u32) -> Result<Vec<Rational>> {
    let k = z.dyadic_length().ok_or_else(|| Error::NotDyadic(z.to_string()))?;
    Ok((1..=count).map(|n| z.value() + pow2(-((k + n) as i64))).collect())
}

/// `x_k = z + 2^{-k}`, `k = 1..=count`, keeping only points of `space`.
pub fn halving_approach(z: &Rational, count: u32, space: SpaceKind) -> Vec<Rational> {
    (1..=count)
        .map(|k| z + pow2(-(k as i64)))
        .filter(|x| space.contains(x))
        .collect()
}

/// The `K`-bit truncations of `z`.
pub fn truncation_approach(z: &UnitRational, ks: &[u32]) -> Vec<Rational> {
    ks.iter().map(|&k| z.truncate(k).into_inner()).collect()
}

/// Witness of non-equicontinuity at a dyadic point: with `K` the expansion
/// length of `z` and `x_n = z + 2^{-K-n}`, the value
/// `|U^{K+n-1} f(x_n) − U^{K+n-1} f(z)|` from closed-form iterates.
pub fn dyadic_witness(z: &UnitRational, f: &ScalarField, n: u32) -> Result<f64> {
    let (mx, mz) = dyadic_witness_measures(z, n)?;
    Ok((mx.pair(f) - mz.pair(f)).abs())
}

/// Exact form of [`dyadic_witness`]; `f` must be exactly evaluable.
pub fn dyadic_witness_exact(z: &UnitRational, f: &ScalarField, n: u32) -> Result<Rational> {
    let (mx, mz) = dyadic_witness_measures(z, n)?;
    match (mx.pair_exact(f), mz.pair_exact(f)) {
        (Some(a), Some(b)) => Ok((a - b).abs()),
        _ => Err(Error::InvalidArgument(format!(
            "field '{}' has no exact evaluator",
            f.name()
        ))),
    }
}

fn dyadic_witness_measures(z: &UnitRational, n: u32) -> Result<(DiscreteMeasure, DiscreteMeasure)> {
    if n == 0 {
        return Err(Error::InvalidArgument("witness index n must be at least 1".into()));
    }
    let k = z.dyadic_length().ok_or_else(|| Error::NotDyadic(z.to_string()))?;
    let x = UnitRational::new(z.value() + pow2(-((k + n) as i64)))?;
    let step = k + n - 1;
    Ok((ex1_closed_form(&x, step), ex1_closed_form(z, step)))
}

/// Witness at a point of the SVC set.
#[derive(Debug, Clone, PartialEq)]
pub struct SvcWitness {
    /// Peak of the chosen removed interval.
    pub x: Rational,
    pub level: u32,
    /// `T(x) = 1/level`.
    pub t: Rational,
    /// `2^{n0} T(x) ∈ (1/2, 1]`.
    pub n0: u32,
    pub value: f64,
    pub exact: Option<Rational>,
}

/// Uses the removed interval of the deepest level of `tree` that sits inside
/// the kept interval containing `z` one level up.
pub fn svc_witness(z: &Rational, tree: &SvcTree, f: &ScalarField) -> Result<SvcWitness> {
    svc_witness_at_level(z, tree, tree.depth(), f)
}

/// As [`svc_witness`], with the removed interval taken at `level`.
pub fn svc_witness_at_level(z: &Rational, tree: &SvcTree, level: u32, f: &ScalarField) -> Result<SvcWitness> {
    if level == 0 || level > tree.depth() {
        return Err(Error::NoRemovedInterval(level));
    }
    let index = match tree.classify(z)? {
        SvcClassification::Kept { index, .. } => index,
        SvcClassification::Removed { level, index, .. } => {
            return Err(Error::InvalidArgument(format!(
                "{} lies in removed interval ({level}, {index})",
                fmt_rational(z)
            )))
        }
    };
    // ancestor of c_{depth,index} at level - 1
    let parent = ((index - 1) >> (tree.depth() - level + 1)) + 1;
    let w = tree.removed_interval(level, parent)?;
    let x = w.midpoint();
    let t = tree.t_eval(&x)?.value;

    let half = rat(1, 2);
    let mut n0 = 0u32;
    while &t * pow2(n0 as i64) <= half {
        n0 += 1;
    }

    let kernel = Ex2Kernel::new(*tree);
    let steps = n0 as usize + 1;
    let at = |p: &Rational| -> Result<DiscreteMeasure> {
        iterate_p(
            &kernel,
            &DiscreteMeasure::dirac(SpaceKind::IntervalUnion, p.clone())?,
            steps,
        )
    };
    let (mx, mz) = (at(&x)?, at(z)?);
    let value = (mx.pair(f) - mz.pair(f)).abs();
    let exact = match (mx.pair_exact(f), mz.pair_exact(f)) {
        (Some(a), Some(b)) => Some((a - b).abs()),
        _ => None,
    };
    Ok(SvcWitness {
        x,
        level,
        t,
        n0,
        value,
        exact,
    })
}

/// `‖P^n μ0 − μ_target‖_FM` for `n = 0..=n_max`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityTrace {
    pub distances: Vec<f64>,
}

impl StabilityTrace {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,fm_distance\n");
        for (n, d) in self.distances.iter().enumerate() {
            out.push_str(&format!("{n},{}\n", fmt_real(*d)));
        }
        out
    }

    /// First index from which every entry is at most `tol`.
    pub fn settles_at(&self, tol: f64) -> Option<usize> {
        let mut idx = None;
        for (n, d) in self.distances.iter().enumerate().rev() {
            if *d > tol {
                break;
            }
            idx = Some(n);
        }
        idx
    }
}

pub fn stability_trace(
    k: &dyn TransitionKernel,
    mu0: &DiscreteMeasure,
    target: &DiscreteMeasure,
    n_max: usize,
) -> Result<StabilityTrace> {
    let traj = trajectory(k, mu0, n_max, DEFAULT_SUPPORT_CAP)?;
    let distances = traj
        .par_iter()
        .map(|mu| fm_distance(mu, target, k.metric()).map(|s| s.value))
        .collect::<Result<_>>()?;
    Ok(StabilityTrace { distances })
}

/// Outcome of [`basin_probe`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BasinReport {
    pub holds: bool,
    pub worst: f64,
    #[serde(serialize_with = "ser_rational")]
    pub worst_point: Rational,
    pub worst_n: usize,
    pub points: usize,
}

/// Grid of `grid + 1` equally spaced points of `[c − r, c + r]`, wrapped onto
/// `[0,1)` on the circle and restricted to the space otherwise.
pub fn ball_grid(center: &Rational, radius: &Rational, grid: usize, space: SpaceKind) -> Vec<Rational> {
    let g = int(grid.max(1) as i64);
    let mut pts: Vec<Rational> = (0..=grid.max(1))
        .map(|i| center - radius + radius * int(2) * int(i as i64) / &g)
        .map(|x| match space {
            SpaceKind::Circle => &x - Rational::from_integer(x.floor().to_integer()),
            _ => x,
        })
        .filter(|x| space.contains(x))
        .collect();
    pts.sort();
    pts.dedup();
    pts
}

/// Checks `|U^n f(x) − ⟨f, μ_target⟩| ≤ ε` over the ball grid and
/// `n_lo ≤ n ≤ n_hi`.
#[allow(clippy::too_many_arguments)]
pub fn basin_probe(
    k: &dyn TransitionKernel,
    f: &ScalarField,
    target: &DiscreteMeasure,
    center: &Rational,
    radius: &Rational,
    grid: usize,
    epsilon: f64,
    n_range: (usize, usize),
) -> Result<BasinReport> {
    let (n_lo, n_hi) = n_range;
    if n_lo > n_hi {
        return Err(Error::InvalidArgument(format!("empty step range {n_lo}..={n_hi}")));
    }
    if radius.is_negative() {
        return Err(Error::InvalidArgument("radius must be non-negative".into()));
    }
    let pts = ball_grid(center, radius, grid, k.space());
    if pts.is_empty() {
        return Err(Error::InvalidArgument(
            "ball contains no grid point of the space".into(),
        ));
    }
    let level = target.pair(f);
    let per_point: Vec<(f64, usize)> = pts
        .par_iter()
        .map(|x| -> Result<(f64, usize)> {
            let delta = DiscreteMeasure::dirac(k.space(), x.clone())?;
            let traj = trajectory(k, &delta, n_hi, DEFAULT_SUPPORT_CAP)?;
            let mut worst = (0.0, n_lo);
            for (n, mu) in traj.iter().enumerate().skip(n_lo) {
                let dev = (mu.pair(f) - level).abs();
                if dev > worst.0 {
                    worst = (dev, n);
                }
            }
            Ok(worst)
        })
        .collect::<Result<_>>()?;
    let (i, &(worst, worst_n)) =
        per_point.iter().enumerate().fold(
            (0, &(0.0, n_lo)),
            |acc, (i, v)| if v.0 > acc.1 .0 { (i, v) } else { acc },
        );
    Ok(BasinReport {
        holds: worst <= epsilon,
        worst,
        worst_point: pts[i].clone(),
        worst_n,
        points: pts.len(),
    })
}

/// Probability measure `δ_0` on `space`.
pub fn origin(space: SpaceKind) -> DiscreteMeasure {
    DiscreteMeasure::dirac(space, Rational::zero()).expect("0 lies in every built-in space")
}
