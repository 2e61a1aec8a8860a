//! Points and metrics of the built-in state spaces.
//!
//! Coordinates are exact rationals; only distances are evaluated in double
//! precision. Circle points are identified with `x ∈ [0,1)` through
//! `x ↦ (cos 2πx, sin 2πx)` and measured with the chord (Euclidean) metric.

use std::fmt;

use num::bigint::BigInt;
use num::{Integer, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::rational::{fmt_rational, int, is_power_of_two, pow2, rat, to_f64, Rational};

/// Which space a point or measure lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpaceKind {
    /// Unit circle, coordinates in `[0,1)`.
    Circle,
    /// `[-2,-1] ∪ [0,1]` with the metric inherited from the real line.
    IntervalUnion,
    RealLine,
    /// Finite metric space with points `0..n`.
    Finite(usize),
}

impl SpaceKind {
    pub fn contains(&self, x: &Rational) -> bool {
        match self {
            SpaceKind::Circle => !x.is_negative() && x < &int(1),
            SpaceKind::IntervalUnion => (x >= &int(-2) && x <= &int(-1)) || (!x.is_negative() && x <= &int(1)),
            SpaceKind::RealLine => true,
            SpaceKind::Finite(n) => x.is_integer() && !x.is_negative() && x.to_integer() < BigInt::from(*n),
        }
    }

    pub fn check(&self, x: &Rational) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::PointOutsideSpace {
                point: fmt_rational(x),
                space: *self,
            })
        }
    }

    /// Name used in the JSON measure format.
    pub fn tag(&self) -> &'static str {
        match self {
            SpaceKind::Circle => "circle",
            SpaceKind::IntervalUnion => "ex2",
            SpaceKind::RealLine => "real",
            SpaceKind::Finite(_) => "finite",
        }
    }

    pub fn from_tag(tag: &str) -> Option<SpaceKind> {
        match tag {
            "circle" => Some(SpaceKind::Circle),
            "ex2" => Some(SpaceKind::IntervalUnion),
            "real" => Some(SpaceKind::RealLine),
            _ => None,
        }
    }
}

impl fmt::Display for SpaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceKind::Finite(n) => write!(f, "finite({n})"),
            other => f.write_str(other.tag()),
        }
    }
}

/// Exact rational in `[0,1)`, read as a point of the circle through its
/// binary expansion.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct UnitRational(Rational);

impl UnitRational {
    pub fn new(x: Rational) -> Result<Self> {
        SpaceKind::Circle.check(&x)?;
        Ok(UnitRational(x))
    }

    pub fn from_ratio(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::InvalidArgument("zero denominator".into()));
        }
        Self::new(rat(num, den))
    }

    pub fn zero() -> Self {
        UnitRational(Rational::zero())
    }

    pub fn value(&self) -> &Rational {
        &self.0
    }

    pub fn into_inner(self) -> Rational {
        self.0
    }

    /// `floor(2^k x)`, whose `k` low bits are the digits `e_1 … e_k`.
    fn scaled_floor(&self, k: u32) -> BigInt {
        (self.0.numer() << k as usize).div_floor(self.0.denom())
    }

    /// Binary digit `e_i(x)`, `i ≥ 1`, under the terminating convention:
    /// dyadic rationals take the expansion that ends in zeros.
    pub fn binary_digit(&self, i: u32) -> u8 {
        assert!(i >= 1, "binary digits are indexed from 1");
        if self.scaled_floor(i).is_odd() {
            1
        } else {
            0
        }
    }

    /// `(m_{k,x}, y_{k,x})`: the number of ones among the first `k` digits and
    /// the fractional part of `2^k x`. `k = 0` gives `(0, x)`.
    pub fn prefix_stats(&self, k: u32) -> (u64, UnitRational) {
        let floor = self.scaled_floor(k);
        let ones = floor.magnitude().count_ones();
        let y = &self.0 * pow2(k as i64) - Rational::from_integer(floor);
        (ones, UnitRational(y))
    }

    pub fn is_dyadic(&self) -> bool {
        is_power_of_two(self.0.denom())
    }

    /// Smallest `K` such that every digit past position `K` vanishes, for
    /// dyadic points (`0` for `x = 0`).
    pub fn dyadic_length(&self) -> Option<u32> {
        if !self.is_dyadic() {
            return None;
        }
        Some(self.0.denom().bits() as u32 - 1)
    }

    /// The point sharing the first `k` digits with `self` and zeros afterwards.
    pub fn truncate(&self, k: u32) -> UnitRational {
        UnitRational(Rational::from_integer(self.scaled_floor(k)) * pow2(-(k as i64)))
    }
}

impl fmt::Display for UnitRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&fmt_rational(&self.0))
    }
}

pub fn binary_digit(x: &UnitRational, i: u32) -> u8 {
    x.binary_digit(i)
}

pub fn prefix_stats(x: &UnitRational, k: u32) -> (u64, UnitRational) {
    x.prefix_stats(k)
}

/// A point of `[-2,-1] ∪ [0,1]` or of the real line.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LinePoint(Rational);

impl LinePoint {
    pub fn new(x: Rational) -> Self {
        LinePoint(x)
    }

    /// A point tagged as belonging to `S = [-2,-1] ∪ [0,1]`.
    pub fn in_interval_union(x: Rational) -> Result<Self> {
        SpaceKind::IntervalUnion.check(&x)?;
        Ok(LinePoint(x))
    }

    pub fn value(&self) -> &Rational {
        &self.0
    }
}

/// Chord length between two circle points: `2|sin(π(x − y))|`.
pub fn circle_distance(x: &UnitRational, y: &UnitRational) -> f64 {
    chord(&(&x.0 - &y.0))
}

fn chord(diff: &Rational) -> f64 {
    // reduce to [0, 1) exactly before leaving rational arithmetic
    let mut frac = diff - Rational::from_integer(diff.floor().to_integer());
    // fold onto [0, 1/2] so that ρ(x, y) and ρ(y, x) round identically
    if frac > rat(1, 2) {
        frac = int(1) - frac;
    }
    2.0 * (std::f64::consts::PI * to_f64(&frac)).sin()
}

fn chord_f64(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    let d = d.min(1.0 - d);
    2.0 * (std::f64::consts::PI * d).sin()
}

/// Finite metric space given by a symmetric distance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMetric {
    dist: Vec<Vec<f64>>,
}

impl FiniteMetric {
    /// Validates symmetry, zero diagonal, positivity off the diagonal and the
    /// triangle inequality (exhaustively, with `1e-12` slack).
    pub fn new(dist: Vec<Vec<f64>>) -> Result<Self> {
        let n = dist.len();
        if n == 0 {
            return Err(Error::InvalidMetric("empty point set".into()));
        }
        for (i, row) in dist.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidMetric(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            for (j, &d) in row.iter().enumerate() {
                if !d.is_finite() || d < 0.0 {
                    return Err(Error::InvalidMetric(format!(
                        "d({i},{j}) = {d} is not a non-negative real"
                    )));
                }
                if (i == j) != (d == 0.0) {
                    return Err(Error::InvalidMetric(format!(
                        "d({i},{j}) = {d} violates identity of indiscernibles"
                    )));
                }
                if d != dist[j][i] {
                    return Err(Error::InvalidMetric(format!("d({i},{j}) != d({j},{i})")));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if dist[i][k] > dist[i][j] + dist[j][k] + 1e-12 {
                        return Err(Error::InvalidMetric(format!(
                            "triangle inequality fails for ({i},{j},{k})"
                        )));
                    }
                }
            }
        }
        Ok(FiniteMetric { dist })
    }

    pub fn len(&self) -> usize {
        self.dist.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dist.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.dist[i][j]
    }
}

/// The metric `ρ` of a state space.
#[derive(Debug, Clone, PartialEq)]
pub enum MetricSpace {
    Circle,
    IntervalUnion,
    RealLine,
    Finite(FiniteMetric),
}

impl MetricSpace {
    pub fn for_kind(kind: SpaceKind) -> Option<MetricSpace> {
        match kind {
            SpaceKind::Circle => Some(MetricSpace::Circle),
            SpaceKind::IntervalUnion => Some(MetricSpace::IntervalUnion),
            SpaceKind::RealLine => Some(MetricSpace::RealLine),
            SpaceKind::Finite(_) => None,
        }
    }

    pub fn kind(&self) -> SpaceKind {
        match self {
            MetricSpace::Circle => SpaceKind::Circle,
            MetricSpace::IntervalUnion => SpaceKind::IntervalUnion,
            MetricSpace::RealLine => SpaceKind::RealLine,
            MetricSpace::Finite(m) => SpaceKind::Finite(m.len()),
        }
    }

    /// Distance between two points of this space, given by exact coordinates.
    pub fn distance(&self, x: &Rational, y: &Rational) -> f64 {
        match self {
            MetricSpace::Circle => chord(&(x - y)),
            MetricSpace::IntervalUnion | MetricSpace::RealLine => to_f64(&(x - y).abs()),
            MetricSpace::Finite(m) => {
                let i = x.to_integer().to_usize().expect("finite point index");
                let j = y.to_integer().to_usize().expect("finite point index");
                m.get(i, j)
            }
        }
    }

    /// Distance between double-precision coordinates (finite spaces take the
    /// point index).
    pub fn distance_coords(&self, a: f64, b: f64) -> f64 {
        match self {
            MetricSpace::Circle => chord_f64(a, b),
            MetricSpace::IntervalUnion | MetricSpace::RealLine => (a - b).abs(),
            MetricSpace::Finite(m) => m.get(a as usize, b as usize),
        }
    }
}

impl Default for UnitRational {
    fn default() -> Self {
        Self::zero()
    }
}

impl From<UnitRational> for Rational {
    fn from(x: UnitRational) -> Rational {
        x.0
    }
}
