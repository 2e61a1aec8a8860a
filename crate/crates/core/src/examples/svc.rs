//! Smith-Volterra-Cantor construction on `[-2,-1]` and the kernel built on it.
//!
//! Level `n` removes an open interval of length `4^{-n}` from the middle of
//! each of the `2^{n-1}` intervals kept at level `n-1`. Kept intervals at level
//! `n` have length `(2^n + 1) / (2·4^n)`. On the removed interval
//! `w_{n,k} = (a, b)`,
//!
//! ```text
//! T(x) = (4^{2n+1} / n) (b − x)(x − a)
//! ```
//!
//! and `T = 0` on the Cantor set. The kernel is
//!
//! ```text
//! π(x, ·) = δ_{T(x)}                      x ∈ [−2, −1]
//!         = δ_{2x}                        x ∈ [0, 1/2)
//!         = (2x − 1) δ_0 + (2 − 2x) δ_1   x ∈ [1/2, 1]
//! ```
//!
//! Intervals are never materialized wholesale: an interval is addressed by
//! its level and index, and its endpoints are computed from the index bits.
//! Indices are 1-based, left to right.

use num::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::TransitionKernel;
use crate::measure::DiscreteMeasure;
use crate::rational::{fmt_rational, int, pow2, rat, Rational};
use crate::space::{MetricSpace, SpaceKind};

pub const MAX_DEPTH: u32 = 30;

/// Closed (kept) or open (removed) interval with exact endpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    pub lo: Rational,
    pub hi: Rational,
}

impl Interval {
    pub fn length(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / int(2)
    }

    pub fn contains_closed(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_open(&self, x: &Rational) -> bool {
        &self.lo < x && x < &self.hi
    }
}

impl Serialize for Interval {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [fmt_rational(&self.lo), fmt_rational(&self.hi)].serialize(s)
    }
}

fn four_pow(n: u32) -> Rational {
    pow2(2 * n as i64)
}

/// `(2^n + 1) / (2·4^n)`.
pub fn kept_length(n: u32) -> Rational {
    (pow2(n as i64) + int(1)) / (int(2) * four_pow(n))
}

/// `4^{-n}`.
pub fn removed_length(n: u32) -> Rational {
    pow2(-2 * n as i64)
}

/// Where a point of `[-2,-1]` sits in the construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SvcClassification {
    /// Strictly inside `w_{level,index}`.
    Removed { level: u32, index: u64, interval: Interval },
    /// Inside `c_{depth,index}`, not removed up to the tree depth.
    Kept { depth: u32, index: u64, interval: Interval },
}

impl SvcClassification {
    pub fn interval(&self) -> &Interval {
        match self {
            SvcClassification::Removed { interval, .. } | SvcClassification::Kept { interval, .. } => interval,
        }
    }

    pub fn is_removed(&self) -> bool {
        matches!(self, SvcClassification::Removed { .. })
    }
}

/// Depth-bounded view of the construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SvcTree {
    depth: u32,
}

pub fn svc_build(depth: u32) -> Result<SvcTree> {
    SvcTree::new(depth)
}

impl SvcTree {
    pub fn new(depth: u32) -> Result<Self> {
        if depth == 0 || depth > MAX_DEPTH {
            return Err(Error::DepthOutOfRange(depth));
        }
        Ok(SvcTree { depth })
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    fn check_level(&self, n: u32, allow_zero: bool) -> Result<()> {
        if (n == 0 && !allow_zero) || n > self.depth {
            return Err(Error::InvalidArgument(format!("level {n} outside 1..={}", self.depth)));
        }
        Ok(())
    }

    /// Left endpoint of the kept interval with 0-based index `j` at level `n`:
    /// each set bit of `j`, read from the top, skips the left child and the gap.
    fn kept_lo(n: u32, j: u64) -> Rational {
        let mut lo = int(-2);
        for level in 1..=n {
            if (j >> (n - level)) & 1 == 1 {
                lo += kept_length(level) + removed_length(level);
            }
        }
        lo
    }

    /// `c_{n,k}`, `1 ≤ k ≤ 2^n`; level 0 is `[-2,-1]` itself.
    pub fn kept_interval(&self, n: u32, k: u64) -> Result<Interval> {
        self.check_level(n, true)?;
        if k == 0 || k > 1u64 << n {
            return Err(Error::InvalidArgument(format!("index {k} outside 1..={}", 1u64 << n)));
        }
        let lo = Self::kept_lo(n, k - 1);
        let hi = &lo + kept_length(n);
        Ok(Interval { lo, hi })
    }

    /// `w_{n,k}`, `1 ≤ k ≤ 2^{n-1}`.
    pub fn removed_interval(&self, n: u32, k: u64) -> Result<Interval> {
        self.check_level(n, false)?;
        if k == 0 || k > 1u64 << (n - 1) {
            return Err(Error::NoRemovedInterval(n));
        }
        let lo = Self::kept_lo(n - 1, k - 1) + kept_length(n);
        let hi = &lo + removed_length(n);
        Ok(Interval { lo, hi })
    }

    /// All `2^n` kept intervals of level `n`, left to right.
    pub fn kept(&self, n: u32) -> Result<Vec<Interval>> {
        self.check_level(n, true)?;
        (1..=1u64 << n).map(|k| self.kept_interval(n, k)).collect()
    }

    /// All `2^{n-1}` removed intervals of level `n`, left to right.
    pub fn removed(&self, n: u32) -> Result<Vec<Interval>> {
        self.check_level(n, false)?;
        (1..=1u64 << (n - 1)).map(|k| self.removed_interval(n, k)).collect()
    }

    /// Locates `x ∈ [-2,-1]` by descending at most `depth` levels.
    pub fn classify(&self, x: &Rational) -> Result<SvcClassification> {
        if x < &int(-2) || x > &int(-1) {
            return Err(Error::PointOutsideSpace {
                point: fmt_rational(x),
                space: SpaceKind::IntervalUnion,
            });
        }
        let mut lo = int(-2);
        let mut j: u64 = 0;
        for n in 1..=self.depth {
            let gap_lo = &lo + kept_length(n);
            let gap_hi = &gap_lo + removed_length(n);
            if x <= &gap_lo {
                j <<= 1;
            } else if x < &gap_hi {
                return Ok(SvcClassification::Removed {
                    level: n,
                    index: j + 1,
                    interval: Interval { lo: gap_lo, hi: gap_hi },
                });
            } else {
                j = (j << 1) | 1;
                lo = gap_hi;
            }
        }
        let hi = &lo + kept_length(self.depth);
        Ok(SvcClassification::Kept {
            depth: self.depth,
            index: j + 1,
            interval: Interval { lo, hi },
        })
    }

    /// `T(x)` on `[-2,-1]`.
    pub fn t_eval(&self, x: &Rational) -> Result<TValue> {
        let class = self.classify(x)?;
        let (value, exact, error_budget) = match &class {
            SvcClassification::Removed { level, interval, .. } => (t_on_removed(*level, interval, x), true, 0.0),
            SvcClassification::Kept { interval, .. } => {
                // endpoints of kept intervals survive every later level
                if x == &interval.lo || x == &interval.hi {
                    (Rational::zero(), true, 0.0)
                } else {
                    (Rational::zero(), false, 1.0 / (self.depth as f64 + 1.0))
                }
            }
        };
        Ok(TValue {
            value,
            exact,
            error_budget,
            classification: class,
        })
    }
}

/// `(4^{2n+1}/n)(b − x)(x − a)`.
pub fn t_on_removed(n: u32, w: &Interval, x: &Rational) -> Rational {
    four_pow(2 * n + 1) / int(n as i64) * (&w.hi - x) * (x - &w.lo)
}

pub fn classify(x: &Rational, tree: &SvcTree) -> Result<SvcClassification> {
    tree.classify(x)
}

pub fn t_eval(x: &Rational, tree: &SvcTree) -> Result<TValue> {
    tree.t_eval(x)
}

/// `T(x)` with provenance: `exact` is false when `x` was kept to full depth
/// without being an endpoint, in which case `value = 0` is off by at most
/// `error_budget`.
#[derive(Debug, Clone, PartialEq)]
pub struct TValue {
    pub value: Rational,
    pub exact: bool,
    pub error_budget: f64,
    pub classification: SvcClassification,
}

/// The kernel on `[-2,-1] ∪ [0,1]`.
#[derive(Debug, Clone)]
pub struct Ex2Kernel {
    tree: SvcTree,
    metric: MetricSpace,
}

impl Ex2Kernel {
    pub fn new(tree: SvcTree) -> Self {
        Ex2Kernel {
            tree,
            metric: MetricSpace::IntervalUnion,
        }
    }

    pub fn tree(&self) -> &SvcTree {
        &self.tree
    }
}

pub fn ex2_kernel(tree: SvcTree) -> Ex2Kernel {
    Ex2Kernel::new(tree)
}

impl TransitionKernel for Ex2Kernel {
    fn metric(&self) -> &MetricSpace {
        &self.metric
    }

    fn row(&self, x: &Rational) -> Result<DiscreteMeasure> {
        let space = SpaceKind::IntervalUnion;
        space.check(x)?;
        if x.is_negative() {
            let t = self.tree.t_eval(x)?;
            return DiscreteMeasure::dirac(space, t.value);
        }
        let twice = x * int(2);
        if x < &rat(1, 2) {
            return DiscreteMeasure::dirac(space, twice);
        }
        DiscreteMeasure::from_atoms(
            space,
            [(Rational::zero(), &twice - int(1)), (Rational::one(), int(2) - twice)],
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn depth_range() {
        assert!(matches!(svc_build(0), Err(Error::DepthOutOfRange(0))));
        assert!(matches!(svc_build(31), Err(Error::DepthOutOfRange(31))));
        assert!(svc_build(30).is_ok());
    }

    #[test]
    fn first_level() {
        let t = svc_build(1).unwrap();
        let w = t.removed(1).unwrap();
        assert_eq!(
            w,
            vec![Interval {
                lo: rat(-13, 8),
                hi: rat(-11, 8)
            }]
        );
        let c = t.kept(1).unwrap();
        assert_eq!(
            c[0],
            Interval {
                lo: int(-2),
                hi: rat(-13, 8)
            }
        );
        assert_eq!(
            c[1],
            Interval {
                lo: rat(-11, 8),
                hi: int(-1)
            }
        );
    }

    #[test]
    fn lengths_and_nesting() {
        let t = svc_build(8).unwrap();
        for n in 1..=8 {
            let kept = t.kept(n).unwrap();
            let parents = t.kept(n - 1).unwrap();
            let total: Rational = kept.iter().map(Interval::length).sum();
            assert_eq!(total, rat(1, 2) + pow2(-(n as i64) - 1));
            for (i, c) in kept.iter().enumerate() {
                assert_eq!(c.length(), kept_length(n));
                let p = &parents[i / 2];
                assert!(p.contains_closed(&c.lo) && p.contains_closed(&c.hi));
                if i > 0 {
                    assert!(kept[i - 1].hi < c.lo);
                }
            }
            for w in t.removed(n).unwrap() {
                assert_eq!(w.length(), removed_length(n));
                assert_eq!(t_on_removed(n, &w, &w.midpoint()), Rational::one() / int(n as i64));
            }
            assert_eq!(kept_length(n), (kept_length(n - 1) - removed_length(n)) / int(2));
        }
    }

    #[test]
    fn classification() {
        let t = svc_build(5).unwrap();
        match t.classify(&rat(-3, 2)).unwrap() {
            SvcClassification::Removed { level, index, .. } => assert_eq!((level, index), (1, 1)),
            other => panic!("{other:?}"),
        }
        for x in [int(-2), rat(-13, 8), rat(-11, 8), int(-1)] {
            assert!(!t.classify(&x).unwrap().is_removed(), "{x}");
        }
        match t.classify(&int(-1)).unwrap() {
            SvcClassification::Kept { depth, index, .. } => assert_eq!((depth, index), (5, 32)),
            other => panic!("{other:?}"),
        }
        assert!(t.classify(&rat(-1, 2)).is_err());
    }

    #[test]
    fn classification_agrees_with_interval_lists() {
        let t = svc_build(4).unwrap();
        for n in 1..=4 {
            for (i, w) in t.removed(n).unwrap().into_iter().enumerate() {
                let x = (&w.lo * int(2) + &w.hi) / int(3);
                assert_eq!(
                    t.classify(&x).unwrap(),
                    SvcClassification::Removed {
                        level: n,
                        index: i as u64 + 1,
                        interval: w
                    }
                );
            }
        }
        for (i, c) in t.kept(4).unwrap().into_iter().enumerate() {
            let x = c.midpoint();
            assert_eq!(
                t.classify(&x).unwrap(),
                SvcClassification::Kept {
                    depth: 4,
                    index: i as u64 + 1,
                    interval: c
                }
            );
        }
    }

    #[test]
    fn t_values() {
        let t = svc_build(6).unwrap();
        let v = t.t_eval(&rat(-3, 2)).unwrap();
        assert_eq!((v.value, v.exact), (int(1), true));
        let v = t.t_eval(&int(-2)).unwrap();
        assert_eq!((v.value, v.exact), (int(0), true));
        // interior point of a depth-6 kept interval: T unknown below depth
        let c = t.kept_interval(6, 1).unwrap();
        let v = t.t_eval(&c.midpoint()).unwrap();
        assert!(!v.exact);
        assert!((v.error_budget - 1.0 / 7.0).abs() < 1e-15);
        // T → 0 at removed endpoints
        let w = t.removed_interval(3, 2).unwrap();
        assert_eq!(t_on_removed(3, &w, &w.lo), int(0));
        assert_eq!(t_on_removed(3, &w, &w.hi), int(0));
    }

    #[test]
    fn kernel_rows() {
        let k = Ex2Kernel::new(svc_build(4).unwrap());
        let d = |x: Rational| DiscreteMeasure::dirac(SpaceKind::IntervalUnion, x).unwrap();
        assert_eq!(k.row(&int(1)).unwrap(), d(int(0)));
        assert_eq!(k.row(&rat(1, 2)).unwrap(), d(int(1)));
        assert_eq!(k.row(&rat(-3, 2)).unwrap(), d(int(1)));
        assert_eq!(k.row(&rat(1, 8)).unwrap(), d(rat(1, 4)));
        let r = k.row(&rat(3, 4)).unwrap();
        assert_eq!(r.weight_at(&int(0)), rat(1, 2));
        assert_eq!(r.weight_at(&int(1)), rat(1, 2));
        assert!(k.row(&rat(-1, 2)).is_err());
    }
}
