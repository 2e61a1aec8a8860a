//! Doubling kernel on the circle.
//!
//! ```text
//! π(y, ·) = δ_{2y}                  0 ≤ y < 1/2
//!         = ½ δ_0 + ½ δ_{2y−1}      1/2 ≤ y < 1
//! ```
//!
//! so that `P^K δ_x = (1 − 2^{−m}) δ_0 + 2^{−m} δ_y` with `m` the number of
//! ones among the first `K` binary digits of `x` and `y = {2^K x}`.

use num::{One, Zero};

use crate::error::Result;
use crate::kernel::TransitionKernel;
use crate::measure::{DiscreteMeasure, ScalarField};
use crate::rational::{int, pow2, rat, Rational};
use crate::space::{MetricSpace, SpaceKind, UnitRational};

#[derive(Debug, Clone)]
pub struct CircleDoubling {
    metric: MetricSpace,
}

impl Default for CircleDoubling {
    fn default() -> Self {
        CircleDoubling {
            metric: MetricSpace::Circle,
        }
    }
}

pub fn ex1_kernel() -> CircleDoubling {
    CircleDoubling::default()
}

impl TransitionKernel for CircleDoubling {
    fn metric(&self) -> &MetricSpace {
        &self.metric
    }

    fn row(&self, y: &Rational) -> Result<DiscreteMeasure> {
        SpaceKind::Circle.check(y)?;
        let twice = y * int(2);
        if y < &rat(1, 2) {
            DiscreteMeasure::dirac(SpaceKind::Circle, twice)
        } else {
            DiscreteMeasure::from_atoms(
                SpaceKind::Circle,
                [(Rational::zero(), rat(1, 2)), (twice - int(1), rat(1, 2))],
            )
        }
    }
}

/// `P^k δ_x` from the binary digits of `x`; `k = 0` gives `δ_x`.
pub fn ex1_closed_form(x: &UnitRational, k: u32) -> DiscreteMeasure {
    let (m, y) = x.prefix_stats(k);
    let tail = pow2(-(m as i64));
    DiscreteMeasure::from_atoms(
        SpaceKind::Circle,
        [(Rational::zero(), Rational::one() - &tail), (y.into_inner(), tail)],
    )
    .expect("closed form stays on the circle")
}

/// `t ↦ min(2t, 2 − 2t)` on `[0,1)`: vanishes at `0`, equals `1` at `1/2`,
/// and is `1/2`-Lipschitz for the chord metric.
pub fn hat_field() -> ScalarField {
    ScalarField::exact("hat", |t: &Rational| {
        let t = t - Rational::from_integer(t.floor().to_integer());
        let up = &t * int(2);
        let down = int(2) - &up;
        if up < down {
            up
        } else {
            down
        }
    })
    .with_bound(1.0)
    .with_lip(0.5)
}
