//! Translation `T(x) = x + 1` on the real line, so `U^n f(x) = f(x + n)`,
//! with the bump family
//!
//! ```text
//! f_z(x) = (n+2)² (x − (z+n)) (z + n + 2/(n+2) − x)   on [z+n, z+n+2/(n+2)), n ≥ 1
//! ```
//!
//! and `f_z = 0` elsewhere. Bump `n` peaks at `z + n + 1/(n+2)` with value 1
//! while its width shrinks, so `f_z` is continuous but the dual iterates are
//! not equicontinuous at `z`.

use num::{Signed, Zero};

use crate::error::{Error, Result};
use crate::measure::ScalarField;
use crate::rational::{int, Rational};

/// `f_z(x)`, exact.
pub fn bump_value(z: &Rational, x: &Rational) -> Rational {
    let s = x - z;
    if s < int(1) {
        return Rational::zero();
    }
    let n = s.floor();
    let n2 = &n + int(2);
    let width = int(2) / &n2;
    let t = &s - &n;
    if t >= width {
        return Rational::zero();
    }
    &n2 * &n2 * &t * (width - &t)
}

pub fn bump_field(z: Rational) -> ScalarField {
    ScalarField::exact("bump", move |x: &Rational| bump_value(&z, x)).with_bound(1.0)
}

/// `U^n f(x) = f(x + n)`.
pub fn translate_u(f: &ScalarField, x: &Rational, n: u64) -> f64 {
    f.eval(&(x + Rational::from_integer(n.into())))
}

/// `|f_z(z + m + 1/(m+2)) − f_z(z + m)|`: the gap between `U^m f_z` at
/// `z + 1/(m+2)` and at `z`.
pub fn remark1_gap(z: &Rational, m: u64) -> Result<Rational> {
    if m == 0 {
        return Err(Error::InvalidArgument("m must be at least 1".into()));
    }
    let m_r = Rational::from_integer(m.into());
    let base = z + &m_r;
    let peak = &base + Rational::new(1.into(), (m + 2).into());
    Ok((bump_value(z, &peak) - bump_value(z, &base)).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn gap_is_one() {
        for z in [int(0), rat(1, 3), rat(-7, 5)] {
            for m in 1..=12 {
                assert_eq!(remark1_gap(&z, m).unwrap(), int(1));
            }
        }
        assert!(remark1_gap(&int(0), 0).is_err());
    }

    #[test]
    fn bump_shape() {
        let z = rat(1, 3);
        for m in 1..=6i64 {
            let base = &z + int(m);
            assert_eq!(bump_value(&z, &base), int(0));
            assert_eq!(bump_value(&z, &(&base + rat(2, m + 2))), int(0));
            assert_eq!(bump_value(&z, &(&base - rat(1, 100))), int(0));
        }
        // nothing on [z, z+1)
        assert_eq!(bump_value(&z, &(&z + rat(1, 3))), int(0));
        assert_eq!(bump_value(&z, &(&z - int(4))), int(0));
    }

    #[test]
    fn translation_dual() {
        let f = bump_field(int(0));
        assert_eq!(translate_u(&f, &rat(1, 3), 1), 1.0);
        assert_eq!(translate_u(&f, &int(0), 5), 0.0);
    }
}
