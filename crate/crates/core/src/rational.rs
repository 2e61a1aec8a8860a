//! Exact rationals and the `p/q` literal format shared by the CLI and the JSON files.

use num::bigint::BigInt;
use num::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = num::BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `2^k` for any signed exponent.
pub fn pow2(k: i64) -> Rational {
    let p = BigInt::one() << k.unsigned_abs();
    if k >= 0 {
        Rational::from_integer(p)
    } else {
        Rational::new(BigInt::one(), p)
    }
}

pub fn to_f64(x: &Rational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Parses `p/q` or `p` (decimal integers, optional sign). `field` names the
/// input the literal came from and is echoed in the error.
pub fn parse_rational(field: &str, literal: &str) -> Result<Rational> {
    let err = |reason: &str| Error::ParseRational {
        field: field.to_string(),
        literal: literal.to_string(),
        reason: reason.to_string(),
    };
    let s = literal.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| err("numerator is not an integer"))?;
    let den: BigInt = den.parse().map_err(|_| err("denominator is not an integer"))?;
    if den.is_zero() {
        return Err(err("zero denominator"));
    }
    Ok(Rational::new(num, den))
}

/// Always `p/q`, including integers (`0/1`, `1/1`).
pub fn fmt_rational(x: &Rational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

pub fn is_power_of_two(n: &BigInt) -> bool {
    n.is_positive() && (n & (n - BigInt::one())).is_zero()
}

/// Formats a real with 12 significant digits, trailing zeros removed and a
/// `.0` kept on integral values.
pub fn fmt_real(v: f64) -> String {
    if v == 0.0 {
        return "0.0".to_string();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{:.11e}", v);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        let s = format!("{:.*}", decimals, v);
        trim_decimal(&s)
    } else {
        format!("{}e{}", trim_decimal(mantissa), exp)
    }
}

fn trim_decimal(s: &str) -> String {
    if !s.contains('.') {
        return format!("{s}.0");
    }
    let t = s.trim_end_matches('0');
    if t.ends_with('.') {
        format!("{t}0")
    } else {
        t.to_string()
    }
}
