//! Exact rational scalars and the few conversions the rest of the crate needs.

use alloc::string::ToString;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision fraction, always in lowest terms with a positive
/// denominator.
pub type Rational = num_rational::BigRational;

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

/// `num / den`; panics when `den == 0`.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `"3"`, `"-2/5"`, `"0.125"`, `"1e-3"` or `"-1.5E2"` exactly.
pub fn parse(text: &str) -> Result<Rational> {
    let s = text.trim();
    let bad = || Error::InvalidArgument(alloc::format!("not a rational number: {text:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => {
            let e: i64 = s[i + 1..].parse().map_err(|_| bad())?;
            (&s[..i], e)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.as_bytes().first() {
        Some(b'-') => (true, &mantissa[1..]),
        Some(b'+') => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (whole, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !whole.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let mut all = whole.to_string();
    all.push_str(frac);
    let mut num: BigInt = all.parse().map_err(|_| bad())?;
    if negative {
        num = -num;
    }
    let scale = exponent - frac.len() as i64;
    let ten = BigInt::from(10u8);
    let pow = num_traits::pow(ten, scale.unsigned_abs() as usize);
    Ok(if scale >= 0 { Rational::from_integer(num * pow) } else { Rational::new(num, pow) })
}

fn ln_bigint(x: &BigInt) -> f64 {
    debug_assert!(x.sign() == Sign::Plus);
    let bits = x.bits();
    if bits <= 900 {
        return libm::log(x.to_f64().unwrap_or(f64::INFINITY));
    }
    let shift = bits - 64;
    let top = x >> (shift as usize);
    libm::log(top.to_f64().unwrap_or(f64::INFINITY)) + shift as f64 * core::f64::consts::LN_2
}

/// Natural logarithm of a rational without overflowing through `f64`.
/// Returns `-inf` for zero and `NaN` for negative inputs.
pub fn ln(x: &Rational) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    if x.is_negative() {
        return f64::NAN;
    }
    ln_bigint(x.numer()) - ln_bigint(x.denom())
}

/// Nearest `f64`, saturating to `±inf` for huge magnitudes.
pub fn to_f64(x: &Rational) -> f64 {
    if let Some(v) = x.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    if x.is_zero() {
        return 0.0;
    }
    let mag = libm::exp(ln(&x.abs()));
    if x.is_negative() {
        -mag
    } else {
        mag
    }
}

/// Greatest common divisor of two rationals: the largest `g` with both
/// `a / g` and `b / g` integers. `gcd(0, 0) = 0`.
pub fn gcd(a: &Rational, b: &Rational) -> Rational {
    if a.is_zero() {
        return b.abs();
    }
    if b.is_zero() {
        return a.abs();
    }
    let num = a.numer().gcd(b.numer());
    let den = a.denom().lcm(b.denom());
    Rational::new(num, den)
}

/// Smallest integer `>= x`.
pub fn ceil_int(x: &Rational) -> BigInt {
    x.ceil().to_integer()
}

/// Largest multiple of `step` not exceeding `x`.
pub fn floor_to(x: &Rational, step: &Rational) -> Rational {
    (x / step).floor() * step
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn parses_fractions_and_decimals_exactly() {
        assert_eq!(parse("0.1").unwrap(), ratio(1, 10));
        assert_eq!(parse("-2/4").unwrap(), ratio(-1, 2));
        assert_eq!(parse("3").unwrap(), int(3));
        assert_eq!(parse("1.25e2").unwrap(), int(125));
        assert_eq!(parse("5E-3").unwrap(), ratio(1, 200));
        assert_eq!(parse(".5").unwrap(), ratio(1, 2));
        assert!(parse("1/0").is_err());
        assert!(parse("abc").is_err());
        assert!(parse("").is_err());
        assert!(parse("1.2.3").is_err());
    }

    #[test]
    fn ln_handles_tiny_values() {
        let tiny = Rational::new(BigInt::one(), num_traits::pow(BigInt::from(2), 3000));
        let expect = -3000.0 * core::f64::consts::LN_2;
        assert!((ln(&tiny) - expect).abs() < 1e-9 * expect.abs());
        assert!((ln(&ratio(3, 2)) - libm::log(1.5)).abs() < 1e-15);
        assert_eq!(ln(&int(0)), f64::NEG_INFINITY);
    }

    #[test]
    fn rational_gcd() {
        assert_eq!(gcd(&ratio(2, 5), &ratio(1, 2)), ratio(1, 10));
        assert_eq!(gcd(&ratio(3, 4), &ratio(3, 2)), ratio(3, 4));
        assert_eq!(gcd(&int(0), &ratio(-1, 3)), ratio(1, 3));
    }

    #[test]
    fn floors_to_grid() {
        assert_eq!(floor_to(&ratio(1, 3), &int(1)), int(0));
        assert_eq!(floor_to(&ratio(-1, 3), &int(1)), int(-1));
        assert_eq!(floor_to(&ratio(7, 8), &ratio(1, 4)), ratio(3, 4));
    }
}
