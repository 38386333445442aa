//! Exact rational scalars.
//!
//! `Scalar` is an arbitrary-precision rational; `num_rational` keeps the
//! denominator positive and the fraction reduced after every operation,
//! which is exactly the invariant the rest of the crate relies on.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Scalar = BigRational;

/// Scalar from a machine integer.
pub fn scalar_int(value: i64) -> Scalar {
    BigRational::from_integer(BigInt::from(value))
}

/// Scalar `num/den`; `den` must be nonzero.
pub fn scalar_frac(num: i64, den: i64) -> Scalar {
    assert!(den != 0, "zero denominator");
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Parse an exact rational literal: `p`, `p/q`, or a finite decimal such
/// as `-0.25` (decimals are exact in base ten).
pub fn parse_scalar(text: &str) -> Result<Scalar> {
    let s = text.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty rational literal".into()));
    }
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad numerator in `{s}`")))?;
        let d: BigInt = den
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad denominator in `{s}`")))?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in `{s}`")));
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        let negative = int_part.starts_with('-');
        let digits: String = format!("{}{}", int_part, frac_part)
            .chars()
            .filter(|c| *c != '-' && *c != '+')
            .collect();
        if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
            return Err(Error::Parse(format!("bad decimal literal `{s}`")));
        }
        let n: BigInt = digits
            .parse()
            .map_err(|_| Error::Parse(format!("bad decimal literal `{s}`")))?;
        let d = BigInt::from(10u32).pow(frac_part.len() as u32);
        let value = BigRational::new(n, d);
        return Ok(if negative { -value } else { value });
    }
    let n: BigInt = s
        .parse()
        .map_err(|_| Error::Parse(format!("`{s}` is not a rational literal")))?;
    Ok(BigRational::from_integer(n))
}

/// Render as `p` or `p/q`, losslessly re-parsable by [`parse_scalar`].
pub fn scalar_to_string(value: &Scalar) -> String {
    value.to_string()
}

pub fn scalar_to_f64(value: &Scalar) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

/// Exact rational value of a finite double.
pub fn scalar_from_f64(value: f64) -> Result<Scalar> {
    BigRational::from_float(value)
        .ok_or_else(|| Error::Argument(format!("cannot represent {value} as a rational")))
}

/// Integer power with negative exponents rejected for zero base.
pub fn scalar_pow(base: &Scalar, exp: u32) -> Scalar {
    let mut acc = Scalar::one();
    let mut b = base.clone();
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            acc *= &b;
        }
        e >>= 1;
        if e > 0 {
            b = &b * &b;
        }
    }
    acc
}

pub fn scalar_abs(value: &Scalar) -> Scalar {
    value.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse_scalar("3").unwrap(), scalar_int(3));
        assert_eq!(parse_scalar("-7/2").unwrap(), scalar_frac(-7, 2));
        assert_eq!(parse_scalar("0.25").unwrap(), scalar_frac(1, 4));
        assert_eq!(parse_scalar("-0.5").unwrap(), scalar_frac(-1, 2));
        assert_eq!(parse_scalar(" 4/6 ").unwrap(), scalar_frac(2, 3));
        assert!(parse_scalar("1/0").is_err());
        assert!(parse_scalar("pi").is_err());
    }

    #[test]
    fn string_round_trip() {
        for s in ["0", "5", "-5", "2/3", "-11/4"] {
            let v = parse_scalar(s).unwrap();
            assert_eq!(parse_scalar(&scalar_to_string(&v)).unwrap(), v);
        }
    }

    #[test]
    fn from_f64_is_exact() {
        let v = scalar_from_f64(0.5).unwrap();
        assert_eq!(v, scalar_frac(1, 2));
        let w = scalar_from_f64(0.1).unwrap();
        assert_eq!(scalar_to_f64(&w), 0.1);
    }

    #[test]
    fn pow() {
        assert_eq!(scalar_pow(&scalar_frac(2, 3), 3), scalar_frac(8, 27));
        assert_eq!(scalar_pow(&scalar_int(5), 0), scalar_int(1));
    }
}
