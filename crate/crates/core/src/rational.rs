//! Exact rational numbers and conversions with explicit rounding direction.

use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

/// Exact rational used for every exported ratio and bound.
pub type Rational = num_rational::Ratio<i128>;

/// Default number of fractional bits used when a float is rounded to a rational.
pub const ROUNDING_BITS: u32 = 24;

pub fn rat(num: i128, den: i128) -> Rational {
    Rational::new(num, den)
}

pub fn int(v: i128) -> Rational {
    Rational::from_integer(v)
}

pub fn to_f64(r: &Rational) -> f64 {
    // Split into integer and fractional parts to keep precision for large values.
    let (q, rem) = r.numer().div_rem(r.denom());
    q as f64 + rem as f64 / *r.denom() as f64
}

/// Largest dyadic rational k/2^bits that does not exceed `x`.
pub fn floor_dyadic(x: f64, bits: u32) -> Option<Rational> {
    if !x.is_finite() {
        return None;
    }
    let scale = (1u64 << bits) as f64;
    let k = (x * scale).floor();
    if k.abs() > 1e30 {
        return None;
    }
    Some(Rational::new(k as i128, 1i128 << bits))
}

/// Smallest dyadic rational k/2^bits that is not below `x`.
pub fn ceil_dyadic(x: f64, bits: u32) -> Option<Rational> {
    if !x.is_finite() {
        return None;
    }
    let scale = (1u64 << bits) as f64;
    let k = (x * scale).ceil();
    if k.abs() > 1e30 {
        return None;
    }
    Some(Rational::new(k as i128, 1i128 << bits))
}

/// Rational certainly below `x` even after accumulated float error of relative size `rel`.
pub fn lower_rational(x: f64, rel: f64) -> Option<Rational> {
    let shrunk = if x >= 0.0 { x * (1.0 - rel) } else { x * (1.0 + rel) };
    floor_dyadic(shrunk - f64::MIN_POSITIVE, ROUNDING_BITS)
}

/// Rational certainly above `x` even after accumulated float error of relative size `rel`.
pub fn upper_rational(x: f64, rel: f64) -> Option<Rational> {
    let grown = if x >= 0.0 { x * (1.0 + rel) } else { x * (1.0 - rel) };
    ceil_dyadic(grown + f64::MIN_POSITIVE, ROUNDING_BITS)
}

/// Formats as `num/den` (denominator always printed).
pub fn format(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("cannot parse '{0}' as a rational")]
pub struct ParseRationalError(pub String);

/// Parses `a/b`, an integer, or a finite decimal such as `0.75` (exactly).
pub fn parse(s: &str) -> Result<Rational, ParseRationalError> {
    let err = || ParseRationalError(s.to_string());
    let t = s.trim();
    if let Some((a, b)) = t.split_once('/') {
        let a: i128 = a.trim().parse().map_err(|_| err())?;
        let b: i128 = b.trim().parse().map_err(|_| err())?;
        if b == 0 {
            return Err(err());
        }
        return Ok(Rational::new(a, b));
    }
    if let Some((ip, fp)) = t.split_once('.') {
        if fp.is_empty() || !fp.chars().all(|c| c.is_ascii_digit()) || fp.len() > 30 {
            return Err(err());
        }
        let neg = ip.starts_with('-');
        let ip_abs = ip.trim_start_matches(['-', '+']);
        let whole: i128 = if ip_abs.is_empty() { 0 } else { ip_abs.parse().map_err(|_| err())? };
        let frac: i128 = fp.parse().map_err(|_| err())?;
        let den = 10i128.checked_pow(fp.len() as u32).ok_or_else(err)?;
        let mag = Rational::new(whole * den + frac, den);
        return Ok(if neg { -mag } else { mag });
    }
    let v: i128 = t.parse().map_err(|_| err())?;
    Ok(Rational::from_integer(v))
}

/// Compares a/b with c/d for non-negative integer pairs without building rationals.
#[inline]
pub fn cmp_pair(a: u64, b: u64, c: u64, d: u64) -> std::cmp::Ordering {
    (a as u128 * d as u128).cmp(&(c as u128 * b as u128))
}

pub fn is_positive(r: &Rational) -> bool {
    r.is_positive()
}

pub fn is_zero(r: &Rational) -> bool {
    r.is_zero()
}

pub fn floor_to_i128(r: &Rational) -> i128 {
    r.floor().to_integer()
}

pub fn ceil_to_i128(r: &Rational) -> i128 {
    r.ceil().to_integer()
}

pub fn to_i64_checked(r: &Rational) -> Option<i64> {
    if r.is_integer() {
        r.to_integer().to_i64()
    } else {
        None
    }
}

/// Serde adapter writing rationals as `num/den` strings.
pub mod serde_str {
    use super::Rational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::format(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        super::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for optional rationals.
pub mod serde_opt_str {
    use super::Rational;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(r: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
        match r {
            Some(v) => s.serialize_some(&super::format(v)),
            None => s.serialize_none(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fraction_integer_and_decimal() {
        assert_eq!(parse("3/6").unwrap(), rat(1, 2));
        assert_eq!(parse("7").unwrap(), int(7));
        assert_eq!(parse("0.75").unwrap(), rat(3, 4));
        assert_eq!(parse("-1.5").unwrap(), rat(-3, 2));
        assert!(parse("1/0").is_err());
        assert!(parse("abc").is_err());
    }

    #[test]
    fn dyadic_rounding_brackets_value() {
        let x = std::f64::consts::PI;
        let lo = lower_rational(x, 1e-9).unwrap();
        let hi = upper_rational(x, 1e-9).unwrap();
        assert!(to_f64(&lo) < x && x < to_f64(&hi));
        assert!(to_f64(&hi) - to_f64(&lo) < 1e-6);
    }

    #[test]
    fn format_always_prints_denominator() {
        assert_eq!(format(&int(4)), "4/1");
        assert_eq!(format(&rat(8, 3)), "8/3");
    }

    #[test]
    fn pair_comparison_matches_rationals() {
        assert_eq!(cmp_pair(1, 2, 2, 4), std::cmp::Ordering::Equal);
        assert_eq!(cmp_pair(1, 3, 1, 2), std::cmp::Ordering::Less);
    }
}
