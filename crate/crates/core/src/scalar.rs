//! Exact rational scalars and the `+∞/−∞` extension used by the band minima.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::Error;

/// Arbitrary-precision rational. Always normalized (lowest terms, positive denominator).
pub type Scalar = BigRational;

pub fn int(n: i64) -> Scalar {
    Scalar::from_integer(BigInt::from(n))
}

pub fn ratio(p: i64, q: i64) -> Scalar {
    Scalar::new(BigInt::from(p), BigInt::from(q))
}

pub fn one_third() -> Scalar {
    ratio(1, 3)
}

/// Parses `"p/q"`, `"p"` or a finite decimal such as `"0.06"` into an exact rational.
pub fn parse_scalar(text: &str) -> Result<Scalar, Error> {
    let text = text.trim();
    let bad = || Error::Parse(format!("not a rational literal: {text:?}"));
    if let Some((p, q)) = text.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
        let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
        if q.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {text:?}")));
        }
        return Ok(Scalar::new(p, q));
    }
    if let Some((whole, frac)) = text.split_once('.') {
        let negative = whole.starts_with('-');
        let digits = format!("{}{}", whole.trim_start_matches(['-', '+']), frac);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let numer = BigInt::from_str(&digits).map_err(|_| bad())?;
        let denom = num_traits::pow(BigInt::from(10), frac.len());
        let value = Scalar::new(numer, denom);
        return Ok(if negative { -value } else { value });
    }
    BigInt::from_str(text)
        .map(Scalar::from_integer)
        .map_err(|_| bad())
}

/// Canonical text form: `"p/q"`, or `"p"` for integers.
pub fn format_scalar(x: &Scalar) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn to_f64(x: &Scalar) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Exact decimal expansion truncated (toward zero) to `digits` places.
pub fn decimal(x: &Scalar, digits: usize) -> String {
    let negative = x.is_negative();
    let abs = x.abs();
    let (whole, mut rem) = abs.numer().div_rem(abs.denom());
    let mut out = String::new();
    if negative {
        out.push('-');
    }
    out.push_str(&whole.to_string());
    if digits > 0 {
        out.push('.');
        for _ in 0..digits {
            rem *= 10;
            let (digit, next) = rem.div_rem(abs.denom());
            out.push_str(&digit.to_string());
            rem = next;
        }
    }
    out
}

/// A rational extended by the two infinities, for `min ∅ = +∞` and `max ∅ = −∞`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Extended {
    NegInf,
    Finite(Scalar),
    PosInf,
}

impl Extended {
    pub fn finite(&self) -> Option<&Scalar> {
        match self {
            Extended::Finite(x) => Some(x),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Extended::Finite(_))
    }

    /// `self + x` for finite `x`.
    pub fn add(&self, x: &Scalar) -> Extended {
        match self {
            Extended::Finite(v) => Extended::Finite(v + x),
            other => other.clone(),
        }
    }

    /// `x − self` for finite `x`: infinities flip sign.
    pub fn subtracted_from(&self, x: &Scalar) -> Extended {
        match self {
            Extended::NegInf => Extended::PosInf,
            Extended::PosInf => Extended::NegInf,
            Extended::Finite(v) => Extended::Finite(x - v),
        }
    }

    pub fn scale(&self, factor: &Scalar) -> Extended {
        debug_assert!(factor.is_positive());
        match self {
            Extended::Finite(v) => Extended::Finite(v * factor),
            other => other.clone(),
        }
    }

    pub fn min(self, other: Extended) -> Extended {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Extended) -> Extended {
        if self >= other {
            self
        } else {
            other
        }
    }

    pub fn is_nonnegative(&self) -> bool {
        match self {
            Extended::NegInf => false,
            Extended::PosInf => true,
            Extended::Finite(v) => !v.is_negative(),
        }
    }
}

impl PartialOrd for Extended {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Extended {
    fn cmp(&self, other: &Self) -> Ordering {
        use Extended::*;
        match (self, other) {
            (NegInf, NegInf) | (PosInf, PosInf) => Ordering::Equal,
            (NegInf, _) | (_, PosInf) => Ordering::Less,
            (_, NegInf) | (PosInf, _) => Ordering::Greater,
            (Finite(a), Finite(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for Extended {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::NegInf => f.write_str("-inf"),
            Extended::PosInf => f.write_str("inf"),
            Extended::Finite(v) => f.write_str(&format_scalar(v)),
        }
    }
}

impl Serialize for Extended {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

fn de_error<E: serde::de::Error>(e: Error) -> E {
    match e {
        Error::Parse(why) => E::custom(why),
        other => E::custom(other),
    }
}

/// Serde adapter storing a [`Scalar`] as its `"p/q"` string.
pub mod serde_scalar {
    use super::*;

    pub fn serialize<S: Serializer>(x: &Scalar, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&format_scalar(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<Scalar, D::Error> {
        let text = String::deserialize(deserializer)?;
        parse_scalar(&text).map_err(de_error)
    }
}

/// Serde adapter for `Vec<Scalar>` as a list of `"p/q"` strings.
pub mod serde_scalars {
    use super::*;

    pub fn serialize<S: Serializer>(xs: &[Scalar], serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(xs.iter().map(format_scalar))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        deserializer: D,
    ) -> Result<Vec<Scalar>, D::Error> {
        let texts = Vec::<String>::deserialize(deserializer)?;
        texts
            .iter()
            .map(|t| parse_scalar(t).map_err(de_error))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_literal_forms() {
        assert_eq!(parse_scalar("11/21").unwrap(), ratio(11, 21));
        assert_eq!(parse_scalar("6/4").unwrap(), ratio(3, 2));
        assert_eq!(parse_scalar("-3").unwrap(), int(-3));
        assert_eq!(parse_scalar("0.06").unwrap(), ratio(3, 50));
        assert_eq!(parse_scalar("-0.5").unwrap(), ratio(-1, 2));
        assert!(parse_scalar("1/0").is_err());
        assert!(parse_scalar("x").is_err());
        assert!(parse_scalar(".").is_err());
    }

    #[test]
    fn formats_in_lowest_terms() {
        assert_eq!(format_scalar(&ratio(2, -4)), "-1/2");
        assert_eq!(format_scalar(&ratio(8, 4)), "2");
    }

    #[test]
    fn decimal_truncates() {
        assert_eq!(decimal(&ratio(8, 5), 3), "1.600");
        assert_eq!(decimal(&ratio(-1, 3), 4), "-0.3333");
    }

    #[test]
    fn extended_order() {
        let x = Extended::Finite(int(5));
        assert!(Extended::NegInf < x && x < Extended::PosInf);
        assert_eq!(Extended::PosInf.subtracted_from(&int(1)), Extended::NegInf);
        assert_eq!(x.clone().min(Extended::PosInf), x);
    }
}
