//! Rational helpers: construction shorthands, `p/q` parsing and serde
//! adapters that keep rationals as strings end to end.

use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

pub use usp_lp::Rational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `num / den`. Panics on a zero denominator.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// Parses `"p/q"`, `"p"`, or a finite decimal such as `"8.9"`.
pub fn parse(s: &str) -> Result<Rational> {
    let s = s.trim();
    if let Some((whole, frac)) = s.split_once('.') {
        let negative = whole.starts_with('-');
        let whole_digits = whole.trim_start_matches(['-', '+']);
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(Error::parse(format!("invalid rational `{s}`")));
        }
        let digits = format!("{whole_digits}{frac}");
        let num = BigInt::from_str(if digits.is_empty() { "0" } else { &digits })
            .map_err(|_| Error::parse(format!("invalid rational `{s}`")))?;
        let den = num_traits::pow(BigInt::from(10), frac.len());
        let value = Rational::new(num, den);
        return Ok(if negative { -value } else { value });
    }
    Rational::from_str(s).map_err(|_| Error::parse(format!("invalid rational `{s}`")))
}

/// Parses a comma-separated list of rationals.
pub fn parse_list(s: &str) -> Result<Vec<Rational>> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(parse)
        .collect()
}

pub fn format_list(values: &[Rational]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// Serde adapter for a single rational written as `"p/q"`.
pub mod serde_str {
    use super::Rational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&value.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        super::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for a vector of rationals written as strings.
pub mod serde_vec {
    use super::Rational;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(values: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        values
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter()
            .map(|s| super::parse(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse("4/3").unwrap(), ratio(4, 3));
        assert_eq!(parse("-2").unwrap(), int(-2));
        assert_eq!(parse("8.9").unwrap(), ratio(89, 10));
        assert_eq!(parse("-0.25").unwrap(), ratio(-1, 4));
        assert!(parse("1/0x").is_err());
        assert!(parse("abc").is_err());
    }

    #[test]
    fn lists_round_trip() {
        let v = parse_list("3,2,1/2,0").unwrap();
        assert_eq!(v, vec![int(3), int(2), ratio(1, 2), int(0)]);
        assert_eq!(format_list(&v), "3,2,1/2,0");
    }
}
