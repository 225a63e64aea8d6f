//! Exact non-negative rationals written as `"p/q"` strings.

use num_rational::Ratio;

use crate::error::{Error, Result};

pub type Rational = Ratio<u64>;

/// Parses `"p/q"` or a bare integer `"p"`. Zero denominators are rejected.
pub fn parse(s: &str) -> Result<Rational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s, "1"),
    };
    let num: u64 = num.parse().map_err(|_| Error::parse(format!("bad numerator in {s:?}")))?;
    let den: u64 = den.parse().map_err(|_| Error::parse(format!("bad denominator in {s:?}")))?;
    if den == 0 {
        return Err(Error::parse(format!("zero denominator in {s:?}")));
    }
    Ok(Rational::new(num, den))
}

pub fn format(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// `⌊r · n⌋`, computed without floating point.
pub fn floor_mul(r: &Rational, n: u64) -> u64 {
    ((*r.numer() as u128 * n as u128) / *r.denom() as u128) as u64
}

pub fn to_f64(r: &Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Serde adapter storing a [`Rational`] as a `"p/q"` string.
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

/// Same as [`serde_str`] for optional fields.
pub mod serde_opt_str {
    use super::Rational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
        match r {
            Some(r) => s.serialize_some(&super::format(r)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
        Option::<String>::deserialize(d)?
            .map(|s| super::parse(&s).map_err(serde::de::Error::custom))
            .transpose()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse("1/4").unwrap(), Rational::new(1, 4));
        assert_eq!(parse(" 2/8 ").unwrap(), Rational::new(1, 4));
        assert_eq!(parse("3").unwrap(), Rational::from_integer(3));
        assert!(parse("1/0").is_err());
        assert!(parse("-1/2").is_err());
        assert!(parse("a/b").is_err());
        assert!(parse("").is_err());
    }

    #[test]
    fn floor_mul_is_exact() {
        assert_eq!(floor_mul(&Rational::new(1, 8), 16), 2);
        assert_eq!(floor_mul(&Rational::new(1, 10), 12), 1);
        assert_eq!(floor_mul(&Rational::new(3, 10), 10), 3);
        assert_eq!(floor_mul(&Rational::new(u64::MAX, u64::MAX), u64::MAX), u64::MAX);
    }
}
