//! Exact rational scalars.
//!
//! Every coefficient in the toolkit is a [`Scalar`]: an arbitrary-precision
//! rational kept in lowest terms with a positive denominator. The textual
//! form is `p/q`, or just `p` when the denominator is one. Decimals are never
//! accepted.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::Error;

pub type Scalar = BigRational;

pub fn int(n: i64) -> Scalar {
    Scalar::from_integer(BigInt::from(n))
}

pub fn frac(p: i64, q: i64) -> Scalar {
    Scalar::new(BigInt::from(p), BigInt::from(q))
}

pub fn zero() -> Scalar {
    Scalar::zero()
}

pub fn one() -> Scalar {
    Scalar::one()
}

/// Parses `"p/q"`, `"-p/q"` or `"p"`. Anything else (decimals, exponents,
/// whitespace, a zero denominator) is rejected with the literal text.
pub fn parse(text: &str) -> Result<Scalar, Error> {
    let bad = || Error::RationalParse(text.to_string());
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (text, None),
    };
    let digits_ok = |s: &str, signed: bool| {
        let body = if signed { s.strip_prefix('-').unwrap_or(s) } else { s };
        !body.is_empty() && body.bytes().all(|b| b.is_ascii_digit())
    };
    if !digits_ok(num, true) {
        return Err(bad());
    }
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = match den {
        Some(d) if digits_ok(d, false) => d.parse().map_err(|_| bad())?,
        Some(_) => return Err(bad()),
        None => BigInt::one(),
    };
    if den.is_zero() {
        return Err(bad());
    }
    Ok(Scalar::new(num, den))
}

/// Canonical text form: `p/q` in lowest terms, or `p` when `q = 1`.
pub fn format(s: &Scalar) -> String {
    if s.denom().is_one() {
        s.numer().to_string()
    } else {
        format!("{}/{}", s.numer(), s.denom())
    }
}

/// `serde(with = "crate::scalar::text")` support for fields of type `Scalar`.
pub mod text {
    use serde::{de, Deserialize, Deserializer, Serializer};

    use super::Scalar;

    pub fn serialize<S: Serializer>(value: &Scalar, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::format(value))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Scalar, D::Error> {
        let raw = String::deserialize(d)?;
        super::parse(&raw).map_err(de::Error::custom)
    }
}

/// Same as [`text`] for `Vec<Scalar>`.
pub mod text_vec {
    use serde::{de, ser::SerializeSeq, Deserialize, Deserializer, Serializer};

    use super::Scalar;

    pub fn serialize<S: Serializer>(values: &[Scalar], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(values.len()))?;
        for v in values {
            seq.serialize_element(&super::format(v))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Scalar>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter().map(|r| super::parse(r).map_err(de::Error::custom)).collect()
    }
}
