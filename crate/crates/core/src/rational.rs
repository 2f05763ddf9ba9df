//! Exact rational numbers and their JSON encoding.
//!
//! Every probability in the crate is a [`Rational`]; nothing is ever rounded.
//! On the wire a rational is a `[numerator, denominator]` pair. Components
//! that do not fit in 64 bits are written as decimal strings.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Value;

use crate::error::{Error, Result};

/// Arbitrary-precision fraction in lowest terms with positive denominator.
pub type Rational = BigRational;

/// Shorthand constructor, panics on a zero denominator.
pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

/// Parses `"a/b"`, `"a"` or a plain decimal integer.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let text = text.trim();
    let parse_int = |s: &str| {
        s.trim()
            .parse::<BigInt>()
            .map_err(|e| Error::Parse(format!("bad integer {s:?}: {e}")))
    };
    match text.split_once('/') {
        Some((n, d)) => {
            let (n, d) = (parse_int(n)?, parse_int(d)?);
            if d.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {text:?}")));
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(parse_int(text)?)),
    }
}

fn int_to_json(value: &BigInt) -> Value {
    match value.to_i64() {
        Some(v) => Value::from(v),
        None => Value::from(value.to_string()),
    }
}

fn int_from_json(value: &Value) -> Result<BigInt> {
    match value {
        Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .or_else(|| n.as_u64().map(BigInt::from))
            .ok_or_else(|| Error::Parse(format!("non-integer component {n}"))),
        Value::String(s) => s
            .parse::<BigInt>()
            .map_err(|e| Error::Parse(format!("bad integer {s:?}: {e}"))),
        other => Err(Error::Parse(format!("expected integer, got {other}"))),
    }
}

pub fn to_json(value: &Rational) -> Value {
    Value::Array(vec![int_to_json(value.numer()), int_to_json(value.denom())])
}

/// Accepts `[num, den]`, `"num/den"`, or a bare integer.
pub fn from_json(value: &Value) -> Result<Rational> {
    match value {
        Value::Array(pair) if pair.len() == 2 => {
            let n = int_from_json(&pair[0])?;
            let d = int_from_json(&pair[1])?;
            if d.is_zero() {
                return Err(Error::Parse("zero denominator".into()));
            }
            Ok(Rational::new(n, d))
        }
        Value::String(s) => parse_rational(s),
        Value::Number(_) => Ok(Rational::from_integer(int_from_json(value)?)),
        other => Err(Error::Parse(format!("expected rational, got {other}"))),
    }
}

pub fn vec_to_json(values: &[Rational]) -> Value {
    Value::Array(values.iter().map(to_json).collect())
}

pub fn vec_from_json(value: &Value) -> Result<Vec<Rational>> {
    value
        .as_array()
        .ok_or_else(|| Error::Parse("expected an array of rationals".into()))?
        .iter()
        .map(from_json)
        .collect()
}

/// `serde(with = "crate::rational::serde_pair")` adapter.
pub mod serde_pair {
    use super::*;

    pub fn serialize<S: Serializer>(value: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        to_json(value).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let v = Value::deserialize(d)?;
        from_json(&v).map_err(D::Error::custom)
    }
}

/// `serde(with = "crate::rational::serde_vec")` adapter.
pub mod serde_vec {
    use super::*;

    pub fn serialize<S: Serializer>(value: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
        vec_to_json(value).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Vec<Rational>, D::Error> {
        let v = Value::deserialize(d)?;
        vec_from_json(&v).map_err(D::Error::custom)
    }
}

/// `serde(with = "crate::rational::serde_opt")` adapter for optional values.
pub mod serde_opt {
    use super::*;

    pub fn serialize<S: Serializer>(value: &Option<Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
        value.as_ref().map(to_json).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<Rational>, D::Error> {
        match Option::<Value>::deserialize(d)? {
            None | Some(Value::Null) => Ok(None),
            Some(v) => from_json(&v).map(Some).map_err(D::Error::custom),
        }
    }
}

/// `serde(with = "crate::rational::serde_matrix")` adapter for rows of rationals.
pub mod serde_matrix {
    use super::*;

    pub fn serialize<S: Serializer>(value: &[Vec<Rational>], s: S) -> std::result::Result<S::Ok, S::Error> {
        Value::Array(value.iter().map(|r| vec_to_json(r)).collect()).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Vec<Vec<Rational>>, D::Error> {
        let v = Value::deserialize(d)?;
        v.as_array()
            .ok_or_else(|| D::Error::custom("expected an array of rows"))?
            .iter()
            .map(vec_from_json)
            .collect::<Result<_>>()
            .map_err(D::Error::custom)
    }
}

/// Display form `a/b` (or `a` for integers).
pub fn show(value: &Rational) -> String {
    value.to_string()
}

pub fn to_f64(value: &Rational) -> f64 {
    if let Some(v) = value.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    (ln_abs_int(value.numer()) - ln_abs_int(value.denom())).exp() * sign(value)
}

fn sign(value: &Rational) -> f64 {
    if value.is_negative() {
        -1.0
    } else {
        1.0
    }
}

/// Natural log of |n| for big integers, accurate to f64 precision.
fn ln_abs_int(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().map(|v| v.abs().ln()).unwrap_or(f64::NEG_INFINITY);
    }
    let shift = bits - 64;
    let top = (n.abs() >> shift).to_f64().unwrap_or(0.0);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Natural logarithm of a positive rational.
pub fn ln(value: &Rational) -> Result<f64> {
    if !value.is_positive() {
        return Err(Error::Domain(format!("log of non-positive {value}")));
    }
    Ok(ln_abs_int(value.numer()) - ln_abs_int(value.denom()))
}

pub fn is_probability(value: &Rational) -> bool {
    !value.is_negative() && *value <= Rational::one()
}

/// Least common multiple of all denominators.
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    use num_integer::Integer;
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rational("2/4").unwrap(), rat(1, 2));
        assert_eq!(parse_rational(" -3 ").unwrap(), int(-3));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn json_forms() {
        let big = Rational::new(BigInt::from(1), BigInt::from(3).pow(60));
        let v = to_json(&big);
        assert!(v[1].is_string());
        assert_eq!(from_json(&v).unwrap(), big);
        assert_eq!(from_json(&serde_json::json!([2, 6])).unwrap(), rat(1, 3));
        assert_eq!(from_json(&serde_json::json!("5/10")).unwrap(), rat(1, 2));
        assert_eq!(from_json(&serde_json::json!(7)).unwrap(), int(7));
        assert!(from_json(&serde_json::json!([1, 0])).is_err());
    }

    #[test]
    fn logs_of_huge_values() {
        let huge = Rational::from_integer(BigInt::from(2).pow(5000));
        let l = ln(&huge).unwrap();
        assert!((l - 5000.0 * std::f64::consts::LN_2).abs() < 1e-9);
        assert!((ln(&rat(1, 4)).unwrap() + 4f64.ln()).abs() < 1e-12);
        assert!(ln(&int(0)).is_err());
    }
}
