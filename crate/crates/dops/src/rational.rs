//! Exact rational scalars and their `"p/q"` text form.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Deserializer, Serializer};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn q(p: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(d))
}

pub fn int(p: i64) -> Rational {
    Rational::from_integer(BigInt::from(p))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// `(-1)^e` as a rational.
pub fn sign(e: i64) -> Rational {
    if e.rem_euclid(2) == 0 {
        one()
    } else {
        -one()
    }
}

/// Accepts `"p"`, `"p/q"`, or a decimal such as `"1.25"`.
pub fn parse(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    if let Some((a, b)) = s.split_once('/') {
        let a: BigInt = a.trim().parse().map_err(|_| bad())?;
        let b: BigInt = b.trim().parse().map_err(|_| bad())?;
        if b.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(a, b));
    }
    if let Some((ip, fp)) = s.split_once('.') {
        let neg = ip.starts_with('-');
        let digits = format!("{}{}", ip.trim_start_matches(['-', '+']), fp);
        let num: BigInt = digits.parse().map_err(|_| bad())?;
        let den = num_traits::pow(BigInt::from(10), fp.len());
        let v = Rational::new(num, den);
        return Ok(if neg { -v } else { v });
    }
    let a: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(a))
}

pub fn fmt(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(a), Some(b)) if a.is_finite() && b.is_finite() => a / b,
        _ => {
            // scale both parts down before converting
            let shift = r.numer().bits().max(r.denom().bits()).saturating_sub(1000);
            let a = (r.numer() >> shift).to_f64().unwrap_or(f64::NAN);
            let b = (r.denom() >> shift).to_f64().unwrap_or(f64::NAN);
            a / b
        }
    }
}

/// Exact conversion of a finite double.
pub fn from_f64(v: f64) -> Rational {
    Rational::from_float(v).unwrap_or_else(zero)
}

/// p/q with |p| ≤ 20 and 1 ≤ q ≤ 5; `nonzero` resamples zero, `positive` draws p ≥ 1.
pub fn random<R: Rng + ?Sized>(rng: &mut R, nonzero: bool, positive: bool) -> Rational {
    loop {
        let p: i64 = if positive { rng.gen_range(1..=20) } else { rng.gen_range(-20..=20) };
        let d: i64 = rng.gen_range(1..=5);
        if nonzero && p == 0 {
            continue;
        }
        return q(p, d);
    }
}

pub fn is_negative(r: &Rational) -> bool {
    r.is_negative()
}

pub mod serde_rat {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&fmt(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        from_json(&v).map_err(serde::de::Error::custom)
    }
}

pub mod serde_vec {
    use super::*;
    use serde::ser::SerializeSeq;

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for r in v {
            seq.serialize_element(&fmt(r))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Rational>, D::Error> {
        let v = Vec::<serde_json::Value>::deserialize(d)?;
        v.iter().map(|x| from_json(x).map_err(serde::de::Error::custom)).collect()
    }
}

pub mod serde_vec2 {
    use super::*;
    use serde::ser::SerializeSeq;

    pub fn serialize<S: Serializer>(v: &[Vec<Rational>], s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for row in v {
            let row: Vec<String> = row.iter().map(fmt).collect();
            seq.serialize_element(&row)?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Vec<Rational>>, D::Error> {
        let v = Vec::<Vec<serde_json::Value>>::deserialize(d)?;
        v.iter()
            .map(|row| row.iter().map(|x| from_json(x).map_err(serde::de::Error::custom)).collect())
            .collect()
    }
}

/// Serialize-only: `None` becomes `null`.
pub mod serde_vec_opt {
    use super::*;
    use serde::ser::SerializeSeq;

    pub fn serialize<S: Serializer>(v: &[Option<Rational>], s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for r in v {
            seq.serialize_element(&r.as_ref().map(fmt))?;
        }
        seq.end()
    }
}

/// Strings are parsed with [`parse`]; integers are taken as-is.
pub fn from_json(v: &serde_json::Value) -> Result<Rational> {
    match v {
        serde_json::Value::String(s) => parse(s),
        serde_json::Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(int(i))
            } else {
                parse(&n.to_string())
            }
        }
        _ => Err(Error::Parse(format!("expected a rational, got {v}"))),
    }
}
