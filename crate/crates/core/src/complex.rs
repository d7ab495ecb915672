//! The scalar type shared by every module, plus boundary helpers that
//! reject non-finite input and read/write complex numbers as `[re, im]`.

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serializer};

use crate::error::{Error, Result};

/// Complex scalar with finite components.
///
/// Finiteness is enforced where values enter the library (JSON, CLI, the
/// checked constructors below); arithmetic inside the crate uses the plain
/// `Complex64` operations.
pub type ComplexValue = Complex64;

pub const ZERO: ComplexValue = Complex64::new(0.0, 0.0);
pub const ONE: ComplexValue = Complex64::new(1.0, 0.0);

#[inline]
pub fn real(x: f64) -> ComplexValue {
    Complex64::new(x, 0.0)
}

/// Checked constructor: fails on NaN or infinite components.
pub fn checked(re: f64, im: f64) -> Result<ComplexValue> {
    ensure_finite(Complex64::new(re, im), "complex value")
}

pub fn ensure_finite(z: ComplexValue, what: &str) -> Result<ComplexValue> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(Error::NonFinite(format!("{what} = {z}")))
    }
}

/// Parses `re,im` or a bare `re`.
pub fn parse(text: &str) -> Result<ComplexValue> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let num = |s: &str| {
        s.parse::<f64>()
            .map_err(|_| Error::Param(format!("cannot parse `{s}` as a number")))
    };
    match parts.as_slice() {
        [re] => checked(num(re)?, 0.0),
        [re, im] => checked(num(re)?, num(im)?),
        _ => Err(Error::Param(format!(
            "expected `re,im` or `re`, got `{text}`"
        ))),
    }
}

/// Relative distance `|a - b| / |b|`, with `0/0 = 0`.
pub fn rel_err(a: ComplexValue, b: ComplexValue) -> f64 {
    let diff = (a - b).norm();
    if diff == 0.0 {
        0.0
    } else {
        diff / b.norm()
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Repr {
    Pair([f64; 2]),
    Real(f64),
}

impl Repr {
    fn into_value<E: serde::de::Error>(self) -> std::result::Result<ComplexValue, E> {
        let z = match self {
            Repr::Pair([re, im]) => Complex64::new(re, im),
            Repr::Real(re) => Complex64::new(re, 0.0),
        };
        ensure_finite(z, "complex value").map_err(E::custom)
    }
}

/// Serde adapter: writes `[re, im]`, reads `[re, im]` or a bare number.
pub mod serde_pair {
    use super::*;

    pub fn serialize<S: Serializer>(
        z: &ComplexValue,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        use serde::Serialize;
        [z.re, z.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<ComplexValue, D::Error> {
        Repr::deserialize(d)?.into_value()
    }
}

/// Same as [`serde_pair`] for vectors.
pub mod serde_pair_vec {
    use super::*;

    pub fn serialize<S: Serializer>(
        v: &[ComplexValue],
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        use serde::Serialize;
        let pairs: Vec<[f64; 2]> = v.iter().map(|z| [z.re, z.im]).collect();
        pairs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Vec<ComplexValue>, D::Error> {
        Vec::<Repr>::deserialize(d)?
            .into_iter()
            .map(Repr::into_value)
            .collect()
    }
}
