//! Exact rational helpers.
//!
//! Target rates and interval half-widths are carried as exact fractions so
//! that an estimate sitting on an interval endpoint is classified the same
//! way every time. Decimal inputs are snapped to the nearest multiple of
//! [`QUANTUM`] when they enter the system.

use num_rational::Ratio;
use serde::{Deserialize, Deserializer, Serializer};

use crate::Rational;

pub const QUANTUM_DENOM: i64 = 1_000_000_000;
pub const QUANTUM: f64 = 1e-9;

/// Snap a decimal to the 1e-9 grid. `0.3` becomes exactly `3/10`.
pub fn from_decimal(x: f64) -> Rational {
    Ratio::new((x * QUANTUM_DENOM as f64).round() as i64, QUANTUM_DENOM)
}

pub fn to_f64(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

pub fn ratio(num: u64, den: u64) -> Rational {
    Ratio::new(num as i64, den as i64)
}

/// Serde adapter: exact on the inside, decimal on the wire.
pub mod decimal {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(to_f64(*r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let x = f64::deserialize(d)?;
        if !x.is_finite() {
            return Err(serde::de::Error::custom("expected a finite number"));
        }
        Ok(from_decimal(x))
    }
}
