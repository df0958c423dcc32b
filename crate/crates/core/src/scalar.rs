//! Scalar abstraction shared by the metric and bound algebra.
//!
//! Everything in [`crate::metrics`] and [`crate::bounds`] only needs field
//! operations, an ordering and a way to lift small decimal constants, so the
//! same code runs over `f64`, `f32` and exact rationals ([`crate::Exact`]).

use std::fmt::Debug;

use num_rational::Ratio;
use num_traits::{FromPrimitive, Num, Signed};

/// Numeric type the closed-form model is evaluated over.
pub trait Scalar: Num + Signed + FromPrimitive + PartialOrd + Copy + Debug {
    /// Lossy conversion used for reporting and for mixing with `f64` tolerances.
    fn to_f64(self) -> f64;

    /// Lifts an `f64` constant. Panics only if the value is not representable,
    /// which never happens for the finite constants used in this crate.
    fn lit(value: f64) -> Self {
        Self::from_f64(value).expect("finite constant representable in scalar type")
    }

    fn two() -> Self {
        Self::one() + Self::one()
    }
}

impl Scalar for f64 {
    fn to_f64(self) -> f64 {
        self
    }
}

impl Scalar for f32 {
    fn to_f64(self) -> f64 {
        f64::from(self)
    }
}

impl Scalar for Ratio<i128> {
    fn to_f64(self) -> f64 {
        *self.numer() as f64 / *self.denom() as f64
    }
}

/// `|a - b| <= rel * max(|a|, |b|)`, with exact equality as the fallback when
/// both sides are zero.
pub fn approx_eq_rel<T: Scalar>(a: T, b: T, rel: T) -> bool {
    let scale = if a.abs() > b.abs() { a.abs() } else { b.abs() };
    (a - b).abs() <= rel * scale
}

/// Exact decimal literal, e.g. `exact(87, 100)` for 0.87.
pub fn exact(numer: i128, denom: i128) -> Ratio<i128> {
    Ratio::new(numer, denom)
}
