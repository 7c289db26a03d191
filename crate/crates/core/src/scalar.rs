//! Scalar abstraction for probabilities.
//!
//! Every container and algorithm in the crate is generic over [`Prob`], which
//! is implemented for `f64` and `f32`. The default tolerance is chosen per
//! type so that tolerance-based comparisons stay meaningful at single
//! precision.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Floating point type used to store probabilities.
pub trait Prob:
    Float
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Tolerance used for equality, stochasticity and invariance tests.
    fn default_tolerance() -> Self;

    /// Smallest pivot magnitude accepted by the dense solvers.
    fn pivot_epsilon() -> Self;

    /// Converts an `f64` literal. Panics only for values the type cannot
    /// represent at all (never the case for the constants used here).
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Prob for f64 {
    fn default_tolerance() -> Self {
        1e-9
    }

    fn pivot_epsilon() -> Self {
        1e-13
    }
}

impl Prob for f32 {
    fn default_tolerance() -> Self {
        1e-5
    }

    fn pivot_epsilon() -> Self {
        1e-6
    }
}
