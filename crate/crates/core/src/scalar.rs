//! Scalar abstraction for the numeric parts of the crate.
//!
//! Probabilities, entropies and bound values are computed over any type
//! implementing [`Real`]; `f64` is the default everywhere else in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Floating point scalar: `f32` or `f64`.
pub trait Real:
    Float
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Default
    + Debug
    + Display
    + Serialize
    + DeserializeOwned
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from an `f64` constant.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 constant representable")
    }

    /// Lossy conversion from a count.
    fn count(n: u64) -> Self {
        Self::from_u64(n).expect("count representable")
    }

    fn f64(self) -> f64 {
        self.to_f64().expect("finite scalar converts to f64")
    }

    /// Tolerance used when checking that a pmf sums to one.
    fn pmf_tolerance(cells: usize) -> Self;

    /// Complementary error function.
    fn erfc(self) -> Self;
}

impl Real for f32 {
    fn pmf_tolerance(cells: usize) -> Self {
        // f32 cannot hold 1e-12; allow a few ulps per summed cell.
        4.0 * f32::EPSILON * (cells.max(1) as f32)
    }

    fn erfc(self) -> Self {
        libm::erfcf(self)
    }
}

impl Real for f64 {
    fn pmf_tolerance(_cells: usize) -> Self {
        1e-12
    }

    fn erfc(self) -> Self {
        libm::erfc(self)
    }
}

/// `x log2 x` with the `0 log 0 = 0` convention.
pub(crate) fn xlog2x<T: Real>(x: T) -> T {
    if x <= T::zero() {
        T::zero()
    } else {
        x * x.log2()
    }
}
