//! Scalar abstraction shared by every numeric routine in the crate.
//!
//! The simulator is written once against [`Scalar`] and instantiated for
//! `f64` (the default used by the CLI and the experiment harness) and `f32`.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, SubAssign};

use num_traits::{Float, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// floating point: f32 or f64
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + AddAssign
    + SubAssign
    + Sum
    + Debug
    + Display
    + Default
    + Serialize
    + DeserializeOwned
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal into this scalar type.
    #[inline]
    fn lit(value: f64) -> Self {
        Self::from_f64(value).expect("f64 literal representable in scalar type")
    }

    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar representable as f64")
    }

    /// Spacing of the energy grid, or `None` for no grid.
    ///
    /// Energies and transfer amounts that are multiples of the quantum add
    /// and subtract without rounding as long as magnitudes stay below
    /// `quantum * 2^mantissa_bits`, which keeps lossless exchanges exact.
    fn energy_quantum() -> Option<Self> {
        None
    }

    /// Rounds a non-negative amount down onto the energy grid.
    #[inline]
    fn quantize_down(self) -> Self {
        match Self::energy_quantum() {
            Some(q) => (self / q).floor() * q,
            None => self,
        }
    }
}

// 24 mantissa bits leave no room for a useful grid at unit scale.
impl Scalar for f32 {}

impl Scalar for f64 {
    #[inline]
    fn energy_quantum() -> Option<Self> {
        // 2^-32: sums up to 2^21 stay exact with 53 mantissa bits
        Some(1.0 / (1u64 << 32) as f64)
    }
}
