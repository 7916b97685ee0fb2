//! Floating-point abstraction shared by every numeric kernel in the crate.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Real scalar the growth model, economics and geometry code are written against.
///
/// Implemented for `f32` and `f64`. Anything persisted goes through serde, so the
/// scalar has to be (de)serializable as well.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Default
    + Debug
    + Display
    + LowerExp
    + Serialize
    + DeserializeOwned
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal. Every `f64` is representable (possibly rounded) in
    /// the implementing types, so this never fails.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// IEEE total order (NaN sorts above +inf).
    #[inline]
    fn total_order(&self, other: &Self) -> std::cmp::Ordering {
        self.as_f64().total_cmp(&other.as_f64())
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
