//! Floating point abstraction shared by every numerical module.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use rustfft::FftNum;

/// Real scalar used by the discretizations: `f32` or `f64`.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + FftNum
    + Debug
    + Display
    + LowerExp
    + Sum
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from `f64`; every finite double maps to a value.
    #[inline]
    fn of(value: f64) -> Self {
        <Self as FromPrimitive>::from_f64(value).expect("f64 converts to every Scalar")
    }

    #[inline]
    fn of_usize(value: usize) -> Self {
        <Self as FromPrimitive>::from_usize(value).expect("usize converts to every Scalar")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("Scalar converts to f64")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// `sin(pi * x)` with exact zeros at the integers.
///
/// The argument is reduced to `[0, 1/2]` before calling `sin`, so
/// dyadic arguments such as `16 * (n / 16)` land exactly on a root.
pub fn sin_pi<T: Scalar>(x: T) -> T {
    let two = T::of(2.0);
    let one = T::one();
    let half = T::of(0.5);
    // r in [0, 2)
    let mut r = x - two * (x / two).floor();
    let mut sign = one;
    if r >= one {
        r = r - one;
        sign = -one;
    }
    if r == T::zero() {
        return T::zero();
    }
    if r > half {
        r = one - r;
    }
    sign * (T::PI() * r).sin()
}
