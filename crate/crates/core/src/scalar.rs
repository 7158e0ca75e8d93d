//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use rustfft::FftNum;

/// Real floating-point scalar the geometry, flow and billiard code is written against.
///
/// Implemented for `f32` and `f64`. The default tolerances throughout the crate are tuned
/// for `f64`; `f32` works for qualitative runs but will not meet them.
pub trait Real:
    Float + FloatConst + FftNum + FromPrimitive + ToPrimitive + Sum + Default + Debug + Display
{
    /// Number of bits in the mantissa, used to size iteration caps.
    const MANTISSA_DIGITS: u32;
}

impl Real for f32 {
    const MANTISSA_DIGITS: u32 = f32::MANTISSA_DIGITS;
}

impl Real for f64 {
    const MANTISSA_DIGITS: u32 = f64::MANTISSA_DIGITS;
}

/// Converts an `f64` literal into the working scalar.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal representable in scalar type")
}

/// Converts an index or count into the working scalar.
#[inline]
pub fn from_usize<T: Real>(n: usize) -> T {
    T::from_usize(n).expect("usize representable in scalar type")
}

/// Reduces an angle to `[0, 2π)`.
#[inline]
pub fn wrap_angle<T: Real>(theta: T) -> T {
    let tau = T::TAU();
    let mut r = theta % tau;
    if r < T::zero() {
        r = r + tau;
    }
    // `-0.0 % τ + τ` can round up to τ itself.
    if r >= tau {
        r = r - tau;
    }
    r
}

/// Lifts `theta` into the half-open window `(base, base + 2π]`.
#[inline]
pub fn lift_after<T: Real>(theta: T, base: T) -> T {
    let d = wrap_angle(theta - base);
    if d == T::zero() {
        base + T::TAU()
    } else {
        base + d
    }
}
