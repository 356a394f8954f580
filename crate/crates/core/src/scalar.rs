use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating-point type the analytic model is generic over (`f32` or `f64`).
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
}

impl<T> Scalar for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + ToPrimitive
        + Debug
        + Display
        + Default
        + Send
        + Sync
        + 'static
{
}

/// Converts an `f64` literal into `T`.
#[inline]
pub(crate) fn lit<T: Scalar>(x: f64) -> T {
    T::from_f64(x).expect("literal representable in scalar type")
}

#[inline]
pub(crate) fn to_f64<T: Scalar>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// `1 - (1 - p)^n` without cancellation for small `p`.
#[inline]
pub(crate) fn one_minus_pow_complement<T: Scalar>(p: T, n: T) -> T {
    if p >= T::one() {
        return if n > T::zero() { T::one() } else { T::zero() };
    }
    -(n * (-p).ln_1p()).exp_m1()
}

/// `(1 - p)^n` evaluated through `ln_1p` so large `n` keeps full precision.
#[inline]
pub(crate) fn pow_complement<T: Scalar>(p: T, n: T) -> T {
    if p >= T::one() {
        return if n > T::zero() { T::zero() } else { T::one() };
    }
    (n * (-p).ln_1p()).exp()
}
