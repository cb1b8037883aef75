//! Scalar abstraction shared by every numeric routine in the crate.
//!
//! Matrix algebra and the Gibbs updates are written against [`Real`], so the
//! sampler runs in either `f32` or `f64`. Univariate variate generators draw
//! their base uniforms and normals in `f64` and round into `T` on return.

use nalgebra::RealField;
use num_traits::ToPrimitive;

/// Floating-point scalar usable by the sampler: `f32` or `f64`.
pub trait Real: RealField + Copy + ToPrimitive {}

impl Real for f32 {}
impl Real for f64 {}

/// Converts an `f64` literal into `T`.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 is representable in every Real type")
}

/// Widens `x` to `f64`.
#[inline]
pub fn wide<T: Real>(x: T) -> f64 {
    x.to_f64().expect("Real values convert to f64")
}
