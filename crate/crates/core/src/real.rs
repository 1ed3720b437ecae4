//! Scalar abstraction: the solver core is generic over the floating point
//! type through [`Real`], with `f64` as the working default.

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive};

/// Floating point scalar usable by the solver: `f32` or `f64`.
pub trait Real: Float + FromPrimitive + Debug + Display + Send + Sync + 'static {}

impl Real for f32 {}
impl Real for f64 {}

/// Shorthand for lifting an `f64` constant into the working scalar type.
#[inline]
pub fn c<R: Real>(x: f64) -> R {
    R::from_f64(x).expect("constant not representable in scalar type")
}
