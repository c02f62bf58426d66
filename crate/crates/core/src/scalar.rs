//! Scalar abstraction for the kinematic layer.

use std::fmt::Debug;

use num_traits::{Float, FloatConst, FromPrimitive};

/// Real floating point scalar: `f32` or `f64`.
pub trait Real: Float + FloatConst + FromPrimitive + Debug + Default + Send + Sync + 'static {
    /// Lift an `f64` literal into this scalar type.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    /// Relative tolerance used by structural invariant checks.
    fn invariant_tol() -> Self;
}

impl Real for f32 {
    fn invariant_tol() -> Self {
        1e-5
    }
}

impl Real for f64 {
    fn invariant_tol() -> Self {
        1e-12
    }
}
