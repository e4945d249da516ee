//! Scalar abstraction for the closed-form formula layer.
//!
//! Bound formulas and conjectured limits are written once over [`Real`] and
//! instantiated at `f64` (the crate-root aliases) or `f32`.

use num_traits::{Float, FloatConst, FromPrimitive};
use std::fmt::Debug;

/// Floating point scalar: `f32` or `f64`.
pub trait Real: Float + FloatConst + FromPrimitive + Debug + Send + Sync + 'static {
    /// Euler–Mascheroni constant.
    fn euler_gamma() -> Self;

    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    fn from_count(n: u64) -> Self {
        Self::from_u64(n).expect("integer representable")
    }
}

// 0.57721566490153286060651209008240243...
const EULER_GAMMA_F64: f64 = 0.577_215_664_901_532_9;

impl Real for f64 {
    fn euler_gamma() -> Self {
        EULER_GAMMA_F64
    }
}

impl Real for f32 {
    fn euler_gamma() -> Self {
        EULER_GAMMA_F64 as f32
    }
}
