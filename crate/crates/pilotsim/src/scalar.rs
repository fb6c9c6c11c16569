//! Scalar trait shared by every generic routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real floating point type the matrix kernels are generic over (`f32` or `f64`).
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + NumAssign + Sum + Default + Debug + Display + Send + Sync + 'static
{
    /// Converts an `f64` literal; lossy for `f32`.
    fn lit(x: f64) -> Self;

    /// Widens to `f64`.
    fn as_f64(self) -> f64;

    /// Machine epsilon.
    fn eps() -> Self {
        Self::epsilon()
    }

    /// Complex number from polar phase with unit modulus.
    fn cis(phase: Self) -> Complex<Self> {
        Complex::new(phase.cos(), phase.sin())
    }
}

impl Real for f32 {
    fn lit(x: f64) -> Self {
        x as f32
    }
    fn as_f64(self) -> f64 {
        self as f64
    }
}

impl Real for f64 {
    fn lit(x: f64) -> Self {
        x
    }
    fn as_f64(self) -> f64 {
        self
    }
}
