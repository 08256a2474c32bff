//! Floating-point scalar abstraction shared by the reference models and the
//! statistics harness.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, NumCast, ToPrimitive};

/// A real scalar: `f32` or `f64`.
///
/// The reference models and statistics are written against this trait so the
/// same code runs in single or double precision. Double precision is what the
/// CLI and the acceptance gates use.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + NumCast + Debug + Display + Send + Sync + 'static
{
    /// Lossy conversion from `f64`, used for literal constants.
    fn lit(v: f64) -> Self {
        <Self as NumCast>::from(v).expect("f64 literal representable")
    }

    /// Conversion from a count or 16-bit sample.
    fn from_count(v: usize) -> Self {
        <Self as NumCast>::from(v).expect("count representable")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite real")
    }
}

impl Real for f32 {}
impl Real for f64 {}
