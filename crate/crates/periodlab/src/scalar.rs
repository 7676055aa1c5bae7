//! Scalar abstraction for the floating-point side of the laboratory.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Floating-point scalar the numerical modules are generic over.
///
/// `f64` is the working type everywhere precision budgets are stated; `f32`
/// satisfies the same interface for quick, low-precision experiments.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + NumAssign + Sum + Debug + Display + 'static
{
    /// Lossless view as f64 for reporting and serialization.
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar convertible to f64")
    }

    /// Embeds a small constant given as f64.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("constant representable in scalar type")
    }
}

impl Real for f32 {}
impl Real for f64 {}
