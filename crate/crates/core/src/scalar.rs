use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating-point scalar the numerical core is written against.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Sum + Debug + Display + Send + Sync + 'static
{
    /// Converts an `f64` literal.
    #[inline]
    fn c(x: f64) -> Self {
        Self::from_f64(x).expect("constant representable in scalar type")
    }

    /// Converts a count.
    #[inline]
    fn of(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    /// Lossy conversion for reporting.
    #[inline]
    fn f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Accuracy target for special-function evaluations.
    #[inline]
    fn special_tol() -> Self {
        Self::epsilon() * Self::c(5.0e4)
    }
}

impl Real for f32 {}
impl Real for f64 {}
