//! Scalar abstraction shared by every module.

use nalgebra::RealField;
use num_traits::{FromPrimitive, ToPrimitive};
use std::fmt::{Debug, Display, LowerExp};

/// Floating-point scalar used by geometry, assembly and solvers.
pub trait Real:
    RealField + Copy + FromPrimitive + ToPrimitive + Send + Sync + Debug + Display + LowerExp + 'static
{
    /// Converts an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("representable literal")
    }

    /// Converts an integer count.
    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("representable count")
    }

    /// Lossy conversion for reporting.
    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Machine epsilon.
    fn eps() -> Self;

    /// Default relative tolerance for iterative solvers at this precision.
    fn solver_tol() -> Self {
        let floor = Self::lit(1e-10);
        let scaled = Self::eps() * Self::lit(1e3);
        if scaled > floor {
            scaled
        } else {
            floor
        }
    }
}

impl Real for f64 {
    fn eps() -> Self {
        f64::EPSILON
    }
}

impl Real for f32 {
    fn eps() -> Self {
        f32::EPSILON
    }
}
