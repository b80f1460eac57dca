//! Floating point abstraction shared by the geometric and spectral code.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real scalar used by the polytope, entropy, quadrature and spectral
/// routines. Implemented for `f32` and `f64`; exact quantities use
/// [`num_rational::BigRational`] instead.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Sum + Debug + Display + Send + Sync + 'static
{
    /// Converts an `f64` constant, panicking only if the target type
    /// cannot represent finite doubles at all.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("scalar must represent f64 literals")
    }

    fn from_usize_lossy(x: usize) -> Self {
        Self::from_usize(x).expect("scalar must represent usize values")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T> Scalar for T where
    T: Float + FloatConst + FromPrimitive + ToPrimitive + Sum + Debug + Display + Send + Sync + 'static
{
}
