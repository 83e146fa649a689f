//! Floating-point abstraction shared by every analysis in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive};

/// Real scalar the numerical core is generic over (`f32` or `f64`).
///
/// Tolerances are written as `f64` literals and converted with [`Real::lit`].
/// Loops that chase a tolerance also stop at a few ulps of the type, so
/// single precision runs terminate, just less accurately.
pub trait Real:
    Float + FloatConst + FromPrimitive + Debug + Display + Default + Sum + Send + Sync + serde::Serialize + 'static
{
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Largest of `tol` and a small multiple of the type's epsilon.
    fn floor_tol(tol: f64) -> Self {
        Self::lit(tol).max(Self::epsilon() * Self::lit(64.0))
    }
}

impl Real for f32 {}
impl Real for f64 {}
