use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating-point scalar the models are written against (`f32` or `f64`).
///
/// Accuracy targets quoted throughout the crate assume `f64`; `f32` works
/// but only to single precision.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts a literal constant.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("literal must be representable")
    }

    #[inline]
    fn of_u32(v: u32) -> Self {
        Self::from_u32(v).expect("integer must be representable")
    }

    /// Lossy view for diagnostics.
    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}
