//! Scalar abstraction for the numerical core.
//!
//! Everything downstream is generic over [`Real`], which bundles the
//! `num-traits` float machinery the algorithms need. `f32` and `f64` get the
//! trait through the blanket impl, as does the double-double type
//! [`crate::dd::Dd`] used by the extended-precision mode.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Floating-point scalar usable throughout the crate.
pub trait Real:
    Float + FloatConst + FromPrimitive + NumAssign + Debug + Display + Send + Sync + 'static
{
    /// Lossless embedding of an `f64` constant (both components for
    /// double-double, plain cast for native floats with the usual rounding).
    fn from_f64_lossy(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 converts to any Real")
    }

    /// Convert a count. Exact for the magnitudes used here (< 2^53).
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("usize converts to any Real")
    }

    /// Nearest `f64`, for reporting and grid hashing.
    fn approx_f64(self) -> f64 {
        self.to_f64().expect("Real converts to f64")
    }
}

impl<T> Real for T where
    T: Float + FloatConst + FromPrimitive + NumAssign + Debug + Display + Send + Sync + 'static
{
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mod1_generic<R: Real>(x: R) -> R {
        let r = x - x.floor();
        if r >= R::one() {
            R::zero()
        } else {
            r
        }
    }

    #[test]
    fn blanket_impl_covers_native_floats() {
        assert_eq!(mod1_generic(1.25_f64), 0.25);
        assert_eq!(mod1_generic(1.25_f32), 0.25);
        assert_eq!(f64::from_count(7), 7.0);
    }
}
