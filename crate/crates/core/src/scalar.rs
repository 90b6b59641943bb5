//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point type the propagation and divergence code is written against.
///
/// Implemented for `f32` and `f64`. Tolerances quoted throughout the crate
/// (1e-9, 1e-12) assume `f64`.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Sum + Default + Debug + Display + Send + Sync + 'static
{
    /// Converts an `f64` literal into `Self`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    #[inline]
    fn half() -> Self {
        Self::lit(0.5)
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// `x * ln(x / y)` with the `0 ln 0 = 0` convention.
    #[inline]
    fn xlogy_ratio(x: Self, y: Self) -> Self {
        if x <= Self::zero() {
            Self::zero()
        } else if y <= Self::zero() {
            Self::infinity()
        } else {
            x * (x / y).ln()
        }
    }
}

impl<T> Scalar for T where
    T: Float + FloatConst + FromPrimitive + ToPrimitive + Sum + Default + Debug + Display + Send + Sync + 'static
{
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn xlogy_conventions() {
        assert_eq!(f64::xlogy_ratio(0.0, 0.0), 0.0);
        assert_eq!(f64::xlogy_ratio(0.0, 0.3), 0.0);
        assert!(f64::xlogy_ratio(0.2, 0.0).is_infinite());
        assert!((f64::xlogy_ratio(1.0, 0.5) - std::f64::consts::LN_2).abs() < 1e-15);
        assert!((f32::xlogy_ratio(1.0, 0.5) - std::f32::consts::LN_2).abs() < 1e-6);
    }
}
