//! Real scalar abstraction: `f32` or `f64`.

use nalgebra::RealField;
use num_traits::{FromPrimitive, ToPrimitive};

/// Real scalar the whole crate is generic over.
///
/// `nalgebra::RealField` supplies the matrix algebra (eigen/SVD included),
/// the `num_traits` bounds supply lossless-enough conversion of the exact
/// constants (tolerances, moment coefficients) that are written as `f64`
/// literals throughout.
pub trait Scalar: RealField + FromPrimitive + ToPrimitive + Copy {
    /// Convert an `f64` constant into the scalar type.
    fn c(x: f64) -> Self {
        Self::from_f64(x).expect("constant representable in scalar type")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
