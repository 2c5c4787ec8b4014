//! Scalar abstraction shared by every numerical module.

use std::fmt::{Debug, Display, LowerExp};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Real floating point type the crate is generic over (`f32` or `f64`).
///
/// Tolerances throughout the crate are written for double precision and are
/// widened for less precise types through [`Real::tol`].
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + NumAssign
    + Debug
    + Display
    + LowerExp
    + Default
    + Send
    + Sync
    + 'static
{
    /// Significant decimal digits needed for a lossless text round trip.
    const SIGNIFICANT_DIGITS: usize;

    /// Converts an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    /// A tolerance given for `f64`, scaled by the ratio of machine epsilons.
    #[inline]
    fn tol(x: f64) -> Self {
        let ratio = (Self::epsilon().to_f64().unwrap_or(f64::EPSILON) / f64::EPSILON).max(1.0);
        Self::lit(x * ratio)
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    const SIGNIFICANT_DIGITS: usize = 17;
}

impl Real for f32 {
    const SIGNIFICANT_DIGITS: usize = 9;
}

/// Complex scalar over a [`Real`].
pub type Cx<T> = Complex<T>;

#[inline]
pub(crate) fn cx<T: Real>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

#[inline]
pub(crate) fn re<T: Real>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}

#[inline]
pub(crate) fn is_finite_cx<T: Real>(z: Complex<T>) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// Integer power of a complex number, negative exponents included.
#[inline]
pub fn cpowi<T: Real>(z: Complex<T>, n: i32) -> Complex<T> {
    if n >= 0 {
        z.powu(n as u32)
    } else {
        z.powu(n.unsigned_abs()).inv()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerance_widens_for_single_precision() {
        assert_eq!(f64::tol(1e-12), 1e-12);
        assert!(f32::tol(1e-12) > 1e-5);
    }

    #[test]
    fn negative_integer_powers() {
        let z = cx(3f64.sqrt(), -1.0);
        let w = cpowi(z, -3);
        // (sqrt3 - i)^3 = -8i
        assert!((w - cx(0.0, 0.125)).norm() < 1e-15);
    }
}
