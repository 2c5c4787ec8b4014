use num_complex::Complex;

use super::bijection::SmoothBijection;
use super::cayley::inverse_cayley;
use super::fm::FmFunction;
use super::FuncspaceError;
use crate::scalar::{cx, Real};

/// Points `|x|` where the one-sided limits at the Cayley point are compared.
pub const LIMIT_PROBES: [f64; 2] = [1e3, 1e6];
const LIMIT_TOLERANCE: f64 = 1e-6;
/// `|w - 1|` below which `w` is treated as the Cayley point itself.
const CAYLEY_POINT: f64 = 1e-14;

/// `g(w) = f(phi^{-1}(gamma^{-1}(w)))` on the unit circle, extended to `w = 1`
/// by its limit.
#[derive(Clone, Debug)]
pub struct CircleFunction<T: Real> {
    f: FmFunction<T>,
    phi: SmoothBijection<T>,
}

/// Builds `g` after checking that `f` has matching limits at both ends.
pub fn compose_g<T: Real>(f: &FmFunction<T>, phi: &SmoothBijection<T>) -> Result<CircleFunction<T>, FuncspaceError> {
    for probe in LIMIT_PROBES {
        let x = T::lit(probe);
        let left = f.func.eval(-x);
        let right = f.func.eval(x);
        if (left - right).norm().to_f64_lossy() > LIMIT_TOLERANCE {
            return Err(FuncspaceError::Discontinuity {
                at: probe,
                gap: (left - right).norm().to_f64_lossy(),
            });
        }
    }
    Ok(CircleFunction { f: f.clone(), phi: *phi })
}

impl<T: Real> CircleFunction<T> {
    fn at_cayley_point(w: Complex<T>) -> bool {
        (w - T::one()).norm() <= T::tol(CAYLEY_POINT)
    }

    /// The preimage `phi^{-1}(gamma^{-1}(w))` on the real line.
    pub fn preimage(&self, w: Complex<T>) -> Result<T, FuncspaceError> {
        self.phi.inverse(inverse_cayley(w).re)
    }

    pub fn eval(&self, w: Complex<T>) -> Result<Complex<T>, FuncspaceError> {
        if Self::at_cayley_point(w) {
            return Ok(Complex::new(T::zero(), T::zero()));
        }
        Ok(self.f.func.eval(self.preimage(w)?))
    }

    /// Complex derivative along the circle,
    /// `f'(x)/phi'(x) * dgamma^{-1}/dw` with `dgamma^{-1}/dw = i (y - i)^2 / 2`
    /// at `y = gamma^{-1}(w)`. At `w = 1` it is the limit `-i f0 / 2`.
    pub fn deriv(&self, w: Complex<T>) -> Result<Complex<T>, FuncspaceError> {
        let i = cx(T::zero(), T::one());
        let half = T::lit(0.5);
        if Self::at_cayley_point(w) {
            return Ok(-i * self.f.f0 * half);
        }
        let y = inverse_cayley(w).re;
        let x = self.phi.inverse(y)?;
        let dy = Complex::new(y, -T::one());
        Ok(self.f.func.deriv(x) / self.phi.deriv(x) * i * dy * dy * half)
    }
}
