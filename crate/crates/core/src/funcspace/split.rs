use num_complex::Complex;

use super::bijection::SmoothBijection;
use super::cutoff::CutoffFunction;
use super::smooth::Smooth;
use crate::scalar::{cpowi, cx, re, Real};

/// The pair `g1 = theta / (x^m - i)` and `g2 = (1 - theta) / (phi - i)` with
/// `g1 + g2 = 1 / (phi - i)` everywhere.
///
/// `theta` vanishes on `|x| <= r` and equals 1 on `|x| >= 2r`, so `phi = x^m`
/// wherever `theta > 0` and `g2` is supported in `[-2r, 2r]`.
#[derive(Clone, Debug)]
pub struct CutoffSplit<T: Real> {
    pub phi: SmoothBijection<T>,
    pub theta: CutoffFunction<T>,
    pub g1: Smooth<T>,
    pub g2: Smooth<T>,
}

impl<T: Real> CutoffSplit<T> {
    pub fn g(&self, j: usize) -> &Smooth<T> {
        match j {
            1 => &self.g1,
            2 => &self.g2,
            _ => panic!("split index must be 1 or 2, got {j}"),
        }
    }

    /// Radius outside of which `g2` vanishes.
    pub fn support_radius(&self) -> T {
        self.theta.radius()
    }

    /// `1 / (phi(x) - i)`.
    pub fn target(&self, x: T) -> Complex<T> {
        (re(self.phi.eval(x)) - cx(T::zero(), T::one())).inv()
    }
}

/// Splits `1 / (phi - i)` for the given bijection; see [`CutoffSplit`].
pub fn cutoff_split<T: Real>(phi: &SmoothBijection<T>) -> CutoffSplit<T> {
    let theta = CutoffFunction::new(phi.r() + phi.r());
    let m = phi.m() as i32;
    let mf = T::lit(m as f64);
    let i = cx(T::zero(), T::one());

    // h = (x^m - i)^{-1} and its derivatives
    let h = move |x: T| -> (Complex<T>, Complex<T>, Complex<T>) {
        let d = re(x.powi(m)) - i;
        let d1 = cpowi(d, -1);
        let d2 = d1 * d1;
        let dp = mf * x.powi(m - 1);
        let d2p = if m >= 2 {
            mf * T::lit((m - 1) as f64) * x.powi(m - 2)
        } else {
            T::zero()
        };
        let h1 = -d2 * dp;
        let h2 = d2 * d1 * T::lit(2.0) * dp * dp - d2 * d2p;
        (d1, h1, h2)
    };
    // k = (phi - i)^{-1} and its derivatives
    let p = *phi;
    let k = move |x: T| -> (Complex<T>, Complex<T>, Complex<T>) {
        let (v, dv, d2v) = p.all(x);
        let d1 = (re(v) - i).inv();
        let d2 = d1 * d1;
        (d1, -d2 * dv, d2 * d1 * T::lit(2.0) * dv * dv - d2 * d2v)
    };

    let g1_all = move |x: T| {
        let (t, dt, d2t) = theta.all(x);
        if t == T::zero() && dt == T::zero() && d2t == T::zero() {
            let z = re(T::zero());
            return (z, z, z);
        }
        let (h0, h1, h2) = h(x);
        (
            h0 * t,
            h0 * dt + h1 * t,
            h0 * d2t + h1 * (dt + dt) + h2 * t,
        )
    };
    let g2_all = move |x: T| {
        let (t, dt, d2t) = theta.all(x);
        let s = T::one() - t;
        if s == T::zero() {
            let z = re(T::zero());
            return (z, z, z);
        }
        let (k0, k1, k2) = k(x);
        (
            k0 * s,
            k1 * s - k0 * dt,
            k2 * s - k1 * (dt + dt) - k0 * d2t,
        )
    };

    let g1 = Smooth::with_derivatives(
        "g1",
        move |x| g1_all(x).0,
        move |x| g1_all(x).1,
        move |x| g1_all(x).2,
    );
    let g2 = Smooth::with_derivatives(
        "g2",
        move |x| g2_all(x).0,
        move |x| g2_all(x).1,
        move |x| g2_all(x).2,
    );
    CutoffSplit { phi: *phi, theta, g1, g2 }
}
