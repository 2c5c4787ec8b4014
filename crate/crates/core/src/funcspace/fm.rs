use num_complex::Complex;
use serde::Serialize;

use super::smooth::{Smooth, DIFF_STEP};
use super::FuncspaceError;
use crate::scalar::{cpowi, cx, re, Real};

/// Radii at which the decay of `f - f0 x^{-m}` is sampled.
pub const ASYMPTOTIC_RADII: [f64; 4] = [10.0, 20.0, 40.0, 80.0];
const BOUNDED_GRID: usize = 4001;
const BOUNDED_RANGE: f64 = 100.0;
/// Allowed growth of the scaled remainder from the inner to the outer radii.
const GROWTH_SLACK: f64 = 1.5;
const NOISE_ANALYTIC: f64 = 1e-14;
const NOISE_NUMERIC: f64 = 1e-9;

/// A candidate member of the class: bounded with two bounded derivatives and
/// `f^{(l)}(x) - d^l[f0 x^{-m}] = O(|x|^{-l-m-eps})` at both ends.
#[derive(Clone, Debug)]
pub struct FmFunction<T: Real> {
    pub func: Smooth<T>,
    pub m: u32,
    pub f0: Complex<T>,
    pub eps: T,
}

impl<T: Real> FmFunction<T> {
    pub fn new(func: Smooth<T>, m: u32, f0: Complex<T>, eps: T) -> Self {
        Self { func, m, f0, eps }
    }

    pub fn label(&self) -> &str {
        self.func.label()
    }

    /// `d^l/dx^l [f(x) - f0 x^{-m}]`.
    pub fn remainder(&self, order: usize, x: T) -> Complex<T> {
        let m = self.m as i32;
        let lead = match order {
            0 => T::one(),
            1 => -T::lit(m as f64),
            _ => T::lit((m * (m + 1)) as f64),
        };
        let power = x.powi(-m - order as i32);
        self.func.derivative(order, x) - self.f0 * (lead * power)
    }
}

/// Outcome of [`fm_membership`]. Failures are entries, never errors.
#[derive(Clone, Debug, Serialize)]
pub struct MembershipReport {
    pub label: String,
    pub m: u32,
    pub passed: bool,
    /// `max |f^{(l)}|` over the boundedness grid, `l = 0, 1, 2`.
    pub sup_norms: [f64; 3],
    /// Fitted constant `C` per derivative order.
    pub fitted_constants: [f64; 3],
    /// Ratio of the outer to the inner scaled remainder per derivative order.
    pub growth: [f64; 3],
    pub numeric_derivatives: bool,
    pub difference_step: Option<f64>,
    pub failures: Vec<String>,
}

/// Samples boundedness on `[-100, 100]` and the decay of the remainder at
/// `|x| in {10, 20, 40, 80}` on both sides. A member passes when the scaled
/// remainder `|d^l(f - f0 x^{-m})| |x|^{l+m+eps}` does not grow between the
/// inner and the outer radii beyond a fixed slack.
pub fn fm_membership<T: Real>(f: &FmFunction<T>) -> MembershipReport {
    let numeric = !f.func.has_analytic_derivatives();
    let noise = if numeric { NOISE_NUMERIC } else { NOISE_ANALYTIC };
    let mut failures = Vec::new();
    if f.m.is_multiple_of(2) {
        failures.push(format!("m = {} is even", f.m));
    }
    if !(f.eps > T::zero()) {
        failures.push(format!("decay margin {} is not positive", f.eps));
    }

    let mut sup_norms = [0.0f64; 3];
    for k in 0..BOUNDED_GRID {
        let x = -BOUNDED_RANGE + 2.0 * BOUNDED_RANGE * k as f64 / (BOUNDED_GRID - 1) as f64;
        for (order, sup) in sup_norms.iter_mut().enumerate() {
            let v = f.func.derivative(order, T::lit(x)).norm().to_f64_lossy();
            *sup = if v.is_nan() { f64::INFINITY } else { sup.max(v) };
        }
    }
    for (order, sup) in sup_norms.iter().enumerate() {
        if !sup.is_finite() {
            failures.push(format!("derivative of order {order} is not finite on the grid"));
        }
    }

    let eps = f.eps.to_f64_lossy();
    let mut fitted = [0.0f64; 3];
    let mut growth = [0.0f64; 3];
    for order in 0..3 {
        let exponent = order as f64 + f.m as f64 + eps;
        let scaled = |radius: f64| -> f64 {
            [radius, -radius]
                .iter()
                .map(|&x| f.remainder(order, T::lit(x)).norm().to_f64_lossy() * radius.powf(exponent))
                .fold(0.0, f64::max)
        };
        let q: Vec<f64> = ASYMPTOTIC_RADII.iter().map(|&r| scaled(r)).collect();
        let inner = q[0].max(q[1]);
        let outer = q[2].max(q[3]);
        fitted[order] = q.iter().copied().fold(0.0, f64::max);
        growth[order] = if inner > 0.0 { outer / inner } else if outer > 0.0 { f64::INFINITY } else { 0.0 };
        let allowance = noise * ASYMPTOTIC_RADII[3].powf(exponent);
        if !(outer <= GROWTH_SLACK * inner + allowance) {
            failures.push(format!(
                "order {order}: scaled remainder grows from {inner:.3e} to {outer:.3e}"
            ));
        }
    }

    MembershipReport {
        label: f.label().to_string(),
        m: f.m,
        passed: failures.is_empty(),
        sup_norms,
        fitted_constants: fitted,
        growth,
        numeric_derivatives: numeric,
        difference_step: numeric.then_some(DIFF_STEP),
        failures,
    }
}

/// Identifiers accepted by [`registry`].
pub const REGISTRY_NAMES: [&str; 3] = ["bump", "capped-power-m", "rational-m"];
/// Radius of the support of `bump`.
pub const BUMP_RADIUS: f64 = 4.0;

/// Named test functions.
///
/// * `bump`: `exp(1 - 1/(1 - u^2))` for `|u| < 1`, else 0, with `u = x/4`; `f0 = 0`.
/// * `capped-power-m`: `u/(1 + u^2)` with `u = x^m`; `f0 = 1`.
/// * `rational-m`: `(x - i)^{-m}`; `f0 = 1`.
pub fn registry<T: Real>(name: &str, m: u32) -> Result<FmFunction<T>, FuncspaceError> {
    match name {
        "bump" => Ok(bump(m)),
        "capped-power-m" => Ok(capped_power(m)),
        "rational-m" => Ok(rational(m)),
        other => Err(FuncspaceError::UnknownFunction(other.to_string())),
    }
}

fn bump<T: Real>(m: u32) -> FmFunction<T> {
    let big_r = T::lit(BUMP_RADIUS);
    // (f, q = f'/f, s = 1 - u^2, u); f = 0 outside the support
    let parts = move |x: T| -> Option<(T, T, T, T)> {
        let u = x / big_r;
        let s = T::one() - u * u;
        if s <= T::zero() {
            return None;
        }
        let f = (T::one() - s.recip()).exp();
        let q = -(u + u) / (big_r * s * s);
        Some((f, q, s, u))
    };
    let func = Smooth::real(
        "bump",
        move |x| parts(x).map_or(T::zero(), |p| p.0),
        move |x| parts(x).map_or(T::zero(), |(f, q, _, _)| f * q),
        move |x| {
            parts(x).map_or(T::zero(), |(f, q, s, u)| {
                let r2 = big_r * big_r;
                f * (q * q - T::lit(2.0) / (r2 * s * s) - T::lit(8.0) * u * u / (r2 * s * s * s))
            })
        },
    );
    FmFunction::new(func, m, re(T::zero()), T::one())
}

fn capped_power<T: Real>(m: u32) -> FmFunction<T> {
    let mi = m as i32;
    let mf = T::lit(m as f64);
    let u = move |x: T| {
        let du = mf * x.powi(mi - 1);
        let d2u = if mi >= 2 { mf * T::lit((mi - 1) as f64) * x.powi(mi - 2) } else { T::zero() };
        (x.powi(mi), du, d2u)
    };
    let func = Smooth::real(
        "capped-power-m",
        move |x| {
            let (v, _, _) = u(x);
            if v.abs() > T::one() { (v + v.recip()).recip() } else { v / (T::one() + v * v) }
        },
        move |x| {
            let (v, dv, _) = u(x);
            let w = T::one() + v * v;
            dv * (T::one() - v * v) / (w * w)
        },
        move |x| {
            let (v, dv, d2v) = u(x);
            let w = T::one() + v * v;
            let f1 = (T::one() - v * v) / (w * w);
            let f2 = T::lit(2.0) * v * (v * v - T::lit(3.0)) / (w * w * w);
            f2 * dv * dv + f1 * d2v
        },
    );
    FmFunction::new(func, m, re(T::one()), T::one())
}

fn rational<T: Real>(m: u32) -> FmFunction<T> {
    let mi = m as i32;
    let i = cx(T::zero(), T::one());
    let mf = T::lit(m as f64);
    let func = Smooth::with_derivatives(
        "rational-m",
        move |x: T| cpowi(re(x) - i, -mi),
        move |x: T| cpowi(re(x) - i, -mi - 1) * (-mf),
        move |x: T| cpowi(re(x) - i, -mi - 2) * (mf * (mf + T::one())),
    );
    FmFunction::new(func, m, re(T::one()), T::lit(0.5))
}
