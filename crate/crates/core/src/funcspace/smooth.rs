use std::fmt;
use std::sync::Arc;

use num_complex::Complex;

use crate::scalar::{re, Real};

pub type ScalarMap<T> = Arc<dyn Fn(T) -> Complex<T> + Send + Sync>;

/// Step for central differences of the first derivative.
pub const DIFF_STEP: f64 = 1e-5;
/// Step for central differences of the second derivative.
pub const DIFF_STEP_2: f64 = 1e-3;

/// A C^2 scalar function on the real line with optional closed-form
/// derivatives. Missing derivatives fall back to central differences with one
/// Richardson refinement.
#[derive(Clone)]
pub struct Smooth<T: Real> {
    label: String,
    f: ScalarMap<T>,
    df: Option<ScalarMap<T>>,
    d2f: Option<ScalarMap<T>>,
}

impl<T: Real> fmt::Debug for Smooth<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Smooth")
            .field("label", &self.label)
            .field("analytic_derivatives", &self.has_analytic_derivatives())
            .finish()
    }
}

impl<T: Real> Smooth<T> {
    pub fn new(label: impl Into<String>, f: impl Fn(T) -> Complex<T> + Send + Sync + 'static) -> Self {
        Self {
            label: label.into(),
            f: Arc::new(f),
            df: None,
            d2f: None,
        }
    }

    pub fn with_derivatives(
        label: impl Into<String>,
        f: impl Fn(T) -> Complex<T> + Send + Sync + 'static,
        df: impl Fn(T) -> Complex<T> + Send + Sync + 'static,
        d2f: impl Fn(T) -> Complex<T> + Send + Sync + 'static,
    ) -> Self {
        Self {
            label: label.into(),
            f: Arc::new(f),
            df: Some(Arc::new(df)),
            d2f: Some(Arc::new(d2f)),
        }
    }

    /// Real-valued function with real derivatives.
    pub fn real(
        label: impl Into<String>,
        f: impl Fn(T) -> T + Send + Sync + 'static,
        df: impl Fn(T) -> T + Send + Sync + 'static,
        d2f: impl Fn(T) -> T + Send + Sync + 'static,
    ) -> Self {
        Self::with_derivatives(label, move |x| re(f(x)), move |x| re(df(x)), move |x| re(d2f(x)))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn relabel(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn has_analytic_derivatives(&self) -> bool {
        self.df.is_some() && self.d2f.is_some()
    }

    #[inline]
    pub fn eval(&self, x: T) -> Complex<T> {
        (self.f)(x)
    }

    pub fn deriv(&self, x: T) -> Complex<T> {
        match &self.df {
            Some(df) => df(x),
            None => {
                let h = T::lit(DIFF_STEP);
                let d = |h: T| (self.eval(x + h) - self.eval(x - h)) / (h + h);
                richardson(d(h), d(h * T::lit(0.5)))
            }
        }
    }

    pub fn deriv2(&self, x: T) -> Complex<T> {
        match &self.d2f {
            Some(d2f) => d2f(x),
            None => {
                let h = T::lit(DIFF_STEP_2);
                let fx = self.eval(x);
                let d = |h: T| (self.eval(x + h) - fx - fx + self.eval(x - h)) / (h * h);
                richardson(d(h), d(h * T::lit(0.5)))
            }
        }
    }

    /// `d^order f / dx^order` for `order` in 0..=2.
    pub fn derivative(&self, order: usize, x: T) -> Complex<T> {
        match order {
            0 => self.eval(x),
            1 => self.deriv(x),
            2 => self.deriv2(x),
            _ => panic!("only derivatives up to order 2 are tracked"),
        }
    }

    /// `self + other`.
    pub fn sum(&self, other: &Self) -> Self {
        let (a, b) = (self.clone(), other.clone());
        let (a1, b1) = (self.clone(), other.clone());
        let (a2, b2) = (self.clone(), other.clone());
        let label = format!("{}+{}", self.label, other.label);
        Self::with_derivatives(
            label,
            move |x| a.eval(x) + b.eval(x),
            move |x| a1.deriv(x) + b1.deriv(x),
            move |x| a2.deriv2(x) + b2.deriv2(x),
        )
    }

    /// Same function with derivatives forced through finite differences.
    pub fn without_derivatives(&self) -> Self {
        let f = self.f.clone();
        Self {
            label: self.label.clone(),
            f,
            df: None,
            d2f: None,
        }
    }
}

#[inline]
fn richardson<T: Real>(coarse: Complex<T>, fine: Complex<T>) -> Complex<T> {
    (fine * T::lit(4.0) - coarse) / T::lit(3.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numeric_derivatives_match_closed_form() {
        let exact = Smooth::<f64>::real("sin", f64::sin, f64::cos, |x| -x.sin());
        let numeric = exact.without_derivatives();
        for &x in &[-2.0, -0.3, 0.0, 0.7, 3.1] {
            assert!((numeric.deriv(x) - exact.deriv(x)).norm() < 1e-9);
            assert!((numeric.deriv2(x) - exact.deriv2(x)).norm() < 1e-8);
        }
    }
}
