use std::fmt;
use std::sync::Arc;

use num_complex::Complex;

use super::DoiError;
use crate::funcspace::Smooth;
use crate::scalar::{is_finite_cx, re, Real};

pub type KernelFn<T> = Arc<dyn Fn(T, T) -> Result<Complex<T>, DoiError> + Send + Sync>;
pub type DiagonalFn<T> = Arc<dyn Fn(T) -> Complex<T> + Send + Sync>;

/// Relative coincidence threshold for the diagonal rule.
pub const COINCIDENCE: f64 = 1e-9;

/// `|x - y| <= 1e-9 (1 + |x| + |y|)`.
#[inline]
pub fn coincident<T: Real>(x: T, y: T) -> bool {
    (x - y).abs() <= T::lit(COINCIDENCE) * (T::one() + x.abs() + y.abs())
}

/// A function of two real variables, optionally with a rule for its values
/// on the diagonal `x = y`.
#[derive(Clone)]
pub struct Kernel<T: Real> {
    label: String,
    eval: KernelFn<T>,
    diagonal: Option<DiagonalFn<T>>,
}

impl<T: Real> fmt::Debug for Kernel<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Kernel")
            .field("label", &self.label)
            .field("diagonal_rule", &self.diagonal.is_some())
            .finish()
    }
}

impl<T: Real> Kernel<T> {
    pub fn new(label: impl Into<String>, f: impl Fn(T, T) -> Complex<T> + Send + Sync + 'static) -> Self {
        Self::fallible(label, move |x, y| Ok(f(x, y)))
    }

    /// Kernel whose evaluation can report a degenerate point.
    pub fn fallible(
        label: impl Into<String>,
        f: impl Fn(T, T) -> Result<Complex<T>, DoiError> + Send + Sync + 'static,
    ) -> Self {
        Self {
            label: label.into(),
            eval: Arc::new(f),
            diagonal: None,
        }
    }

    pub fn with_diagonal(mut self, rule: impl Fn(T) -> Complex<T> + Send + Sync + 'static) -> Self {
        self.diagonal = Some(Arc::new(rule));
        self
    }

    pub fn constant(c: Complex<T>) -> Self {
        Self::new(format!("const({c})"), move |_, _| c)
    }

    /// `a1(x) a2(y)`.
    pub fn separable(a1: Smooth<T>, a2: Smooth<T>) -> Self {
        let label = format!("{}*{}", a1.label(), a2.label());
        Self::new(label, move |x, y| a1.eval(x) * a2.eval(y))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn relabel(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn has_diagonal_rule(&self) -> bool {
        self.diagonal.is_some()
    }

    /// The kernel formula itself, bypassing the diagonal rule.
    pub fn raw(&self, x: T, y: T) -> Result<Complex<T>, DoiError> {
        (self.eval)(x, y)
    }

    /// Value at `(x, y)`; the diagonal rule takes over at coincident points.
    pub fn evaluate(&self, x: T, y: T) -> Result<Complex<T>, DoiError> {
        let v = match &self.diagonal {
            Some(rule) if coincident(x, y) => rule(x),
            _ => (self.eval)(x, y)?,
        };
        if is_finite_cx(v) {
            Ok(v)
        } else {
            Err(DoiError::KernelNotFinite {
                lambda: x.to_f64_lossy(),
                mu: y.to_f64_lossy(),
            })
        }
    }

    /// Pointwise sum; the diagonal rules add when both exist.
    pub fn sum(&self, other: &Self) -> Self {
        let (a, b) = (self.clone(), other.clone());
        let mut k = Self::fallible(format!("{}+{}", self.label, other.label), move |x, y| {
            Ok(a.evaluate(x, y)? + b.evaluate(x, y)?)
        });
        if let (Some(da), Some(db)) = (self.diagonal.clone(), other.diagonal.clone()) {
            k = k.with_diagonal(move |x| da(x) + db(x));
        }
        k
    }

    /// `s * kernel`.
    pub fn scaled(&self, s: Complex<T>) -> Self {
        let a = self.clone();
        let mut k = Self::fallible(format!("{s}*{}", self.label), move |x, y| Ok(a.evaluate(x, y)? * s));
        if let Some(d) = self.diagonal.clone() {
            k = k.with_diagonal(move |x| d(x) * s);
        }
        k
    }

    /// Largest relative gap between the diagonal rule and the centered
    /// average of the formula at `x -+ offset`, over the sample points.
    /// `None` when there is no diagonal rule.
    pub fn diagonal_rule_defect(&self, samples: &[T], offset: T) -> Result<Option<T>, DoiError> {
        let Some(rule) = &self.diagonal else {
            return Ok(None);
        };
        let mut worst = T::zero();
        for &x in samples {
            let limit = ((self.eval)(x + offset, x - offset)? + (self.eval)(x - offset, x + offset)?) * T::lit(0.5);
            let d = rule(x);
            let scale = d.norm().max(limit.norm());
            if scale > T::zero() {
                worst = worst.max((d - limit).norm() / scale);
            }
        }
        Ok(Some(worst))
    }
}

/// Divided difference `(f(x) - f(y)) / (x - y)` with diagonal rule `f'(x)`.
///
/// Close to the diagonal, `|x - y| <= 1e-5 (1 + |x| + |y|)`, the quotient is
/// replaced by `f'` at the midpoint, whose error is `O(|x - y|^2)`.
pub fn divided_difference<T: Real>(f: &Smooth<T>) -> Kernel<T> {
    let g = f.clone();
    let d = f.clone();
    let near = T::lit(1e-5);
    Kernel::new(format!("dd[{}]", f.label()), move |x: T, y: T| {
        let h = x - y;
        if h.abs() <= near * (T::one() + x.abs() + y.abs()) {
            g.deriv((x + y) * T::lit(0.5))
        } else {
            (g.eval(x) - g.eval(y)) / re(h)
        }
    })
    .with_diagonal(move |x| d.deriv(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_has_sum_kernel() {
        let f = Smooth::real("sq", |x: f64| x * x, |x| 2.0 * x, |_| 2.0);
        let k = divided_difference(&f);
        for &(x, y) in &[(1.0, 2.0), (-3.0, 0.5), (0.25, 0.75)] {
            assert!((k.evaluate(x, y).unwrap() - re(x + y)).norm() < 1e-12);
        }
        assert_eq!(k.evaluate(1.5, 1.5).unwrap(), re(3.0));
    }

    #[test]
    fn linear_function_gives_constant_kernel() {
        let f = Smooth::real("lin", |x: f64| 3.0 * x - 1.0, |_| 3.0, |_| 0.0);
        let k = divided_difference(&f);
        for &(x, y) in &[(1.0, 2.0), (-3.0, 0.5), (7.0, 7.0)] {
            assert!((k.evaluate(x, y).unwrap() - re(3.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn diagonal_rule_is_the_limit() {
        let f = Smooth::real("inv", |x: f64| 1.0 / (x * x + 1.0), |x| -2.0 * x / (x * x + 1.0).powi(2), |x| {
            (6.0 * x * x - 2.0) / (x * x + 1.0).powi(3)
        });
        let k = divided_difference(&f);
        let samples: Vec<f64> = (0..10).map(|i| -3.0 + 0.65 * i as f64).collect();
        let defect = k.diagonal_rule_defect(&samples, 1e-5).unwrap().unwrap();
        assert!(defect < 1e-4, "{defect}");
    }

    #[test]
    fn non_finite_values_are_reported() {
        let k = Kernel::<f64>::new("pole", |x, y| re(1.0 / (x - y)));
        assert!(matches!(k.evaluate(1.0, 1.0), Err(DoiError::KernelNotFinite { .. })));
    }
}
