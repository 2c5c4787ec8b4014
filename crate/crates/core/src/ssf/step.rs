use std::fmt::Write as _;

use num_complex::Complex;

use super::SsfError;
use crate::funcspace::{Smooth, SmoothBijection};
use crate::linalg::HermitianOperator;
use crate::scalar::Real;

/// Integer-valued right-continuous step function: `levels[0]` left of the
/// first breakpoint, `levels[k]` on `[breakpoints[k-1], breakpoints[k])`.
#[derive(Clone, Debug, PartialEq)]
pub struct StepFunction<T: Real> {
    breakpoints: Vec<T>,
    levels: Vec<i64>,
}

impl<T: Real> StepFunction<T> {
    pub fn new(breakpoints: Vec<T>, levels: Vec<i64>) -> Result<Self, SsfError> {
        if levels.len() != breakpoints.len() + 1 {
            return Err(SsfError::InvalidStep(format!(
                "{} breakpoints need {} levels, got {}",
                breakpoints.len(),
                breakpoints.len() + 1,
                levels.len()
            )));
        }
        if breakpoints.iter().any(|b| !b.is_finite()) || breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(SsfError::InvalidStep("breakpoints must be finite and strictly increasing".into()));
        }
        Ok(Self { breakpoints, levels })
    }

    pub fn zero() -> Self {
        Self { breakpoints: Vec::new(), levels: vec![0] }
    }

    /// `level` on `[lo, hi)`, zero elsewhere.
    pub fn indicator(lo: T, hi: T, level: i64) -> Result<Self, SsfError> {
        Self::new(vec![lo, hi], vec![0, level, 0])
    }

    pub fn breakpoints(&self) -> &[T] {
        &self.breakpoints
    }

    pub fn levels(&self) -> &[i64] {
        &self.levels
    }

    /// Value at `x`, right-continuous at breakpoints.
    pub fn value(&self, x: T) -> i64 {
        self.levels[self.breakpoints.partition_point(|&b| b <= x)]
    }

    /// Zero at both ends.
    pub fn is_compactly_supported(&self) -> bool {
        self.levels[0] == 0 && *self.levels.last().expect("levels are never empty") == 0
    }

    /// Constancy intervals `(lo, hi, level)`; the outer two are unbounded.
    pub fn intervals(&self) -> impl Iterator<Item = (T, T, i64)> + '_ {
        let n = self.breakpoints.len();
        (0..=n).map(move |k| {
            let lo = if k == 0 { T::neg_infinity() } else { self.breakpoints[k - 1] };
            let hi = if k == n { T::infinity() } else { self.breakpoints[k] };
            (lo, hi, self.levels[k])
        })
    }

    /// Pointwise combination `op(self, other)` on the merged breakpoints,
    /// dropping breakpoints across which the result does not jump.
    pub fn combine(&self, other: &Self, op: impl Fn(i64, i64) -> i64) -> Self {
        let mut points: Vec<T> = self.breakpoints.iter().chain(&other.breakpoints).copied().collect();
        points.sort_by(|a, b| a.partial_cmp(b).expect("finite breakpoints"));
        points.dedup();
        let mut breakpoints = Vec::with_capacity(points.len());
        let mut levels = vec![op(self.levels[0], other.levels[0])];
        for p in points {
            let v = op(self.value(p), other.value(p));
            if v != *levels.last().expect("nonempty") {
                breakpoints.push(p);
                levels.push(v);
            }
        }
        Self { breakpoints, levels }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a - b)
    }

    pub fn neg(&self) -> Self {
        Self { breakpoints: self.breakpoints.clone(), levels: self.levels.iter().map(|l| -l).collect() }
    }

    /// `int F'(x) s(x) dx = sum_k levels[k] (F(hi_k) - F(lo_k))` over the
    /// bounded intervals; the outer levels must vanish.
    pub fn integrate_derivative(&self, antiderivative: impl Fn(T) -> Complex<T>) -> Complex<T> {
        let mut total = Complex::new(T::zero(), T::zero());
        for (w, pair) in self.breakpoints.windows(2).enumerate() {
            let level = self.levels[w + 1];
            if level != 0 {
                total += (antiderivative(pair[1]) - antiderivative(pair[0])) * T::lit(level as f64);
            }
        }
        total
    }

    /// CSV with header `breakpoint,level_after`; the level left of the first
    /// breakpoint is `levels[0]` and is 0 for spectral shift functions.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("breakpoint,level_after\n");
        for (b, l) in self.breakpoints.iter().zip(&self.levels[1..]) {
            let _ = writeln!(out, "{:.prec$e},{l}", b, prec = T::SIGNIFICANT_DIGITS - 1);
        }
        out
    }

    /// Inverse of [`StepFunction::to_csv`], assuming `levels[0] = 0`.
    pub fn from_csv(text: &str) -> Result<Self, SsfError>
    where
        T: std::str::FromStr,
    {
        let mut lines = text.lines();
        if lines.next().map(str::trim) != Some("breakpoint,level_after") {
            return Err(SsfError::InvalidStep("missing CSV header".into()));
        }
        let mut breakpoints = Vec::new();
        let mut levels = vec![0];
        for (i, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let bad = || SsfError::InvalidStep(format!("malformed CSV row {}", i + 2));
            let (b, l) = line.split_once(',').ok_or_else(bad)?;
            breakpoints.push(b.trim().parse::<T>().map_err(|_| bad())?);
            levels.push(l.trim().parse::<i64>().map_err(|_| bad())?);
        }
        Self::new(breakpoints, levels)
    }
}

/// `N_A(x) = #{eigenvalues <= x}`.
pub fn counting_function<T: Real>(a: &HermitianOperator<T>) -> StepFunction<T> {
    let mut breakpoints: Vec<T> = Vec::new();
    let mut levels = vec![0i64];
    for &lambda in a.eigenvalues() {
        if breakpoints.last() == Some(&lambda) {
            *levels.last_mut().expect("nonempty") += 1;
        } else {
            let next = levels.last().expect("nonempty") + 1;
            breakpoints.push(lambda);
            levels.push(next);
        }
    }
    StepFunction { breakpoints, levels }
}

/// Spectral shift function `xi(.; B, A) = N_A - N_B`.
pub fn xi<T: Real>(a: &HermitianOperator<T>, b: &HermitianOperator<T>) -> Result<StepFunction<T>, SsfError> {
    if a.dim() != b.dim() {
        return Err(SsfError::DimensionMismatch { left: a.dim(), right: b.dim() });
    }
    Ok(counting_function(a).sub(&counting_function(b)))
}

/// Both sides of the trace formula `tr(f(B) - f(A)) = int f' xi(.; B, A)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KreinCheck<T: Real> {
    pub trace_side: Complex<T>,
    pub integral_side: Complex<T>,
    pub residual: T,
    /// `1 + |tr f(B)| + |tr f(A)|`.
    pub scale: T,
}

impl<T: Real> KreinCheck<T> {
    pub fn relative(&self) -> T {
        self.residual / self.scale
    }
}

/// Trace side by the functional calculus, integral side exactly as
/// `sum_k levels[k] (f(hi_k) - f(lo_k))`.
pub fn krein_check<T: Real>(a: &HermitianOperator<T>, b: &HermitianOperator<T>, f: &Smooth<T>) -> Result<KreinCheck<T>, SsfError> {
    let shift = xi(a, b)?;
    let ta = a.apply_function(|x| f.eval(x))?.trace();
    let tb = b.apply_function(|x| f.eval(x))?.trace();
    let trace_side = tb - ta;
    let integral_side = shift.integrate_derivative(|x| f.eval(x));
    Ok(KreinCheck {
        trace_side,
        integral_side,
        residual: (trace_side - integral_side).norm(),
        scale: T::one() + tb.norm() + ta.norm(),
    })
}

/// `|tr(f(B) - f(A)) - int f' xi(.; B, A)|`.
pub fn krein_residual<T: Real>(a: &HermitianOperator<T>, b: &HermitianOperator<T>, f: &Smooth<T>) -> Result<T, SsfError> {
    Ok(krein_check(a, b, f)?.residual)
}

/// `xi(phi(x); phi(B), phi(A))` from the counting functions of the mapped
/// operators, checked against `xi(x; B, A)`.
pub fn xi_change_of_variables<T: Real>(
    a: &HermitianOperator<T>,
    b: &HermitianOperator<T>,
    phi: &SmoothBijection<T>,
    x: T,
) -> Result<i64, SsfError> {
    let original = xi(a, b)?.value(x);
    let pa = a.apply_real_function(|t| phi.eval(t))?;
    let pb = b.apply_real_function(|t| phi.eval(t))?;
    let mapped = xi(&pa, &pb)?.value(phi.eval(x));
    if mapped != original {
        return Err(SsfError::ChangeOfVariables { at: x.to_f64_lossy(), original, mapped });
    }
    Ok(mapped)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspace::build_phi;
    use crate::random::{random_hermitian, rng_for};
    use crate::scalar::re;

    #[test]
    fn counting_is_right_continuous() {
        let a = HermitianOperator::from_real_diagonal(&[1.0f64, 2.0, 2.0, 5.0]);
        let n = counting_function(&a);
        assert_eq!(n.value(2.0), 3);
        assert_eq!(n.value(1.999), 1);
        assert_eq!(n.value(0.5), 0);
        assert_eq!(n.value(5.0), 4);
        assert_eq!(n.value(1e9), 4);
    }

    #[test]
    fn xi_of_one_by_one_pair() {
        let a = HermitianOperator::from_real_diagonal(&[0.0f64]);
        let b = HermitianOperator::from_real_diagonal(&[1.0f64]);
        let s = xi(&a, &b).unwrap();
        assert_eq!(s, StepFunction::indicator(0.0, 1.0, 1).unwrap());
        let f = Smooth::real("cube", |x: f64| x * x * x, |x| 3.0 * x * x, |x| 6.0 * x);
        let k = krein_check(&a, &b, &f).unwrap();
        assert!((k.integral_side - re(1.0)).norm() < 1e-15);
        assert!(k.residual < 1e-14);
    }

    #[test]
    fn xi_vanishes_for_equal_operators_and_is_supported() {
        let a = random_hermitian::<f64, _>(6, &mut rng_for(1, 0));
        assert_eq!(xi(&a, &a).unwrap(), StepFunction::zero());
        let b = random_hermitian::<f64, _>(6, &mut rng_for(2, 0));
        assert!(xi(&a, &b).unwrap().is_compactly_supported());
    }

    #[test]
    fn krein_on_random_pair() {
        let f = Smooth::real("inv", |x: f64| 1.0 / (x * x + 1.0), |x| -2.0 * x / (x * x + 1.0).powi(2), |x| {
            (6.0 * x * x - 2.0) / (x * x + 1.0).powi(3)
        });
        let a = random_hermitian::<f64, _>(10, &mut rng_for(5, 1));
        let b = random_hermitian::<f64, _>(10, &mut rng_for(6, 1));
        assert!(krein_check(&a, &b, &f).unwrap().relative() <= 1e-8);
        let c = Smooth::real("one", |_| 1.0, |_| 0.0, |_| 0.0);
        assert!(krein_residual(&a, &b, &c).unwrap() < 1e-12);
    }

    #[test]
    fn rank_one_perturbation() {
        let a = random_hermitian::<f64, _>(8, &mut rng_for(7, 1));
        let e1 = crate::linalg::GeneralOperator::from_fn(8, |i, j| re(if i == 0 && j == 0 { 1.0 } else { 0.0 }));
        let b = HermitianOperator::from_operator(&(a.as_operator() + &e1)).unwrap();
        let f = Smooth::with_derivatives(
            "rational",
            |x: f64| Complex::new(x, -1.0).inv(),
            |x: f64| -Complex::new(x, -1.0).inv().powu(2),
            |x: f64| Complex::new(x, -1.0).inv().powu(3) * 2.0,
        );
        assert!(krein_residual(&a, &b, &f).unwrap() <= 1e-9);
    }

    #[test]
    fn change_of_variables() {
        let phi = build_phi(3, 1.0f64, 0.1).unwrap();
        let a = random_hermitian::<f64, _>(8, &mut rng_for(8, 2));
        let b = random_hermitian::<f64, _>(8, &mut rng_for(9, 2));
        assert_eq!(xi_change_of_variables(&a, &b, &phi, -100.0).unwrap(), 0);
        for k in 0..100 {
            let x = -6.0 + 0.12 * k as f64 + 1e-3;
            xi_change_of_variables(&a, &b, &phi, x).unwrap();
        }
    }

    #[test]
    fn csv_round_trip() {
        let a = random_hermitian::<f64, _>(5, &mut rng_for(3, 3));
        let b = random_hermitian::<f64, _>(5, &mut rng_for(4, 3));
        let s = xi(&a, &b).unwrap();
        assert_eq!(StepFunction::<f64>::from_csv(&s.to_csv()).unwrap(), s);
    }

    #[test]
    fn invalid_steps() {
        assert!(StepFunction::new(vec![1.0f64, 0.0], vec![0, 1, 0]).is_err());
        assert!(StepFunction::new(vec![0.0f64], vec![0]).is_err());
    }
}
