use crate::scalar::Real;

/// Quintic smoothstep `6t^5 - 15t^4 + 10t^3` clamped to [0, 1], with its first
/// and second derivatives. C^2 at both joins.
pub(crate) fn smoothstep<T: Real>(t: T) -> (T, T, T) {
    if t <= T::zero() {
        return (T::zero(), T::zero(), T::zero());
    }
    if t >= T::one() {
        return (T::one(), T::zero(), T::zero());
    }
    let c = |x: f64| T::lit(x);
    let t2 = t * t;
    let t3 = t2 * t;
    let u = T::one() - t;
    let s = t3 * (c(10.0) + t * (c(-15.0) + c(6.0) * t));
    let ds = c(30.0) * t2 * u * u;
    let d2s = c(60.0) * t * u * (T::one() - c(2.0) * t);
    (s, ds, d2s)
}

/// Radial ramp: 0 for `|x| <= inner`, 1 for `|x| >= outer`, smoothstep between.
/// Returns value and derivatives with respect to `x`.
pub(crate) fn radial_ramp<T: Real>(x: T, inner: T, outer: T) -> (T, T, T) {
    let width = outer - inner;
    let (s, ds, d2s) = smoothstep((x.abs() - inner) / width);
    let sign = if x < T::zero() { -T::one() } else { T::one() };
    (s, ds * sign / width, d2s / (width * width))
}

/// The C^2 cutoff `theta`: 0 on `|x| <= r/2`, 1 on `|x| >= r`, values in [0, 1].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CutoffFunction<T: Real> {
    r: T,
}

impl<T: Real> CutoffFunction<T> {
    pub fn new(r: T) -> Self {
        assert!(r > T::zero(), "cutoff radius must be positive");
        Self { r }
    }

    pub fn radius(&self) -> T {
        self.r
    }

    pub fn eval(&self, x: T) -> T {
        self.all(x).0
    }

    pub fn deriv(&self, x: T) -> T {
        self.all(x).1
    }

    pub fn deriv2(&self, x: T) -> T {
        self.all(x).2
    }

    pub fn all(&self, x: T) -> (T, T, T) {
        radial_ramp(x, self.r * T::lit(0.5), self.r)
    }
}

/// One-sided second difference at `x` towards `dir = ±1`, extrapolated twice
/// in the step so the error is `O(h^3)` with `h = 5e-4`.
#[cfg(test)]
pub(crate) fn one_sided_second_derivative(f: impl Fn(f64) -> f64, x: f64, dir: f64) -> f64 {
    let d = |h: f64| (f(x) - 2.0 * f(x + dir * h) + f(x + 2.0 * dir * h)) / (h * h);
    let h = 5e-4;
    let r1 = |h: f64| 2.0 * d(h / 2.0) - d(h);
    (4.0 * r1(h / 2.0) - r1(h)) / 3.0
}
