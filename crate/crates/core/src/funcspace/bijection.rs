use super::cutoff::radial_ramp;
use super::FuncspaceError;
use crate::scalar::Real;

/// Fraction of `r` where the lift starts to fade out.
const FADE_START: f64 = 0.5;
/// Points of the monotonicity grid over `[-2r, 2r]`.
const MONOTONE_GRID: usize = 1000;
const MAX_DOUBLINGS: usize = 60;

/// A strictly increasing C^2 bijection of the real line with
/// `phi(x) = x^m` for `|x| >= r` and `phi' >= c` everywhere.
///
/// Inside `(-r, r)` it is `x^m + kappa * x * b(x)` where `b` is an even C^2
/// plateau equal to 1 on `|x| <= r/2` and 0 on `|x| >= r`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SmoothBijection<T: Real> {
    m: u32,
    r: T,
    c: T,
    kappa: T,
}

impl<T: Real> SmoothBijection<T> {
    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn r(&self) -> T {
        self.r
    }

    /// The guaranteed lower bound on `phi'`.
    pub fn c(&self) -> T {
        self.c
    }

    pub fn kappa(&self) -> T {
        self.kappa
    }

    fn plateau(&self, x: T) -> (T, T, T) {
        let (s, ds, d2s) = radial_ramp(x, self.r * T::lit(FADE_START), self.r);
        (T::one() - s, -ds, -d2s)
    }

    /// `(phi, phi', phi'')` at `x`.
    pub fn all(&self, x: T) -> (T, T, T) {
        let m = self.m as i32;
        let mf = T::lit(self.m as f64);
        let p = x.powi(m);
        let dp = mf * x.powi(m - 1);
        let d2p = if m >= 2 {
            mf * T::lit((m - 1) as f64) * x.powi(m - 2)
        } else {
            T::zero()
        };
        if x.abs() >= self.r || self.kappa == T::zero() {
            return (p, dp, d2p);
        }
        let (b, db, d2b) = self.plateau(x);
        let k = self.kappa;
        (
            p + k * x * b,
            dp + k * (b + x * db),
            d2p + k * (db + db + x * d2b),
        )
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

    /// Inverse by bisection; see [`invert_monotone`].
    pub fn inverse(&self, y: T) -> Result<T, FuncspaceError> {
        invert_monotone(self, y)
    }

    fn min_slope_on_grid(&self) -> (T, T) {
        let lo = -(self.r + self.r);
        let step = (self.r * T::lit(4.0)) / T::lit((MONOTONE_GRID - 1) as f64);
        (0..MONOTONE_GRID)
            .map(|k| lo + step * T::lit(k as f64))
            .map(|x| (self.deriv(x), x))
            .fold((T::infinity(), T::zero()), |best, cur| if cur.0 < best.0 { cur } else { best })
    }
}

/// Builds the bijection for odd `m`. `kappa` is the smallest of
/// `c, 2c, 4c, ...` that passes the `phi' >= c` check on a 1000-point grid
/// over `[-2r, 2r]` (for `m = 1` and `c <= 1` the identity already qualifies).
pub fn build_phi<T: Real>(m: u32, r: T, c: T) -> Result<SmoothBijection<T>, FuncspaceError> {
    if m == 0 || m.is_multiple_of(2) {
        return Err(FuncspaceError::EvenPower { m });
    }
    if !(r > T::zero()) || !(c > T::zero()) {
        return Err(FuncspaceError::InvalidParameter(format!(
            "r and c must be positive (r = {r}, c = {c})"
        )));
    }
    if m == 1 && c <= T::one() {
        return Ok(SmoothBijection { m, r, c, kappa: T::zero() });
    }
    let mut kappa = c;
    let mut worst = (T::zero(), T::zero());
    for _ in 0..20 {
        let phi = SmoothBijection { m, r, c, kappa };
        worst = phi.min_slope_on_grid();
        if worst.0 >= c {
            return Ok(phi);
        }
        kappa = kappa + kappa;
    }
    Err(FuncspaceError::NotMonotone {
        at: worst.1.to_f64_lossy(),
        slope: worst.0.to_f64_lossy(),
    })
}

/// Solves `phi(x) = y` by bisection; the result satisfies
/// `|phi(x) - y| <= 1e-12 (1 + |y|)`.
///
/// The bracket starts at `±(max(r, |y|^{1/m}) + 1)` and doubles until it
/// contains the root.
pub fn invert_monotone<T: Real>(phi: &SmoothBijection<T>, y: T) -> Result<T, FuncspaceError> {
    if !y.is_finite() {
        return Err(FuncspaceError::NoConvergence { y: y.to_f64_lossy() });
    }
    let radius = phi.r.max(y.abs().powf(T::one() / T::lit(phi.m as f64))) + T::one();
    let (mut lo, mut hi) = (-radius, radius);
    let mut doublings = 0;
    while phi.eval(lo) > y || phi.eval(hi) < y {
        doublings += 1;
        if doublings > MAX_DOUBLINGS {
            return Err(FuncspaceError::NoConvergence { y: y.to_f64_lossy() });
        }
        lo = lo + lo;
        hi = hi + hi;
    }
    // bisect down to adjacent floats, well inside the required tolerance
    loop {
        let mid = lo + (hi - lo) * T::lit(0.5);
        let v = phi.eval(mid);
        if v == y || mid <= lo || mid >= hi {
            return Ok(mid);
        }
        if v < y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}
