use std::fmt::Write as _;

use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;

use super::quad::integrate;
use super::step::{xi, StepFunction};
use super::SsfError;
use crate::funcspace::SmoothBijection;
use crate::linalg::{resolvent_power_diff, trace_norm, HermitianOperator};
use crate::scalar::Real;

/// Absolute quadrature tolerance per constancy interval.
pub const INTERVAL_TOLERANCE: f64 = 1e-10;

/// `(|x|^{m+1} + 1)^{-1}`.
pub fn spectral_weight<T: Real>(x: T, m: u32) -> T {
    (x.abs().powi(m as i32 + 1) + T::one()).recip()
}

/// `int |s1 - s2| |f| (|x|^{m+1} + 1)^{-1} dx`, interval by interval over
/// the constancy intervals of `s1 - s2`; `f = None` means `f = 1`.
pub fn weighted_l1_distance<T: Real>(
    s1: &StepFunction<T>,
    s2: &StepFunction<T>,
    m: u32,
    f: Option<&(dyn Fn(T) -> T + Sync)>,
) -> T {
    signed_weighted_integral(&s1.sub(s2), m, f, true)
}

/// `int s g (|x|^{m+1} + 1)^{-1} dx` (or of `|s|` when `absolute`).
pub fn signed_weighted_integral<T: Real>(
    s: &StepFunction<T>,
    m: u32,
    f: Option<&(dyn Fn(T) -> T + Sync)>,
    absolute: bool,
) -> T {
    let tol = T::lit(INTERVAL_TOLERANCE);
    let mut total = T::zero();
    for (lo, hi, level) in s.intervals() {
        if level == 0 {
            continue;
        }
        assert!(lo.is_finite() && hi.is_finite(), "step function without compact support");
        let integrand = |x: T| {
            let w = spectral_weight(x, m);
            match f {
                Some(g) if absolute => g(x).abs() * w,
                Some(g) => g(x) * w,
                None => w,
            }
        };
        let lvl = T::lit(level as f64);
        total += integrate(&integrand, lo, hi, tol) * if absolute { lvl.abs() } else { lvl };
    }
    total
}

/// One value of `d_{m,z}(S1, S2) = ||(S2 - z)^{-m} - (S1 - z)^{-m}||_1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PseudometricSample {
    pub z_re: f64,
    pub z_im: f64,
    pub m: u32,
    pub value: f64,
}

pub fn pseudometric<T: Real>(
    s1: &HermitianOperator<T>,
    s2: &HermitianOperator<T>,
    m: u32,
    z: Complex<T>,
) -> Result<PseudometricSample, SsfError> {
    if z.im == T::zero() {
        return Err(SsfError::RealPoint { re: z.re.to_f64_lossy() });
    }
    let d = resolvent_power_diff(s2, s1, z, m)?;
    Ok(PseudometricSample {
        z_re: z.re.to_f64_lossy(),
        z_im: z.im.to_f64_lossy(),
        m,
        value: trace_norm(&d).to_f64_lossy(),
    })
}

/// Default sample of spectral points for the pseudometric family.
pub fn default_z_list<T: Real>() -> Vec<Complex<T>> {
    [(0.0, 1.0), (0.0, 2.0), (0.0, -3.0), (1.0, 1.0)]
        .iter()
        .map(|&(a, b)| Complex::new(T::lit(a), T::lit(b)))
        .collect()
}

/// `{0} ∪ {2^{-k} : k = 0..=10}`, ascending.
pub fn default_tau_grid() -> Vec<f64> {
    let mut taus: Vec<f64> = (0..=10).map(|k| 2f64.powi(-k)).collect();
    taus.push(0.0);
    taus.reverse();
    taus
}

/// Number of smallest positive `tau` used for the slope fit.
pub const SLOPE_POINTS: usize = 6;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PathRow {
    pub tau: f64,
    /// `d_{m,z}(B_tau, B_0)`, one per point of the z-list.
    pub pseudometrics: Vec<f64>,
    pub weighted_distance: f64,
    /// `|int xi_tau g - int xi_0 g|` with `g = (|x|^{m+1} + 1)^{-1}`.
    pub functional_difference: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PathSummary {
    /// Least-squares log-log slope of the weighted distance against `tau`.
    pub slope: Option<f64>,
    /// Weighted distance non-increasing as `tau` decreases.
    pub monotone: bool,
    pub max_distance: f64,
    /// Every functional difference is at most the weighted distance.
    pub functional_bounded: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PathReport {
    pub m: u32,
    pub z_list: Vec<(f64, f64)>,
    pub rows: Vec<PathRow>,
    pub summary: PathSummary,
}

impl PathReport {
    /// CSV with columns `tau, d_m_z[k]..., weighted_distance`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("tau");
        for k in 0..self.z_list.len() {
            let _ = write!(out, ",d_m_z[{k}]");
        }
        out.push_str(",weighted_distance\n");
        for row in &self.rows {
            let _ = write!(out, "{:.16e}", row.tau);
            for d in &row.pseudometrics {
                let _ = write!(out, ",{d:.16e}");
            }
            let _ = writeln!(out, ",{:.16e}", row.weighted_distance);
        }
        out
    }

    /// `{slope, monotone, max_distance, ...}`.
    pub fn summary_json(&self) -> String {
        serde_json::to_string_pretty(&self.summary).expect("summary serializes")
    }
}

/// Least-squares slope of `log y` against `log x`; `None` if any value is
/// not positive or fewer than two points are given.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() < 2 || xs.len() != ys.len() || xs.iter().chain(ys).any(|&v| !(v > 0.0)) {
        return None;
    }
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Distances along `B_tau = B0 + tau (B1 - B0)` from `tau = 0`.
pub fn path_continuity_report<T: Real>(
    a0: &HermitianOperator<T>,
    b0: &HermitianOperator<T>,
    b1: &HermitianOperator<T>,
    m: u32,
    taus: &[f64],
    f: Option<&(dyn Fn(T) -> T + Sync)>,
    z_list: &[Complex<T>],
) -> Result<PathReport, SsfError> {
    if taus.iter().any(|t| !(0.0..=1.0).contains(t)) || !taus.contains(&0.0) {
        return Err(SsfError::InvalidGrid("tau grid must lie in [0, 1] and contain 0".into()));
    }
    let xi0 = xi(a0, b0)?;
    let base = signed_weighted_integral(&xi0, m, None, false).to_f64_lossy();
    let diff = b1.add_scaled(-T::one(), b0);
    let rows: Vec<Result<PathRow, SsfError>> = taus
        .par_iter()
        .map(|&tau| {
            let bt = b0.add_scaled(T::lit(tau), &diff);
            let pseudometrics = z_list
                .iter()
                .map(|&z| pseudometric(&bt, b0, m, z).map(|s| s.value))
                .collect::<Result<Vec<_>, _>>()?;
            let xit = xi(a0, &bt)?;
            let weighted_distance = weighted_l1_distance(&xit, &xi0, m, f).to_f64_lossy();
            let functional = signed_weighted_integral(&xit, m, None, false).to_f64_lossy();
            Ok(PathRow { tau, pseudometrics, weighted_distance, functional_difference: (functional - base).abs() })
        })
        .collect();
    let mut rows = rows.into_iter().collect::<Result<Vec<_>, _>>()?;
    rows.sort_by(|a, b| a.tau.total_cmp(&b.tau));

    let positive: Vec<&PathRow> = rows.iter().filter(|r| r.tau > 0.0).take(SLOPE_POINTS).collect();
    let slope = loglog_slope(
        &positive.iter().map(|r| r.tau).collect::<Vec<_>>(),
        &positive.iter().map(|r| r.weighted_distance).collect::<Vec<_>>(),
    );
    let monotone = rows.windows(2).all(|w| w[0].weighted_distance <= w[1].weighted_distance);
    let max_distance = rows.iter().map(|r| r.weighted_distance).fold(0.0, f64::max);
    // the functional bound needs f = 1 in the distance; otherwise it is not asserted
    let functional_bounded = f.is_some()
        || rows
            .iter()
            .all(|r| r.functional_difference <= r.weighted_distance * (1.0 + 1e-9) + 1e-14);
    Ok(PathReport {
        m,
        z_list: z_list.iter().map(|z| (z.re.to_f64_lossy(), z.im.to_f64_lossy())).collect(),
        rows,
        summary: PathSummary { slope, monotone, max_distance, functional_bounded },
    })
}

/// Both sides of `1/((|phi^{-1}(y)|^{m+1} + 1) phi'(phi^{-1}(y))) <= C/(y^2 + 1)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeightComparison {
    /// `max LHS/RHS` over `[-1, 1]`.
    pub inner_constant: f64,
    /// Points with `|y| > 1` where `LHS > RHS` beyond rounding.
    pub violations: Vec<f64>,
    /// `max LHS/RHS` over the sampled `|y| > 1`.
    pub outer_max_ratio: f64,
    pub points: usize,
}

/// Samples `[-1, 1]` linearly and `1 < |y| <= 1e6` logarithmically.
pub fn weight_comparison_check<T: Real>(phi: &SmoothBijection<T>, m: u32) -> Result<WeightComparison, SsfError> {
    let lhs = |y: f64| -> Result<f64, SsfError> {
        let x = phi.inverse(T::lit(y))?;
        let v = (x.abs().powi(m as i32 + 1) + T::one()) * phi.deriv(x);
        Ok(v.recip().to_f64_lossy())
    };
    let rhs = |y: f64| 1.0 / (y * y + 1.0);
    let inner_n = 2001;
    let mut inner_constant = 0.0f64;
    for k in 0..inner_n {
        let y = -1.0 + 2.0 * k as f64 / (inner_n - 1) as f64;
        inner_constant = inner_constant.max(lhs(y)? / rhs(y));
    }
    let outer_n = 3000;
    let mut violations = Vec::new();
    let mut outer_max_ratio = 0.0f64;
    for k in 1..=outer_n {
        let mag = 10f64.powf(6.0 * k as f64 / outer_n as f64);
        for y in [mag, -mag] {
            let ratio = lhs(y)? / rhs(y);
            outer_max_ratio = outer_max_ratio.max(ratio);
            if ratio > 1.0 + 1e-12 {
                violations.push(y);
            }
        }
    }
    Ok(WeightComparison { inner_constant, violations, outer_max_ratio, points: inner_n + 2 * outer_n })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspace::build_phi;
    use crate::random::{random_hermitian, random_low_rank_hermitian, rng_for};

    #[test]
    fn indicator_distance_is_a_quarter_pi() {
        let one = StepFunction::indicator(0.0f64, 1.0, 1).unwrap();
        let d = weighted_l1_distance(&one, &StepFunction::zero(), 1, None);
        assert!((d - std::f64::consts::FRAC_PI_4).abs() <= 1e-9);
        assert_eq!(weighted_l1_distance(&one, &one, 1, None), 0.0);
        let two = |_: f64| 2.0;
        let d2 = weighted_l1_distance(&one, &StepFunction::zero(), 1, Some(&two));
        assert!((d2 - 2.0 * d).abs() <= 1e-12 * d);
    }

    #[test]
    fn counterexample_pseudometric() {
        let s3 = 3f64.sqrt();
        let a = HermitianOperator::from_real_diagonal(&[s3, s3]);
        let b = HermitianOperator::from_real_diagonal(&[s3, -s3]);
        assert!(pseudometric(&a, &b, 3, Complex::new(0.0, 1.0)).unwrap().value < 1e-15);
        let v = pseudometric(&a, &b, 3, Complex::new(0.0, -3.0)).unwrap().value;
        assert!((v - 1.0 / (12.0 * s3)).abs() < 1e-14);
        assert!(matches!(pseudometric(&a, &b, 3, Complex::new(1.0, 0.0)), Err(SsfError::RealPoint { .. })));
    }

    #[test]
    fn pseudometric_axioms() {
        for seed in 0..20 {
            let mut rng = rng_for(seed, 21);
            let s: Vec<HermitianOperator<f64>> = (0..3).map(|_| random_hermitian(5, &mut rng)).collect();
            for z in default_z_list::<f64>() {
                let d = |i: usize, j: usize| pseudometric(&s[i], &s[j], 3, z).unwrap().value;
                assert_eq!(d(0, 0), 0.0);
                assert!((d(0, 1) - d(1, 0)).abs() <= 1e-12 * (1.0 + d(0, 1)));
                assert!(d(0, 2) <= d(0, 1) + d(1, 2) + 1e-12);
            }
        }
    }

    #[test]
    fn path_report_shapes() {
        let mut rng = rng_for(4, 22);
        let a0 = random_hermitian::<f64, _>(10, &mut rng);
        let b0 = random_hermitian::<f64, _>(10, &mut rng);
        let b1 = b0.add_scaled(1.0, &random_low_rank_hermitian(10, 1, 1.0, &mut rng));
        let rep = path_continuity_report(&a0, &b0, &b1, 3, &default_tau_grid(), None, &default_z_list()).unwrap();
        assert_eq!(rep.rows.len(), 12);
        assert_eq!(rep.rows[0].weighted_distance, 0.0);
        assert!(rep.summary.slope.unwrap() >= 0.9, "{:?}", rep.summary);
        assert!(rep.summary.functional_bounded);
        assert_eq!(rep.to_csv().lines().count(), 13);
        let still = path_continuity_report(&a0, &b0, &b0, 3, &default_tau_grid(), None, &default_z_list()).unwrap();
        assert!(still.rows.iter().all(|r| r.weighted_distance == 0.0 && r.pseudometrics.iter().all(|&d| d == 0.0)));
    }

    #[test]
    fn weight_bound_holds() {
        for m in [1u32, 3, 5] {
            let phi = build_phi(m, 1.0f64, 0.1).unwrap();
            let w = weight_comparison_check(&phi, m).unwrap();
            assert!(w.violations.is_empty(), "m={m}: {:?}", &w.violations[..w.violations.len().min(5)]);
            assert!(w.inner_constant.is_finite());
        }
    }

    #[test]
    fn slope_fit() {
        let xs = [1.0, 2.0, 4.0, 8.0];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powf(1.5)).collect();
        assert!((loglog_slope(&xs, &ys).unwrap() - 1.5).abs() < 1e-12);
        assert_eq!(loglog_slope(&xs, &[0.0, 1.0, 1.0, 1.0]), None);
    }
}
