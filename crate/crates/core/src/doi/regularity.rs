use num_traits::Float;
use rayon::prelude::*;
use rustfft::{FftNum, FftPlanner};
use serde::Serialize;

use super::kernel::Kernel;
use super::DoiError;
use crate::scalar::Real;

/// Sampling rectangle for [`kernel_regularity_report`].
///
/// The `x` window is wider than the `y` window so that `limit_gap`, taken at
/// `x = ±lambda_half_width`, probes the limits at infinity for each sampled
/// `y` rather than the behaviour near the corner `x = y = L`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegularityGrid {
    pub lambda_half_width: f64,
    pub lambda_points: usize,
    pub mu_half_width: f64,
    pub mu_points: usize,
    /// Step of the centered difference in `x`.
    pub diff_step: f64,
}

impl Default for RegularityGrid {
    fn default() -> Self {
        Self {
            lambda_half_width: 100.0,
            lambda_points: 801,
            mu_half_width: 10.0,
            mu_points: 401,
            diff_step: 1e-5,
        }
    }
}

impl RegularityGrid {
    pub fn validate(&self) -> Result<(), DoiError> {
        let ok = self.lambda_half_width >= 10.0
            && self.mu_half_width >= 10.0
            && self.lambda_points >= 400
            && self.mu_points >= 400
            && self.diff_step > 0.0;
        if ok {
            Ok(())
        } else {
            Err(DoiError::InvalidGrid(format!(
                "need half widths >= 10 and >= 400 points, got {self:?}"
            )))
        }
    }

    pub fn lambdas<T: Real>(&self) -> Vec<T> {
        linspace(self.lambda_half_width, self.lambda_points)
    }

    pub fn mus<T: Real>(&self) -> Vec<T> {
        linspace(self.mu_half_width, self.mu_points)
    }
}

/// `n` equispaced points over `[-half, half]`, endpoints included.
pub fn linspace<T: Real>(half: f64, n: usize) -> Vec<T> {
    (0..n)
        .map(|k| T::lit(-half + 2.0 * half * k as f64 / (n - 1) as f64))
        .collect()
}

/// Sampled regularity constants of a kernel.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegularityReport {
    #[serde(rename = "C_K")]
    pub c_k: f64,
    #[serde(rename = "C_tilde")]
    pub c_tilde: f64,
    pub limit_gap: f64,
}

/// `C_K = max |K|`, `C~_K = max |dK/dx| (1 + x^2)` (centered difference) and
/// `limit_gap = max_y |K(L, y) - K(-L, y)|` over the grid.
pub fn kernel_regularity_report<T: Real>(k: &Kernel<T>, grid: &RegularityGrid) -> Result<RegularityReport, DoiError> {
    grid.validate()?;
    let lambdas = grid.lambdas::<T>();
    let mus = grid.mus::<T>();
    let h = T::lit(grid.diff_step);
    let big_l = T::lit(grid.lambda_half_width);
    let rows: Vec<Result<(f64, f64, f64), DoiError>> = mus
        .par_iter()
        .map(|&y| {
            let mut c_k = T::zero();
            let mut c_tilde = T::zero();
            for &x in &lambdas {
                let v = k.evaluate(x, y)?;
                let dv = (k.evaluate(x + h, y)? - k.evaluate(x - h, y)?) / (h + h);
                c_k = c_k.max(v.norm());
                c_tilde = c_tilde.max(dv.norm() * (T::one() + x * x));
            }
            let gap = (k.evaluate(big_l, y)? - k.evaluate(-big_l, y)?).norm();
            Ok((c_k.to_f64_lossy(), c_tilde.to_f64_lossy(), gap.to_f64_lossy()))
        })
        .collect();
    let mut report = RegularityReport { c_k: 0.0, c_tilde: 0.0, limit_gap: 0.0 };
    for row in rows {
        let (a, b, c) = row?;
        report.c_k = report.c_k.max(a);
        report.c_tilde = report.c_tilde.max(b);
        report.limit_gap = report.limit_gap.max(c);
    }
    Ok(report)
}

/// Sampling window for [`fourier_criterion`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FourierWindow {
    pub half_width: f64,
    pub samples: usize,
}

impl Default for FourierWindow {
    fn default() -> Self {
        Self { half_width: 32.0, samples: 4096 }
    }
}

/// Output of [`fourier_criterion`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FourierReport {
    /// Square root of `c0_squared`.
    pub c0: f64,
    /// `max_y int (|s|^m1 + |s|^m2) |K^(s, y)|^2 ds`.
    pub c0_squared: f64,
    pub worst_mu: f64,
    /// Some `K(., y)` is not negligible at the window edge.
    pub truncated: bool,
}

/// Partial Fourier transform in the first variable,
/// `K^(s, y) = (2 pi)^{-1} int K(x, y) e^{-isx} dx`, by FFT over the window,
/// and the weighted `L^2` integral by the trapezoid rule.
pub fn fourier_criterion<T: Real + FftNum>(
    k: &Kernel<T>,
    m1: f64,
    m2: f64,
    mus: &[T],
    window: &FourierWindow,
) -> Result<FourierReport, DoiError> {
    if !(0.0..1.0).contains(&m1) || !(m2 > 1.0) {
        return Err(DoiError::InvalidParameter(format!("need 0 <= m1 < 1 < m2, got ({m1}, {m2})")));
    }
    let n = window.samples;
    if n < 16 || !(window.half_width > 0.0) {
        return Err(DoiError::InvalidGrid(format!("bad Fourier window {window:?}")));
    }
    let fft = FftPlanner::<T>::new().plan_fft_forward(n);
    let step = 2.0 * window.half_width / n as f64;
    let dxi = 2.0 * std::f64::consts::PI / (n as f64 * step);
    let norm = step / (2.0 * std::f64::consts::PI);
    let weights: Vec<f64> = (0..n)
        .map(|j| {
            let idx = if j <= n / 2 { j as f64 } else { j as f64 - n as f64 };
            let xi = (idx * dxi).abs();
            xi.powf(m1) + xi.powf(m2)
        })
        .collect();

    let rows: Vec<Result<(f64, f64, bool), DoiError>> = mus
        .par_iter()
        .map(|&y| {
            let mut buf = Vec::with_capacity(n);
            for i in 0..n {
                let x = T::lit(-window.half_width + step * i as f64);
                buf.push(k.evaluate(x, y)?);
            }
            let peak = buf.iter().map(|z| z.norm()).fold(T::zero(), |a, b| Float::max(a, b));
            let edge = Float::max(buf[0].norm(), buf[n - 1].norm());
            let truncated = edge > T::lit(1e-6) * peak;
            fft.process(&mut buf);
            // periodic trapezoid rule over the frequency grid
            let integral: f64 = buf
                .iter()
                .zip(&weights)
                .map(|(z, w)| w * (z.norm_sqr().to_f64_lossy() * norm * norm))
                .sum::<f64>()
                * dxi;
            Ok((y.to_f64_lossy(), integral, truncated))
        })
        .collect();

    let mut out = FourierReport { c0: 0.0, c0_squared: 0.0, worst_mu: f64::NAN, truncated: false };
    for row in rows {
        let (y, v, trunc) = row?;
        out.truncated |= trunc;
        if !(v <= out.c0_squared) {
            out.c0_squared = v;
            out.worst_mu = y;
        }
    }
    out.c0 = out.c0_squared.sqrt();
    Ok(out)
}

/// Every quantity the harness prints about a kernel.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KernelReport {
    pub kernel_label: String,
    #[serde(rename = "C_K")]
    pub c_k: f64,
    #[serde(rename = "C_tilde")]
    pub c_tilde: f64,
    pub limit_gap: f64,
    #[serde(rename = "C0")]
    pub c0: Option<f64>,
    pub fourier_truncated: Option<bool>,
    pub grid: RegularityGrid,
}

impl KernelReport {
    pub fn new(label: &str, regularity: &RegularityReport, fourier: Option<&FourierReport>, grid: &RegularityGrid) -> Self {
        Self {
            kernel_label: label.to_string(),
            c_k: regularity.c_k,
            c_tilde: regularity.c_tilde,
            limit_gap: regularity.limit_gap,
            c0: fourier.map(|f| f.c0),
            fourier_truncated: fourier.map(|f| f.truncated),
            grid: grid.clone(),
        }
    }

    /// One `key=value` per line.
    pub fn to_text(&self) -> String {
        let opt = |v: Option<String>| v.unwrap_or_else(|| "none".to_string());
        let g = &self.grid;
        format!(
            "kernel_label={}\nC_K={:e}\nC_tilde={:e}\nlimit_gap={:e}\nC0={}\nfourier_truncated={}\n\
             grid.lambda_half_width={}\ngrid.lambda_points={}\ngrid.mu_half_width={}\ngrid.mu_points={}\ngrid.diff_step={:e}\n",
            self.kernel_label,
            self.c_k,
            self.c_tilde,
            self.limit_gap,
            opt(self.c0.map(|v| format!("{v:e}"))),
            opt(self.fourier_truncated.map(|v| v.to_string())),
            g.lambda_half_width,
            g.lambda_points,
            g.mu_half_width,
            g.mu_points,
            g.diff_step,
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
