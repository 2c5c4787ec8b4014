use num_complex::Complex;
use rayon::prelude::*;

use super::kernel::Kernel;
use super::regularity::{kernel_regularity_report, RegularityGrid, RegularityReport};
use super::DoiError;
use crate::funcspace::CutoffSplit;
use crate::scalar::{cpowi, cx, re, Real};

/// Relative size of `|r(x) - r(y)|` below which the quotient is degenerate.
pub const DEGENERACY: f64 = 1e-10;
/// Relative distance from the diagonal inside which the quotient is replaced
/// by the ratio of derivatives at the midpoint.
const NEAR_DIAGONAL: f64 = 1e-5;

/// `G_{j,a}(x, y) = (g_j(x) - g_j(y)) / ((x - ia)^{-m} - (y - ia)^{-m})`.
///
/// On the diagonal the value is `g_j'(x) / (-m (x - ia)^{-m-1})`. Off the
/// diagonal, where the denominator vanishes to relative precision, the value
/// is 0 if the numerator is exactly 0 and a degenerate-kernel error
/// otherwise.
pub fn g_kernel<T: Real>(j: usize, split: &CutoffSplit<T>, a: T, m: u32) -> Result<Kernel<T>, DoiError> {
    if j != 1 && j != 2 {
        return Err(DoiError::InvalidParameter(format!("kernel index must be 1 or 2, got {j}")));
    }
    if a == T::zero() || !a.is_finite() {
        return Err(DoiError::InvalidParameter(format!("a = {a} must be finite and nonzero")));
    }
    if m.is_multiple_of(2) {
        return Err(DoiError::InvalidParameter(format!("m = {m} must be odd")));
    }
    let g = split.g(j).clone();
    let gd = g.clone();
    let ia = cx(T::zero(), a);
    let mi = m as i32;
    let mf = T::lit(m as f64);
    let r = move |x: T| cpowi(re(x) - ia, -mi);
    let dr = move |x: T| cpowi(re(x) - ia, -mi - 1) * (-mf);
    let label = format!("G{j}[a={a},m={m}]");
    let kernel = Kernel::fallible(label, move |x: T, y: T| {
        let h = x - y;
        if h.abs() <= T::lit(NEAR_DIAGONAL) * (T::one() + x.abs() + y.abs()) {
            let mid = (x + y) * T::lit(0.5);
            return Ok(g.deriv(mid) / dr(mid));
        }
        let num = g.eval(x) - g.eval(y);
        let (rx, ry) = (r(x), r(y));
        let den = rx - ry;
        if den.norm() <= T::lit(DEGENERACY) * (rx.norm() + ry.norm()) {
            if num == Complex::new(T::zero(), T::zero()) {
                return Ok(num);
            }
            return Err(DoiError::DegenerateKernel {
                lambda: x.to_f64_lossy(),
                mu: y.to_f64_lossy(),
            });
        }
        Ok(num / den)
    })
    .with_diagonal(move |x| gd.deriv(x) / dr(x));
    Ok(kernel)
}

/// Candidate values `±2^k`, `k = -6..=6`, in a fixed order.
pub fn a_candidates<T: Real>() -> Vec<T> {
    (-6..=6)
        .flat_map(|k| {
            let v = T::lit(2f64.powi(k));
            [v, -v]
        })
        .collect()
}

/// Result of [`select_a`].
#[derive(Clone, Debug)]
pub struct ASelection<T: Real> {
    pub a: T,
    pub report: RegularityReport,
    /// Candidates rejected for degeneracy.
    pub rejected: Vec<T>,
}

/// Grid search for the `a` minimizing `C_K + C~_K` of `G_{j,a}` among the
/// candidates without degenerate points on the grid. Ties keep the earlier
/// candidate.
pub fn select_a<T: Real>(j: usize, split: &CutoffSplit<T>, m: u32, grid: &RegularityGrid) -> Result<ASelection<T>, DoiError> {
    let candidates = a_candidates::<T>();
    let scored: Vec<(T, Result<RegularityReport, DoiError>)> = candidates
        .par_iter()
        .map(|&a| {
            let report = g_kernel(j, split, a, m).and_then(|k| kernel_regularity_report(&k, grid));
            (a, report)
        })
        .collect();
    let mut best: Option<(T, RegularityReport)> = None;
    let mut rejected = Vec::new();
    for (a, outcome) in scored {
        match outcome {
            Ok(rep) => {
                let score = rep.c_k + rep.c_tilde;
                if score.is_finite() && best.as_ref().is_none_or(|(_, b)| score < b.c_k + b.c_tilde) {
                    best = Some((a, rep));
                }
            }
            Err(DoiError::DegenerateKernel { .. }) | Err(DoiError::KernelNotFinite { .. }) => rejected.push(a),
            Err(e) => return Err(e),
        }
    }
    let (a, report) = best.ok_or(DoiError::NoAdmissibleA { j })?;
    Ok(ASelection { a, report, rejected })
}
