//! Two orthogonal projections `P1 + P2 = I` with `A = sqrt3 (P1 + P2)` and
//! `B = sqrt3 (P1 - P2)`: the cubed resolvent differences vanish at `z = i`
//! but not at `z = -3i`, where they equal `-P2 / (12 sqrt3)`.

use serde_json::Value;

use super::stream;
use crate::config::ExperimentConfig;
use crate::report::{num, Check, Report};
use crate::HarnessError;
use doi_lab::linalg::{resolvent_power_diff, trace_norm};
use doi_lab::random::{random_unitary, rng_for};
use doi_lab::{Hermitian, Operator, C64};

const STREAM: u64 = stream(1);

/// Trace norms measured for one realization of the pair.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CounterexampleNorms {
    /// `||(A - i)^{-3} - (B - i)^{-3}||_1`.
    pub first: f64,
    /// `||(A + 3i)^{-3} - (B + 3i)^{-3}||_1`.
    pub second: f64,
    /// `||(A + 3i)^{-3} - (B + 3i)^{-3} + P2 / (12 sqrt3)||_1`.
    pub residual: f64,
}

/// `1 / (12 sqrt3)`, the trace norm per unit of rank of `P2`.
pub fn coefficient() -> f64 {
    1.0 / (12.0 * 3f64.sqrt())
}

/// Norms for the pair built from `P1 = diag(1, .., 1, 0, .., 0)`, optionally
/// conjugated by `u`.
pub fn measure(dim_half: usize, u: Option<&Operator>) -> Result<CounterexampleNorms, HarnessError> {
    let n = 2 * dim_half;
    let s3 = 3f64.sqrt();
    let p2_diag: Vec<C64> = (0..n).map(|i| C64::new(if i < dim_half { 0.0 } else { 1.0 }, 0.0)).collect();
    let b_diag: Vec<f64> = (0..n).map(|i| if i < dim_half { s3 } else { -s3 }).collect();
    let mut a = Hermitian::from_real_diagonal(&vec![s3; n]);
    let mut b = Hermitian::from_real_diagonal(&b_diag);
    let mut p2 = Operator::diagonal(&p2_diag);
    if let Some(u) = u {
        a = a.conjugate_by(u)?;
        b = b.conjugate_by(u)?;
        p2 = &(u * &p2) * &u.adjoint();
    }
    let first = trace_norm(&resolvent_power_diff(&a, &b, C64::new(0.0, 1.0), 3)?);
    let d = resolvent_power_diff(&a, &b, C64::new(0.0, -3.0), 3)?;
    let second = trace_norm(&d);
    let residual = trace_norm(&(&d + &p2.scale(C64::new(coefficient(), 0.0))));
    Ok(CounterexampleNorms { first, second, residual })
}

pub fn run(cfg: &ExperimentConfig) -> Result<Report, HarnessError> {
    let h = cfg.dim_half;
    let mut rng = rng_for(cfg.seed, STREAM);
    let u: Operator = random_unitary(2 * h, &mut rng);
    let plain = measure(h, None)?;
    let rotated = measure(h, Some(&u))?;
    let expected = h as f64 * coefficient();

    let mut report = Report::new(cfg, &["variant", "dim_half", "first_norm", "second_norm", "second_residual", "expected_second"]);
    report.note("A = sqrt3 (P1 + P2), B = sqrt3 (P1 - P2), rank P1 = rank P2 = dim_half");
    report.param("dim_half", h).param("m", 3);
    for (name, v) in [("diagonal", plain), ("conjugated", rotated)] {
        report.push_row(vec![
            Value::from(name),
            Value::from(h),
            num(v.first),
            num(v.second),
            num(v.residual),
            num(expected),
        ]);
    }
    report
        .set("first_norm", num(plain.first))
        .set("second_norm", num(plain.second))
        .set("expected_second", num(expected));

    let tol_first = cfg.tolerance("first");
    let tol_second = cfg.tolerance("second") * h as f64;
    let tol_inv = cfg.tolerance("invariance") * h as f64;
    for (name, v) in [("diagonal", plain), ("conjugated", rotated)] {
        report.check(Check::at_most(format!("{name}.first"), v.first, tol_first));
        report.check(Check::at_most(format!("{name}.residual"), v.residual, tol_second));
        report.check(Check::at_most(format!("{name}.second-vs-expected"), (v.second - expected).abs(), tol_second));
    }
    report.check(Check::at_most("unitary-invariance", (plain.second - rotated.second).abs(), tol_inv));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_values() {
        let v = measure(1, None).unwrap();
        assert!(v.first <= 1e-15);
        assert!((v.second - 0.048_112_522_432_468_8).abs() < 1e-15);
        let v8 = measure(8, None).unwrap();
        assert!((v8.second - 8.0 * coefficient()).abs() < 1e-13);
    }

    #[test]
    fn run_passes() {
        let cfg = ExperimentConfig::new(crate::Experiment::Counterexample).with_dim_half(3).with_seed(5);
        let r = run(&cfg).unwrap();
        assert!(r.passed, "{:?}", r.failed_checks());
        assert_eq!(r.rows.len(), 2);
    }
}
