//! Weighted `L^1` distance of spectral shift functions along the segment
//! `B_tau = B0 + tau (B1 - B0)` as `tau -> 0`.

use serde_json::Value;

use super::{perturbed_pair, stream};
use crate::config::ExperimentConfig;
use crate::report::{num, Check, Report};
use crate::HarnessError;
use doi_lab::random::{random_hermitian, rng_for};
use doi_lab::ssf::{default_tau_grid, default_z_list, path_continuity_report, PathReport};
use doi_lab::{Hermitian, C64};

const STREAM: u64 = stream(4);

/// The path report for a freshly drawn `(A0, B0, B1)`.
pub fn path_report(cfg: &ExperimentConfig) -> Result<PathReport, HarnessError> {
    let mut rng = rng_for(cfg.seed, STREAM);
    let a0: Hermitian = random_hermitian(cfg.dim, &mut rng);
    let (b0, b1) = perturbed_pair(cfg.dim, &mut rng);
    let z_list: Vec<C64> = default_z_list();
    Ok(path_continuity_report(&a0, &b0, &b1, cfg.m, &default_tau_grid(), None, &z_list)?)
}

pub fn run(cfg: &ExperimentConfig) -> Result<Report, HarnessError> {
    let path = path_report(cfg)?;
    let mut columns = vec!["tau".to_string()];
    for &(re, im) in &path.z_list {
        columns.push(format!("d_m_z[{re}{im:+}i]"));
    }
    columns.push("weighted_distance".into());
    columns.push("functional_difference".into());
    let column_refs: Vec<&str> = columns.iter().map(String::as_str).collect();

    let mut report = Report::new(cfg, &column_refs);
    report.note("B_tau = B0 + tau (B1 - B0), B1 - B0 of low rank");
    report.note("weighted_distance = int |xi(.; B_tau, A0) - xi(.; B0, A0)| / (|x|^{m+1} + 1) dx");
    report.param("dim", cfg.dim).param("m", cfg.m).param("perturbation_rank", super::PERTURBATION_RANK);
    for row in &path.rows {
        let mut cells = vec![num(row.tau)];
        cells.extend(row.pseudometrics.iter().map(|&d| num(d)));
        cells.push(num(row.weighted_distance));
        cells.push(num(row.functional_difference));
        report.push_row(cells);
    }

    let smallest = path.rows.iter().find(|r| r.tau > 0.0).map_or(f64::NAN, |r| r.weighted_distance);
    let at_one = path.rows.iter().find(|r| r.tau == 1.0).map_or(f64::NAN, |r| r.weighted_distance);
    let ratio = smallest / at_one;
    let slope = path.summary.slope.unwrap_or(f64::NAN);
    let zero_row = path.rows.iter().find(|r| r.tau == 0.0);
    let zero_at_origin = zero_row.is_some_and(|r| r.weighted_distance == 0.0 && r.pseudometrics.iter().all(|&d| d == 0.0));
    report
        .set("slope", num(slope))
        .set("distance_ratio", num(ratio))
        .set("monotone", path.summary.monotone)
        .set("max_distance", num(path.summary.max_distance))
        .set("summary", serde_json::to_value(&path.summary).unwrap_or(Value::Null));
    report.check(Check::at_most("smallest-tau-ratio", ratio, cfg.tolerance("ratio")));
    report.check(Check::at_least("slope", slope, cfg.tolerance("slope")));
    report.check(Check::holds("functional-bounded", path.summary.functional_bounded));
    report.check(Check::holds("zero-at-origin", zero_at_origin));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_run_passes() {
        let cfg = ExperimentConfig::new(crate::Experiment::SsfContinuity).with_seed(2);
        let r = run(&cfg).unwrap();
        assert!(r.passed, "{:?}", r.failed_checks());
        assert_eq!(r.rows.len(), default_tau_grid().len());
    }
}
