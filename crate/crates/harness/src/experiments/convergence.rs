//! `A_n = A + X/n`, `B_n = B + Y/n`: the resolvent-power differences
//! `T_n(a)` converge to `T(a)`, and so does `f(A_n) - f(B_n)`.

use rayon::prelude::*;
use serde_json::Value;

use super::{eventually_decreasing, member_function, n_grid, perturbed_pair, stream, tail_slope};
use crate::config::{p_label, ExperimentConfig};
use crate::report::{num, Check, Report};
use crate::HarnessError;
use doi_lab::linalg::{norm_of_singular_values, resolvent_power_diff, singular_values};
use doi_lab::random::{random_hermitian, rng_for};
use doi_lab::{Hermitian, Operator, Smooth, C64};

const STREAM: u64 = stream(3);
/// Exponents swept when no `--p` is given.
pub const EXPONENTS: [f64; 2] = [1.0, 2.0];
/// Sampled values of `a` in the hypothesis diagnostic.
pub const A_VALUES: [f64; 3] = [1.0, -1.0, 2.0];
/// Relative slack in the pointwise Schatten monotonicity check.
const MONOTONICITY_SLACK: f64 = 1e-12;

/// Errors along the `n` grid, indexed `[p][n]` and `[a][p][n]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceSeries {
    pub ns: Vec<u32>,
    pub ps: Vec<f64>,
    pub errors: Vec<Vec<f64>>,
    pub hypothesis: Vec<Vec<Vec<f64>>>,
}

/// `e_n = ||[f(A_n) - f(B_n)] - [f(A) - f(B)]||_p` and
/// `||T_n(a) - T(a)||_p` for every `n` in `ns`.
#[allow(clippy::too_many_arguments)]
pub fn measure(
    f: &Smooth,
    m: u32,
    a: &Hermitian,
    b: &Hermitian,
    x: &Hermitian,
    y: &Hermitian,
    ns: &[u32],
    ps: &[f64],
) -> Result<ConvergenceSeries, HarnessError> {
    let fd = |s: &Hermitian, t: &Hermitian| -> Result<Operator, HarnessError> {
        Ok(&s.apply_function(|v| f.eval(v))? - &t.apply_function(|v| f.eval(v))?)
    };
    let base = fd(a, b)?;
    let t_base = A_VALUES
        .iter()
        .map(|&s| resolvent_power_diff(a, b, C64::new(0.0, s), m))
        .collect::<Result<Vec<_>, _>>()?;
    type Point = (Vec<f64>, Vec<Vec<f64>>);
    let points: Vec<Result<Point, HarnessError>> = ns
        .par_iter()
        .map(|&n| {
            let h = 1.0 / n as f64;
            let an = a.add_scaled(h, x);
            let bn = b.add_scaled(h, y);
            let sv = singular_values(&(&fd(&an, &bn)? - &base));
            let errors = ps.iter().map(|&p| norm_of_singular_values(&sv, p)).collect();
            let mut hyp = Vec::with_capacity(A_VALUES.len());
            for (&s, t) in A_VALUES.iter().zip(&t_base) {
                let tn = resolvent_power_diff(&an, &bn, C64::new(0.0, s), m)?;
                let sv = singular_values(&(&tn - t));
                hyp.push(ps.iter().map(|&p| norm_of_singular_values(&sv, p)).collect());
            }
            Ok((errors, hyp))
        })
        .collect();
    let points = points.into_iter().collect::<Result<Vec<_>, _>>()?;
    let errors = (0..ps.len()).map(|k| points.iter().map(|(e, _)| e[k]).collect()).collect();
    let hypothesis = (0..A_VALUES.len())
        .map(|ai| (0..ps.len()).map(|k| points.iter().map(|(_, h)| h[ai][k]).collect()).collect())
        .collect();
    Ok(ConvergenceSeries { ns: ns.to_vec(), ps: ps.to_vec(), errors, hypothesis })
}

/// Slope and decrease checks of a series, appended to `report` under
/// `prefix`; returns whether all passed.
pub(crate) fn assess(report: &mut Report, prefix: &str, series: &ConvergenceSeries, slope_bound: f64) -> bool {
    let xs: Vec<f64> = series.ns.iter().map(|&n| n as f64).collect();
    let mut ok = true;
    for (k, &p) in series.ps.iter().enumerate() {
        let e = &series.errors[k];
        let slope = tail_slope(&xs, e).unwrap_or(f64::NAN);
        let label = p_label(p);
        report.set(&format!("{prefix}slope.p{label}"), num(slope));
        let checks = [
            Check::at_most(format!("{prefix}slope.p{label}"), slope, slope_bound),
            Check::holds(format!("{prefix}eventually-decreasing.p{label}"), eventually_decreasing(e)),
        ];
        for c in checks {
            ok &= c.passed;
            report.check(c);
        }
    }
    if let (Some(i1), Some(i2)) = (series.ps.iter().position(|&p| p == 1.0), series.ps.iter().position(|&p| p == 2.0)) {
        let mono = series.errors[i1]
            .iter()
            .zip(&series.errors[i2])
            .all(|(e1, e2)| *e1 >= *e2 * (1.0 - MONOTONICITY_SLACK));
        let c = Check::holds(format!("{prefix}schatten-monotone"), mono);
        ok &= c.passed;
        report.check(c);
    }
    ok
}

pub fn run(cfg: &ExperimentConfig) -> Result<Report, HarnessError> {
    let f = member_function(cfg)?;
    let ps = cfg.exponents(&EXPONENTS);
    let mut rng = rng_for(cfg.seed, STREAM);
    let (a, b) = perturbed_pair(cfg.dim, &mut rng);
    let x: Hermitian = random_hermitian(cfg.dim, &mut rng);
    let y: Hermitian = random_hermitian(cfg.dim, &mut rng);
    let series = measure(&f.func, cfg.m, &a, &b, &x, &y, &n_grid(), &ps)?;

    let mut columns = vec!["n".to_string()];
    for &p in &ps {
        columns.push(format!("e_p{}", p_label(p)));
    }
    for &s in &A_VALUES {
        for &p in &ps {
            columns.push(format!("hyp_a{s}_p{}", p_label(p)));
        }
    }
    let column_refs: Vec<&str> = columns.iter().map(String::as_str).collect();
    let mut report = Report::new(cfg, &column_refs);
    report.note("A_n = A + X/n, B_n = B + Y/n with X, Y fixed random Hermitian");
    report.note("e_n = ||[f(A_n) - f(B_n)] - [f(A) - f(B)]||_p; hyp = ||T_n(a) - T(a)||_p");
    report
        .param("dim", cfg.dim)
        .param("m", cfg.m)
        .param("f", cfg.f_name.as_str())
        .param("a_values", A_VALUES.iter().map(|&v| num(v)).collect::<Vec<_>>());
    for (i, &n) in series.ns.iter().enumerate() {
        let mut row = vec![Value::from(n)];
        row.extend(series.errors.iter().map(|e| num(e[i])));
        for per_a in &series.hypothesis {
            row.extend(per_a.iter().map(|h| num(h[i])));
        }
        report.push_row(row);
    }

    assess(&mut report, "", &series, cfg.tolerance("slope"));
    let mut hypothesis_ok = true;
    for (ai, &s) in A_VALUES.iter().enumerate() {
        for (k, &p) in ps.iter().enumerate() {
            let c = Check::holds(
                format!("hypothesis-decreasing.a{s}.p{}", p_label(p)),
                eventually_decreasing(&series.hypothesis[ai][k]),
            );
            hypothesis_ok &= c.passed;
            report.check(c);
        }
    }
    report.set("hypothesis_violation", !hypothesis_ok);
    Ok(report)
}
