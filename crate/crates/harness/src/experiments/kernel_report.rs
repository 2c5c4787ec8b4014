//! Regularity constants and the Fourier criterion for `G_{1,a1}`,
//! `G_{2,a2}` and the divided difference of `f`.

use serde_json::Value;

use super::member_function;
use crate::config::ExperimentConfig;
use crate::report::{num, Check, Report};
use crate::HarnessError;
use doi_lab::doi::{
    divided_difference, fourier_criterion, g_kernel, kernel_regularity_report, select_a, FourierWindow, KernelReport,
    RegularityGrid,
};
use doi_lab::funcspace::{build_phi, cutoff_split, DEFAULT_C, DEFAULT_R};
use doi_lab::Kernel;

/// Exponents of the Fourier weight `|s|^m1 + |s|^m2`.
pub const FOURIER_EXPONENTS: (f64, f64) = (0.0, 2.0);

/// `K(x, y) - K(L, y)`: the part of `K` that decays in `x` when the limits
/// at both ends agree.
pub fn decaying_part(k: &Kernel, edge: f64) -> Kernel {
    let inner = k.clone();
    Kernel::fallible(format!("{}-limit", k.label()), move |x: f64, y: f64| {
        Ok(inner.evaluate(x, y)? - inner.evaluate(edge, y)?)
    })
}

/// Regularity and Fourier data of one kernel.
pub fn kernel_data(k: &Kernel, grid: &RegularityGrid, window: &FourierWindow) -> Result<KernelReport, HarnessError> {
    let regularity = kernel_regularity_report(k, grid)?;
    let h = decaying_part(k, grid.lambda_half_width);
    let fourier = fourier_criterion(&h, FOURIER_EXPONENTS.0, FOURIER_EXPONENTS.1, &grid.mus::<f64>(), window)?;
    Ok(KernelReport::new(k.label(), &regularity, Some(&fourier), grid))
}

pub fn run(cfg: &ExperimentConfig) -> Result<Report, HarnessError> {
    let f = member_function(cfg)?;
    let phi = build_phi(cfg.m, DEFAULT_R, DEFAULT_C)?;
    let split = cutoff_split(&phi);
    let grid = RegularityGrid::default();
    let window = FourierWindow::default();

    let mut report = Report::new(
        cfg,
        &["kernel", "a", "C_K", "C_tilde", "limit_gap", "C0", "fourier_truncated"],
    );
    report.note("C0 is computed for K(x, y) - K(L, y); it is reported, not asserted");
    report
        .param("m", cfg.m)
        .param("f", cfg.f_name.as_str())
        .param("grid", serde_json::to_value(&grid).unwrap_or(Value::Null))
        .param("fourier_window", serde_json::to_value(&window).unwrap_or(Value::Null));

    let mut kernels: Vec<(Kernel, Option<f64>)> = Vec::new();
    for j in [1usize, 2] {
        let sel = select_a(j, &split, cfg.m, &grid)?;
        report.set(&format!("G{j}.rejected_a"), sel.rejected.iter().map(|&a| num(a)).collect::<Vec<_>>());
        kernels.push((g_kernel(j, &split, sel.a, cfg.m)?, Some(sel.a)));
    }
    kernels.push((divided_difference(&f.func), None));

    let mut all = Vec::new();
    for (idx, (k, a)) in kernels.iter().enumerate() {
        let data = kernel_data(k, &grid, &window)?;
        report.push_row(vec![
            Value::from(data.kernel_label.as_str()),
            a.map_or(Value::Null, num),
            num(data.c_k),
            num(data.c_tilde),
            num(data.limit_gap),
            data.c0.map_or(Value::Null, num),
            data.fourier_truncated.map_or(Value::Null, Value::from),
        ]);
        if idx < 2 {
            let name = format!("G{}", idx + 1);
            report.check(Check::holds(format!("{name}.finite"), data.c_k.is_finite() && data.c_tilde.is_finite()));
            report.check(Check::at_most(format!("{name}.limit-gap"), data.limit_gap, cfg.tolerance("limit-gap")));
        }
        all.push(serde_json::to_value(&data).unwrap_or(Value::Null));
    }
    report.set("kernels", Value::Array(all));
    Ok(report)
}
