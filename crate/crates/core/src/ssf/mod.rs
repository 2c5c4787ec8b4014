//! Spectral shift functions of matrix pairs, the trace formula, weighted
//! `L^1` distances and the resolvent-power pseudometrics.

mod metric;
mod quad;
mod step;

use thiserror::Error;

use crate::funcspace::FuncspaceError;
use crate::linalg::LinalgError;

pub use metric::{
    default_tau_grid, default_z_list, loglog_slope, path_continuity_report, pseudometric, signed_weighted_integral,
    spectral_weight, weight_comparison_check, weighted_l1_distance, PathReport, PathRow, PathSummary,
    PseudometricSample, WeightComparison, INTERVAL_TOLERANCE, SLOPE_POINTS,
};
pub use quad::{gauss_legendre, integrate, integrate_to_infinity};
pub use step::{counting_function, krein_check, krein_residual, xi, xi_change_of_variables, KreinCheck, StepFunction};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SsfError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("pseudometric needs a non-real point, got {re}")]
    RealPoint { re: f64 },
    #[error("invalid step function: {0}")]
    InvalidStep(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("change of variables broken at {at}: {original} vs {mapped}")]
    ChangeOfVariables { at: f64, original: i64, mapped: i64 },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Funcspace(#[from] FuncspaceError),
}
