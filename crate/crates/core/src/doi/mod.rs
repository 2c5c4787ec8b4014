//! Double operator integrals of Hermitian matrices: kernels, the Schur
//! multiplier evaluator, the `G`-kernels of the resolvent-power estimates,
//! and sampled regularity diagnostics.

mod apply;
mod gkernel;
mod kernel;
mod regularity;
mod separable;

use thiserror::Error;

use crate::linalg::LinalgError;

pub use apply::{doi_apply, kernel_matrix};
pub use gkernel::{a_candidates, g_kernel, select_a, ASelection, DEGENERACY};
pub use kernel::{coincident, divided_difference, DiagonalFn, Kernel, KernelFn, COINCIDENCE};
pub use regularity::{
    fourier_criterion, kernel_regularity_report, linspace, FourierReport, FourierWindow, KernelReport,
    RegularityGrid, RegularityReport,
};
pub use separable::{
    separable_bound, strong_membership_diagnostic, Factor, SeparableBound, SeparableNode, SeparableRepresentation,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DoiError {
    #[error("kernel value not finite at ({lambda}, {mu})")]
    KernelNotFinite { lambda: f64, mu: f64 },
    #[error("degenerate kernel: denominator vanishes at ({lambda}, {mu}) off the diagonal")]
    DegenerateKernel { lambda: f64, mu: f64 },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("no admissible a for G{j}")]
    NoAdmissibleA { j: usize },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}
