//! Scalar function layer: smooth test functions and their class check, the
//! monotone bijection `phi`, the cutoff split of `1/(phi - i)`, the Cayley
//! transform, and the map `psi` for positive operators.

mod bijection;
mod cayley;
mod compose;
mod cutoff;
mod fm;
mod psi;
mod smooth;
mod split;

use thiserror::Error;

pub use bijection::{build_phi, invert_monotone, SmoothBijection};
pub use cayley::{cayley, cayley_by_solve, cayley_of_operator, inverse_cayley};
pub use compose::{compose_g, CircleFunction, LIMIT_PROBES};
pub use cutoff::CutoffFunction;
pub use fm::{
    fm_membership, registry, FmFunction, MembershipReport, ASYMPTOTIC_RADII, BUMP_RADIUS,
    REGISTRY_NAMES,
};
pub use psi::{positive_registry, psi_map, PsiMap};
pub use smooth::{ScalarMap, Smooth, DIFF_STEP, DIFF_STEP_2};
pub use split::{cutoff_split, CutoffSplit};

/// Default radius of the bijection's inner region.
pub const DEFAULT_R: f64 = 1.0;
/// Default lower bound on the bijection's slope.
pub const DEFAULT_C: f64 = 0.1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FuncspaceError {
    #[error("power m = {m} must be odd and positive")]
    EvenPower { m: u32 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("bijection not monotone enough: slope {slope} at x = {at}")]
    NotMonotone { at: f64, slope: f64 },
    #[error("inversion did not bracket y = {y}")]
    NoConvergence { y: f64 },
    #[error("one-sided limits differ by {gap} at |x| = {at}")]
    Discontinuity { at: f64, gap: f64 },
    #[error("{y} is outside (0, 1]")]
    Domain { y: f64 },
    #[error("unknown test function `{0}`")]
    UnknownFunction(String),
}
