//! Finite-dimensional laboratory for double operator integrals and spectral
//! shift functions of Hermitian matrices.
//!
//! The numerical core is generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix it to double precision, which is what the tolerances are tuned
//! for.

// Negated comparisons below are deliberate: they reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod doi;
pub mod funcspace;
pub mod linalg;
pub mod random;
pub mod scalar;
pub mod ssf;

pub use scalar::{cpowi, Cx, Real};

pub type C64 = num_complex::Complex<f64>;
pub type Hermitian = linalg::HermitianOperator<f64>;
pub type Operator = linalg::GeneralOperator<f64>;
pub type Spectral = linalg::SpectralDecomposition<f64>;
pub type Kernel = doi::Kernel<f64>;
pub type Smooth = funcspace::Smooth<f64>;
pub type FmFunction = funcspace::FmFunction<f64>;
pub type SmoothBijection = funcspace::SmoothBijection<f64>;
pub type CutoffFunction = funcspace::CutoffFunction<f64>;
pub type StepFunction = ssf::StepFunction<f64>;
