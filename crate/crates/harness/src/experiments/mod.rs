//! The experiments behind the subcommands.

pub mod appendix;
pub mod convergence;
pub mod counterexample;
pub mod identities;
pub mod kernel_report;
pub mod main_estimate;
pub mod ssf_continuity;

use rand::Rng;

use crate::config::{Experiment, ExperimentConfig};
use crate::report::Report;
use crate::HarnessError;
use doi_lab::funcspace::{fm_membership, registry};
use doi_lab::random::{random_hermitian, random_low_rank_hermitian};
use doi_lab::ssf::loglog_slope;
use doi_lab::{FmFunction, Hermitian};

/// Rank of the perturbation `B - A` in the randomized experiments.
pub const PERTURBATION_RANK: usize = 2;
/// Points at the end of a sequence used for slope fits and the
/// eventual-decrease test.
pub const TAIL_POINTS: usize = 5;

/// Runs the experiment `cfg.experiment`.
pub fn run(cfg: &ExperimentConfig) -> Result<Report, HarnessError> {
    match cfg.experiment {
        Experiment::Counterexample => counterexample::run(cfg),
        Experiment::MainEstimate => main_estimate::run(cfg),
        Experiment::Convergence => convergence::run(cfg),
        Experiment::SsfContinuity => ssf_continuity::run(cfg),
        Experiment::AppendixPositive => appendix::run(cfg),
        Experiment::DoiIdentities => identities::run(cfg),
        Experiment::KernelReport => kernel_report::run(cfg),
    }
}

/// Stream tag separating the generators of different experiments; trial
/// indices live in the low 32 bits.
pub(crate) const fn stream(tag: u64) -> u64 {
    tag << 32
}

/// The registry function `cfg.f_name`, required to pass the membership test.
pub(crate) fn member_function(cfg: &ExperimentConfig) -> Result<FmFunction, HarnessError> {
    let f = registry::<f64>(&cfg.f_name, cfg.m).map_err(|e| HarnessError::Config(e.to_string()))?;
    let membership = fm_membership(&f);
    if !membership.passed {
        return Err(HarnessError::Config(format!(
            "{} fails the class test for m = {}: {}",
            cfg.f_name,
            cfg.m,
            membership.failures.join("; ")
        )));
    }
    Ok(f)
}

/// `A` random Hermitian and `B = A + low-rank Hermitian`.
pub(crate) fn perturbed_pair<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> (Hermitian, Hermitian) {
    let a: Hermitian = random_hermitian(dim, rng);
    let b = a.add_scaled(1.0, &random_low_rank_hermitian(dim, PERTURBATION_RANK.min(dim), 1.0, rng));
    (a, b)
}

/// `1, 2, 4, ..., 256`.
pub fn n_grid() -> Vec<u32> {
    (0..=8).map(|k| 1u32 << k).collect()
}

/// Log-log slope over the last [`TAIL_POINTS`] points.
pub fn tail_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let start = xs.len().saturating_sub(TAIL_POINTS);
    loglog_slope(&xs[start..], &ys[start..])
}

/// Strict decrease over the last [`TAIL_POINTS`] values.
pub fn eventually_decreasing(ys: &[f64]) -> bool {
    let start = ys.len().saturating_sub(TAIL_POINTS);
    ys[start..].windows(2).all(|w| w[1] < w[0])
}

/// Population standard deviation over the mean.
pub fn coefficient_of_variation(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    var.sqrt() / mean
}
