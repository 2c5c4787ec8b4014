//! Exact finite-dimensional identities checked on random pairs: the
//! divided-difference and separable transformers, the resolvent
//! decomposition, the G-kernel reconstructions, the Cayley identity, the
//! trace formula and the change of variables for the spectral shift.

use rand::Rng;
use rayon::prelude::*;
use serde_json::Value;

use super::{perturbed_pair, stream};
use crate::config::ExperimentConfig;
use crate::report::{num, Check, Report};
use crate::HarnessError;
use doi_lab::Kernel;
use doi_lab::doi::{divided_difference, doi_apply, g_kernel, select_a, RegularityGrid};
use doi_lab::funcspace::{
    build_phi, cayley_of_operator, cutoff_split, registry, CutoffSplit, REGISTRY_NAMES, DEFAULT_C, DEFAULT_R,
};
use doi_lab::linalg::{operator_norm, relative_error, resolvent_power_diff};
use doi_lab::random::{random_general, random_hermitian, rng_for};
use doi_lab::ssf::{krein_check, xi_change_of_variables, SsfError};
use doi_lab::{FmFunction, Hermitian, Operator, SmoothBijection, C64};

const STREAM: u64 = stream(6);
/// Smallest dimension of the random pairs.
pub const MIN_DIM: usize = 2;
/// Largest dimension of the trace-formula pairs unless `--dim` is given.
pub const KREIN_MAX_DIM: usize = 20;
/// Odd powers of the decomposition identity.
pub const DECOMPOSITION_POWERS: [u32; 3] = [1, 3, 5];
/// Points sampled per pair in the change of variables.
pub const COV_POINTS: usize = 100;

/// One identity evaluated on one random instance.
#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    pub trial: usize,
    pub dim: usize,
    pub detail: String,
    pub error: f64,
}

/// All samples of one identity with its tolerance.
#[derive(Clone, Debug, PartialEq)]
pub struct IdentityOutcome {
    pub name: &'static str,
    pub tolerance: f64,
    pub samples: Vec<Sample>,
}

impl IdentityOutcome {
    pub fn max_error(&self) -> f64 {
        self.samples.iter().map(|s| s.error).fold(0.0, |a, e| if a.is_nan() || e.is_nan() { f64::NAN } else { a.max(e) })
    }

    pub fn passed(&self) -> bool {
        self.max_error() <= self.tolerance
    }
}

fn random_dim<R: Rng + ?Sized>(max: usize, rng: &mut R) -> usize {
    rng.random_range(MIN_DIM..=max.max(MIN_DIM))
}

fn trial_rng(cfg: &ExperimentConfig, salt: u64, trial: usize) -> impl Rng {
    rng_for(cfg.trial_seed(trial), STREAM ^ (salt << 24))
}

fn collect(samples: Vec<Result<Vec<Sample>, HarnessError>>) -> Result<Vec<Sample>, HarnessError> {
    Ok(samples.into_iter().collect::<Result<Vec<_>, _>>()?.into_iter().flatten().collect())
}

fn trials_or(cfg: &ExperimentConfig, default: usize) -> usize {
    if cfg.explicit_trials {
        cfg.trials
    } else {
        default
    }
}

fn functions(m: u32) -> Result<Vec<FmFunction>, HarnessError> {
    REGISTRY_NAMES
        .iter()
        .map(|name| Ok(registry::<f64>(name, m)?))
        .collect()
}

/// `(phi(A) - iI)^{-1}` by Gaussian elimination.
fn resolvent_by_solve(phi: &SmoothBijection, a: &Hermitian) -> Result<Operator, HarnessError> {
    let pa = a.apply_real_function(|x| phi.eval(x))?;
    let shifted = pa.as_operator() - &Operator::identity(a.dim()).scale(C64::new(0.0, 1.0));
    Ok(shifted.inverse()?)
}

/// `f(A) - f(B) = J_{f^[1]}(A - B)`, relative error, each registry function.
pub fn fundamental(cfg: &ExperimentConfig) -> Result<IdentityOutcome, HarnessError> {
    let fs = functions(cfg.m)?;
    let kernels: Vec<Kernel> = fs.iter().map(|f| divided_difference(&f.func)).collect();
    let samples = (0..trials_or(cfg, 200))
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(cfg, 1, t);
            let dim = random_dim(cfg.dim, &mut rng);
            let a: Hermitian = random_hermitian(dim, &mut rng);
            let b: Hermitian = random_hermitian(dim, &mut rng);
            let diff = a.as_operator() - b.as_operator();
            fs.iter()
                .zip(&kernels)
                .map(|(f, k)| {
                    let lhs = &a.apply_function(|x| f.func.eval(x))? - &b.apply_function(|x| f.func.eval(x))?;
                    let rhs = doi_apply(k, &a, &b, &diff)?;
                    Ok(Sample { trial: t, dim, detail: f.label().to_string(), error: relative_error(&rhs, &lhs) })
                })
                .collect()
        })
        .collect();
    Ok(IdentityOutcome { name: "fundamental", tolerance: cfg.tolerance("fundamental"), samples: collect(samples)? })
}

/// `J_{a1 (x) a2}(T) = a1(A) T a2(B)`, max entrywise difference.
pub fn separable(cfg: &ExperimentConfig) -> Result<IdentityOutcome, HarnessError> {
    let a1 = registry::<f64>("rational-m", cfg.m)?.func;
    let a2 = registry::<f64>("capped-power-m", cfg.m)?.func;
    let kernel = Kernel::separable(a1.clone(), a2.clone());
    let samples = (0..trials_or(cfg, 100))
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(cfg, 2, t);
            let dim = random_dim(cfg.dim, &mut rng);
            let a: Hermitian = random_hermitian(dim, &mut rng);
            let b: Hermitian = random_hermitian(dim, &mut rng);
            let op: Operator = random_general(dim, &mut rng);
            let lhs = doi_apply(&kernel, &a, &b, &op)?;
            let rhs = &(&a.apply_function(|x| a1.eval(x))? * &op) * &b.apply_function(|x| a2.eval(x))?;
            Ok(vec![Sample { trial: t, dim, detail: kernel.label().to_string(), error: (&lhs - &rhs).max_abs_entry() }])
        })
        .collect();
    Ok(IdentityOutcome { name: "separable", tolerance: cfg.tolerance("separable"), samples: collect(samples)? })
}

/// `(phi(A) - i)^{-1} - (phi(B) - i)^{-1} = [g1(A) - g1(B)] + [g2(A) - g2(B)]`,
/// max entrywise difference, for each power in [`DECOMPOSITION_POWERS`].
pub fn decomposition(cfg: &ExperimentConfig) -> Result<IdentityOutcome, HarnessError> {
    let setups: Vec<(u32, SmoothBijection, CutoffSplit<f64>)> = DECOMPOSITION_POWERS
        .iter()
        .map(|&m| {
            let phi = build_phi(m, DEFAULT_R, DEFAULT_C)?;
            Ok((m, phi, cutoff_split(&phi)))
        })
        .collect::<Result<_, HarnessError>>()?;
    let samples = (0..trials_or(cfg, 100))
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(cfg, 3, t);
            let dim = random_dim(cfg.dim, &mut rng);
            let (a, b) = perturbed_pair(dim, &mut rng);
            setups
                .iter()
                .map(|(m, phi, split)| {
                    let lhs = &resolvent_by_solve(phi, &a)? - &resolvent_by_solve(phi, &b)?;
                    let part = |j: usize| -> Result<Operator, HarnessError> {
                        let g = split.g(j);
                        Ok(&a.apply_function(|x| g.eval(x))? - &b.apply_function(|x| g.eval(x))?)
                    };
                    let rhs = &part(1)? + &part(2)?;
                    Ok(Sample { trial: t, dim, detail: format!("m={m}"), error: (&lhs - &rhs).max_abs_entry() })
                })
                .collect()
        })
        .collect();
    Ok(IdentityOutcome { name: "decomposition", tolerance: cfg.tolerance("decomposition"), samples: collect(samples)? })
}

/// `g_j(A) - g_j(B) = J_{G_{j,a_j}}(T(a_j))` with `a_j` from the grid search,
/// relative error.
pub fn reconstruction(cfg: &ExperimentConfig) -> Result<IdentityOutcome, HarnessError> {
    let phi = build_phi(cfg.m, DEFAULT_R, DEFAULT_C)?;
    let split = cutoff_split(&phi);
    let grid = RegularityGrid::default();
    let mut setups = Vec::new();
    for j in [1usize, 2] {
        let a = select_a(j, &split, cfg.m, &grid)?.a;
        setups.push((j, a, g_kernel(j, &split, a, cfg.m)?));
    }
    let samples = (0..trials_or(cfg, 50))
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(cfg, 4, t);
            let dim = random_dim(cfg.dim, &mut rng);
            let (a, b) = perturbed_pair(dim, &mut rng);
            setups
                .iter()
                .map(|(j, av, k)| {
                    let g = split.g(*j);
                    let rhs = &a.apply_function(|x| g.eval(x))? - &b.apply_function(|x| g.eval(x))?;
                    let tt = resolvent_power_diff(&a, &b, C64::new(0.0, *av), cfg.m)?;
                    let lhs = doi_apply(k, &a, &b, &tt)?;
                    Ok(Sample { trial: t, dim, detail: format!("j={j},a={av}"), error: relative_error(&lhs, &rhs) })
                })
                .collect()
        })
        .collect();
    Ok(IdentityOutcome { name: "reconstruction", tolerance: cfg.tolerance("reconstruction"), samples: collect(samples)? })
}

/// `U - V = 2i[(phi(A) - i)^{-1} - (phi(B) - i)^{-1}]` with `U = gamma(phi(A))`,
/// max entrywise difference; and `||U*U - I||_inf`.
pub fn cayley(cfg: &ExperimentConfig) -> Result<(IdentityOutcome, IdentityOutcome), HarnessError> {
    let phi = build_phi(cfg.m, DEFAULT_R, DEFAULT_C)?;
    let pairs = (0..trials_or(cfg, 100))
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(cfg, 5, t);
            let dim = random_dim(cfg.dim, &mut rng);
            let (a, b) = perturbed_pair(dim, &mut rng);
            let pa = a.apply_real_function(|x| phi.eval(x))?;
            let pb = b.apply_real_function(|x| phi.eval(x))?;
            let (u, v) = (cayley_of_operator(&pa), cayley_of_operator(&pb));
            let rhs = (&resolvent_by_solve(&phi, &a)? - &resolvent_by_solve(&phi, &b)?).scale(C64::new(0.0, 2.0));
            let identity = (&(&u - &v) - &rhs).max_abs_entry();
            let unitary = operator_norm(&(&(&u.adjoint() * &u) - &Operator::identity(dim)));
            let detail = format!("m={}", cfg.m);
            Ok((
                Sample { trial: t, dim, detail: detail.clone(), error: identity },
                Sample { trial: t, dim, detail, error: unitary },
            ))
        })
        .collect::<Vec<Result<_, HarnessError>>>()
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    let (id, un): (Vec<Sample>, Vec<Sample>) = pairs.into_iter().unzip();
    Ok((
        IdentityOutcome { name: "cayley", tolerance: cfg.tolerance("cayley"), samples: id },
        IdentityOutcome { name: "unitary", tolerance: cfg.tolerance("unitary"), samples: un },
    ))
}

/// `tr(f(B) - f(A)) = int f' xi(.; B, A)`, relative residual, each registry
/// function.
pub fn krein(cfg: &ExperimentConfig) -> Result<IdentityOutcome, HarnessError> {
    let fs = functions(cfg.m)?;
    let max_dim = if cfg.explicit_dim { cfg.dim } else { KREIN_MAX_DIM };
    let samples = (0..trials_or(cfg, 200))
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(cfg, 6, t);
            let dim = random_dim(max_dim, &mut rng);
            let a: Hermitian = random_hermitian(dim, &mut rng);
            let b: Hermitian = random_hermitian(dim, &mut rng);
            fs.iter()
                .map(|f| {
                    let check = krein_check(&a, &b, &f.func)?;
                    Ok(Sample { trial: t, dim, detail: f.label().to_string(), error: check.relative() })
                })
                .collect()
        })
        .collect();
    Ok(IdentityOutcome { name: "krein", tolerance: cfg.tolerance("krein"), samples: collect(samples)? })
}

/// `xi(x; B, A) = xi(phi(x); phi(B), phi(A))` at [`COV_POINTS`] points per
/// pair; the error is the number of mismatches, so the tolerance is 0.
pub fn change_of_variables(cfg: &ExperimentConfig) -> Result<IdentityOutcome, HarnessError> {
    let phi = build_phi(cfg.m, DEFAULT_R, DEFAULT_C)?;
    let samples = (0..trials_or(cfg, 50))
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(cfg, 7, t);
            let dim = random_dim(cfg.dim, &mut rng);
            let a: Hermitian = random_hermitian(dim, &mut rng);
            let b: Hermitian = random_hermitian(dim, &mut rng);
            let lo = a.eigenvalues()[0].min(b.eigenvalues()[0]) - 1.0;
            let hi = a.eigenvalues()[dim - 1].max(b.eigenvalues()[dim - 1]) + 1.0;
            let mut mismatches = 0usize;
            for _ in 0..COV_POINTS {
                let x = rng.random_range(lo..hi);
                match xi_change_of_variables(&a, &b, &phi, x) {
                    Ok(_) => {}
                    Err(SsfError::ChangeOfVariables { .. }) => mismatches += 1,
                    Err(e) => return Err(e.into()),
                }
            }
            Ok(vec![Sample { trial: t, dim, detail: format!("points={COV_POINTS}"), error: mismatches as f64 }])
        })
        .collect();
    Ok(IdentityOutcome { name: "change-of-variables", tolerance: 0.0, samples: collect(samples)? })
}

/// Every identity, in a fixed order.
pub fn all(cfg: &ExperimentConfig) -> Result<Vec<IdentityOutcome>, HarnessError> {
    let (cay, unit) = cayley(cfg)?;
    Ok(vec![
        fundamental(cfg)?,
        separable(cfg)?,
        decomposition(cfg)?,
        reconstruction(cfg)?,
        cay,
        unit,
        krein(cfg)?,
        change_of_variables(cfg)?,
    ])
}

pub fn run(cfg: &ExperimentConfig) -> Result<Report, HarnessError> {
    let outcomes = all(cfg)?;
    let mut report = Report::new(cfg, &["identity", "trial", "dim", "detail", "error", "tolerance", "pass"]);
    report.note("errors are relative Frobenius errors, max entrywise differences or mismatch counts per identity");
    report.param("max_dim", cfg.dim).param("m", cfg.m).param("min_dim", MIN_DIM);
    for o in &outcomes {
        for s in &o.samples {
            report.push_row(vec![
                Value::from(o.name),
                Value::from(s.trial),
                Value::from(s.dim),
                Value::from(s.detail.as_str()),
                num(s.error),
                num(o.tolerance),
                Value::from(s.error <= o.tolerance),
            ]);
        }
        report.set(&format!("{}.max_error", o.name), num(o.max_error()));
        report.set(&format!("{}.samples", o.name), o.samples.len());
        report.check(Check::at_most(o.name, o.max_error(), o.tolerance));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ExperimentConfig {
        ExperimentConfig::new(crate::Experiment::DoiIdentities).with_seed(13).with_trials(6).with_dim(6)
    }

    #[test]
    fn small_run_passes() {
        let r = run(&small()).unwrap();
        assert!(r.passed, "{:?}", r.failed_checks());
    }

    #[test]
    fn sample_counts_follow_the_trials() {
        let cfg = small();
        assert_eq!(fundamental(&cfg).unwrap().samples.len(), 6 * REGISTRY_NAMES.len());
        assert_eq!(decomposition(&cfg).unwrap().samples.len(), 6 * DECOMPOSITION_POWERS.len());
        assert!(krein(&cfg).unwrap().samples.iter().all(|s| (MIN_DIM..=6).contains(&s.dim)));
    }

    #[test]
    fn nan_fails_an_outcome() {
        let o = IdentityOutcome {
            name: "x",
            tolerance: 1.0,
            samples: vec![Sample { trial: 0, dim: 2, detail: String::new(), error: f64::NAN }],
        };
        assert!(!o.passed());
    }
}
