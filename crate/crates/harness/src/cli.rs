use std::ffi::OsString;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use crate::config::{parse_p, Experiment, ExperimentConfig, Format, Overrides};
use crate::experiments::run;
use crate::HarnessError;

#[derive(Parser, Debug)]
#[command(name = "doi-lab", version, about = "Seeded experiments on double operator integrals and spectral shift functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Resolvent differences of the two-projection pair
    Counterexample(Flags),
    /// Ratios of ||f(A) - f(B)||_p to resolvent-power differences
    MainEstimate(Flags),
    /// Convergence of f(A_n) - f(B_n) under n^{-1} perturbations
    Convergence(Flags),
    /// Weighted L^1 continuity of the spectral shift along a segment
    SsfContinuity(Flags),
    /// Positive operators through psi(x) = (x + 1)^{-m}
    AppendixPositive(Flags),
    /// Exact identities on random pairs
    DoiIdentities(Flags),
    /// Regularity constants of the G-kernels
    KernelReport(Flags),
}

#[derive(Args, Debug, Default)]
struct Flags {
    /// Matrix dimension (largest dimension for doi-identities)
    #[arg(long)]
    dim: Option<usize>,
    /// Schatten exponent, a real >= 1 or `inf`
    #[arg(long, value_parser = parse_p)]
    p: Option<f64>,
    /// Odd power m
    #[arg(long)]
    m: Option<u32>,
    #[arg(long)]
    trials: Option<usize>,
    /// Seed; falls back to the config file, then DOI_LAB_SEED, then 0
    #[arg(long)]
    seed: Option<u64>,
    /// Registry function
    #[arg(long = "f")]
    f: Option<String>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(["csv", "json", "text"]))]
    format: Option<String>,
    /// Half dimension of the counterexample
    #[arg(long = "dim-half")]
    dim_half: Option<usize>,
    /// Flat key=value file mirroring the flags; flags win
    #[arg(long)]
    config: Option<PathBuf>,
    /// Tolerance override, NAME=VALUE; repeatable
    #[arg(long = "tol", value_name = "NAME=VALUE")]
    tol: Vec<String>,
}

impl Command {
    fn split(self) -> (Experiment, Flags) {
        match self {
            Command::Counterexample(f) => (Experiment::Counterexample, f),
            Command::MainEstimate(f) => (Experiment::MainEstimate, f),
            Command::Convergence(f) => (Experiment::Convergence, f),
            Command::SsfContinuity(f) => (Experiment::SsfContinuity, f),
            Command::AppendixPositive(f) => (Experiment::AppendixPositive, f),
            Command::DoiIdentities(f) => (Experiment::DoiIdentities, f),
            Command::KernelReport(f) => (Experiment::KernelReport, f),
        }
    }
}

impl Flags {
    fn overrides(&self) -> Result<Overrides, HarnessError> {
        let mut tolerances = std::collections::BTreeMap::new();
        for item in &self.tol {
            let (name, value) = item
                .split_once('=')
                .ok_or_else(|| HarnessError::Usage(format!("--tol expects NAME=VALUE, got '{item}'")))?;
            let v = value
                .trim()
                .parse::<f64>()
                .map_err(|_| HarnessError::Usage(format!("--tol {name}: '{value}' is not a number")))?;
            tolerances.insert(name.trim().to_string(), v);
        }
        Ok(Overrides {
            dim: self.dim,
            p: self.p,
            m: self.m,
            trials: self.trials,
            seed: self.seed,
            f_name: self.f.clone(),
            out: self.out.clone(),
            format: self.format.as_deref().map(str::parse::<Format>).transpose()?,
            dim_half: self.dim_half,
            tolerances,
        })
    }
}

/// Parses `argv` (program name first) into a resolved configuration:
/// flags, then the config file, then the seed environment variable.
pub fn parse_config<I, S>(argv: I) -> Result<ExperimentConfig, clap::Error>
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv)?;
    let (experiment, flags) = cli.command.split();
    resolve(experiment, &flags).map_err(|e| clap::Error::raw(ErrorKind::ValueValidation, format!("{e}\n")))
}

fn resolve(experiment: Experiment, flags: &Flags) -> Result<ExperimentConfig, HarnessError> {
    let file = match &flags.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
            Overrides::from_config_text(&text)?
        }
        None => Overrides::default(),
    };
    let merged = flags.overrides()?.over(file).over(Overrides::from_env()?);
    ExperimentConfig::resolve(experiment, merged)
}

/// Runs the selected experiment and writes its report. Returns 0 when every
/// check passed, 2 when a check failed or the run stopped, 1 on usage or
/// configuration errors.
pub fn cli_main<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
        }
    };
    let (experiment, flags) = cli.command.split();
    let outcome = resolve(experiment, &flags).and_then(|cfg| {
        let report = run(&cfg)?;
        let paths = report.write(&cfg.out, cfg.format)?;
        Ok((report, paths))
    });
    match outcome {
        Ok((report, paths)) => {
            println!(
                "{} seed={}: {}",
                report.experiment,
                report.seed,
                if report.passed { "PASS" } else { "FAIL" }
            );
            for c in report.failed_checks() {
                println!("  failed {}: {} {} {}", c.name, c.value, c.relation, c.bound);
            }
            for p in paths {
                println!("  wrote {}", p.display());
            }
            if report.passed {
                0
            } else {
                2
            }
        }
        Err(e) => {
            eprintln!("doi-lab {experiment}: {e}");
            e.exit_code()
        }
    }
}
