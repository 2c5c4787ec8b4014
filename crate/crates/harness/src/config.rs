use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::Serialize;

use crate::HarnessError;

/// Environment variable consulted for the seed when neither a flag nor the
/// config file sets one.
pub const SEED_ENV: &str = "DOI_LAB_SEED";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Counterexample,
    MainEstimate,
    Convergence,
    SsfContinuity,
    AppendixPositive,
    DoiIdentities,
    KernelReport,
}

impl Experiment {
    pub const ALL: [Experiment; 7] = [
        Experiment::Counterexample,
        Experiment::MainEstimate,
        Experiment::Convergence,
        Experiment::SsfContinuity,
        Experiment::AppendixPositive,
        Experiment::DoiIdentities,
        Experiment::KernelReport,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Counterexample => "counterexample",
            Experiment::MainEstimate => "main-estimate",
            Experiment::Convergence => "convergence",
            Experiment::SsfContinuity => "ssf-continuity",
            Experiment::AppendixPositive => "appendix-positive",
            Experiment::DoiIdentities => "doi-identities",
            Experiment::KernelReport => "kernel-report",
        }
    }

    /// Named tolerances with their defaults; only these may be overridden.
    pub fn tolerances(self) -> &'static [(&'static str, f64)] {
        match self {
            Experiment::Counterexample => &[("first", 1e-11), ("second", 1e-9), ("invariance", 1e-9)],
            Experiment::MainEstimate => &[("cv", 0.5)],
            Experiment::Convergence => &[("slope", -0.9)],
            Experiment::SsfContinuity => &[("ratio", 0.05), ("slope", 0.9)],
            Experiment::AppendixPositive => &[("identity", 1e-8), ("slope", -0.9)],
            Experiment::DoiIdentities => &[
                ("fundamental", 1e-8),
                ("separable", 1e-9),
                ("decomposition", 1e-9),
                ("reconstruction", 1e-7),
                ("cayley", 1e-10),
                ("unitary", 1e-10),
                ("krein", 1e-8),
            ],
            Experiment::KernelReport => &[("limit-gap", 1e-3)],
        }
    }

    fn default_dim(self) -> usize {
        match self {
            Experiment::Counterexample => 8,
            Experiment::SsfContinuity | Experiment::DoiIdentities => 12,
            _ => 10,
        }
    }

    fn default_trials(self) -> usize {
        match self {
            Experiment::DoiIdentities => 200,
            _ => 100,
        }
    }

    fn default_function(self) -> &'static str {
        match self {
            Experiment::AppendixPositive => "psi-power",
            _ => "bump",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| HarnessError::Usage(format!("unknown experiment '{s}'")))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
    Text,
}

impl FromStr for Format {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "text" => Ok(Format::Text),
            other => Err(HarnessError::Usage(format!("unknown format '{other}', expected csv, json or text"))),
        }
    }
}

/// Schatten exponent in `[1, inf]`; `inf`, `infinity` and `∞` parse to infinity.
pub fn parse_p(s: &str) -> Result<f64, HarnessError> {
    let p = match s.trim() {
        "inf" | "infinity" | "∞" => f64::INFINITY,
        other => other
            .parse::<f64>()
            .map_err(|_| HarnessError::Config(format!("cannot parse p = '{other}'")))?,
    };
    if p >= 1.0 {
        Ok(p)
    } else {
        Err(HarnessError::Config(format!("p = {s} must be >= 1 or inf")))
    }
}

/// `p` as printed in reports and column names.
pub fn p_label(p: f64) -> String {
    if p.is_infinite() {
        "inf".to_string()
    } else {
        format!("{p}")
    }
}

/// Unresolved settings from one source; later sources fill the gaps of
/// earlier ones.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub dim: Option<usize>,
    pub p: Option<f64>,
    pub m: Option<u32>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub f_name: Option<String>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub dim_half: Option<usize>,
    pub tolerances: BTreeMap<String, f64>,
}

impl Overrides {
    /// Fields set in `self` win over those of `lower`.
    pub fn over(mut self, lower: Overrides) -> Overrides {
        self.dim = self.dim.or(lower.dim);
        self.p = self.p.or(lower.p);
        self.m = self.m.or(lower.m);
        self.trials = self.trials.or(lower.trials);
        self.seed = self.seed.or(lower.seed);
        self.f_name = self.f_name.or(lower.f_name);
        self.out = self.out.or(lower.out);
        self.format = self.format.or(lower.format);
        self.dim_half = self.dim_half.or(lower.dim_half);
        for (k, v) in lower.tolerances {
            self.tolerances.entry(k).or_insert(v);
        }
        self
    }

    /// Flat `key = value` lines mirroring the flags; `#` starts a comment and
    /// `tol.<name>` sets a tolerance.
    pub fn from_config_text(text: &str) -> Result<Overrides, HarnessError> {
        let mut o = Overrides::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| HarnessError::Config(format!("line {}: expected key=value", lineno + 1)))?;
            o.set(key.trim(), value.trim())
                .map_err(|e| HarnessError::Config(format!("line {}: {e}", lineno + 1)))?;
        }
        Ok(o)
    }

    fn set(&mut self, key: &str, value: &str) -> Result<(), HarnessError> {
        let int = |v: &str| v.parse::<u64>().map_err(|_| HarnessError::Config(format!("{key}: '{v}' is not an integer")));
        match key {
            "dim" => self.dim = Some(int(value)? as usize),
            "p" => self.p = Some(parse_p(value)?),
            "m" => self.m = Some(int(value)? as u32),
            "trials" => self.trials = Some(int(value)? as usize),
            "seed" => self.seed = Some(int(value)?),
            "f" => self.f_name = Some(value.to_string()),
            "out" => self.out = Some(PathBuf::from(value)),
            "format" => self.format = Some(value.parse()?),
            "dim-half" | "dim_half" => self.dim_half = Some(int(value)? as usize),
            other => match other.strip_prefix("tol.") {
                Some(name) => {
                    let v = value
                        .parse::<f64>()
                        .map_err(|_| HarnessError::Config(format!("{key}: '{value}' is not a number")))?;
                    self.tolerances.insert(name.to_string(), v);
                }
                None => return Err(HarnessError::Config(format!("unknown key '{other}'"))),
            },
        }
        Ok(())
    }

    /// The seed from [`SEED_ENV`], if set.
    pub fn from_env() -> Result<Overrides, HarnessError> {
        match std::env::var(SEED_ENV) {
            Ok(v) => {
                let seed = v
                    .trim()
                    .parse::<u64>()
                    .map_err(|_| HarnessError::Config(format!("{SEED_ENV}='{v}' is not a u64")))?;
                Ok(Overrides { seed: Some(seed), ..Overrides::default() })
            }
            Err(_) => Ok(Overrides::default()),
        }
    }
}

/// A fully resolved experiment configuration.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub dim: usize,
    /// `None` runs the experiment's own sweep of exponents.
    pub p: Option<f64>,
    pub m: u32,
    pub trials: usize,
    pub seed: u64,
    pub f_name: String,
    pub out: PathBuf,
    pub format: Format,
    pub dim_half: usize,
    pub tolerances: BTreeMap<String, f64>,
    /// Whether `dim` and `trials` were set explicitly.
    #[serde(skip)]
    pub explicit_dim: bool,
    #[serde(skip)]
    pub explicit_trials: bool,
}

impl ExperimentConfig {
    /// Defaults for `experiment` with seed 0.
    pub fn new(experiment: Experiment) -> Self {
        Self::resolve(experiment, Overrides::default()).expect("defaults are valid")
    }

    pub fn resolve(experiment: Experiment, o: Overrides) -> Result<Self, HarnessError> {
        let m = o.m.unwrap_or(3);
        if m == 0 || m.is_multiple_of(2) {
            return Err(HarnessError::Config(format!("m = {m} must be an odd positive integer")));
        }
        if o.dim == Some(0) || o.trials == Some(0) || o.dim_half == Some(0) {
            return Err(HarnessError::Config("dim, trials and dim-half must be positive".into()));
        }
        let known = experiment.tolerances();
        for name in o.tolerances.keys() {
            if !known.iter().any(|(k, _)| k == name) {
                let names: Vec<&str> = known.iter().map(|(k, _)| *k).collect();
                return Err(HarnessError::Config(format!(
                    "unknown tolerance '{name}' for {experiment}; known: {}",
                    names.join(", ")
                )));
            }
        }
        let mut tolerances: BTreeMap<String, f64> = known.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        tolerances.extend(o.tolerances);
        Ok(Self {
            experiment,
            dim: o.dim.unwrap_or(experiment.default_dim()),
            p: o.p,
            m,
            trials: o.trials.unwrap_or(experiment.default_trials()),
            seed: o.seed.unwrap_or(0),
            f_name: o.f_name.unwrap_or_else(|| experiment.default_function().to_string()),
            out: o.out.unwrap_or_else(|| PathBuf::from("reports")),
            format: o.format.unwrap_or_default(),
            dim_half: o.dim_half.unwrap_or(4),
            tolerances,
            explicit_dim: o.dim.is_some(),
            explicit_trials: o.trials.is_some(),
        })
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_dim(mut self, dim: usize) -> Self {
        self.dim = dim;
        self.explicit_dim = true;
        self
    }

    pub fn with_trials(mut self, trials: usize) -> Self {
        self.trials = trials;
        self.explicit_trials = true;
        self
    }

    pub fn with_function(mut self, name: &str) -> Self {
        self.f_name = name.to_string();
        self
    }

    pub fn with_m(mut self, m: u32) -> Self {
        self.m = m;
        self
    }

    pub fn with_p(mut self, p: f64) -> Self {
        self.p = Some(p);
        self
    }

    pub fn with_dim_half(mut self, dim_half: usize) -> Self {
        self.dim_half = dim_half;
        self
    }

    /// The effective value of a tolerance declared by the experiment.
    pub fn tolerance(&self, name: &str) -> f64 {
        *self
            .tolerances
            .get(name)
            .unwrap_or_else(|| panic!("{} declares no tolerance '{name}'", self.experiment))
    }

    /// The exponents to sweep: the configured one, or `default`.
    pub fn exponents(&self, default: &[f64]) -> Vec<f64> {
        match self.p {
            Some(p) => vec![p],
            None => default.to_vec(),
        }
    }

    /// Per-trial seed.
    pub fn trial_seed(&self, trial: usize) -> u64 {
        self.seed ^ trial as u64
    }
}
