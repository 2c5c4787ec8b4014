//! Seeded experiment runner: each experiment is a pure function of its
//! configuration and seed and yields one [`Report`].

pub mod cli;
pub mod config;
pub mod experiments;
pub mod report;

use std::path::PathBuf;

use thiserror::Error;

pub use cli::cli_main;
pub use config::{Experiment, ExperimentConfig, Format, Overrides};
pub use experiments::run;
pub use report::{Check, Report};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Linalg(#[from] doi_lab::linalg::LinalgError),
    #[error(transparent)]
    Doi(#[from] doi_lab::doi::DoiError),
    #[error(transparent)]
    Funcspace(#[from] doi_lab::funcspace::FuncspaceError),
    #[error(transparent)]
    Ssf(#[from] doi_lab::ssf::SsfError),
    #[error("i/o on {}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
}

impl HarnessError {
    /// 1 for usage and configuration errors, 2 for anything that stopped a
    /// run after it started.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Usage(_) | HarnessError::Config(_) => 1,
            _ => 2,
        }
    }
}
