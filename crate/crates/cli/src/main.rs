mod args;
mod run;
mod state_file;
mod table;

use std::process::ExitCode;

use clap::Parser;
use hme_core::HmeError;

/// Failures that end a run, each with its own exit code.
#[derive(Debug)]
pub enum Failure {
    Config(String),
    Numerical(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Self::Config(_) => 2,
            Self::Numerical(_) => 3,
        }
    }
}

impl From<HmeError> for Failure {
    fn from(e: HmeError) -> Self {
        match e {
            HmeError::Numerical(_) | HmeError::DegeneratePencil(_) => Self::Numerical(e.to_string()),
            _ => Self::Config(e.to_string()),
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Config(m) | Self::Numerical(m) => f.write_str(m),
        }
    }
}

fn init_workers() -> Result<(), Failure> {
    let Ok(v) = std::env::var("HME_WORKERS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| Failure::Config(format!("HME_WORKERS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Config(format!("worker pool: {e}")))
}

fn main() -> ExitCode {
    let cli = args::Cli::parse();
    match init_workers().and_then(|_| run::run(cli.command)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
