use std::io;
use std::path::PathBuf;

use enas_runtime_core::Error as CoreError;

/// Exit status for bad flags, configs or input files.
pub const EXIT_VALIDATION: i32 = 2;
/// Exit status for failures while computing or writing results.
pub const EXIT_RUNTIME: i32 = 1;
/// Exit status of `compare` when some bound exceeds the empirical mean.
pub const EXIT_VIOLATIONS: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("cannot read {path}: {source}")]
    Input { path: PathBuf, source: io::Error },

    #[error("cannot write output: {0}")]
    Output(#[from] io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Core(#[from] CoreError),

    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) | CliError::Parse { .. } | CliError::Input { .. } => {
                EXIT_VALIDATION
            }
            CliError::Core(e) => match e {
                CoreError::InvalidParams { .. }
                | CoreError::OutOfRange { .. }
                | CoreError::LengthMismatch { .. }
                | CoreError::InvalidGenotype(_)
                | CoreError::InfeasibleProfile { .. }
                | CoreError::Intractable { .. }
                | CoreError::UnsupportedOperator(_)
                | CoreError::DuplicateGenotype(_)
                | CoreError::TiedOptimum { .. }
                | CoreError::InvalidConfig(_) => EXIT_VALIDATION,
                _ => EXIT_RUNTIME,
            },
            CliError::Output(_) | CliError::Csv(_) | CliError::Runtime(_) => EXIT_RUNTIME,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
