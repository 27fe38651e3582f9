//! Command-line front end for `enas-runtime-core`: tabular benchmark files,
//! experiment specifications, parallel sweeps and CSV output.

pub mod benchio;
pub mod cli;
pub mod commands;
pub mod csvio;
pub mod error;
pub mod spec;
pub mod sweep;

pub use error::{CliError, CliResult};
