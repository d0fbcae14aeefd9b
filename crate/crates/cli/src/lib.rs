//! Command-line front end for the observable-compression toolkit.
//!
//! The binary ingests observable sets from JSON files, runs the
//! library analyses (block structure, minimal compression dimension,
//! geometric lower bounds, channel synthesis), and emits reports in
//! text or machine-readable JSON. All randomness flows from a single
//! `--seed` flag through the library's splittable generator, so every
//! report is reproducible; JSON reports are byte-identical across runs
//! apart from the `meta` object.
//!
//! Exit codes: 0 success, 2 parse error, 3 numerical failure, 4
//! dimension mismatch, 5 verification failure.

use std::fmt;

pub mod commands;
pub mod files;
pub mod reports;

/// Errors surfaced by the command layer.
#[derive(Debug)]
pub enum CliError {
    /// Input could not be read, parsed, or validated.
    Parse(String),
    /// The library reported a failure.
    Core(qcdim::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Parse(msg) => write!(f, "{msg}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<qcdim::Error> for CliError {
    fn from(e: qcdim::Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    /// Process exit code for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Core(e) => match e {
                qcdim::Error::DimensionMismatch { .. } => 4,
                qcdim::Error::VerificationFailed { .. }
                | qcdim::Error::NotTracePreserving { .. }
                | qcdim::Error::NotPsd { .. } => 5,
                qcdim::Error::InvalidObservables(_)
                | qcdim::Error::NotHermitian { .. }
                | qcdim::Error::NotProjection { .. } => 2,
                _ => 3,
            },
        }
    }
}
