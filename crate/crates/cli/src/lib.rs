//! Library half of the `obspace` command line: interchange documents,
//! reports and the command implementations. `main.rs` only parses
//! arguments and prints.

pub mod commands;
pub mod document;
pub mod report;

use thiserror::Error;

pub use commands::{check, example, ground, ks, wigner, ExampleOptions, GroundOptions, KsOptions, WignerOptions};
pub use document::{PermutationDocument, SpaceDocument, TestDocument};
pub use report::Report;

/// Exit status for a successful run or a positive finding.
pub const EXIT_OK: u8 = 0;
/// Exit status for a negative finding: inconsistent, infeasible, no selection.
pub const EXIT_NEGATIVE: u8 = 1;
/// Exit status for usage, parse and input errors.
pub const EXIT_USAGE: u8 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    /// A finding rather than a failure to run, e.g. an inconsistent space
    /// handed to `ground`.
    #[error("{0}")]
    Negative(String),
    #[error(transparent)]
    Library(#[from] obspace::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Negative(_) | CliError::Library(obspace::Error::Inconsistent(_)) => EXIT_NEGATIVE,
            _ => EXIT_USAGE,
        }
    }
}

/// A report with the exit status it implies.
#[derive(Debug)]
pub struct Outcome {
    pub report: Report,
    pub code: u8,
}

impl Outcome {
    pub fn new(report: Report, negative: bool) -> Self {
        Self { report, code: if negative { EXIT_NEGATIVE } else { EXIT_OK } }
    }
}

pub fn read_file(path: &std::path::Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}
