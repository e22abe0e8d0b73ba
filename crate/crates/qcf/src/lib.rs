//! Command-line front end and file formats for `qcf-core`.

pub mod cli;
pub mod descent;
pub mod format;
pub mod sample;

use std::fmt;

/// Errors surfaced by the command line, with their exit codes.
#[derive(Debug)]
pub enum CliError {
    /// Bad arguments or malformed input (exit 2).
    Usage(String),
    /// A runtime failure in the library (exit 1).
    Core(qcf_core::Error),
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use qcf_core::Error as E;
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(
                E::Parse { .. }
                | E::UnknownCase(_)
                | E::LetterOutOfRange { .. }
                | E::Pattern(_)
                | E::OutsideBaseInterval(_)
                | E::NotUnimodular(_)
                | E::FieldMismatch(..),
            ) => 2,
            CliError::Core(_) | CliError::Io(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => f.write_str(m),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<qcf_core::Error> for CliError {
    fn from(e: qcf_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(std::io::Error::other(e))
    }
}
