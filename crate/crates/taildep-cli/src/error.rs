//! Process-level error classification.
//!
//! Every failure maps to one of three exit codes: 2 for configuration
//! problems (bad flags, malformed config files, invalid parameters),
//! 3 for data problems (unreadable or malformed input, columns that do
//! not satisfy the preconditions of an analysis), and 4 for numerical
//! failures inside an estimator.

use std::fmt;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Data(String),
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Data(_) => 3,
            CliError::Numerical(_) => 4,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Data(m) | CliError::Numerical(m) => m,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self {
            CliError::Config(_) => "configuration error",
            CliError::Data(_) => "data error",
            CliError::Numerical(_) => "numerical error",
        };
        write!(f, "{kind}: {}", self.message())
    }
}

impl std::error::Error for CliError {}

pub type CliResult<T> = Result<T, CliError>;

/// Classify a library error by what went wrong, not where.
///
/// Parameter problems are configuration mistakes; shape and sufficiency
/// problems belong to the data; everything that fails inside an estimator
/// is numerical.
pub fn from_lib(err: taildep::Error) -> CliError {
    use taildep::Error as E;
    match err {
        E::InvalidParameter(_) | E::Config(_) => CliError::Config(err.to_string()),
        E::InsufficientData(_) | E::ShapeMismatch(_) | E::Domain(_) => {
            CliError::Data(err.to_string())
        }
        _ => CliError::Numerical(err.to_string()),
    }
}

pub fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

pub fn data_err(msg: impl Into<String>) -> CliError {
    CliError::Data(msg.into())
}
