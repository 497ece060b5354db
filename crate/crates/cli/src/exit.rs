use biphoton_core::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitCode {
    Ok = 0,
    Config = 2,
    Validation = 3,
    Numerical = 4,
    NotConverged = 5,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: ExitCode,
    pub message: String,
}

impl CliError {
    pub fn new(code: ExitCode, message: impl Into<String>) -> Self {
        CliError { code, message: message.into() }
    }

    pub fn config(message: impl Into<String>) -> Self {
        Self::new(ExitCode::Config, message)
    }
}

/// Parse, configuration and I/O problems are 2, record or range violations 3,
/// failed numerics 4.
pub fn code_for(e: &Error) -> ExitCode {
    match e {
        Error::Parse { .. } | Error::Config(_) | Error::UnknownCrystal(_) | Error::Io(_) => ExitCode::Config,
        Error::Invariant { .. } | Error::DuplicateName(_) | Error::OutsideTransparency { .. } | Error::OutsideDomain { .. } => {
            ExitCode::Validation
        }
        Error::NoRoot { .. } | Error::NoConvergence { .. } | Error::NonPositiveMismatch(_) | Error::Degenerate(_) => {
            ExitCode::Numerical
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError { code: code_for(&e), message: e.to_string() }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
