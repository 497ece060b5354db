use thiserror::Error;

/// Errors raised by the biphoton workbench.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("crystal `{record}` violates invariant: {invariant}")]
    Invariant { record: String, invariant: String },

    #[error("duplicate crystal name `{0}` in catalog")]
    DuplicateName(String),

    #[error("crystal `{0}` not found in catalog")]
    UnknownCrystal(String),

    #[error("wavelength {wavelength_um} um is outside the transparency range [{min}, {max}] um")]
    OutsideTransparency {
        wavelength_um: f64,
        min: f64,
        max: f64,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("no sign change of the mismatch in [{lo}, {hi}]: {context}")]
    NoRoot { lo: f64, hi: f64, context: String },

    #[error("root search did not converge after {iterations} iterations (best x = {best_x}, residual = {residual})")]
    NoConvergence {
        iterations: usize,
        best_x: f64,
        residual: f64,
    },

    #[error("first-order quasi-phase-matching impossible: residual mismatch {0} rad/m is not positive")]
    NonPositiveMismatch(f64),

    #[error("position z = {z} m is outside the profile domain [0, {length}] m")]
    OutsideDomain { z: f64, length: f64 },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn invariant(record: &str, invariant: impl Into<String>) -> Self {
        Error::Invariant {
            record: record.to_string(),
            invariant: invariant.into(),
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
