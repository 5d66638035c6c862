//! Library error type and CLI exit-code mapping.

use thiserror::Error;

/// Exit code for invalid input.
pub const EXIT_VALIDATION: i32 = 2;
/// Exit code for a numerical scheme that did not reach its tolerance.
pub const EXIT_CONVERGENCE: i32 = 3;

#[derive(Debug, Error)]
pub enum Error {
    #[error("validation error: {0}")]
    Validation(String),
    #[error("outside extrapolation policy: {0}")]
    Extrapolation(String),
    #[error("singular reflection coefficient: {0}")]
    SingularCoefficient(String),
    #[error("no zero-frequency limit rule: {0}")]
    ZeroFrequencyLimit(String),
    #[error("accuracy error: {message} (achieved relative tolerance {achieved:.3e})")]
    Accuracy { message: String, achieved: f64 },
    #[error("quadrature did not converge: value {value:.6e}, error estimate {error:.3e}, tolerance {tolerance:.3e} after {intervals} intervals")]
    Quadrature {
        value: f64,
        error: f64,
        tolerance: f64,
        intervals: usize,
    },
    #[error("Matsubara truncation not reached within {terms} terms")]
    Truncation { terms: usize },
    #[error("dispersion root count unstable: {0}")]
    Refinement(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Wraps the error with a location such as "d = 1e-6 m, n = 0".
    pub fn context(self, context: impl Into<String>) -> Error {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }

    /// The innermost error, skipping context layers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Context { source, .. } => source.root(),
            other => other,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.root() {
            Error::Accuracy { .. }
            | Error::Quadrature { .. }
            | Error::Truncation { .. }
            | Error::Refinement(_) => EXIT_CONVERGENCE,
            _ => EXIT_VALIDATION,
        }
    }
}

pub(crate) fn validation(msg: impl Into<String>) -> Error {
    Error::Validation(msg.into())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_root_cause() {
        let e = Error::Truncation { terms: 10 }.context("d = 1e-6 m");
        assert_eq!(e.exit_code(), EXIT_CONVERGENCE);
        assert_eq!(validation("x").context("a").context("b").exit_code(), EXIT_VALIDATION);
        assert!(e.to_string().starts_with("d = 1e-6 m: "));
    }
}
