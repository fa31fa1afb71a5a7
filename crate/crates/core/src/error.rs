use thiserror::Error;

/// Failure modes shared by every numeric routine in the crate.
///
/// Values are carried as `f64` regardless of the scalar type in use so that
/// the error type stays non-generic.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what} out of domain: {value}")]
    Domain { what: &'static str, value: f64 },

    #[error("{what} overflowed the floating-point range ({detail})")]
    Range { what: &'static str, detail: String },

    #[error("{what} did not converge after {iterations} iterations ({detail})")]
    Convergence {
        what: &'static str,
        iterations: usize,
        detail: String,
    },

    #[error("no solution: {0}")]
    Infeasible(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(what: &'static str, value: impl Into<f64>) -> Error {
    Error::Domain {
        what,
        value: value.into(),
    }
}
