use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{func}: argument out of domain ({detail})")]
    Domain { func: &'static str, detail: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{func}: partial sums exceeded the representable range")]
    Overflow { func: &'static str },

    #[error("Newton iteration for node {index} of the {size}-point Gauss rule did not converge")]
    NoConvergence { index: usize, size: usize },

    #[error("matrix is singular at pivot {pivot}")]
    SingularMatrix { pivot: usize },

    #[error("source evaluation failed at node {index} (t = {t}): {reason}")]
    SourceEvaluation {
        index: usize,
        t: f64,
        reason: String,
    },

    #[error("oracle accuracy failure at t = {t}: panel doubling changed the result by {change:e}")]
    OracleAccuracy { t: f64, change: f64 },

    #[error("manufactured source disagrees with the oracle at t = {t}: closed form {closed}, oracle {oracle}")]
    SourceMismatch { t: f64, closed: f64, oracle: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(func: &'static str, detail: impl Into<String>) -> Error {
    Error::Domain {
        func,
        detail: detail.into(),
    }
}
