use thiserror::Error;

/// Errors raised by the numerical pipelines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// The spec does not satisfy `sum a_k theta_k = 0`.
    #[error("constraint error: {0}")]
    Constraint(String),
    /// The spec violates the unit-fraction / `|a_k| <= 1` hypotheses of the remainder bound.
    #[error("hypothesis error: {0}")]
    Hypothesis(String),
    #[error("tolerance not met: requested {requested:e}, achieved {achieved:e} ({context})")]
    ToleranceNotMet {
        requested: f64,
        achieved: f64,
        context: String,
    },
    #[error("singular system: {0}")]
    SingularSystem(String),
    /// Malformed input document (spec JSON, theta list, Gram cache).
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn tolerance(requested: f64, achieved: f64, context: impl Into<String>) -> Self {
        Error::ToleranceNotMet {
            requested,
            achieved,
            context: context.into(),
        }
    }
}
