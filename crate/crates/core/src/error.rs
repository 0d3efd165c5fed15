use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{what} = {value} is outside the admissible domain")]
    Domain { what: &'static str, value: f64 },

    #[error("solver failure: {0}")]
    SolverFailure(String),

    #[error("inconsistent intermediate result: {0}")]
    Inconsistency(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("construction error: {0}")]
    Construction(String),

    #[error("certification failed: {reason} at (x = {x}, y = {y})")]
    CertificationFailed { reason: String, x: f64, y: f64 },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(what: &'static str, value: f64) -> Error {
    Error::Domain { what, value }
}
