use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("quadrature did not converge: estimate {estimate:e}, error {error:e} after {subdivisions} subdivisions")]
    NonConvergence {
        estimate: f64,
        error: f64,
        subdivisions: usize,
    },
    #[error("integrand is not integrable: declared endpoint exponent {0} >= 1")]
    NonIntegrable(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("grid too coarse for the characteristic function: {0}")]
    AliasWarning(String),
    #[error("operator requires a type {expected} Lévy measure, got type {found}")]
    WrongType { expected: String, found: String },
    #[error("Lévy tail integral diverges: {0}")]
    TailDivergence(String),
    #[error("request outside the supported range: {0}")]
    OutOfScope(String),
    #[error("empty sample set")]
    EmptySample,
    #[error("sample size mismatch: {0} vs {1}")]
    SizeMismatch(usize, usize),
    #[error("invalid test function: {0}")]
    InvalidTestFunction(String),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
