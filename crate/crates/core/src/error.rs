use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input exceeds a table limit or a documented implementation ceiling.
    #[error("capacity exceeded: {what} = {value} (limit {limit})")]
    Capacity {
        what: &'static str,
        value: u64,
        limit: u64,
    },
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Dirichlet deconvolution needs g(1) = 1.
    #[error("sequence is not invertible under Dirichlet convolution: g(1) != 1")]
    NonInvertible,
    /// The requested radius cannot be certified within the truncation ceilings.
    #[error("precision unreachable: target radius {target:e}, best achievable {achievable:e}")]
    PrecisionUnreachable { target: f64, achievable: f64 },
    /// Malformed textual input (function syntax, character syntax, ...).
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
