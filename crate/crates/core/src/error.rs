use thiserror::Error;

/// Errors raised by the numerical routines.
///
/// The variants are grouped the way callers need to react to them: bad
/// input shapes or configurations, points outside a function's domain, and
/// computations that ran out of their work budget.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid shape: {0}")]
    InvalidShape(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("term evaluation failed at (m, n) = ({m}, {n}): {value}")]
    TermEvaluation { m: i64, n: i64, value: String },

    #[error("{what}: budget exhausted, achieved error bound {achieved:e}")]
    Resource { what: String, achieved: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    pub fn is_domain(&self) -> bool {
        matches!(self, Error::Domain(_) | Error::TermEvaluation { .. })
    }

    pub fn is_resource(&self) -> bool {
        matches!(self, Error::Resource { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
