use thiserror::Error;

/// Errors raised by the solvers and their numerical kernels.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum MrcError {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Evaluation at (or numerically on top of) a singular point.
    #[error("singularity: {0}")]
    Singularity(String),

    #[error("unsupported order {order} (limit {limit})")]
    UnsupportedOrder { order: i64, limit: i64 },

    /// Inconsistent or unusable configuration parameters.
    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("sampling error: {0}")]
    Sampling(String),

    #[error("numerical error: {0}")]
    Numerical(String),

    /// A diffraction order grazes the grating (`l_j^2 == k^2`).
    #[error("Wood anomaly at diffraction order {order}")]
    WoodAnomaly { order: i64 },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, MrcError>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(MrcError::Domain(msg.into()))
}

pub(crate) fn config<T>(msg: impl Into<String>) -> Result<T> {
    Err(MrcError::Configuration(msg.into()))
}
