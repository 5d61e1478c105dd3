use thiserror::Error;

/// Errors raised by the solvers, generators and file formats.
#[derive(Debug, Error)]
pub enum PgwError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("marginal mismatch: {0}")]
    MarginalMismatch(String),

    #[error("parameter spaces differ: {0}")]
    ParameterMismatch(String),

    #[error("non-finite objective encountered")]
    NonFinite,

    #[error("linear program did not terminate after {0} pivots")]
    PivotLimit(usize),

    #[error("infeasible transport problem: {0}")]
    Infeasible(String),

    #[error("graph is disconnected")]
    Disconnected,

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, PgwError>;
