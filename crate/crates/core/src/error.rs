use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Domain(String),

    #[error("grid error: {0}")]
    Grid(String),

    #[error("value {x} lies outside the grid range [{min}, {max}]; widen --x-range")]
    OutOfRange { x: f64, min: f64, max: f64 },

    #[error("data error: {0}")]
    Data(String),

    #[error("no convergence after {iterations} iterations (score norm {score_norm:.3e})")]
    NonConvergence { iterations: usize, score_norm: f64, trace: Vec<crate::likelihood::TraceRow> },

    #[error("singular Hessian; flat direction {eigenvector:?}")]
    SingularHessian { eigenvector: Vec<f64> },

    #[error("families are not nested: {0}")]
    NotNested(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
