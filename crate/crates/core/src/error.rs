use thiserror::Error;

/// Errors raised anywhere in the laboratory.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operation not supported for {0} representation")]
    UnsupportedRepresentation(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension limit exceeded: {what} needs {requested}, limit is {limit}")]
    DimensionLimit {
        what: &'static str,
        requested: usize,
        limit: usize,
    },

    #[error("iterative solver did not converge: {0}")]
    NotConverged(String),

    #[error("spectral gap is not positive ({0}); the reverse-operator bound is vacuous")]
    Gapless(f64),

    #[error("|<Omega|Gamma|Omega>| = {overlap:e} is below the floor {floor:e}; bound is vacuous")]
    VacuousBound { overlap: f64, floor: f64 },

    #[error("ground state is {0}-fold degenerate; a unique ground state is required")]
    DegenerateGroundState(usize),

    #[error("operator is not a projector on the state (idempotence defect {0:e})")]
    NotAProjector(f64),

    #[error("degenerate decomposition: alpha = {alpha:e}, beta = {beta:e}")]
    DegenerateDecomposition { alpha: f64, beta: f64 },

    #[error("planar toric code has no logical loop operators")]
    NoLogical,

    #[error("vector norm {0:e} exceeded the overflow guard during the Chebyshev recurrence")]
    RangeOverflow(f64),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("{at}: {source}")]
    Experiment {
        at: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
