use thiserror::Error;

/// Errors produced anywhere in the optimizer stack.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("point {site:?} lies outside the feasible set")]
    InfeasiblePoint { site: Vec<f64> },

    #[error("objective {objective} returned a non-finite value at {site:?}")]
    ObjectiveFailure { objective: usize, site: Vec<f64> },

    #[error("expensive evaluation budget of {budget} exhausted")]
    BudgetExhausted { budget: usize },

    #[error("matrix is numerically singular")]
    SingularMatrix,

    #[error("linear program failed: {0}")]
    LpFailure(String),

    #[error("could not complete a nondegenerate interpolation set")]
    DegenerateGeometry,

    #[error("poisedness repair did not converge within {iterations} swaps")]
    PoisednessRepairStalled { iterations: usize },

    #[error("direction has zero norm")]
    ZeroDirection,

    #[error("backtracking failed after {0} reductions")]
    BacktrackExhausted(usize),

    #[error("predicted reduction {0:e} is not positive for a nonzero step")]
    DegenerateDenominator(f64),

    #[error("unsupported dimension: {0}")]
    UnsupportedDimension(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("malformed data: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(err: csv::Error) -> Self {
        Error::Parse(err.to_string())
    }
}
