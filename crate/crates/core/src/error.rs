use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("time {t} lies outside the horizon [0, {horizon}]")]
    OutOfHorizon { t: f64, horizon: f64 },

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("partition ends at {partition} but the family horizon is {family}")]
    HorizonMismatch { partition: f64, family: f64 },

    #[error("non-finite entry at index {0}")]
    NonFinite(usize),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dense operator norm unavailable for dimension {0} (limit {limit})", limit = crate::linalg::DENSE_LIMIT)]
    DenseUnavailable(usize),

    #[error("variation refinement did not settle after {levels} doublings (last values {previous}, {last})")]
    RefinementFailure { levels: u32, previous: f64, last: f64 },

    #[error("tolerance {tol} not reached within {levels} levels")]
    ConvergenceFailure {
        tol: f64,
        levels: u32,
        cauchy_errors: Vec<f64>,
    },

    #[error("ODE integration failed: {0}")]
    Integration(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("I/O error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
