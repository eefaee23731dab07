use thiserror::Error;

use crate::pattern::MeetingEvent;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid distribution parameters: {0}")]
    InvalidSpec(String),

    #[error("quadrature did not converge: {what} (last relative change {rel_change:e})")]
    NonConvergent { what: &'static str, rel_change: f64 },

    #[error("sensor index {index} out of range for n = {n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("malformed meeting pattern: {0}")]
    MalformedPattern(String),

    #[error("n = {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("meeting pattern is not independent: {event} shares {shared:?}")]
    PatternNotIndependent { event: MeetingEvent, shared: Vec<usize> },

    #[error("assignment covers {got} sensors but the pattern has {n}")]
    AssignmentIncomplete { got: usize, n: usize },

    #[error("shape mismatch: {0}")]
    MismatchedShapes(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("density is not normalized (integral {0})")]
    NotNormalized(f64),

    #[error("density is not strictly positive at grid point {0}")]
    NonPositiveDensity(usize),

    #[error("covariance matrix is not positive definite")]
    NonPositiveDefinite,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
