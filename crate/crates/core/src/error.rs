use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("state is not normalised (norm = {norm})")]
    NotNormalized { norm: f64 },

    #[error("field has zero total mass")]
    ZeroMass,

    #[error("QR iteration failed to converge for eigenvalue {index} after {iterations} iterations")]
    NoConvergence { index: usize, iterations: usize },

    #[error("norm-operator scaling broke down at time step {step}")]
    ScalingBreakdown { step: usize },

    #[error(
        "target area {target} unreachable: achievable range [{min_area}, {max_area}], \
         last bracket [{lo}, {hi}]"
    )]
    UnreachableTarget {
        target: f64,
        min_area: f64,
        max_area: f64,
        lo: f64,
        hi: f64,
    },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("malformed file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by bad inputs rather than numerical breakdown.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter(_) | Error::DimensionMismatch { .. } | Error::Format(_)
        )
    }
}
