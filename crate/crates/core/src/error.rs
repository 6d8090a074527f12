use thiserror::Error;

/// Errors produced by the toolkit.
///
/// The command-line front end maps these onto its exit codes: invalid input
/// (2), an internal invariant violation (1), an exhausted work budget (4).
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported mode: {0}")]
    UnsupportedMode(String),

    #[error("work budget exhausted after {spent} operations")]
    BudgetExhausted { spent: u64 },

    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error("construction failed: all {} trials rejected", .0.rejected.len())]
    ConstructionFailed(Box<crate::construction::ConstructionFailure>),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

macro_rules! invalid {
    ($($arg:tt)*) => {
        $crate::error::Error::InvalidArgument(format!($($arg)*))
    };
}
pub(crate) use invalid;
