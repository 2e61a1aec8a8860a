use thiserror::Error;

use crate::space::SpaceKind;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid rational {literal:?} in `{field}`: {reason}")]
    ParseRational {
        field: String,
        literal: String,
        reason: String,
    },

    #[error("point {point} does not belong to the {space} space")]
    PointOutsideSpace { point: String, space: SpaceKind },

    #[error("space mismatch: {left} vs {right}")]
    SpaceMismatch { left: SpaceKind, right: SpaceKind },

    #[error("support size {size} exceeds the budget of {cap} points")]
    SupportBudgetExceeded { size: usize, cap: usize },

    #[error("invalid metric: {0}")]
    InvalidMetric(String),

    #[error("invalid kernel row for point {point}: {reason}")]
    InvalidKernelRow { point: String, reason: String },

    #[error("Fortet-Mourier LP supports at most {cap} points, got {size}")]
    FmSupportTooLarge { size: usize, cap: usize },

    #[error("grid oracle supports at most 4 points, got {0}")]
    OracleSupportTooLarge(usize),

    #[error("LP solver failure: {0}")]
    Lp(String),

    #[error("delta ({delta}) must be strictly below epsilon ({epsilon})")]
    DeltaNotBelowEpsilon { delta: f64, epsilon: f64 },

    #[error("{0} is not a dyadic rational")]
    NotDyadic(String),

    #[error("SVC depth {0} outside the supported range 1..=30")]
    DepthOutOfRange(u32),

    #[error("no removed interval available at level {0}")]
    NoRemovedInterval(u32),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
