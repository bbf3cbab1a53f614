use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("vector is not in the span of the subspace basis")]
    NotInSubspace,

    #[error("dual unit vector of the zero vector is undefined")]
    ZeroVector,

    #[error("functional is not in the span of the defining functionals")]
    NotInSpan,

    #[error("unit ball is unbounded: {0}")]
    UnboundedBall(String),

    #[error("norm cannot be evaluated exactly: {0}")]
    Inexact(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("enumeration of {needed} subsets exceeds budget {budget} and no sampling seed was given")]
    BudgetExceeded { needed: u128, budget: u64 },

    #[error("rank {rank} exceeds requested dimension {d}")]
    RankTooLarge { rank: usize, d: usize },

    #[error("no equitable {k}-coloring possible: {reason}")]
    Coloring { k: usize, reason: String },

    #[error("internal invariant violated: {0}")]
    InvariantBreach(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
