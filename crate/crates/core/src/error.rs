use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on the construction parameters does not hold.
    #[error("infeasible parameters: {0}")]
    Infeasible(String),

    #[error("baseline t = {t} is off the feasible grid; nearest feasible points: {nearest}")]
    OffGrid { t: String, nearest: String },

    #[error("PDA row {row} has {found} stars, expected {expected}")]
    RowStarCount {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("PDA does not satisfy condition {0}")]
    ConditionFailed(&'static str),

    #[error("usage: {0}")]
    Usage(String),

    /// Internal invariant of a construction broke. Always a bug.
    #[error("construction bug: {0}")]
    Construction(String),

    #[error("memory constraint violated at node {node}: {found} packets cached, expected {expected}")]
    MemoryConstraint {
        node: usize,
        expected: String,
        found: usize,
    },

    #[error("user {user} cannot decode: {reason}")]
    Decode { user: usize, reason: String },

    #[error("MDS decode needs {needed} shares, got {got}")]
    NotEnoughShares { needed: usize, got: usize },

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
