use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("penalty must exceed 1 for constrained problems, got {0}")]
    InvalidPenalty(f64),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("instance with {n} nodes exceeds the enumeration limit of {max}")]
    TooLarge { n: usize, max: usize },

    #[error("training diverged at epoch {epoch}: loss is not finite")]
    Diverged { epoch: usize },

    #[error("cannot train: {0}")]
    CannotTrain(&'static str),

    #[error("starting assignment is infeasible")]
    Infeasible,

    #[error("set function must vanish on the empty set, got {0}")]
    NotNormalized(f64),
}
