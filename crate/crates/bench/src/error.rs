use std::path::PathBuf;

use gdfl_core::Error as CoreError;

/// Process exit status for each class of failure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitCode {
    Success = 0,
    Usage = 1,
    Data = 2,
    Divergence = 3,
}

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("instance file not found: {}", .0.display())]
    MissingInstance(PathBuf),
    #[error("{}: {source}", path.display())]
    BadFile {
        path: PathBuf,
        #[source]
        source: CoreError,
    },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("{0}")]
    Format(String),
}

impl BenchError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            BenchError::Usage(_) => ExitCode::Usage,
            BenchError::Core(CoreError::Diverged { .. }) => ExitCode::Divergence,
            BenchError::Core(CoreError::InvalidParameters(_) | CoreError::InvalidPenalty(_)) => ExitCode::Usage,
            _ => ExitCode::Data,
        }
    }
}

impl From<csv::Error> for BenchError {
    fn from(e: csv::Error) -> Self {
        BenchError::Format(e.to_string())
    }
}

impl From<serde_json::Error> for BenchError {
    fn from(e: serde_json::Error) -> Self {
        BenchError::Format(e.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn divergence_maps_to_its_own_exit_code() {
        assert_eq!(BenchError::Core(CoreError::Diverged { epoch: 3 }).exit_code(), ExitCode::Divergence);
        assert_eq!(BenchError::Core(CoreError::Infeasible).exit_code(), ExitCode::Data);
        assert_eq!(BenchError::Usage("x".into()).exit_code(), ExitCode::Usage);
        assert_eq!(ExitCode::Success as u8, 0);
    }
}
