use std::path::PathBuf;

use sgm::SgmError;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, BenchError>;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Solver(#[from] SgmError),

    #[error("invalid experiment spec: {0}")]
    Spec(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {message}", path.display())]
    Format { path: PathBuf, message: String },
}

impl BenchError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        BenchError::Io {
            path: path.into(),
            source,
        }
    }

    /// 2 for I/O and output format failures, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            BenchError::Io { .. } | BenchError::Format { .. } => 2,
            BenchError::Solver(_) | BenchError::Spec(_) => 1,
        }
    }
}
