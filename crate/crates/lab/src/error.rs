use std::io;

#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Model(#[from] peelab_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("edge list line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

impl LabError {
    /// 2 for bad input, 1 for everything that fails at run time.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Usage(_) | LabError::Model(peelab_core::Error::Domain { .. }) => 2,
            _ => 1,
        }
    }
}

pub type LabResult<T> = Result<T, LabError>;
