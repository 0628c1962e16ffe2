//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoreError {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid operand shape: {0}")]
    ShapeMismatch(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("data error: {0}")]
    Data(String),

    #[error("training aborted: loss became NaN at epoch {epoch} (learning rate {learning_rate})")]
    NanLoss { epoch: usize, learning_rate: f64 },

    #[error("checkpoint error: {0}")]
    Checkpoint(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
