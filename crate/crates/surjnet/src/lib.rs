//! A small convolutional regressor fitted to surjectivity labels.
//!
//! Each `(v, u, t)` triple is read as a `3 x w` matrix, standardized column by
//! column, and fed through conv(2x2) -> ReLU -> flatten -> dense -> ReLU ->
//! dense. Gradients are computed by hand and training uses Adam.

pub mod adam;
pub mod checkpoint;
pub mod features;
pub mod network;
pub mod train;

use thiserror::Error;

pub use adam::{Adam, AdamConfig};
pub use checkpoint::{load_model, read_model, save_model, write_history, write_model};
pub use features::{scale_features, ScaledSample, TargetScaler};
pub use network::{Architecture, NetworkParams};
pub use train::{evaluate, mean_prediction, predict, split, train, Model, TrainConfig, Training};

#[derive(Debug, Error)]
pub enum NetError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("need at least {need} records, got {got}")]
    TooFew { need: usize, got: usize },
    #[error("empty input")]
    Empty,
    #[error("invalid config: {0}")]
    Config(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("bad checkpoint: {0}")]
    Format(String),
}
