//! Minimal dense/convolution numeric core with reverse-mode gradients,
//! the bounding-box-conditioned gaze regressor, Adam, parameter
//! serialization, and finite-difference gradient verification.
//!
//! Training and inference run in `f32`; gradient checks run the same code
//! in `f64`.

pub mod adam;
pub mod gazenet;
pub mod gradcheck;
pub mod ops;
pub mod params_io;
pub mod tensor;
pub mod train;

pub use adam::{adam_step, AdamHyper, AdamState};
pub use gazenet::{GazeNet, GazeNetConfig, GazeNetParams, Gradients};
pub use gradcheck::{grad_check, GradCheckReport};
pub use ops::mse_loss;
pub use params_io::{load_params, save_params};
pub use tensor::{Scalar, Tensor};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum NnError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("empty dataset split")]
    EmptyDataset,
    #[error("bad magic bytes (not a GZNT parameter file)")]
    BadMagic,
    #[error("unsupported format version {0}")]
    VersionMismatch(u16),
    #[error("truncated parameter file")]
    Truncated,
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}
