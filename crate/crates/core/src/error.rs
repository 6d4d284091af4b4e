//! Shared error type for the library.

use thiserror::Error;

/// Errors surfaced by configuration, simulation, learning and planning code.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid config: {0}")]
    Config(String),

    /// A window average or decomposition was requested outside the sampled
    /// range of a trace.
    #[error("insufficient trace: window of {needed} samples starting at t={t_start} is not covered")]
    InsufficientTrace { t_start: f64, needed: usize },

    /// A trace sample did not match any staircase plateau value.
    #[error("off-staircase sample: {value} at t={t}")]
    OffStaircase { value: f64, t: f64 },

    /// A policy returned an action that is not currently available.
    #[error("illegal action: {0}")]
    IllegalAction(u32),

    /// No action is available in the current state.
    #[error("no actions available")]
    NoActions,

    #[error("insufficient data: {got} samples, need at least {need}")]
    InsufficientData { got: usize, need: usize },

    /// Non-finite value in a sample set handed to an estimator.
    #[error("invalid sample: non-finite value at index {0}")]
    InvalidSample(usize),

    #[error("no trainable windows")]
    NoTrainableWindows,

    #[error("empty split: {0}")]
    EmptySplit(&'static str),

    /// Non-finite value passed to a predictor.
    #[error("invalid feature: non-finite value in prediction input")]
    InvalidFeature,

    /// Training produced a non-finite loss. The most recent stable weights
    /// are carried along so callers can still persist them.
    #[error("training diverged at epoch {epoch}")]
    TrainingDiverged {
        epoch: usize,
        last_stable: Box<crate::learn::ScalingPredictor>,
    },

    #[error("model file error: {0}")]
    ModelFile(String),

    #[error("log file error: {0}")]
    LogFile(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
