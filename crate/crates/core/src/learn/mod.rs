//! Learning: plateau-count estimation and the scaling predictor.

pub mod kmeans;
pub mod model_io;
pub mod net;
pub mod train;

pub use kmeans::{estimate_k, KEstimate};
pub use model_io::{load_model, save_model, MODEL_FORMAT_VERSION};
pub use net::{
    default_hidden_count, gradient_check, mse_loss, mse_loss_grad, ScalingPredictor,
    HIDDEN_WIDTH, INPUT_DIM,
};
pub use train::{
    evaluate_mse, predictions, train, Dataset, EpochStats, TrainConfig, TrainOutcome,
};
