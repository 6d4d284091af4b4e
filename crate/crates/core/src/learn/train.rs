//! Supervised training of the scaling predictor.
//!
//! Logged windows are split 80/20 into train and test sets *by episode*, so
//! that temporally adjacent (heavily correlated) samples never land on both
//! sides of the split. Features are standardised with statistics taken from
//! the training split only. Optimisation is plain Adam on mean squared
//! error with early stopping on the test loss and best-weights restore.

use crate::error::{Error, Result};
use crate::learn::net::{
    default_hidden_count, mse_loss_grad, ScalingPredictor, INPUT_DIM,
};
use crate::sim::TrainingRow;
use ndarray::{s, Array1, Array2, Axis};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Fraction of episodes reserved for the test split.
pub const TEST_FRACTION: f64 = 0.2;

/// Standard deviations below this are treated as constant features and
/// divide by one instead.
pub const STD_FLOOR: f64 = 1e-12;

// ──────────────────────────────────────────────────────────────────────────
// Dataset
// ──────────────────────────────────────────────────────────────────────────

/// Standardised train/test matrices plus the statistics that produced them.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub train_x: Array2<f64>,
    pub train_y: Array1<f64>,
    pub test_x: Array2<f64>,
    pub test_y: Array1<f64>,
    pub feat_mean: Array1<f64>,
    pub feat_std: Array1<f64>,
    pub train_episodes: Vec<u64>,
    pub test_episodes: Vec<u64>,
    /// Raw rows behind `test_x`/`test_y`, in matrix order, for reporting.
    pub test_rows: Vec<TrainingRow>,
}

impl Dataset {
    /// Split `rows` by episode (seeded shuffle of the episode ids, 20% to
    /// test, at least one episode on each side) and standardise features
    /// with training-split statistics.
    pub fn from_rows(rows: &[TrainingRow], seed: u64) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::NoTrainableWindows);
        }
        let mut episodes: Vec<u64> = rows.iter().map(|r| r.episode).collect();
        episodes.sort_unstable();
        episodes.dedup();
        if episodes.len() < 2 {
            return Err(Error::EmptySplit("need at least two episodes to split"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        episodes.shuffle(&mut rng);
        let test_count =
            ((episodes.len() as f64 * TEST_FRACTION).round() as usize).clamp(1, episodes.len() - 1);
        let mut test_episodes: Vec<u64> = episodes[..test_count].to_vec();
        let mut train_episodes: Vec<u64> = episodes[test_count..].to_vec();
        test_episodes.sort_unstable();
        train_episodes.sort_unstable();

        let in_test = |e: u64| test_episodes.binary_search(&e).is_ok();
        let train_rows: Vec<&TrainingRow> = rows.iter().filter(|r| !in_test(r.episode)).collect();
        let test_rows_ref: Vec<&TrainingRow> = rows.iter().filter(|r| in_test(r.episode)).collect();
        if train_rows.is_empty() {
            return Err(Error::EmptySplit("train"));
        }
        if test_rows_ref.is_empty() {
            return Err(Error::EmptySplit("test"));
        }

        // Standardisation statistics from the training split only.
        let n = train_rows.len() as f64;
        let mut mean = Array1::<f64>::zeros(INPUT_DIM);
        for r in &train_rows {
            for j in 0..INPUT_DIM {
                mean[j] += r.features[j];
            }
        }
        mean.mapv_inplace(|m| m / n);
        let mut std = Array1::<f64>::zeros(INPUT_DIM);
        for r in &train_rows {
            for j in 0..INPUT_DIM {
                let d = r.features[j] - mean[j];
                std[j] += d * d;
            }
        }
        std.mapv_inplace(|v| {
            let s = (v / n).sqrt();
            if s < STD_FLOOR {
                1.0
            } else {
                s
            }
        });

        let fill = |subset: &[&TrainingRow]| {
            let mut x = Array2::<f64>::zeros((subset.len(), INPUT_DIM));
            let mut y = Array1::<f64>::zeros(subset.len());
            for (i, r) in subset.iter().enumerate() {
                for j in 0..INPUT_DIM {
                    x[[i, j]] = (r.features[j] - mean[j]) / std[j];
                }
                y[i] = r.target;
            }
            (x, y)
        };
        let (train_x, train_y) = fill(&train_rows);
        let (test_x, test_y) = fill(&test_rows_ref);

        Ok(Dataset {
            train_x,
            train_y,
            test_x,
            test_y,
            feat_mean: mean,
            feat_std: std,
            train_episodes,
            test_episodes,
            test_rows: test_rows_ref.into_iter().copied().collect(),
        })
    }
}

// ──────────────────────────────────────────────────────────────────────────
// Optimiser
// ──────────────────────────────────────────────────────────────────────────

struct Adam {
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
    lr: f64,
}

impl Adam {
    const BETA1: f64 = 0.9;
    const BETA2: f64 = 0.999;
    const EPS: f64 = 1e-8;

    fn new(param_count: usize, lr: f64) -> Self {
        Adam { m: vec![0.0; param_count], v: vec![0.0; param_count], t: 0, lr }
    }

    fn step(&mut self, params: &mut [&mut [f64]], grads: &[&[f64]]) {
        self.t += 1;
        let bc1 = 1.0 - Self::BETA1.powi(self.t);
        let bc2 = 1.0 - Self::BETA2.powi(self.t);
        let mut off = 0;
        for (p_slice, g_slice) in params.iter_mut().zip(grads) {
            for (p, &g) in p_slice.iter_mut().zip(g_slice.iter()) {
                let m = &mut self.m[off];
                let v = &mut self.v[off];
                off += 1;
                *m = Self::BETA1 * *m + (1.0 - Self::BETA1) * g;
                *v = Self::BETA2 * *v + (1.0 - Self::BETA2) * g * g;
                *p -= self.lr * (*m / bc1) / ((*v / bc2).sqrt() + Self::EPS);
            }
        }
    }
}

// ──────────────────────────────────────────────────────────────────────────
// Training loop
// ──────────────────────────────────────────────────────────────────────────

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub batch_size: usize,
    pub max_epochs: usize,
    /// Epochs without test-loss improvement tolerated before stopping.
    pub patience: usize,
    /// Improvement below this does not reset the patience counter.
    pub min_delta: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 1e-3,
            batch_size: 256,
            max_epochs: 200,
            patience: 20,
            min_delta: 1e-6,
            seed: 0,
        }
    }
}

/// Loss trajectory of one epoch. The train value is the mean of the
/// training-mode batch losses seen during the epoch; the test value is a
/// full inference-mode pass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochStats {
    pub epoch: usize,
    pub train_mse: f64,
    pub test_mse: f64,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub model: ScalingPredictor,
    pub history: Vec<EpochStats>,
    pub best_epoch: usize,
    pub best_test_mse: f64,
}

/// Inference-mode MSE over a standardised matrix, chunked to bound memory.
pub fn evaluate_mse(model: &ScalingPredictor, x: &Array2<f64>, y: &Array1<f64>) -> f64 {
    let preds = predictions(model, x);
    let diff = &preds - y;
    diff.mapv(|d| d * d).sum() / y.len().max(1) as f64
}

/// Inference-mode predictions over a standardised matrix.
pub fn predictions(model: &ScalingPredictor, x: &Array2<f64>) -> Array1<f64> {
    const CHUNK: usize = 4096;
    let n = x.nrows();
    let mut out = Array1::zeros(n);
    let mut start = 0;
    while start < n {
        let end = (start + CHUNK).min(n);
        let part = model.forward_eval(&x.slice(s![start..end, ..]).to_owned());
        out.slice_mut(s![start..end]).assign(&part);
        start = end;
    }
    out
}

/// Train a predictor with softmax width `k`. `hidden_count` defaults to
/// [`default_hidden_count`]. Returns the best-test-loss weights together
/// with the full loss history.
///
/// A non-finite loss aborts training with
/// [`Error::TrainingDiverged`], carrying the last weights that produced
/// finite losses so the caller can still persist them.
pub fn train(
    k: usize,
    hidden_count: Option<usize>,
    data: &Dataset,
    cfg: &TrainConfig,
) -> Result<TrainOutcome> {
    let hidden = hidden_count.unwrap_or_else(|| default_hidden_count(k));
    let mut model = ScalingPredictor::init(k, hidden, cfg.seed);
    model.set_standardization(data.feat_mean.clone(), data.feat_std.clone());

    let mut adam = Adam::new(model.param_count(), cfg.learning_rate);
    let mut shuffle_rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    shuffle_rng.set_stream(1);

    let n_train = data.train_x.nrows();
    let mut order: Vec<usize> = (0..n_train).collect();
    let mut history = Vec::new();
    let mut best_model = model.clone();
    let mut best_test = f64::INFINITY;
    let mut best_epoch = 0;
    let mut bad_epochs = 0;
    let mut last_stable = model.clone();

    for epoch in 1..=cfg.max_epochs {
        order.shuffle(&mut shuffle_rng);
        let mut batch_losses = 0.0;
        let mut batch_count = 0usize;
        for chunk in order.chunks(cfg.batch_size) {
            if chunk.len() < 2 {
                // Batch normalisation cannot standardise a single row;
                // drop the remainder batch.
                continue;
            }
            let bx = data.train_x.select(Axis(0), chunk);
            let by = Array1::from_iter(chunk.iter().map(|&i| data.train_y[i]));
            let cache = model.forward_train(&bx);
            let (loss, d_y) = mse_loss_grad(&cache.y_hat, &by);
            if !loss.is_finite() {
                return Err(Error::TrainingDiverged {
                    epoch,
                    last_stable: Box::new(last_stable),
                });
            }
            let grads = model.backward(&cache, &d_y);
            model.apply_bn_update(&cache);
            let grad_slices = grads.flat_slices();
            let mut param_slices = model.param_slices_mut();
            adam.step(&mut param_slices, &grad_slices);
            batch_losses += loss;
            batch_count += 1;
        }
        if batch_count == 0 {
            return Err(Error::EmptySplit("train"));
        }
        let train_mse = batch_losses / batch_count as f64;
        let test_mse = evaluate_mse(&model, &data.test_x, &data.test_y);
        if !test_mse.is_finite() {
            return Err(Error::TrainingDiverged { epoch, last_stable: Box::new(last_stable) });
        }
        last_stable = model.clone();
        history.push(EpochStats { epoch, train_mse, test_mse });

        if test_mse < best_test - cfg.min_delta {
            best_test = test_mse;
            best_model = model.clone();
            best_epoch = epoch;
            bad_epochs = 0;
        } else {
            bad_epochs += 1;
            if bad_epochs >= cfg.patience {
                break;
            }
        }
    }

    Ok(TrainOutcome { model: best_model, history, best_epoch, best_test_mse: best_test })
}
