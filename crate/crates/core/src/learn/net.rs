//! Feed-forward predictor of windowed speed scaling.
//!
//! The network maps the 12 scene features (robot position, human position,
//! robot goal, human goal mean) through `hidden_count` blocks of
//! Dense(64) → BatchNorm → ReLU, then through a Dense + softmax head of
//! width `k` — one logical channel per staircase plateau — and finally
//! through a linear readout of the softmax probabilities. The readout makes
//! the prediction an affine blend of at most `k` learnt levels, which is
//! exactly the right capacity when the target is a windowed average over a
//! `k`-level staircase.
//!
//! Everything is implemented directly on `ndarray` so that training,
//! inference and the finite-difference gradient checker share one code
//! path. Batch normalisation follows the usual convention: batch statistics
//! (biased variance) during training, exponentially smoothed running
//! statistics during inference. `forward_train` is pure — running
//! statistics only move when [`ScalingPredictor::apply_bn_update`] is
//! called — which keeps finite-difference probes of the training-mode loss
//! honest.

use crate::error::{Error, Result};
use crate::geom::Vec3;
use crate::plan::ScalingOracle;
use crate::sim::features_of;
use ndarray::{Array1, Array2, Axis};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

/// Number of input features.
pub const INPUT_DIM: usize = 12;
/// Width of every hidden layer.
pub const HIDDEN_WIDTH: usize = 64;
/// Epsilon inside the batch-norm standardisation.
pub const BN_EPS: f64 = 1e-5;
/// Smoothing of the running statistics: `running = M * running + (1 - M) * batch`.
pub const BN_MOMENTUM: f64 = 0.9;

// ──────────────────────────────────────────────────────────────────────────
// Layers
// ──────────────────────────────────────────────────────────────────────────

/// Fully connected layer; `w` has shape `[in, out]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseLayer {
    pub w: Array2<f64>,
    pub b: Array1<f64>,
}

impl DenseLayer {
    fn he(input: usize, output: usize, rng: &mut ChaCha8Rng) -> Self {
        let scale = (2.0 / input as f64).sqrt();
        Self::gaussian(input, output, scale, rng)
    }

    fn xavier(input: usize, output: usize, rng: &mut ChaCha8Rng) -> Self {
        let scale = (2.0 / (input + output) as f64).sqrt();
        Self::gaussian(input, output, scale, rng)
    }

    fn gaussian(input: usize, output: usize, scale: f64, rng: &mut ChaCha8Rng) -> Self {
        let w = Array2::from_shape_simple_fn((input, output), || {
            let z: f64 = rng.sample(StandardNormal);
            z * scale
        });
        DenseLayer { w, b: Array1::zeros(output) }
    }

    fn forward(&self, input: &Array2<f64>) -> Array2<f64> {
        input.dot(&self.w) + &self.b
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchNorm {
    pub gamma: Array1<f64>,
    pub beta: Array1<f64>,
    pub running_mean: Array1<f64>,
    pub running_var: Array1<f64>,
}

impl BatchNorm {
    fn new(width: usize) -> Self {
        BatchNorm {
            gamma: Array1::ones(width),
            beta: Array1::zeros(width),
            running_mean: Array1::zeros(width),
            running_var: Array1::ones(width),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HiddenBlock {
    pub dense: DenseLayer,
    pub bn: BatchNorm,
}

// ──────────────────────────────────────────────────────────────────────────
// Model
// ──────────────────────────────────────────────────────────────────────────

/// The trained predictor, including the feature standardisation captured
/// from its training split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingPredictor {
    /// Width of the softmax head.
    pub k: usize,
    pub feat_mean: Array1<f64>,
    pub feat_std: Array1<f64>,
    pub hidden: Vec<HiddenBlock>,
    pub softmax_head: DenseLayer,
    pub output: DenseLayer,
}

/// Hidden depth used when none is requested: five blocks for small heads,
/// six once the head grows beyond five channels.
pub fn default_hidden_count(k: usize) -> usize {
    if k <= 5 {
        5
    } else {
        6
    }
}

/// Intermediate values of one training-mode forward pass, retained for
/// backpropagation.
pub struct ForwardCache {
    pub blocks: Vec<BlockCache>,
    pub hidden_out: Array2<f64>,
    pub probs: Array2<f64>,
    pub y_hat: Array1<f64>,
}

pub struct BlockCache {
    input: Array2<f64>,
    mean: Array1<f64>,
    var: Array1<f64>,
    inv_std: Array1<f64>,
    xhat: Array2<f64>,
    pre_relu: Array2<f64>,
}

/// Parameter gradients, shaped exactly like the trainable parameters.
pub struct Gradients {
    pub blocks: Vec<(Array2<f64>, Array1<f64>, Array1<f64>, Array1<f64>)>,
    pub softmax_head: (Array2<f64>, Array1<f64>),
    pub output: (Array2<f64>, Array1<f64>),
}

impl Gradients {
    /// Flat views in the same order as
    /// [`ScalingPredictor::param_slices_mut`].
    pub fn flat_slices(&self) -> Vec<&[f64]> {
        let mut v = Vec::new();
        for (w, b, gamma, beta) in &self.blocks {
            v.push(w.as_slice().unwrap());
            v.push(b.as_slice().unwrap());
            v.push(gamma.as_slice().unwrap());
            v.push(beta.as_slice().unwrap());
        }
        v.push(self.softmax_head.0.as_slice().unwrap());
        v.push(self.softmax_head.1.as_slice().unwrap());
        v.push(self.output.0.as_slice().unwrap());
        v.push(self.output.1.as_slice().unwrap());
        v
    }
}

fn softmax_rows(scores: &Array2<f64>) -> Array2<f64> {
    let mut p = scores.clone();
    for mut row in p.axis_iter_mut(Axis(0)) {
        let max = row.fold(f64::NEG_INFINITY, |a, &b| a.max(b));
        row.mapv_inplace(|v| (v - max).exp());
        let sum = row.sum();
        row.mapv_inplace(|v| v / sum);
    }
    p
}

fn relu(a: &Array2<f64>) -> Array2<f64> {
    a.mapv(|v| v.max(0.0))
}

impl ScalingPredictor {
    /// Fresh network with He-initialised hidden blocks and Xavier heads.
    /// Feature standardisation starts as the identity; call
    /// [`set_standardization`](Self::set_standardization) once the training
    /// statistics are known.
    pub fn init(k: usize, hidden_count: usize, seed: u64) -> Self {
        assert!(k >= 1, "softmax head needs at least one channel");
        assert!(hidden_count >= 1, "need at least one hidden block");
        use rand::SeedableRng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut hidden = Vec::with_capacity(hidden_count);
        let mut input = INPUT_DIM;
        for _ in 0..hidden_count {
            hidden.push(HiddenBlock {
                dense: DenseLayer::he(input, HIDDEN_WIDTH, &mut rng),
                bn: BatchNorm::new(HIDDEN_WIDTH),
            });
            input = HIDDEN_WIDTH;
        }
        ScalingPredictor {
            k,
            feat_mean: Array1::zeros(INPUT_DIM),
            feat_std: Array1::ones(INPUT_DIM),
            hidden,
            softmax_head: DenseLayer::xavier(HIDDEN_WIDTH, k, &mut rng),
            output: DenseLayer::xavier(k, 1, &mut rng),
        }
    }

    pub fn set_standardization(&mut self, mean: Array1<f64>, std: Array1<f64>) {
        assert_eq!(mean.len(), INPUT_DIM);
        assert_eq!(std.len(), INPUT_DIM);
        assert!(std.iter().all(|&s| s > 0.0), "standard deviations must be positive");
        self.feat_mean = mean;
        self.feat_std = std;
    }

    /// Total number of trainable parameters.
    pub fn param_count(&self) -> usize {
        let mut n = 0;
        let mut input = INPUT_DIM;
        for _ in &self.hidden {
            n += input * HIDDEN_WIDTH + HIDDEN_WIDTH; // dense
            n += 2 * HIDDEN_WIDTH; // gamma, beta
            input = HIDDEN_WIDTH;
        }
        n += HIDDEN_WIDTH * self.k + self.k; // softmax head
        n += self.k + 1; // readout
        n
    }

    /// Mutable flat views of every trainable parameter, in a fixed order
    /// (per block: dense w, dense b, gamma, beta; then head w, b; then
    /// readout w, b). Running statistics are not trainable and are not
    /// included.
    pub fn param_slices_mut(&mut self) -> Vec<&mut [f64]> {
        let mut v = Vec::new();
        for blk in &mut self.hidden {
            v.push(blk.dense.w.as_slice_mut().unwrap());
            v.push(blk.dense.b.as_slice_mut().unwrap());
            v.push(blk.bn.gamma.as_slice_mut().unwrap());
            v.push(blk.bn.beta.as_slice_mut().unwrap());
        }
        v.push(self.softmax_head.w.as_slice_mut().unwrap());
        v.push(self.softmax_head.b.as_slice_mut().unwrap());
        v.push(self.output.w.as_slice_mut().unwrap());
        v.push(self.output.b.as_slice_mut().unwrap());
        v
    }

    /// Training-mode forward pass over a standardised batch `[n, 12]`.
    /// Pure: running statistics are not touched.
    pub fn forward_train(&self, x_std: &Array2<f64>) -> ForwardCache {
        let n = x_std.nrows();
        assert!(n >= 2, "batch normalisation needs at least two rows");
        let mut blocks = Vec::with_capacity(self.hidden.len());
        let mut activ = x_std.clone();
        for blk in &self.hidden {
            let z = blk.dense.forward(&activ);
            let mean = z.mean_axis(Axis(0)).unwrap();
            let centered = &z - &mean;
            let var = centered.mapv(|v| v * v).mean_axis(Axis(0)).unwrap();
            let inv_std = var.mapv(|v| 1.0 / (v + BN_EPS).sqrt());
            let xhat = &centered * &inv_std;
            let pre_relu = &xhat * &blk.bn.gamma + &blk.bn.beta;
            let out = relu(&pre_relu);
            blocks.push(BlockCache { input: activ, mean, var, inv_std, xhat, pre_relu });
            activ = out;
        }
        let scores = self.softmax_head.forward(&activ);
        let probs = softmax_rows(&scores);
        let y_hat = self.output.forward(&probs).index_axis(Axis(1), 0).to_owned();
        ForwardCache { blocks, hidden_out: activ, probs, y_hat }
    }

    /// Fold the batch statistics of a forward pass into the running
    /// statistics.
    pub fn apply_bn_update(&mut self, cache: &ForwardCache) {
        for (blk, bc) in self.hidden.iter_mut().zip(&cache.blocks) {
            blk.bn.running_mean =
                &blk.bn.running_mean * BN_MOMENTUM + &(&bc.mean * (1.0 - BN_MOMENTUM));
            blk.bn.running_var =
                &blk.bn.running_var * BN_MOMENTUM + &(&bc.var * (1.0 - BN_MOMENTUM));
        }
    }

    /// Inference-mode forward pass over a standardised batch `[n, 12]`,
    /// using running statistics.
    pub fn forward_eval(&self, x_std: &Array2<f64>) -> Array1<f64> {
        let mut activ = x_std.clone();
        for blk in &self.hidden {
            let z = blk.dense.forward(&activ);
            let inv_std = blk.bn.running_var.mapv(|v| 1.0 / (v + BN_EPS).sqrt());
            let xhat = (&z - &blk.bn.running_mean) * &inv_std;
            let pre = &xhat * &blk.bn.gamma + &blk.bn.beta;
            activ = relu(&pre);
        }
        let probs = softmax_rows(&self.softmax_head.forward(&activ));
        self.output.forward(&probs).index_axis(Axis(1), 0).to_owned()
    }

    /// Backpropagate `d_y_hat` (dL/dŷ, one entry per batch row) through the
    /// cached forward pass.
    pub fn backward(&self, cache: &ForwardCache, d_y_hat: &Array1<f64>) -> Gradients {
        let d_col = d_y_hat.view().insert_axis(Axis(1)); // [n, 1]

        // Readout: y = P w + b.
        let d_out_w = cache.probs.t().dot(&d_col); // [k, 1]
        let d_out_b = Array1::from_elem(1, d_y_hat.sum());
        let d_probs = d_col.dot(&self.output.w.t()); // [n, k]

        // Softmax: dS = P ⊙ (dP − rowsum(dP ⊙ P)).
        let weighted = (&d_probs * &cache.probs).sum_axis(Axis(1)); // [n]
        let d_scores = &cache.probs * &(&d_probs - &weighted.insert_axis(Axis(1)));

        // Softmax head dense.
        let d_head_w = cache.hidden_out.t().dot(&d_scores);
        let d_head_b = d_scores.sum_axis(Axis(0));
        let mut d_activ = d_scores.dot(&self.softmax_head.w.t()); // [n, 64]

        // Hidden blocks, last to first.
        let mut block_grads: Vec<(Array2<f64>, Array1<f64>, Array1<f64>, Array1<f64>)> =
            Vec::with_capacity(self.hidden.len());
        for (blk, bc) in self.hidden.iter().zip(&cache.blocks).rev() {
            // ReLU.
            let mask = bc.pre_relu.mapv(|v| if v > 0.0 { 1.0 } else { 0.0 });
            let d_pre = &d_activ * &mask;
            // BatchNorm (batch statistics participate in the gradient).
            let d_gamma = (&d_pre * &bc.xhat).sum_axis(Axis(0));
            let d_beta = d_pre.sum_axis(Axis(0));
            let d_xhat = &d_pre * &blk.bn.gamma;
            let m = cache.y_hat.len() as f64;
            let sum_dxhat = d_xhat.sum_axis(Axis(0));
            let sum_dxhat_xhat = (&d_xhat * &bc.xhat).sum_axis(Axis(0));
            let d_z = (&(&d_xhat * m - &sum_dxhat) - &(&bc.xhat * &sum_dxhat_xhat))
                * &(bc.inv_std.mapv(|v| v / m));
            // Dense.
            let d_w = bc.input.t().dot(&d_z);
            let d_b = d_z.sum_axis(Axis(0));
            d_activ = d_z.dot(&blk.dense.w.t());
            block_grads.push((d_w, d_b, d_gamma, d_beta));
        }
        block_grads.reverse();

        Gradients {
            blocks: block_grads,
            softmax_head: (d_head_w, d_head_b),
            output: (d_out_w, d_out_b),
        }
    }

    /// Standardise a raw feature row with the stored statistics.
    pub fn standardize_row(&self, feats: &[f64; INPUT_DIM]) -> Array2<f64> {
        let mut row = Array2::zeros((1, INPUT_DIM));
        for (j, &f) in feats.iter().enumerate() {
            row[[0, j]] = (f - self.feat_mean[j]) / self.feat_std[j];
        }
        row
    }

    /// Predict the windowed mean scaling for one scene. Rejects non-finite
    /// inputs; the output is the raw network value (callers that need a
    /// reward clamp it to [0, 1]).
    pub fn predict(&self, x_r: Vec3, x_h: Vec3, g_r: Vec3, g_h_mu: Vec3) -> Result<f64> {
        let feats = features_of(x_r, x_h, g_r, g_h_mu);
        if feats.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidFeature);
        }
        let row = self.standardize_row(&feats);
        Ok(self.forward_eval(&row)[0])
    }
}

impl ScalingOracle for ScalingPredictor {
    /// Planner-facing prediction. Non-finite inputs (which a healthy
    /// simulation never produces) degrade to the pessimistic 0.0 rather
    /// than panicking inside a planner thread.
    fn predict_scaling(&self, x_r: Vec3, x_h: Vec3, g_r: Vec3, g_h_mu: Vec3) -> f64 {
        self.predict(x_r, x_h, g_r, g_h_mu).unwrap_or(0.0)
    }
}

// ──────────────────────────────────────────────────────────────────────────
// Loss and gradient checking
// ──────────────────────────────────────────────────────────────────────────

/// Mean squared error.
pub fn mse_loss(y_hat: &Array1<f64>, targets: &Array1<f64>) -> f64 {
    let diff = y_hat - targets;
    diff.mapv(|d| d * d).sum() / y_hat.len() as f64
}

/// MSE and its gradient with respect to the predictions.
pub fn mse_loss_grad(y_hat: &Array1<f64>, targets: &Array1<f64>) -> (f64, Array1<f64>) {
    let n = y_hat.len() as f64;
    let diff = y_hat - targets;
    let loss = diff.mapv(|d| d * d).sum() / n;
    (loss, diff * (2.0 / n))
}

/// Compare analytic gradients with central finite differences over every
/// trainable parameter and return the worst relative error,
/// `|ga − gn| / max(|ga| + |gn|, 1e-6)`. The loss is evaluated in training
/// mode (batch statistics), matching what the optimiser sees.
///
/// The 1e-6 denominator floor keeps the metric meaningful where the true
/// gradient is essentially zero: central differences carry an *absolute*
/// cancellation noise of roughly `|loss| · 1e-15 / (2h)`, so a pure ratio
/// would grade noise against noise for parameters whose gradient sits
/// below it. Any real defect distorts gradients at their own magnitude and
/// clears the floor by orders of magnitude.
///
/// Parameters whose ±h probes land on different ReLU activation patterns
/// are skipped: the loss is not differentiable across a kink, so the
/// central difference measures a slope mixture there rather than the
/// gradient. Such probes are a measure-zero hazard that random inits hit
/// roughly once per hundred thousand parameters.
pub fn gradient_check(
    model: &ScalingPredictor,
    x_std: &Array2<f64>,
    targets: &Array1<f64>,
) -> f64 {
    const H: f64 = 1e-5;
    let cache = model.forward_train(x_std);
    let (_, d_y) = mse_loss_grad(&cache.y_hat, targets);
    let grads = model.backward(&cache, &d_y);
    let analytic: Vec<Vec<f64>> = grads.flat_slices().iter().map(|s| s.to_vec()).collect();

    let mut probe = model.clone();
    let slice_count = analytic.len();
    let mut worst: f64 = 0.0;
    for s in 0..slice_count {
        for i in 0..analytic[s].len() {
            let original = probe.param_slices_mut()[s][i];
            probe.param_slices_mut()[s][i] = original + H;
            let up_cache = probe.forward_train(x_std);
            probe.param_slices_mut()[s][i] = original - H;
            let down_cache = probe.forward_train(x_std);
            probe.param_slices_mut()[s][i] = original;
            if relu_masks_differ(&up_cache, &down_cache) {
                continue;
            }
            let up = mse_loss(&up_cache.y_hat, targets);
            let down = mse_loss(&down_cache.y_hat, targets);
            let numeric = (up - down) / (2.0 * H);
            let ga = analytic[s][i];
            let rel = (ga - numeric).abs() / (ga.abs() + numeric.abs()).max(1e-6);
            worst = worst.max(rel);
        }
    }
    worst
}

/// True when any hidden unit switches its ReLU side between two forward
/// passes.
fn relu_masks_differ(a: &ForwardCache, b: &ForwardCache) -> bool {
    a.blocks.iter().zip(&b.blocks).any(|(ba, bb)| {
        ba.pre_relu
            .iter()
            .zip(bb.pre_relu.iter())
            .any(|(&za, &zb)| (za > 0.0) != (zb > 0.0))
    })
}
