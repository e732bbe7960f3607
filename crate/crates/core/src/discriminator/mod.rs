//! Two-way MLP over spectrum features, separating the seed dataset
//! (output 0) from web images (output 1), and the acceptance gate built on
//! its probabilities.
//!
//! The fully connected head defaults to widths 1000, 256 and 2 on top of the
//! flattened spectrum. Hidden layers use ReLU; the output layer is a
//! two-way softmax.

mod train;

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use rand::Rng;

pub use train::{accuracy, loss_and_gradient, train, Gradients, TrainConfig, TrainOutcome};

/// Hidden and output widths of the default head.
pub const DEFAULT_HEAD: [usize; 3] = [1000, 256, 2];

/// Lower bound applied to `p_web` before forming the odds ratio.
pub const ODDS_FLOOR: f64 = 1e-12;

/// Index of the dataset class in the output layer.
pub const DATASET: usize = 0;
/// Index of the web class in the output layer.
pub const WEB: usize = 1;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DiscriminatorError {
    #[error("invalid layer dims: {0}")]
    InvalidDims(&'static str),
    #[error("feature length {actual} does not match model input {expected}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("training needs at least one {0} sample")]
    EmptyClass(&'static str),
    #[error("loss became non-finite during epoch {epoch}")]
    NonFiniteLoss { epoch: usize },
    #[error("invalid training config: {0}")]
    InvalidConfig(&'static str),
}

/// Dense ReLU network with a two-way softmax head.
///
/// `weights[l]` is row-major with shape `layer_dims[l] x layer_dims[l + 1]`
/// (input index major), `biases[l]` has length `layer_dims[l + 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpModel {
    layer_dims: Vec<usize>,
    weights: Vec<Vec<f64>>,
    biases: Vec<Vec<f64>>,
}

impl MlpModel {
    /// Glorot-uniform weights in `+-sqrt(6 / (fan_in + fan_out))`, zero
    /// biases. Deterministic in `seed`.
    pub fn init(layer_dims: &[usize], seed: u64) -> Result<Self, DiscriminatorError> {
        validate_dims(layer_dims)?;
        let mut rng = crate::rng::seeded(seed);
        let weights = layer_dims
            .windows(2)
            .map(|w| {
                let limit = libm::sqrt(6.0 / (w[0] + w[1]) as f64);
                (0..w[0] * w[1])
                    .map(|_| rng.gen_range(-limit..=limit))
                    .collect()
            })
            .collect();
        let biases = layer_dims[1..].iter().map(|&n| vec![0.0; n]).collect();
        Ok(Self {
            layer_dims: layer_dims.to_vec(),
            weights,
            biases,
        })
    }

    /// Same shapes as `init`, every parameter zero.
    pub fn zeros(layer_dims: &[usize]) -> Result<Self, DiscriminatorError> {
        validate_dims(layer_dims)?;
        Ok(Self {
            layer_dims: layer_dims.to_vec(),
            weights: layer_dims.windows(2).map(|w| vec![0.0; w[0] * w[1]]).collect(),
            biases: layer_dims[1..].iter().map(|&n| vec![0.0; n]).collect(),
        })
    }

    /// Rebuilds a model from stored parameters, checking every shape.
    pub fn from_parts(
        layer_dims: Vec<usize>,
        weights: Vec<Vec<f64>>,
        biases: Vec<Vec<f64>>,
    ) -> Result<Self, DiscriminatorError> {
        validate_dims(&layer_dims)?;
        let layers = layer_dims.len() - 1;
        if weights.len() != layers || biases.len() != layers {
            return Err(DiscriminatorError::InvalidDims("parameter count does not match dims"));
        }
        for (l, pair) in layer_dims.windows(2).enumerate() {
            if weights[l].len() != pair[0] * pair[1] || biases[l].len() != pair[1] {
                return Err(DiscriminatorError::InvalidDims("parameter shape does not match dims"));
            }
        }
        if weights.iter().chain(&biases).flatten().any(|v| !v.is_finite()) {
            return Err(DiscriminatorError::InvalidDims("non-finite parameter"));
        }
        Ok(Self {
            layer_dims,
            weights,
            biases,
        })
    }

    pub fn layer_dims(&self) -> &[usize] {
        &self.layer_dims
    }

    pub fn input_dim(&self) -> usize {
        self.layer_dims[0]
    }

    pub fn num_layers(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[Vec<f64>] {
        &self.weights
    }

    pub fn biases(&self) -> &[Vec<f64>] {
        &self.biases
    }

    pub fn weights_mut(&mut self) -> &mut [Vec<f64>] {
        &mut self.weights
    }

    pub fn biases_mut(&mut self) -> &mut [Vec<f64>] {
        &mut self.biases
    }

    /// Output logits for one input.
    pub fn logits(&self, input: &[f64]) -> Result<[f64; 2], DiscriminatorError> {
        self.check_input(input)?;
        let acts = self.activations(input);
        let out = acts.last().expect("at least one layer");
        Ok([out[0], out[1]])
    }

    /// Softmax probabilities `(p_ds, p_web)`.
    pub fn forward(&self, input: &[f64]) -> Result<Probabilities, DiscriminatorError> {
        self.logits(input).map(Probabilities::from_logits)
    }

    pub(crate) fn check_input(&self, input: &[f64]) -> Result<(), DiscriminatorError> {
        if input.len() != self.input_dim() {
            return Err(DiscriminatorError::DimensionMismatch {
                expected: self.input_dim(),
                actual: input.len(),
            });
        }
        Ok(())
    }

    /// Post-activation outputs of every layer; the last entry holds the raw
    /// logits (softmax is applied by the caller).
    pub(crate) fn activations(&self, input: &[f64]) -> Vec<Vec<f64>> {
        let mut acts: Vec<Vec<f64>> = Vec::with_capacity(self.weights.len());
        let last = self.weights.len() - 1;
        for l in 0..self.weights.len() {
            let x = if l == 0 { input } else { &acts[l - 1] };
            let mut z = self.biases[l].clone();
            affine_accumulate(x, &self.weights[l], &mut z);
            if l != last {
                z.iter_mut().for_each(|v| *v = v.max(0.0));
            }
            acts.push(z);
        }
        acts
    }
}

/// `out += x^T W` with `W` row-major `x.len() x out.len()`.
#[inline]
fn affine_accumulate(x: &[f64], w: &[f64], out: &mut [f64]) {
    let n = out.len();
    for (xi, row) in x.iter().zip(w.chunks_exact(n)) {
        if *xi == 0.0 {
            continue;
        }
        for (o, wij) in out.iter_mut().zip(row) {
            *o += xi * wij;
        }
    }
}

fn validate_dims(dims: &[usize]) -> Result<(), DiscriminatorError> {
    if dims.len() < 2 {
        return Err(DiscriminatorError::InvalidDims("need at least an input and an output width"));
    }
    if dims.contains(&0) {
        return Err(DiscriminatorError::InvalidDims("zero-width layer"));
    }
    if *dims.last().unwrap() != 2 {
        return Err(DiscriminatorError::InvalidDims("output width must be 2"));
    }
    Ok(())
}

/// Two-way softmax output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Probabilities {
    pub p_ds: f64,
    pub p_web: f64,
}

impl Probabilities {
    pub fn from_logits(logits: [f64; 2]) -> Self {
        // Both sides are computed from the logit gap, so each is exact to
        // rounding and ties land on exactly 0.5.
        let gap = logits[WEB] - logits[DATASET];
        Self {
            p_ds: 1.0 / (1.0 + libm::exp(gap)),
            p_web: 1.0 / (1.0 + libm::exp(-gap)),
        }
    }
}

/// Outcome of the acceptance gate for one image.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateDecision {
    pub p_ds: f64,
    pub p_web: f64,
    pub accepted: bool,
    /// Odds ratio `p_ds / max(p_web, ODDS_FLOOR)`.
    pub score: f64,
}

impl GateDecision {
    pub fn from_probabilities(p: Probabilities) -> Self {
        Self {
            p_ds: p.p_ds,
            p_web: p.p_web,
            // strict: a 0.5 / 0.5 tie is rejected
            accepted: p.p_ds > 0.5,
            score: p.p_ds / p.p_web.max(ODDS_FLOOR),
        }
    }
}

/// An image passes when it fools the discriminator into `p_ds / p_web > 1`.
pub fn gate(model: &MlpModel, input: &[f64]) -> Result<GateDecision, DiscriminatorError> {
    model.forward(input).map(GateDecision::from_probabilities)
}

/// Indices sorted by descending gate score; equal scores keep input order.
pub fn rank_by_score(decisions: &[GateDecision]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..decisions.len()).collect();
    order.sort_by(|&a, &b| {
        decisions[b]
            .score
            .partial_cmp(&decisions[a].score)
            .unwrap_or(Ordering::Equal)
    });
    order
}
