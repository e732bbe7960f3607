use alloc::vec;
use alloc::vec::Vec;

use super::{DiscriminatorError, MlpModel, Probabilities, DATASET, WEB};

/// Mini-batch SGD settings. `target_accuracy`, when set, stops training
/// after the first epoch whose training accuracy reaches it; `epochs` is
/// then an upper bound.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
    pub shuffle: bool,
    pub target_accuracy: Option<f64>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.01,
            epochs: 10,
            batch_size: 24,
            seed: 0,
            shuffle: true,
            target_accuracy: None,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), DiscriminatorError> {
        if self.epochs == 0 {
            return Err(DiscriminatorError::InvalidConfig("epochs must be at least 1"));
        }
        if self.batch_size == 0 {
            return Err(DiscriminatorError::InvalidConfig("batch_size must be at least 1"));
        }
        // zero is allowed: it freezes the parameters
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return Err(DiscriminatorError::InvalidConfig(
                "learning_rate must be finite and non-negative",
            ));
        }
        if let Some(t) = self.target_accuracy {
            if !(0.0..=1.0).contains(&t) {
                return Err(DiscriminatorError::InvalidConfig("target_accuracy must be in [0, 1]"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    pub model: MlpModel,
    /// Training accuracy measured before any update.
    pub initial_accuracy: f64,
    /// Training accuracy after each completed epoch.
    pub epoch_accuracy: Vec<f64>,
    /// Mean mini-batch cross-entropy seen during each epoch.
    pub epoch_loss: Vec<f64>,
}

/// Parameter gradients, shaped like the model.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
}

impl Gradients {
    fn zeros_like(m: &MlpModel) -> Self {
        Self {
            weights: m.weights.iter().map(|w| vec![0.0; w.len()]).collect(),
            biases: m.biases.iter().map(|b| vec![0.0; b.len()]).collect(),
        }
    }

    fn scale(&mut self, k: f64) {
        self.weights
            .iter_mut()
            .chain(self.biases.iter_mut())
            .flatten()
            .for_each(|g| *g *= k);
    }
}

/// Accumulates the cross-entropy gradient of one sample into `grads` and
/// returns its loss.
fn backprop_one(m: &MlpModel, x: &[f64], label: usize, grads: &mut Gradients) -> f64 {
    let acts = m.activations(x);
    let logits = acts.last().expect("at least one layer");
    let p = Probabilities::from_logits([logits[0], logits[1]]);
    let probs = [p.p_ds, p.p_web];
    let loss = -libm::log(probs[label].max(f64::MIN_POSITIVE));

    let mut delta: Vec<f64> = probs.to_vec();
    delta[label] -= 1.0;

    for l in (0..m.weights.len()).rev() {
        let input = if l == 0 { x } else { &acts[l - 1] };
        let out = delta.len();
        for (b, d) in grads.biases[l].iter_mut().zip(&delta) {
            *b += d;
        }
        for (xi, grow) in input.iter().zip(grads.weights[l].chunks_exact_mut(out)) {
            if *xi == 0.0 {
                continue;
            }
            for (g, d) in grow.iter_mut().zip(&delta) {
                *g += xi * d;
            }
        }
        if l == 0 {
            break;
        }
        // back through W and the ReLU of the previous layer
        let mut next = vec![0.0; input.len()];
        for ((n, wrow), a) in next
            .iter_mut()
            .zip(m.weights[l].chunks_exact(out))
            .zip(input)
        {
            if *a > 0.0 {
                *n = wrow.iter().zip(&delta).map(|(w, d)| w * d).sum();
            }
        }
        delta = next;
    }
    loss
}

/// Mean cross-entropy over `(inputs, labels)` and its gradient with
/// respect to every parameter. Labels use [`DATASET`] / [`WEB`].
pub fn loss_and_gradient<X: AsRef<[f64]>>(
    m: &MlpModel,
    inputs: &[X],
    labels: &[usize],
) -> Result<(f64, Gradients), DiscriminatorError> {
    assert_eq!(inputs.len(), labels.len(), "one label per input");
    let mut grads = Gradients::zeros_like(m);
    let mut loss = 0.0;
    for (x, &y) in inputs.iter().zip(labels) {
        m.check_input(x.as_ref())?;
        loss += backprop_one(m, x.as_ref(), y, &mut grads);
    }
    let n = inputs.len().max(1) as f64;
    grads.scale(1.0 / n);
    Ok((loss / n, grads))
}

/// Fraction of samples whose predicted side matches the label; a sample is
/// predicted as dataset when `p_ds > 0.5`.
pub fn accuracy<P: AsRef<[f64]>, N: AsRef<[f64]>>(
    m: &MlpModel,
    positives: &[P],
    negatives: &[N],
) -> Result<f64, DiscriminatorError> {
    let mut correct = 0usize;
    for x in positives {
        correct += usize::from(m.forward(x.as_ref())?.p_ds > 0.5);
    }
    for x in negatives {
        correct += usize::from(m.forward(x.as_ref())?.p_ds <= 0.5);
    }
    let total = positives.len() + negatives.len();
    Ok(if total == 0 { 0.0 } else { correct as f64 / total as f64 })
}

/// Trains `model` on dataset spectra (`positives`) against web spectra
/// (`negatives`). Deterministic in `cfg.seed`.
pub fn train<P: AsRef<[f64]>, N: AsRef<[f64]>>(
    mut model: MlpModel,
    positives: &[P],
    negatives: &[N],
    cfg: &TrainConfig,
) -> Result<TrainOutcome, DiscriminatorError> {
    cfg.validate()?;
    if positives.is_empty() {
        return Err(DiscriminatorError::EmptyClass("dataset"));
    }
    if negatives.is_empty() {
        return Err(DiscriminatorError::EmptyClass("web"));
    }
    let samples: Vec<(&[f64], usize)> = positives
        .iter()
        .map(|x| (x.as_ref(), DATASET))
        .chain(negatives.iter().map(|x| (x.as_ref(), WEB)))
        .collect();
    for (x, _) in &samples {
        model.check_input(x)?;
    }

    let initial_accuracy = accuracy(&model, positives, negatives)?;
    let mut rng = crate::rng::seeded(cfg.seed);
    let mut order: Vec<usize> = (0..samples.len()).collect();
    let mut epoch_accuracy = Vec::new();
    let mut epoch_loss = Vec::new();
    let mut grads = Gradients::zeros_like(&model);

    for epoch in 0..cfg.epochs {
        if cfg.shuffle {
            crate::rng::shuffle(&mut rng, &mut order);
        }
        let mut loss_sum = 0.0;
        let mut batches = 0usize;
        for batch in order.chunks(cfg.batch_size) {
            grads.scale(0.0);
            let mut batch_loss = 0.0;
            for &i in batch {
                let (x, y) = samples[i];
                batch_loss += backprop_one(&model, x, y, &mut grads);
            }
            let inv = 1.0 / batch.len() as f64;
            batch_loss *= inv;
            if !batch_loss.is_finite() {
                return Err(DiscriminatorError::NonFiniteLoss { epoch });
            }
            loss_sum += batch_loss;
            batches += 1;
            let step = cfg.learning_rate * inv;
            if step != 0.0 {
                for (w, g) in model
                    .weights
                    .iter_mut()
                    .chain(model.biases.iter_mut())
                    .zip(grads.weights.iter().chain(grads.biases.iter()))
                {
                    for (wi, gi) in w.iter_mut().zip(g) {
                        *wi -= step * gi;
                    }
                }
            }
        }
        if model.weights.iter().chain(&model.biases).flatten().any(|v| !v.is_finite()) {
            return Err(DiscriminatorError::NonFiniteLoss { epoch });
        }
        epoch_loss.push(loss_sum / batches as f64);
        let acc = accuracy(&model, positives, negatives)?;
        epoch_accuracy.push(acc);
        if cfg.target_accuracy.is_some_and(|t| acc >= t) {
            break;
        }
    }

    Ok(TrainOutcome {
        model,
        initial_accuracy,
        epoch_accuracy,
        epoch_loss,
    })
}
