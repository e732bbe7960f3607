//! A per-pixel linear segmenter used to drive the incremental losses end to
//! end without a real backbone.
//!
//! Every pixel gets features `[r, g, b, x, y, 1]`. A linear encoder maps
//! them to a small embedding `e`; a decoder head gives sigmoid scores `y_D`
//! and a localizer head gives logits `z`, both over all current classes.
//! The previous model is a frozen stub: stored `y_D` maps and embeddings.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::lexicon::MultiLabel;
use crate::rng::{seeded, shuffle};
use crate::wilss::{
    self, fuse_pseudo, image_label_from_pixel, loss_cls, loss_cls_grad, loss_kde, loss_kde_grad, loss_kdl,
    loss_kdl_grad, loss_seg, loss_seg_grad, ngwp_pool, ngwp_pool_backward, pixel_softmax, sigmoid, smooth,
    total_loss, FeatureMap, KdeNorm, LossParts, LossWeights, ScoreMap, StepContext, WilssError,
};

pub const PIXEL_FEATURES: usize = 6;
pub const EMBED_DIM: usize = 4;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ToyError {
    #[error(transparent)]
    Wilss(#[from] WilssError),
    #[error("sample {index}: {message}")]
    BadSample { index: usize, message: &'static str },
    #[error("loss became non-finite at epoch {epoch}")]
    Diverged { epoch: usize },
    #[error("invalid config: {0}")]
    InvalidConfig(&'static str),
}

/// One image with its frozen previous-model outputs.
///
/// `label` holds the image-level label of a new-step image; rehearsal
/// images have none and are supervised by `y_d_prev` alone.
#[derive(Debug, Clone, PartialEq)]
pub struct ToySample {
    pub width: usize,
    pub height: usize,
    pub rgb: Vec<f64>,
    pub label: Option<MultiLabel>,
    pub y_d_prev: ScoreMap,
    pub e_prev: FeatureMap,
}

impl ToySample {
    pub fn num_pixels(&self) -> usize {
        self.width * self.height
    }

    fn validate(&self, index: usize, ctx: &StepContext) -> Result<(), ToyError> {
        let bad = |message| Err(ToyError::BadSample { index, message });
        let n = self.num_pixels();
        if n == 0 {
            return bad("empty image");
        }
        if self.rgb.len() != n * 3 {
            return bad("rgb length does not match the image size");
        }
        if self.y_d_prev.num_pixels() != n || self.e_prev.num_pixels() != n {
            return bad("previous-model maps do not match the image size");
        }
        if self.e_prev.dim() != EMBED_DIM {
            return bad("previous embedding has the wrong dimension");
        }
        if ctx.old_classes().iter().any(|c| self.y_d_prev.class_index(c).is_none()) {
            return bad("previous map does not cover the old classes");
        }
        if let Some(l) = &self.label {
            if ctx.new_classes().iter().any(|c| l.get(c).is_none()) {
                return bad("label does not cover the new classes");
            }
        }
        Ok(())
    }

    fn features(&self, pixel: usize) -> [f64; PIXEL_FEATURES] {
        let (x, y) = (pixel % self.width, pixel / self.width);
        let norm = |v: usize, n: usize| if n > 1 { v as f64 / (n - 1) as f64 } else { 0.0 };
        let c = &self.rgb[pixel * 3..pixel * 3 + 3];
        [c[0], c[1], c[2], norm(x, self.width), norm(y, self.height), 1.0]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToyConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    /// `None` trains on the full set every step.
    pub batch_size: Option<usize>,
    pub smoothing: f64,
    pub weights: LossWeights,
    pub kde_norm: KdeNorm,
    pub seed: u64,
}

impl Default for ToyConfig {
    fn default() -> Self {
        Self {
            epochs: 30,
            learning_rate: 0.5,
            batch_size: None,
            smoothing: wilss::DEFAULT_SMOOTHING,
            weights: LossWeights::default(),
            kde_norm: KdeNorm::Squared,
            seed: 0,
        }
    }
}

impl ToyConfig {
    pub fn validate(&self) -> Result<(), ToyError> {
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(ToyError::InvalidConfig("learning rate must be positive"));
        }
        if self.batch_size == Some(0) {
            return Err(ToyError::InvalidConfig("batch size must be positive"));
        }
        if !(0.0..1.0).contains(&self.smoothing) {
            return Err(ToyError::InvalidConfig("smoothing must be in [0, 1)"));
        }
        self.weights.validate()?;
        Ok(())
    }
}

/// Flat parameter vector: `W_e`, `W_d`, `b_d`, `W_l`, `b_l`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ToyModel {
    classes: Vec<String>,
    params: Vec<f64>,
}

struct Layout {
    we: usize,
    wd: usize,
    bd: usize,
    wl: usize,
    bl: usize,
    len: usize,
}

fn layout(k: usize) -> Layout {
    let we = 0;
    let wd = we + EMBED_DIM * PIXEL_FEATURES;
    let bd = wd + k * EMBED_DIM;
    let wl = bd + k;
    let bl = wl + k * EMBED_DIM;
    Layout {
        we,
        wd,
        bd,
        wl,
        bl,
        len: bl + k,
    }
}

struct Forward {
    e: FeatureMap,
    y_d: ScoreMap,
    z: ScoreMap,
}

impl ToyModel {
    pub fn init(classes: Vec<String>, seed: u64) -> Self {
        let n = layout(classes.len()).len;
        let mut rng = seeded(seed);
        let params = (0..n).map(|_| rng.gen_range(-0.5..0.5)).collect();
        Self { classes, params }
    }

    pub fn from_params(classes: Vec<String>, params: Vec<f64>) -> Option<Self> {
        (params.len() == layout(classes.len()).len).then_some(Self { classes, params })
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn num_params(&self) -> usize {
        self.params.len()
    }

    fn forward(&self, s: &ToySample) -> Result<Forward, ToyError> {
        let k = self.classes.len();
        let l = layout(k);
        let p = &self.params;
        let n = s.num_pixels();
        let mut e = vec![0.0; n * EMBED_DIM];
        let mut yd = vec![0.0; n * k];
        let mut z = vec![0.0; n * k];
        for i in 0..n {
            let phi = s.features(i);
            let ei = &mut e[i * EMBED_DIM..(i + 1) * EMBED_DIM];
            for (j, ej) in ei.iter_mut().enumerate() {
                let w = &p[l.we + j * PIXEL_FEATURES..l.we + (j + 1) * PIXEL_FEATURES];
                *ej = w.iter().zip(&phi).map(|(a, b)| a * b).sum();
            }
            for c in 0..k {
                let wd = &p[l.wd + c * EMBED_DIM..l.wd + (c + 1) * EMBED_DIM];
                let wl = &p[l.wl + c * EMBED_DIM..l.wl + (c + 1) * EMBED_DIM];
                let d: f64 = wd.iter().zip(ei.iter()).map(|(a, b)| a * b).sum::<f64>() + p[l.bd + c];
                yd[i * k + c] = sigmoid(d);
                z[i * k + c] = wl.iter().zip(ei.iter()).map(|(a, b)| a * b).sum::<f64>() + p[l.bl + c];
            }
        }
        Ok(Forward {
            e: FeatureMap::new(n, EMBED_DIM, e)?,
            y_d: ScoreMap::probabilities(n, self.classes.clone(), yd)?,
            z: ScoreMap::logits(n, self.classes.clone(), z)?,
        })
    }

    /// Loss parts of one sample and, when `grad` is given, adds `scale`
    /// times the gradient of the weighted total into it.
    fn sample_loss(
        &self,
        s: &ToySample,
        ctx: &StepContext,
        cfg: &ToyConfig,
        grad: Option<(&mut [f64], f64)>,
    ) -> Result<LossParts, ToyError> {
        let f = self.forward(s)?;
        let y_l = ngwp_pool(&f.z)?;
        let w = &cfg.weights;
        let mut parts = LossParts::default();
        let k = self.classes.len();
        let n = s.num_pixels();
        let mut g_yd = vec![0.0; n * k];
        let mut g_z = vec![0.0; n * k];
        let mut g_e = vec![0.0; n * EMBED_DIM];
        let want = grad.is_some();

        let (seg_target, cls_label, cls_classes) = match &s.label {
            Some(label) => {
                let pseudo = smooth(&pixel_softmax(&f.z)?, cfg.smoothing)?;
                let target = fuse_pseudo(&pseudo, &s.y_d_prev, ctx)?.project(&self.classes, 0.0)?;
                (target, label.clone(), ctx.new_classes().to_vec())
            }
            None => {
                let target = s.y_d_prev.project(&self.classes, 0.0)?;
                (target, image_label_from_pixel(&s.y_d_prev, 1)?, ctx.old_classes().to_vec())
            }
        };
        parts.seg = loss_seg(&seg_target, &f.y_d)?;
        parts.cls = loss_cls(&cls_label, &y_l, &cls_classes)?;
        if want {
            for (g, v) in g_yd.iter_mut().zip(loss_seg_grad(&seg_target, &f.y_d)?) {
                *g += w.seg * v;
            }
            let gy = loss_cls_grad(&cls_label, &y_l, &cls_classes)?;
            let gy: Vec<f64> = gy.iter().map(|v| w.cls * v).collect();
            for (g, v) in g_z.iter_mut().zip(ngwp_pool_backward(&f.z, &gy)?) {
                *g += v;
            }
        }
        if s.label.is_some() {
            parts.kde = loss_kde(&f.e, &s.e_prev, cfg.kde_norm)?;
            parts.kdl = loss_kdl(&f.z, &s.y_d_prev, ctx.old_classes())?;
            if want {
                for (g, v) in g_e.iter_mut().zip(loss_kde_grad(&f.e, &s.e_prev, cfg.kde_norm)?) {
                    *g += w.kde * v;
                }
                for (g, v) in g_z.iter_mut().zip(loss_kdl_grad(&f.z, &s.y_d_prev, ctx.old_classes())?) {
                    *g += w.kdl * v;
                }
            }
        }

        if let Some((out, scale)) = grad {
            let l = layout(k);
            let p = &self.params;
            for i in 0..n {
                let phi = s.features(i);
                let ei = f.e.vector(i);
                let mut ge = [0.0; EMBED_DIM];
                for (j, v) in ge.iter_mut().enumerate() {
                    *v = g_e[i * EMBED_DIM + j] * scale;
                }
                for c in 0..k {
                    let y = f.y_d.get(i, c);
                    let gd = g_yd[i * k + c] * y * (1.0 - y) * scale;
                    let gz = g_z[i * k + c] * scale;
                    out[l.bd + c] += gd;
                    out[l.bl + c] += gz;
                    for j in 0..EMBED_DIM {
                        out[l.wd + c * EMBED_DIM + j] += gd * ei[j];
                        out[l.wl + c * EMBED_DIM + j] += gz * ei[j];
                        ge[j] += gd * p[l.wd + c * EMBED_DIM + j] + gz * p[l.wl + c * EMBED_DIM + j];
                    }
                }
                for (j, gj) in ge.iter().enumerate() {
                    for (q, ph) in phi.iter().enumerate() {
                        out[l.we + j * PIXEL_FEATURES + q] += gj * ph;
                    }
                }
            }
        }
        Ok(parts)
    }

    /// Mean weighted loss over `samples` and its mean loss parts.
    pub fn evaluate(
        &self,
        samples: &[ToySample],
        ctx: &StepContext,
        cfg: &ToyConfig,
    ) -> Result<(f64, LossParts), ToyError> {
        let (loss, parts, _) = self.loss_and_gradient_inner(samples, ctx, cfg, false)?;
        Ok((loss, parts))
    }

    /// Mean weighted loss and its gradient with respect to [`ToyModel::params`].
    /// Pseudo-label targets are treated as constants.
    pub fn loss_and_gradient(
        &self,
        samples: &[ToySample],
        ctx: &StepContext,
        cfg: &ToyConfig,
    ) -> Result<(f64, Vec<f64>), ToyError> {
        let (loss, _, grad) = self.loss_and_gradient_inner(samples, ctx, cfg, true)?;
        Ok((loss, grad))
    }

    fn loss_and_gradient_inner(
        &self,
        samples: &[ToySample],
        ctx: &StepContext,
        cfg: &ToyConfig,
        want_grad: bool,
    ) -> Result<(f64, LossParts, Vec<f64>), ToyError> {
        if samples.is_empty() {
            return Err(ToyError::InvalidConfig("no samples"));
        }
        let scale = 1.0 / samples.len() as f64;
        let mut grad = vec![0.0; if want_grad { self.params.len() } else { 0 }];
        let mut total = 0.0;
        let mut mean = LossParts::default();
        for s in samples {
            let g = want_grad.then_some((grad.as_mut_slice(), scale));
            let parts = self.sample_loss(s, ctx, cfg, g)?;
            total += total_loss(&parts, &cfg.weights)? * scale;
            mean.seg += parts.seg * scale;
            mean.cls += parts.cls * scale;
            mean.kde += parts.kde * scale;
            mean.kdl += parts.kdl * scale;
        }
        Ok((total, mean, grad))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ToyOutcome {
    pub model: ToyModel,
    /// Entry 0 is the loss before training, entry `e` the loss after epoch `e`.
    pub epoch_loss: Vec<f64>,
    pub epoch_parts: Vec<LossParts>,
}

/// Trains on the concatenation of new-step and rehearsal samples by
/// gradient descent on the weighted total loss.
pub fn train(
    model: ToyModel,
    samples: &[ToySample],
    ctx: &StepContext,
    cfg: &ToyConfig,
) -> Result<ToyOutcome, ToyError> {
    cfg.validate()?;
    if model.classes != ctx.all_classes() {
        return Err(ToyError::InvalidConfig("model classes must equal the step's classes"));
    }
    for (i, s) in samples.iter().enumerate() {
        s.validate(i, ctx)?;
    }
    let mut model = model;
    let mut rng = seeded(cfg.seed);
    let mut order: Vec<usize> = (0..samples.len()).collect();
    let (l0, p0) = model.evaluate(samples, ctx, cfg)?;
    if !l0.is_finite() {
        return Err(ToyError::Diverged { epoch: 0 });
    }
    let mut epoch_loss = vec![l0];
    let mut epoch_parts = vec![p0];
    for epoch in 1..=cfg.epochs {
        let batch = cfg.batch_size.unwrap_or(samples.len()).min(samples.len());
        if batch < samples.len() {
            shuffle(&mut rng, &mut order);
        }
        for chunk in order.chunks(batch) {
            let picked: Vec<ToySample> = chunk.iter().map(|&i| samples[i].clone()).collect();
            let (_, g) = match model.loss_and_gradient(&picked, ctx, cfg) {
                Err(ToyError::Wilss(WilssError::NonFinite(_))) => return Err(ToyError::Diverged { epoch }),
                other => other?,
            };
            for (p, gi) in model.params.iter_mut().zip(&g) {
                *p -= cfg.learning_rate * gi;
            }
            if model.params.iter().any(|p| !p.is_finite()) {
                return Err(ToyError::Diverged { epoch });
            }
        }
        let (loss, parts) = match model.evaluate(samples, ctx, cfg) {
            Err(ToyError::Wilss(WilssError::NonFinite(_))) => return Err(ToyError::Diverged { epoch }),
            other => other?,
        };
        if !loss.is_finite() {
            return Err(ToyError::Diverged { epoch });
        }
        epoch_loss.push(loss);
        epoch_parts.push(parts);
    }
    Ok(ToyOutcome {
        model,
        epoch_loss,
        epoch_parts,
    })
}

/// Fraction of epoch-to-epoch transitions where the loss strictly drops.
pub fn decreasing_fraction(losses: &[f64]) -> f64 {
    if losses.len() < 2 {
        return 1.0;
    }
    let down = losses.windows(2).filter(|w| w[1] < w[0]).count();
    down as f64 / (losses.len() - 1) as f64
}

pub const FIXTURE_SIDE: usize = 8;
pub const FIXTURE_OLD: [&str; 2] = ["background", "cat"];
pub const FIXTURE_NEW: [&str; 1] = ["dog"];

/// A shipped-size toy step: one new class over an old background/cat model.
#[derive(Debug, Clone, PartialEq)]
pub struct ToyFixture {
    pub ctx: StepContext,
    pub train: Vec<ToySample>,
    pub rehearsal: Vec<ToySample>,
}

const BG_RGB: [f64; 3] = [0.25, 0.55, 0.25];
const CAT_RGB: [f64; 3] = [0.85, 0.30, 0.20];
const DOG_RGB: [f64; 3] = [0.30, 0.35, 0.85];

#[derive(Clone, Copy, PartialEq)]
enum Paint {
    Bg,
    Cat,
    Dog,
}

fn paint_rect(canvas: &mut [Paint], rng: &mut impl Rng, what: Paint) {
    let side = FIXTURE_SIDE;
    let w = rng.gen_range(2..=4);
    let h = rng.gen_range(2..=4);
    let x0 = rng.gen_range(0..=side - w);
    let y0 = rng.gen_range(0..=side - h);
    for y in y0..y0 + h {
        for x in x0..x0 + w {
            canvas[y * side + x] = what;
        }
    }
}

fn quantize(v: f64) -> f64 {
    libm::round(v.clamp(0.0, 1.0) * 255.0) / 255.0
}

fn render(canvas: &[Paint], label: Option<MultiLabel>, old_encoder: &[f64], rng: &mut impl Rng) -> Result<ToySample, ToyError> {
    let side = FIXTURE_SIDE;
    let n = side * side;
    let mut rgb = Vec::with_capacity(n * 3);
    let mut prev = Vec::with_capacity(n * 2);
    for p in canvas {
        let base = match p {
            Paint::Bg => BG_RGB,
            Paint::Cat => CAT_RGB,
            Paint::Dog => DOG_RGB,
        };
        for b in base {
            rgb.push(quantize(b + rng.gen_range(-0.05..0.05)));
        }
        // the old model has never seen a dog and calls it background
        let (bg, cat) = if *p == Paint::Cat { (0.10, 0.85) } else { (0.85, 0.08) };
        prev.push(bg + rng.gen_range(-0.03..0.03));
        prev.push(cat + rng.gen_range(-0.03..0.03));
    }
    let mut sample = ToySample {
        width: side,
        height: side,
        rgb,
        label,
        y_d_prev: ScoreMap::probabilities(n, FIXTURE_OLD.iter().map(|s| String::from(*s)).collect(), prev)?,
        e_prev: FeatureMap::new(n, EMBED_DIM, vec![0.0; n * EMBED_DIM])?,
    };
    let mut e = Vec::with_capacity(n * EMBED_DIM);
    for i in 0..n {
        let phi = sample.features(i);
        for j in 0..EMBED_DIM {
            let w = &old_encoder[j * PIXEL_FEATURES..(j + 1) * PIXEL_FEATURES];
            e.push(w.iter().zip(&phi).map(|(a, b)| a * b).sum());
        }
    }
    sample.e_prev = FeatureMap::new(n, EMBED_DIM, e)?;
    Ok(sample)
}

/// Deterministic 8x8 fixture: six new-step images (four contain a dog,
/// two of those also a cat, two are cat only) and four cat rehearsal images.
pub fn synthetic_fixture(seed: u64) -> ToyFixture {
    // a stream distinct from ToyModel::init with the same seed
    let mut rng = seeded(!seed);
    let old_encoder: Vec<f64> = (0..EMBED_DIM * PIXEL_FEATURES).map(|_| rng.gen_range(-0.5..0.5)).collect();
    let new: Vec<String> = FIXTURE_NEW.iter().map(|s| String::from(*s)).collect();
    let ctx = StepContext::new(FIXTURE_OLD.iter().map(|s| String::from(*s)).collect(), new.clone(), "background")
        .expect("fixture classes are valid");
    let n = FIXTURE_SIDE * FIXTURE_SIDE;
    let mut train = Vec::new();
    for i in 0..6 {
        let mut canvas = vec![Paint::Bg; n];
        let has_dog = i < 4;
        if i % 2 == 0 || !has_dog {
            paint_rect(&mut canvas, &mut rng, Paint::Cat);
        }
        if has_dog {
            paint_rect(&mut canvas, &mut rng, Paint::Dog);
        }
        let label = MultiLabel::new(new.clone(), vec![has_dog]).expect("one class");
        train.push(render(&canvas, Some(label), &old_encoder, &mut rng).expect("fixture maps are valid"));
    }
    let mut rehearsal = Vec::new();
    for _ in 0..4 {
        let mut canvas = vec![Paint::Bg; n];
        paint_rect(&mut canvas, &mut rng, Paint::Cat);
        rehearsal.push(render(&canvas, None, &old_encoder, &mut rng).expect("fixture maps are valid"));
    }
    ToyFixture { ctx, train, rehearsal }
}
