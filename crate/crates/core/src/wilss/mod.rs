//! Losses and pseudo-label construction for weakly supervised incremental
//! segmentation, with analytic gradients.
//!
//! Per-pixel maps are [`ScoreMap`]s (row-major `pixels x classes`). Every
//! logarithm takes `max(x, EPS)` as its argument; gradients are zero on the
//! clamped side.

pub mod codec;

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::lexicon::MultiLabel;

pub const EPS: f64 = 1e-7;
pub const DEFAULT_SMOOTHING: f64 = 0.1;
/// KDE weight used when rehearsal images come from the web.
pub const WEB_REHEARSAL_KDE_WEIGHT: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum WilssError {
    #[error("{what}: expected {expected}, got {actual}")]
    Shape {
        what: &'static str,
        expected: usize,
        actual: usize,
    },
    #[error("class `{0}` is missing")]
    MissingClass(String),
    #[error("duplicate class `{0}`")]
    DuplicateClass(String),
    #[error("score map must hold {0}")]
    WrongKind(&'static str),
    #[error("entry {index} = {value} is outside [0, 1]")]
    NotProbability { index: usize, value: f64 },
    #[error("entry {0} is not finite")]
    NonFinite(usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
}

pub type Result<T> = core::result::Result<T, WilssError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScoreKind {
    Probabilities,
    Logits,
}

/// Per-pixel class scores.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreMap {
    num_pixels: usize,
    class_order: Vec<String>,
    scores: Vec<f64>,
    kind: ScoreKind,
}

fn check_unique(classes: &[String]) -> Result<()> {
    for (i, c) in classes.iter().enumerate() {
        if classes[..i].contains(c) {
            return Err(WilssError::DuplicateClass(c.clone()));
        }
    }
    Ok(())
}

fn position(classes: &[String], name: &str) -> Result<usize> {
    classes
        .iter()
        .position(|c| c == name)
        .ok_or_else(|| WilssError::MissingClass(name.into()))
}

impl ScoreMap {
    pub fn new(num_pixels: usize, class_order: Vec<String>, scores: Vec<f64>, kind: ScoreKind) -> Result<Self> {
        if class_order.is_empty() {
            return Err(WilssError::InvalidArgument("score map needs at least one class"));
        }
        check_unique(&class_order)?;
        let expected = num_pixels * class_order.len();
        if scores.len() != expected {
            return Err(WilssError::Shape {
                what: "score count",
                expected,
                actual: scores.len(),
            });
        }
        for (index, &value) in scores.iter().enumerate() {
            if !value.is_finite() {
                return Err(WilssError::NonFinite(index));
            }
            if kind == ScoreKind::Probabilities && !(0.0..=1.0).contains(&value) {
                return Err(WilssError::NotProbability { index, value });
            }
        }
        Ok(Self {
            num_pixels,
            class_order,
            scores,
            kind,
        })
    }

    pub fn probabilities(num_pixels: usize, class_order: Vec<String>, scores: Vec<f64>) -> Result<Self> {
        Self::new(num_pixels, class_order, scores, ScoreKind::Probabilities)
    }

    pub fn logits(num_pixels: usize, class_order: Vec<String>, scores: Vec<f64>) -> Result<Self> {
        Self::new(num_pixels, class_order, scores, ScoreKind::Logits)
    }

    pub fn num_pixels(&self) -> usize {
        self.num_pixels
    }

    pub fn num_classes(&self) -> usize {
        self.class_order.len()
    }

    pub fn class_order(&self) -> &[String] {
        &self.class_order
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn kind(&self) -> ScoreKind {
        self.kind
    }

    pub fn class_index(&self, class: &str) -> Option<usize> {
        self.class_order.iter().position(|c| c == class)
    }

    pub fn get(&self, pixel: usize, class: usize) -> f64 {
        self.scores[pixel * self.num_classes() + class]
    }

    pub fn row(&self, pixel: usize) -> &[f64] {
        let k = self.num_classes();
        &self.scores[pixel * k..(pixel + 1) * k]
    }

    /// Reorders columns to `classes`; classes absent here are filled with
    /// `fill`.
    pub fn project(&self, classes: &[String], fill: f64) -> Result<Self> {
        let src: Vec<Option<usize>> = classes.iter().map(|c| self.class_index(c)).collect();
        let mut scores = Vec::with_capacity(self.num_pixels * classes.len());
        for i in 0..self.num_pixels {
            for s in &src {
                scores.push(s.map_or(fill, |k| self.get(i, k)));
            }
        }
        Self::new(self.num_pixels, classes.to_vec(), scores, self.kind)
    }

    fn require(&self, kind: ScoreKind) -> Result<()> {
        if self.kind != kind {
            return Err(WilssError::WrongKind(match kind {
                ScoreKind::Logits => "logits",
                ScoreKind::Probabilities => "probabilities",
            }));
        }
        Ok(())
    }

    fn same_shape(&self, other: &ScoreMap) -> Result<()> {
        if self.num_pixels != other.num_pixels {
            return Err(WilssError::Shape {
                what: "pixel count",
                expected: self.num_pixels,
                actual: other.num_pixels,
            });
        }
        if self.class_order != other.class_order {
            return Err(WilssError::InvalidArgument("class orders differ"));
        }
        Ok(())
    }
}

/// Per-pixel embedding vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMap {
    num_pixels: usize,
    dim: usize,
    data: Vec<f64>,
}

impl FeatureMap {
    pub fn new(num_pixels: usize, dim: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != num_pixels * dim {
            return Err(WilssError::Shape {
                what: "feature count",
                expected: num_pixels * dim,
                actual: data.len(),
            });
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(WilssError::NonFinite(i));
        }
        Ok(Self { num_pixels, dim, data })
    }

    pub fn num_pixels(&self) -> usize {
        self.num_pixels
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn vector(&self, pixel: usize) -> &[f64] {
        &self.data[pixel * self.dim..(pixel + 1) * self.dim]
    }
}

/// Image-level class scores, e.g. the pooled localizer output.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassScores {
    pub class_order: Vec<String>,
    pub values: Vec<f64>,
}

impl ClassScores {
    pub fn get(&self, class: &str) -> Option<f64> {
        self.class_order
            .iter()
            .position(|c| c == class)
            .map(|i| self.values[i])
    }
}

/// Class layout of an incremental step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepContext {
    old_classes: Vec<String>,
    new_classes: Vec<String>,
    background: String,
}

impl StepContext {
    pub fn new(old_classes: Vec<String>, new_classes: Vec<String>, background: impl Into<String>) -> Result<Self> {
        let background = background.into();
        if !old_classes.contains(&background) {
            return Err(WilssError::MissingClass(background));
        }
        if new_classes.is_empty() {
            return Err(WilssError::InvalidArgument("a step needs at least one new class"));
        }
        let mut all = old_classes.clone();
        all.extend(new_classes.iter().cloned());
        check_unique(&all)?;
        Ok(Self {
            old_classes,
            new_classes,
            background,
        })
    }

    pub fn old_classes(&self) -> &[String] {
        &self.old_classes
    }

    pub fn new_classes(&self) -> &[String] {
        &self.new_classes
    }

    pub fn background(&self) -> &str {
        &self.background
    }

    /// Old classes followed by new ones.
    pub fn all_classes(&self) -> Vec<String> {
        let mut all = self.old_classes.clone();
        all.extend(self.new_classes.iter().cloned());
        all
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossWeights {
    pub seg: f64,
    pub cls: f64,
    pub kde: f64,
    pub kdl: f64,
}

impl Default for LossWeights {
    fn default() -> Self {
        Self {
            seg: 1.0,
            cls: 1.0,
            kde: 1.0,
            kdl: 1.0,
        }
    }
}

impl LossWeights {
    pub fn web_rehearsal() -> Self {
        Self {
            kde: WEB_REHEARSAL_KDE_WEIGHT,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        for w in [self.seg, self.cls, self.kde, self.kdl] {
            if !(w.is_finite() && w >= 0.0) {
                return Err(WilssError::InvalidArgument("loss weights must be finite and >= 0"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LossParts {
    pub seg: f64,
    pub cls: f64,
    pub kde: f64,
    pub kdl: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KdeNorm {
    #[default]
    Squared,
    Euclidean,
}

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + libm::exp(-x))
    } else {
        let e = libm::exp(x);
        e / (1.0 + e)
    }
}

fn clamped_ln(x: f64) -> f64 {
    libm::log(x.max(EPS))
}

/// Derivative of `clamped_ln`.
fn clamped_ln_grad(x: f64) -> f64 {
    if x > EPS {
        1.0 / x
    } else {
        0.0
    }
}

fn bce(target: f64, p: f64) -> f64 {
    -(target * clamped_ln(p) + (1.0 - target) * clamped_ln(1.0 - p))
}

fn bce_grad(target: f64, p: f64) -> f64 {
    -(target * clamped_ln_grad(p) - (1.0 - target) * clamped_ln_grad(1.0 - p))
}

fn softmax_into(row: &[f64], out: &mut [f64]) {
    let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for (o, &z) in out.iter_mut().zip(row) {
        *o = libm::exp(z - max);
        sum += *o;
    }
    for o in out.iter_mut() {
        *o /= sum;
    }
}

/// Per-pixel softmax of localizer logits.
pub fn pixel_softmax(z: &ScoreMap) -> Result<ScoreMap> {
    z.require(ScoreKind::Logits)?;
    let k = z.num_classes();
    let mut out = vec![0.0; z.scores.len()];
    for i in 0..z.num_pixels {
        softmax_into(z.row(i), &mut out[i * k..(i + 1) * k]);
    }
    ScoreMap::probabilities(z.num_pixels, z.class_order.clone(), out)
}

struct PoolParts {
    masks: Vec<f64>,
    sig: Vec<f64>,
    mass: Vec<f64>,
    weighted: Vec<f64>,
}

fn pool_parts(z: &ScoreMap) -> PoolParts {
    let k = z.num_classes();
    let mut masks = vec![0.0; z.scores.len()];
    for i in 0..z.num_pixels {
        softmax_into(z.row(i), &mut masks[i * k..(i + 1) * k]);
    }
    let sig: Vec<f64> = z.scores.iter().map(|&v| sigmoid(v)).collect();
    let mut mass = vec![0.0; k];
    let mut weighted = vec![0.0; k];
    for i in 0..z.num_pixels {
        for c in 0..k {
            let m = masks[i * k + c];
            mass[c] += m;
            weighted[c] += m * sig[i * k + c];
        }
    }
    PoolParts {
        masks,
        sig,
        mass,
        weighted,
    }
}

/// Normalized global weighted pooling:
/// `y^c = sum_i m_i^c sigmoid(z_i^c) / (1 + sum_i m_i^c)` with softmax masks
/// `m`, clamped to `[EPS, 1 - EPS]`.
pub fn ngwp_pool(z: &ScoreMap) -> Result<ClassScores> {
    z.require(ScoreKind::Logits)?;
    let p = pool_parts(z);
    let values = p
        .weighted
        .iter()
        .zip(&p.mass)
        .map(|(s, m)| (s / (1.0 + m)).clamp(EPS, 1.0 - EPS))
        .collect();
    Ok(ClassScores {
        class_order: z.class_order.clone(),
        values,
    })
}

/// Gradient of a scalar through [`ngwp_pool`]: `grad_y` is `dL/dy` per class,
/// the result is `dL/dz` laid out like `z`.
pub fn ngwp_pool_backward(z: &ScoreMap, grad_y: &[f64]) -> Result<Vec<f64>> {
    z.require(ScoreKind::Logits)?;
    let k = z.num_classes();
    if grad_y.len() != k {
        return Err(WilssError::Shape {
            what: "pooled gradient",
            expected: k,
            actual: grad_y.len(),
        });
    }
    let p = pool_parts(z);
    let mut a = vec![0.0; k];
    let mut b = vec![0.0; k];
    for c in 0..k {
        let denom = 1.0 + p.mass[c];
        let raw = p.weighted[c] / denom;
        if raw <= EPS || raw >= 1.0 - EPS {
            continue;
        }
        a[c] = grad_y[c] / denom;
        b[c] = grad_y[c] * p.weighted[c] / (denom * denom);
    }
    let mut dz = vec![0.0; z.scores.len()];
    let mut u = vec![0.0; k];
    for i in 0..z.num_pixels {
        let row = i * k;
        let mut total = 0.0;
        for c in 0..k {
            u[c] = (a[c] * p.sig[row + c] - b[c]) * p.masks[row + c];
            total += u[c];
        }
        for c in 0..k {
            let m = p.masks[row + c];
            let s = p.sig[row + c];
            dz[row + c] = u[c] - m * total + a[c] * m * s * (1.0 - s);
        }
    }
    Ok(dz)
}

/// Uniform-mixture label smoothing `(1 - alpha) y + alpha / K`.
pub fn smooth(y: &ScoreMap, alpha: f64) -> Result<ScoreMap> {
    y.require(ScoreKind::Probabilities)?;
    if !(0.0..1.0).contains(&alpha) {
        return Err(WilssError::InvalidArgument("alpha must be in [0, 1)"));
    }
    let uniform = alpha / y.num_classes() as f64;
    let scores = y.scores.iter().map(|v| (1.0 - alpha) * v + uniform).collect();
    ScoreMap::probabilities(y.num_pixels, y.class_order.clone(), scores)
}

fn label_indices(y: &MultiLabel, y_l: &ClassScores, classes: &[String]) -> Result<Vec<(f64, usize)>> {
    if classes.is_empty() {
        return Err(WilssError::InvalidArgument("classification loss needs classes"));
    }
    classes
        .iter()
        .map(|c| {
            let bit = y.get(c).ok_or_else(|| WilssError::MissingClass(c.clone()))?;
            let idx = position(&y_l.class_order, c)?;
            Ok((if bit { 1.0 } else { 0.0 }, idx))
        })
        .collect()
}

/// Multi-label soft-margin loss averaged over `classes`.
pub fn loss_cls(y: &MultiLabel, y_l: &ClassScores, classes: &[String]) -> Result<f64> {
    let pairs = label_indices(y, y_l, classes)?;
    let sum: f64 = pairs.iter().map(|&(t, i)| bce(t, y_l.values[i])).sum();
    Ok(sum / pairs.len() as f64)
}

/// `dL/dy_L`, laid out like `y_l.values`.
pub fn loss_cls_grad(y: &MultiLabel, y_l: &ClassScores, classes: &[String]) -> Result<Vec<f64>> {
    let pairs = label_indices(y, y_l, classes)?;
    let n = pairs.len() as f64;
    let mut g = vec![0.0; y_l.values.len()];
    for (t, i) in pairs {
        g[i] += bce_grad(t, y_l.values[i]) / n;
    }
    Ok(g)
}

/// Pseudo-label fusion over `ctx.all_classes()`: background takes the
/// smaller of the two models, new classes come from the localizer, other old
/// classes from the previous model.
pub fn fuse_pseudo(y_l_smooth: &ScoreMap, y_d_prev: &ScoreMap, ctx: &StepContext) -> Result<ScoreMap> {
    y_l_smooth.require(ScoreKind::Probabilities)?;
    y_d_prev.require(ScoreKind::Probabilities)?;
    if y_l_smooth.num_pixels != y_d_prev.num_pixels {
        return Err(WilssError::Shape {
            what: "pixel count",
            expected: y_l_smooth.num_pixels,
            actual: y_d_prev.num_pixels,
        });
    }
    let all = ctx.all_classes();
    let mut sources = Vec::with_capacity(all.len());
    for c in &all {
        let l = position(&y_l_smooth.class_order, c)?;
        let old = ctx.old_classes.contains(c);
        let p = if old { Some(position(&y_d_prev.class_order, c)?) } else { None };
        sources.push((c == &ctx.background, l, p));
    }
    let mut scores = Vec::with_capacity(y_d_prev.num_pixels * all.len());
    for i in 0..y_d_prev.num_pixels {
        for &(is_bg, l, p) in &sources {
            scores.push(match (is_bg, p) {
                (true, Some(p)) => y_d_prev.get(i, p).min(y_l_smooth.get(i, l)),
                (false, Some(p)) => y_d_prev.get(i, p),
                (_, None) => y_l_smooth.get(i, l),
            });
        }
    }
    ScoreMap::probabilities(y_d_prev.num_pixels, all, scores)
}

/// Pixel-wise binary cross-entropy averaged over pixels and classes.
pub fn loss_seg(target: &ScoreMap, y_d: &ScoreMap) -> Result<f64> {
    target.require(ScoreKind::Probabilities)?;
    y_d.require(ScoreKind::Probabilities)?;
    target.same_shape(y_d)?;
    if y_d.scores.is_empty() {
        return Err(WilssError::InvalidArgument("empty score map"));
    }
    let sum: f64 = target.scores.iter().zip(&y_d.scores).map(|(&t, &p)| bce(t, p)).sum();
    Ok(sum / y_d.scores.len() as f64)
}

/// `dL/dy_D`, laid out like `y_d`.
pub fn loss_seg_grad(target: &ScoreMap, y_d: &ScoreMap) -> Result<Vec<f64>> {
    target.require(ScoreKind::Probabilities)?;
    y_d.require(ScoreKind::Probabilities)?;
    target.same_shape(y_d)?;
    let n = y_d.scores.len() as f64;
    Ok(target
        .scores
        .iter()
        .zip(&y_d.scores)
        .map(|(&t, &p)| bce_grad(t, p) / n)
        .collect())
}

fn check_features(e_t: &FeatureMap, e_prev: &FeatureMap) -> Result<()> {
    if e_t.num_pixels != e_prev.num_pixels || e_t.dim != e_prev.dim {
        return Err(WilssError::Shape {
            what: "feature map size",
            expected: e_prev.data.len(),
            actual: e_t.data.len(),
        });
    }
    if e_t.num_pixels == 0 {
        return Err(WilssError::InvalidArgument("empty feature map"));
    }
    Ok(())
}

fn pixel_distance_sq(e_t: &FeatureMap, e_prev: &FeatureMap, i: usize) -> f64 {
    e_t.vector(i)
        .iter()
        .zip(e_prev.vector(i))
        .map(|(a, b)| (a - b) * (a - b))
        .sum()
}

/// Feature distillation: mean over pixels of the (squared, by default)
/// Euclidean distance between new and old embeddings.
pub fn loss_kde(e_t: &FeatureMap, e_prev: &FeatureMap, norm: KdeNorm) -> Result<f64> {
    check_features(e_t, e_prev)?;
    let sum: f64 = (0..e_t.num_pixels)
        .map(|i| {
            let d2 = pixel_distance_sq(e_t, e_prev, i);
            match norm {
                KdeNorm::Squared => d2,
                KdeNorm::Euclidean => libm::sqrt(d2),
            }
        })
        .sum();
    Ok(sum / e_t.num_pixels as f64)
}

/// `dL/de_t`. The unsquared norm has zero subgradient where the vectors
/// coincide.
pub fn loss_kde_grad(e_t: &FeatureMap, e_prev: &FeatureMap, norm: KdeNorm) -> Result<Vec<f64>> {
    check_features(e_t, e_prev)?;
    let n = e_t.num_pixels as f64;
    let mut g = vec![0.0; e_t.data.len()];
    for i in 0..e_t.num_pixels {
        let scale = match norm {
            KdeNorm::Squared => 2.0 / n,
            KdeNorm::Euclidean => {
                let d = libm::sqrt(pixel_distance_sq(e_t, e_prev, i));
                if d == 0.0 {
                    0.0
                } else {
                    1.0 / (d * n)
                }
            }
        };
        for j in 0..e_t.dim {
            let k = i * e_t.dim + j;
            g[k] = scale * (e_t.data[k] - e_prev.data[k]);
        }
    }
    Ok(g)
}

fn kdl_columns(z: &ScoreMap, y_d_prev: &ScoreMap, old: &[String]) -> Result<Vec<(usize, usize)>> {
    z.require(ScoreKind::Logits)?;
    y_d_prev.require(ScoreKind::Probabilities)?;
    if old.is_empty() {
        return Err(WilssError::InvalidArgument("distillation needs old classes"));
    }
    if z.num_pixels != y_d_prev.num_pixels {
        return Err(WilssError::Shape {
            what: "pixel count",
            expected: y_d_prev.num_pixels,
            actual: z.num_pixels,
        });
    }
    if z.num_pixels == 0 {
        return Err(WilssError::InvalidArgument("empty score map"));
    }
    old.iter()
        .map(|c| Ok((position(&z.class_order, c)?, position(&y_d_prev.class_order, c)?)))
        .collect()
}

/// Localizer distillation: logistic cross-entropy of localizer logits
/// against the previous model, over old classes.
pub fn loss_kdl(z: &ScoreMap, y_d_prev: &ScoreMap, old: &[String]) -> Result<f64> {
    let cols = kdl_columns(z, y_d_prev, old)?;
    let mut sum = 0.0;
    for i in 0..z.num_pixels {
        for &(zc, pc) in &cols {
            sum += bce(y_d_prev.get(i, pc), sigmoid(z.get(i, zc)));
        }
    }
    Ok(sum / (cols.len() * z.num_pixels) as f64)
}

/// `dL/dz`, laid out like `z`; columns outside `old` are zero.
pub fn loss_kdl_grad(z: &ScoreMap, y_d_prev: &ScoreMap, old: &[String]) -> Result<Vec<f64>> {
    let cols = kdl_columns(z, y_d_prev, old)?;
    let n = (cols.len() * z.num_pixels) as f64;
    let k = z.num_classes();
    let mut g = vec![0.0; z.scores.len()];
    for i in 0..z.num_pixels {
        for &(zc, pc) in &cols {
            let t = y_d_prev.get(i, pc);
            let s = sigmoid(z.get(i, zc));
            let mut d = 0.0;
            if s > EPS {
                d -= t * (1.0 - s);
            }
            if 1.0 - s > EPS {
                d += (1.0 - t) * s;
            }
            g[i * k + zc] += d / n;
        }
    }
    Ok(g)
}

pub fn total_loss(parts: &LossParts, w: &LossWeights) -> Result<f64> {
    w.validate()?;
    let terms = [parts.seg, parts.cls, parts.kde, parts.kdl];
    if terms.iter().any(|t| !t.is_finite()) {
        return Err(WilssError::InvalidArgument("loss parts must be finite"));
    }
    Ok(w.seg * parts.seg + w.cls * parts.cls + w.kde * parts.kde + w.kdl * parts.kdl)
}

/// A class is present when it wins the per-pixel argmax (first index on
/// ties) on at least `min_pixels` pixels.
pub fn image_label_from_pixel(y_d_prev: &ScoreMap, min_pixels: usize) -> Result<MultiLabel> {
    y_d_prev.require(ScoreKind::Probabilities)?;
    if min_pixels == 0 {
        return Err(WilssError::InvalidArgument("min_pixels must be >= 1"));
    }
    let mut wins = vec![0usize; y_d_prev.num_classes()];
    for i in 0..y_d_prev.num_pixels {
        let row = y_d_prev.row(i);
        let mut best = 0;
        for (c, &v) in row.iter().enumerate() {
            if v > row[best] {
                best = c;
            }
        }
        wins[best] += 1;
    }
    let bits = wins.iter().map(|&n| n >= min_pixels).collect();
    Ok(MultiLabel::new(y_d_prev.class_order.clone(), bits).expect("lengths match"))
}

/// Losses for a rehearsal image: the previous model's map supervises the
/// current decoder (classes it does not know count as absent), and its
/// argmax-derived image label supervises the pooled localizer over the old
/// classes.
pub fn rehearsal_losses(
    y_d_prev: &ScoreMap,
    y_d: &ScoreMap,
    y_l: &ClassScores,
    old: &[String],
) -> Result<(f64, f64)> {
    let target = y_d_prev.project(y_d.class_order(), 0.0)?;
    let seg = loss_seg(&target, y_d)?;
    let label = image_label_from_pixel(y_d_prev, 1)?;
    let cls = loss_cls(&label, y_l, old)?;
    Ok((seg, cls))
}

#[cfg(test)]
mod tests;
