//! The pipeline stages behind the CLI. Each stage returns its outputs in
//! memory; the CLI writes them under `--out`.

use std::collections::{BTreeMap, HashSet};
use std::path::Path;

use curator_core::discriminator::{self, MlpModel, TrainConfig, DEFAULT_HEAD};
use curator_core::imaging::{spectrum_signature, DEFAULT_GRID_SIZE, DEFAULT_SIDE};
use curator_core::lexicon::{should_discard, Caption, CaptionSource, ClassLexicon, MultiLabel};
use curator_core::semfilter::{FilterConfig, NounCount, RejectReason, WordnetGraph};
use curator_core::toy::{self, ToyModel, ToySample};
use curator_core::wilss::StepContext;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::checkpoint::Checkpoint;
use crate::error::{CuratorError, Result};
use crate::io;
use crate::plan::{RehearsalMode, StepPlan};
use crate::report::{
    AblationCell, AblationSection, AcquisitionSection, DiscriminatorSection, FunnelRow, PartsEcho, RehearsalSection,
    ToyEcho, ToySection,
};
use crate::websource::{rehearsal_query, Backend, CaptionMemory, CaptionProvider, Manifest, WebRecord};

/// Spectrum features of every manifest image, in manifest order.
pub fn manifest_features(m: &Manifest, side: usize, grid_size: usize) -> Result<Vec<Vec<f64>>> {
    m.records()
        .par_iter()
        .map(|r| {
            let path = m.resolve(&r.file);
            let img = io::load_image(&path)?;
            spectrum_signature(&img, side, grid_size)
                .map(|f| f.into_values())
                .map_err(|e| CuratorError::io(&path, e))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscSettings {
    pub side: usize,
    pub grid_size: usize,
    pub hidden: Vec<usize>,
    pub epochs: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub target_accuracy: Option<f64>,
    pub seed: u64,
}

impl Default for DiscSettings {
    fn default() -> Self {
        let t = TrainConfig::default();
        Self {
            side: DEFAULT_SIDE,
            grid_size: DEFAULT_GRID_SIZE,
            hidden: DEFAULT_HEAD[..DEFAULT_HEAD.len() - 1].to_vec(),
            epochs: t.epochs,
            learning_rate: t.learning_rate,
            batch_size: t.batch_size,
            target_accuracy: t.target_accuracy,
            seed: t.seed,
        }
    }
}

/// Trains the gate on step-0 dataset images against web images.
pub fn train_discriminator(
    dataset: &Manifest,
    web: &Manifest,
    holdout: Option<(&Manifest, &Manifest)>,
    s: &DiscSettings,
) -> Result<(Checkpoint, DiscriminatorSection)> {
    if dataset.is_empty() {
        return Err(CuratorError::data("dataset manifest is empty"));
    }
    if web.is_empty() {
        return Err(CuratorError::data("web manifest is empty"));
    }
    let cfg = TrainConfig {
        learning_rate: s.learning_rate,
        epochs: s.epochs,
        batch_size: s.batch_size,
        seed: s.seed,
        shuffle: true,
        target_accuracy: s.target_accuracy,
    };
    cfg.validate()?;
    let mut dims = vec![s.grid_size * s.grid_size];
    dims.extend(&s.hidden);
    dims.push(2);
    let model = MlpModel::init(&dims, s.seed)?;
    let pos = manifest_features(dataset, s.side, s.grid_size)?;
    let neg = manifest_features(web, s.side, s.grid_size)?;
    let outcome = discriminator::train(model, &pos, &neg, &cfg)?;
    let holdout_accuracy = match holdout {
        None => None,
        Some((hd, hw)) => {
            let hp = manifest_features(hd, s.side, s.grid_size)?;
            let hn = manifest_features(hw, s.side, s.grid_size)?;
            Some(discriminator::accuracy(&outcome.model, &hp, &hn)?)
        }
    };
    let section = DiscriminatorSection {
        dataset_images: pos.len(),
        web_images: neg.len(),
        initial_accuracy: outcome.initial_accuracy,
        epoch_accuracy: outcome.epoch_accuracy,
        epoch_loss: outcome.epoch_loss,
        holdout_accuracy,
    };
    Ok((Checkpoint::new(s.side, s.grid_size, outcome.model)?, section))
}

/// One row of the acquired training manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AcquiredRecord {
    pub id: String,
    pub file: String,
    pub queried_class: String,
    pub caption: String,
    /// Multi-hot over the step's label set.
    pub label: Vec<u8>,
    /// Names of the set bits.
    pub classes: Vec<String>,
    pub p_ds: f64,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Acquisition {
    pub records: Vec<AcquiredRecord>,
    pub section: AcquisitionSection,
}

struct Candidate {
    record: WebRecord,
    p_ds: f64,
    score: f64,
}

/// Crawl, gate, caption, label and select images for every new class.
pub fn acquire(
    plan: &StepPlan,
    gate: &Checkpoint,
    lexicon: &ClassLexicon,
    provider: &dyn CaptionProvider,
    backend: &dyn Backend,
) -> Result<Acquisition> {
    let label_set = plan.label_set();
    if let Some(c) = label_set.iter().find(|c| lexicon.class_index(c).is_none()) {
        return Err(CuratorError::config(format!("class `{c}` is not in the lexicon")));
    }
    let budget = plan.budget;
    let mut seen: HashSet<String> = HashSet::new();
    let mut records = Vec::new();
    let mut funnel = Vec::new();
    let mut warnings = Vec::new();
    let mut caption_failures = 0;

    for class in &plan.new_classes {
        let crawled: Vec<WebRecord> = backend
            .query(class, budget.per_class_crawl)?
            .into_iter()
            .filter(|r| seen.insert(r.source_id.clone()))
            .collect();

        let gated: Vec<Candidate> = crawled
            .par_iter()
            .map(|r| {
                let img = io::load_image(&r.image_ref)?;
                let f = spectrum_signature(&img, gate.side, gate.grid_size).map_err(|e| CuratorError::io(&r.image_ref, e))?;
                let d = discriminator::gate(&gate.model, f.values())?;
                Ok(d.accepted.then(|| Candidate {
                    record: r.clone(),
                    p_ds: d.p_ds,
                    score: d.score,
                }))
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .collect();

        let captioned: Vec<_> = gated.par_iter().map(|c| provider.caption_of(&c.record)).collect();
        let mut labeled = Vec::new();
        for (cand, cap) in gated.iter().zip(captioned) {
            let cap = match cap {
                Ok(c) => c,
                Err(e) => {
                    log::warn!("{e}");
                    caption_failures += 1;
                    continue;
                }
            };
            let label = lexicon.derive_label(&cap, &label_set)?;
            if should_discard(&label, class)? {
                log::debug!("discarding {}: caption `{}` lacks `{class}`", cand.record.source_id, cap.text);
                continue;
            }
            labeled.push((cand, cap, label));
        }

        let scores: Vec<_> = labeled.iter().map(|(c, ..)| c.score).collect();
        let mut order: Vec<usize> = (0..labeled.len()).collect();
        order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
        if labeled.is_empty() {
            let msg = format!("class `{class}`: no image survived acquisition");
            if !plan.allow_empty {
                return Err(CuratorError::data(msg));
            }
            log::warn!("{msg}");
            warnings.push(msg);
        } else if labeled.len() < budget.per_class_keep {
            let msg = format!(
                "class `{class}`: {} survivors, fewer than per_class_keep = {}",
                labeled.len(),
                budget.per_class_keep
            );
            log::warn!("{msg}");
            warnings.push(msg);
        }
        let kept: Vec<usize> = order.into_iter().take(budget.per_class_keep).collect();
        for &i in &kept {
            let (cand, cap, label) = &labeled[i];
            records.push(acquired_row(cand, cap, label, class));
        }
        funnel.push(FunnelRow {
            class: class.clone(),
            crawled: crawled.len(),
            gated: gated.len(),
            labeled: labeled.len(),
            kept: kept.len(),
        });
    }
    Ok(Acquisition {
        records,
        section: AcquisitionSection {
            label_set,
            funnel,
            caption_failures,
            warnings,
        },
    })
}

fn acquired_row(cand: &Candidate, cap: &Caption, label: &MultiLabel, class: &str) -> AcquiredRecord {
    AcquiredRecord {
        id: cand.record.source_id.clone(),
        file: cand.record.image_ref.display().to_string(),
        queried_class: class.to_string(),
        caption: cap.text.clone(),
        label: label.bits().iter().map(|&b| u8::from(b)).collect(),
        classes: label.positives().into_iter().map(String::from).collect(),
        p_ds: cand.p_ds,
        score: cand.score,
    }
}

/// One row of the rehearsal manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RehearsalRecord {
    pub id: String,
    pub file: String,
    /// Class tags of the memory entry that retrieved the image.
    pub classes: Vec<String>,
    pub stored_caption: String,
    pub caption: String,
    pub similarity: f64,
    pub best_pair: Option<(String, String)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rehearsal {
    pub records: Vec<RehearsalRecord>,
    pub section: RehearsalSection,
}

/// Retrieves images with the stored captions, keeps the ones whose fresh
/// caption is semantically close to the stored one and caps each old class
/// at `rehearsal_per_class` images.
pub fn rehearse(
    plan: &StepPlan,
    memory: &CaptionMemory,
    backend: &dyn Backend,
    provider: &dyn CaptionProvider,
    graph: &WordnetGraph,
) -> Result<Rehearsal> {
    let cfg = plan.filter()?;
    let q = rehearsal_query(memory, backend, &plan.budget)?;
    let old: Vec<String> = plan.all_old().into_iter().filter(|c| *c != plan.background).collect();

    let judged: Vec<_> = q
        .hits
        .par_iter()
        .map(|hit| {
            let stored = Caption::new(memory.entries[hit.entry].caption.clone(), CaptionSource::Stored);
            provider.caption_of(&hit.record).map(|c| {
                let regenerated = Caption::new(c.text, CaptionSource::Regenerated);
                let d = graph.filter_pair(&stored, &regenerated, &cfg);
                (regenerated, d)
            })
        })
        .collect();

    let mut per_class: BTreeMap<String, usize> = old.iter().map(|c| (c.clone(), 0)).collect();
    let mut records = Vec::new();
    let (mut captioned, mut filter_kept, mut caption_failures, mut no_nouns, mut below) = (0, 0, 0, 0, 0);
    for (hit, j) in q.hits.iter().zip(judged) {
        let (regenerated, d) = match j {
            Ok(x) => x,
            Err(e) => {
                log::warn!("{e}");
                caption_failures += 1;
                continue;
            }
        };
        captioned += 1;
        match d.reason {
            Some(RejectReason::NoNouns) => {
                log::debug!("rejecting {}: no nouns in `{}`", hit.record.source_id, regenerated.text);
                no_nouns += 1;
                continue;
            }
            Some(RejectReason::BelowThreshold) => {
                log::debug!(
                    "rejecting {}: similarity {:.3} below {}",
                    hit.record.source_id,
                    d.best_similarity,
                    cfg.threshold
                );
                below += 1;
                continue;
            }
            None => {}
        }
        filter_kept += 1;
        let entry = &memory.entries[hit.entry];
        let tags: Vec<&String> = entry.classes.iter().filter(|c| per_class.contains_key(*c)).collect();
        if tags.is_empty() || tags.iter().any(|c| per_class[*c] >= plan.budget.rehearsal_per_class) {
            continue;
        }
        for c in &tags {
            *per_class.get_mut(*c).unwrap() += 1;
        }
        records.push(RehearsalRecord {
            id: hit.record.source_id.clone(),
            file: hit.record.image_ref.display().to_string(),
            classes: tags.into_iter().cloned().collect(),
            stored_caption: entry.caption.clone(),
            caption: regenerated.text,
            similarity: d.best_similarity,
            best_pair: d.best_pair,
        });
    }
    let section = RehearsalSection {
        memory_entries: memory.len(),
        retrieved: q.retrieved,
        unique: q.hits.len(),
        captioned,
        filter_kept,
        final_count: records.len(),
        per_class,
        query_failures: q.failures.len(),
        caption_failures,
        rejected_no_nouns: no_nouns,
        rejected_below_threshold: below,
    };
    Ok(Rehearsal { records, section })
}

/// One row of a toy-trainer manifest. Paths are relative to the manifest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToyRow {
    pub id: String,
    pub file: String,
    /// Old-model probabilities (`.wsm`).
    pub y_d_prev: String,
    /// Old-model features (`.wfm`).
    pub e_prev: String,
    /// New classes present in the image; absent for rehearsal rows.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

pub fn load_toy_samples(path: &Path, ctx: &StepContext) -> Result<Vec<ToySample>> {
    let rows: Vec<ToyRow> = io::read_jsonl(path)?;
    let root = path.parent().unwrap_or(Path::new(""));
    rows.par_iter()
        .map(|r| {
            let img = io::load_image(&root.join(&r.file))?;
            let label = match &r.labels {
                None => None,
                Some(names) => {
                    if let Some(bad) = names.iter().find(|n| !ctx.new_classes().contains(n)) {
                        return Err(CuratorError::data(format!(
                            "{}: `{}` labels `{bad}`, which is not a new class",
                            path.display(),
                            r.id
                        )));
                    }
                    let bits = ctx.new_classes().iter().map(|c| names.contains(c)).collect();
                    MultiLabel::new(ctx.new_classes().to_vec(), bits)
                }
            };
            Ok(ToySample {
                width: img.width(),
                height: img.height(),
                rgb: img.data().to_vec(),
                label,
                y_d_prev: io::read_score_map(&root.join(&r.y_d_prev))?,
                e_prev: io::read_feature_map(&root.join(&r.e_prev))?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ToyRun {
    pub model: ToyModel,
    pub section: ToySection,
}

/// Trains the toy scorer on new-step images plus rehearsal images.
pub fn toy_step(
    plan: &StepPlan,
    train: &[ToySample],
    rehearsal: &[ToySample],
    epochs: Option<usize>,
    seed: u64,
) -> Result<ToyRun> {
    if train.is_empty() {
        return Err(CuratorError::data("toy training manifest is empty"));
    }
    if let Some(i) = train.iter().position(|s| s.label.is_none()) {
        return Err(CuratorError::data(format!("training row {i} has no labels")));
    }
    let ctx = plan.context()?;
    let mut cfg = plan.toy_config(seed);
    if let Some(e) = epochs {
        cfg.epochs = e;
    }
    let samples: Vec<ToySample> = train.iter().chain(rehearsal).cloned().collect();
    let model = ToyModel::init(ctx.all_classes(), seed);
    let out = toy::train(model, &samples, &ctx, &cfg)?;
    let section = ToySection {
        config: ToyEcho {
            epochs: cfg.epochs,
            learning_rate: cfg.learning_rate,
            smoothing: cfg.smoothing,
            kde_norm: plan.toy.kde_norm.to_string(),
            weights: plan.weights,
            seed,
            web_rehearsal: plan.rehearsal == RehearsalMode::Web,
        },
        train_images: train.len(),
        rehearsal_images: rehearsal.len(),
        decreasing_fraction: toy::decreasing_fraction(&out.epoch_loss),
        epoch_loss: out.epoch_loss,
        epoch_parts: out.epoch_parts.into_iter().map(PartsEcho::from).collect(),
    };
    Ok(ToyRun {
        model: out.model,
        section,
    })
}

/// `stored<TAB>regenerated` per line; blank lines and `#` comments skipped.
pub fn parse_caption_pairs(text: &str, origin: &Path) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let (a, b) = line
            .split_once('\t')
            .ok_or_else(|| CuratorError::data(format!("{} line {}: expected two tab-separated captions", origin.display(), i + 1)))?;
        out.push((a.to_string(), b.to_string()));
    }
    Ok(out)
}

/// Kept-rate of the filter for every `(N, T)` combination, `N` outer.
pub fn ablate_filter(
    pairs: &[(String, String)],
    graph: &WordnetGraph,
    thresholds: &[f64],
    nouns: &[NounCount],
) -> Result<AblationSection> {
    if pairs.is_empty() {
        return Err(CuratorError::data("caption-pair corpus is empty"));
    }
    let caps: Vec<(Caption, Caption)> = pairs
        .iter()
        .map(|(a, b)| (Caption::new(a.clone(), CaptionSource::Stored), Caption::new(b.clone(), CaptionSource::Regenerated)))
        .collect();
    let mut cells = Vec::new();
    for &n in nouns {
        for &t in thresholds {
            let cfg = FilterConfig::new(t, n)?;
            let kept = caps.par_iter().filter(|(a, b)| graph.filter_pair(a, b, &cfg).kept).count();
            cells.push(AblationCell {
                threshold: t,
                nouns: n.to_string(),
                pairs: pairs.len(),
                kept,
                kept_rate: kept as f64 / pairs.len() as f64,
            });
        }
    }
    Ok(AblationSection {
        pairs: pairs.len(),
        cells,
    })
}
