//! Step plans: a `key = value` text format, one setting per line, `#`
//! comments. Lists are comma separated.
//!
//! ```text
//! name = voc-15-5
//! step = 1
//! old_classes = aeroplane, bicycle, ...
//! new_classes = potted plant, sheep, sofa, train, tv
//! rehearsal = web
//! ```
//!
//! The background class is implicit and always old.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use curator_core::semfilter::{FilterConfig, NounCount};
use curator_core::toy::ToyConfig;
use curator_core::wilss::{KdeNorm, LossWeights, StepContext, WEB_REHEARSAL_KDE_WEIGHT};
use serde::{Deserialize, Serialize};

use crate::error::{CuratorError, Result};
use crate::io;
use crate::websource::CrawlBudget;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TrainSource {
    Dataset,
    Web,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RehearsalMode {
    None,
    Web,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ToySettings {
    pub epochs: usize,
    pub learning_rate: f64,
    pub smoothing: f64,
    pub kde_norm: &'static str,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepPlan {
    pub name: String,
    pub protocol: Option<String>,
    pub step: usize,
    pub background: String,
    pub old_classes: Vec<String>,
    pub new_classes: Vec<String>,
    pub train_source: TrainSource,
    pub rehearsal: RehearsalMode,
    pub budget: CrawlBudget,
    pub filter_threshold: f64,
    pub filter_nouns: String,
    pub seed: u64,
    pub allow_empty: bool,
    pub weights: WeightsEcho,
    pub toy: ToySettings,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightsEcho {
    pub seg: f64,
    pub cls: f64,
    pub kde: f64,
    pub kdl: f64,
}

const KEYS: &[&str] = &[
    "name",
    "protocol",
    "step",
    "background",
    "old_classes",
    "new_classes",
    "train_source",
    "rehearsal",
    "per_class_crawl",
    "per_class_keep",
    "per_caption",
    "rehearsal_per_class",
    "filter_threshold",
    "filter_nouns",
    "seed",
    "allow_empty",
    "weight_seg",
    "weight_cls",
    "weight_kde",
    "weight_kdl",
    "toy_epochs",
    "toy_learning_rate",
    "toy_smoothing",
    "kde_norm",
];

fn list(v: &str) -> Vec<String> {
    v.split(',').map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect()
}

struct Fields {
    map: BTreeMap<String, (usize, String)>,
}

impl Fields {
    fn take(&mut self, key: &str) -> Option<(usize, String)> {
        self.map.remove(key)
    }

    fn parse<T: FromStr>(&mut self, key: &str, default: T) -> Result<T> {
        match self.take(key) {
            None => Ok(default),
            Some((line, v)) => v
                .parse()
                .map_err(|_| CuratorError::config(format!("line {line}: bad value `{v}` for {key}"))),
        }
    }

    fn required(&mut self, key: &str) -> Result<String> {
        self.take(key)
            .map(|(_, v)| v)
            .ok_or_else(|| CuratorError::config(format!("missing required key `{key}`")))
    }
}

impl StepPlan {
    pub fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CuratorError::config(format!("line {}: expected `key = value`", i + 1)))?;
            let k = k.trim();
            if !KEYS.contains(&k) {
                return Err(CuratorError::config(format!("line {}: unknown key `{k}`", i + 1)));
            }
            if map.insert(k.to_string(), (i + 1, v.trim().to_string())).is_some() {
                return Err(CuratorError::config(format!("line {}: duplicate key `{k}`", i + 1)));
            }
        }
        let mut f = Fields { map };
        let d = CrawlBudget::default();
        let rehearsal = match f.take("rehearsal").map(|(_, v)| v).as_deref() {
            None | Some("none") => RehearsalMode::None,
            Some("web") => RehearsalMode::Web,
            Some(o) => return Err(CuratorError::config(format!("rehearsal must be none or web, not `{o}`"))),
        };
        let train_source = match f.take("train_source").map(|(_, v)| v).as_deref() {
            None | Some("web") => TrainSource::Web,
            Some("dataset") => TrainSource::Dataset,
            Some(o) => return Err(CuratorError::config(format!("train_source must be dataset or web, not `{o}`"))),
        };
        let default_kde = if rehearsal == RehearsalMode::Web {
            WEB_REHEARSAL_KDE_WEIGHT
        } else {
            1.0
        };
        let toy_default = ToyConfig::default();
        let kde_norm = match f.take("kde_norm").map(|(_, v)| v).as_deref() {
            None | Some("squared") => "squared",
            Some("euclidean") => "euclidean",
            Some(o) => return Err(CuratorError::config(format!("kde_norm must be squared or euclidean, not `{o}`"))),
        };
        let plan = StepPlan {
            name: f.required("name")?,
            protocol: f.take("protocol").map(|(_, v)| v),
            step: f.parse("step", 1)?,
            background: f.take("background").map(|(_, v)| v).unwrap_or_else(|| "background".into()),
            old_classes: list(&f.required("old_classes")?),
            new_classes: list(&f.required("new_classes")?),
            train_source,
            rehearsal,
            budget: CrawlBudget {
                per_class_crawl: f.parse("per_class_crawl", d.per_class_crawl)?,
                per_class_keep: f.parse("per_class_keep", d.per_class_keep)?,
                per_caption: f.parse("per_caption", d.per_caption)?,
                rehearsal_per_class: f.parse("rehearsal_per_class", d.rehearsal_per_class)?,
            },
            filter_threshold: f.parse("filter_threshold", FilterConfig::default().threshold)?,
            filter_nouns: f.parse("filter_nouns", "2".to_string())?,
            seed: f.parse("seed", 0)?,
            allow_empty: f.parse("allow_empty", false)?,
            weights: WeightsEcho {
                seg: f.parse("weight_seg", 1.0)?,
                cls: f.parse("weight_cls", 1.0)?,
                kde: f.parse("weight_kde", default_kde)?,
                kdl: f.parse("weight_kdl", 1.0)?,
            },
            toy: ToySettings {
                epochs: f.parse("toy_epochs", toy_default.epochs)?,
                learning_rate: f.parse("toy_learning_rate", toy_default.learning_rate)?,
                smoothing: f.parse("toy_smoothing", toy_default.smoothing)?,
                kde_norm,
            },
        };
        plan.validate()?;
        Ok(plan)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&io::read_text(path)?).map_err(|e| match e {
            CuratorError::Config(m) => CuratorError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.step < 1 {
            return Err(CuratorError::config("incremental plans start at step 1"));
        }
        if self.new_classes.is_empty() {
            return Err(CuratorError::config("new_classes is empty"));
        }
        self.context()?;
        self.budget.validate()?;
        self.filter()?;
        self.loss_weights()
            .validate()
            .map_err(CuratorError::config)?;
        self.toy_config(self.seed).validate().map_err(CuratorError::from)?;
        Ok(())
    }

    /// Old classes with the background first.
    pub fn all_old(&self) -> Vec<String> {
        let mut v = vec![self.background.clone()];
        v.extend(self.old_classes.iter().filter(|c| **c != self.background).cloned());
        v
    }

    pub fn context(&self) -> Result<StepContext> {
        StepContext::new(self.all_old(), self.new_classes.clone(), self.background.clone())
            .map_err(|e| CuratorError::config(format!("class layout: {e}")))
    }

    /// Labelable classes of this step, background excluded.
    pub fn label_set(&self) -> Vec<String> {
        self.context()
            .map(|c| c.all_classes().into_iter().filter(|c| *c != self.background).collect())
            .unwrap_or_default()
    }

    pub fn filter(&self) -> Result<FilterConfig> {
        let n: NounCount = self.filter_nouns.parse().map_err(CuratorError::from)?;
        FilterConfig::new(self.filter_threshold, n).map_err(CuratorError::from)
    }

    pub fn loss_weights(&self) -> LossWeights {
        LossWeights {
            seg: self.weights.seg,
            cls: self.weights.cls,
            kde: self.weights.kde,
            kdl: self.weights.kdl,
        }
    }

    pub fn toy_config(&self, seed: u64) -> ToyConfig {
        ToyConfig {
            epochs: self.toy.epochs,
            learning_rate: self.toy.learning_rate,
            batch_size: None,
            smoothing: self.toy.smoothing,
            weights: self.loss_weights(),
            kde_norm: if self.toy.kde_norm == "euclidean" {
                KdeNorm::Euclidean
            } else {
                KdeNorm::Squared
            },
            seed,
        }
    }

    /// Canonical text form; parsing it gives back an equal plan.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: &dyn std::fmt::Display| {
            let _ = writeln!(s, "{k} = {v}");
        };
        kv("name", &self.name);
        if let Some(p) = &self.protocol {
            kv("protocol", p);
        }
        kv("step", &self.step);
        kv("background", &self.background);
        kv("old_classes", &self.old_classes.join(", "));
        kv("new_classes", &self.new_classes.join(", "));
        kv(
            "train_source",
            &match self.train_source {
                TrainSource::Dataset => "dataset",
                TrainSource::Web => "web",
            },
        );
        kv(
            "rehearsal",
            &match self.rehearsal {
                RehearsalMode::None => "none",
                RehearsalMode::Web => "web",
            },
        );
        kv("per_class_crawl", &self.budget.per_class_crawl);
        kv("per_class_keep", &self.budget.per_class_keep);
        kv("per_caption", &self.budget.per_caption);
        kv("rehearsal_per_class", &self.budget.rehearsal_per_class);
        kv("filter_threshold", &self.filter_threshold);
        kv("filter_nouns", &self.filter_nouns);
        kv("seed", &self.seed);
        kv("allow_empty", &self.allow_empty);
        kv("weight_seg", &self.weights.seg);
        kv("weight_cls", &self.weights.cls);
        kv("weight_kde", &self.weights.kde);
        kv("weight_kdl", &self.weights.kdl);
        kv("toy_epochs", &self.toy.epochs);
        kv("toy_learning_rate", &self.toy.learning_rate);
        kv("toy_smoothing", &self.toy.smoothing);
        kv("kde_norm", &self.toy.kde_norm);
        s
    }
}
