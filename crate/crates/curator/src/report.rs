//! Step reports: stage counts, training curves and config echoes, plus the
//! merged summary rendered by `curator report`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use curator_core::wilss::LossParts;
use serde::{Deserialize, Serialize};

use crate::plan::WeightsEcho;

pub const REPORT_FORMAT: &str = "curator-step-report/1";
pub const SUMMARY_FORMAT: &str = "curator-summary/1";

/// JSON Schema for a single step report.
pub const STEP_REPORT_SCHEMA: &str = include_str!("../schema/step_report.schema.json");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepReport {
    pub format: String,
    pub step: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plan: Option<String>,
    /// Settings of every command that contributed, keyed by command name.
    #[serde(default)]
    pub config: BTreeMap<String, serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub discriminator: Option<DiscriminatorSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub acquisition: Option<AcquisitionSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rehearsal: Option<RehearsalSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub toy: Option<ToySection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ablation: Option<AblationSection>,
}

impl StepReport {
    pub fn new(step: usize, plan: Option<String>) -> Self {
        Self {
            format: REPORT_FORMAT.to_string(),
            step,
            plan,
            config: BTreeMap::new(),
            discriminator: None,
            acquisition: None,
            rehearsal: None,
            toy: None,
            ablation: None,
        }
    }

    /// Fills sections missing here from `other`; sections present in both
    /// keep `other`'s copy.
    fn absorb(&mut self, other: StepReport) {
        if self.plan.is_none() {
            self.plan = other.plan;
        }
        self.config.extend(other.config);
        macro_rules! take {
            ($($f:ident),*) => {$(
                if other.$f.is_some() {
                    if self.$f.is_some() {
                        log::warn!("step {}: duplicate {} section, keeping the later one", self.step, stringify!($f));
                    }
                    self.$f = other.$f;
                }
            )*};
        }
        take!(discriminator, acquisition, rehearsal, toy, ablation);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiscriminatorSection {
    pub dataset_images: usize,
    pub web_images: usize,
    pub initial_accuracy: f64,
    pub epoch_accuracy: Vec<f64>,
    pub epoch_loss: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub holdout_accuracy: Option<f64>,
}

/// Per-class acquisition funnel.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunnelRow {
    pub class: String,
    pub crawled: usize,
    pub gated: usize,
    pub labeled: usize,
    pub kept: usize,
}

impl FunnelRow {
    pub fn is_monotone(&self) -> bool {
        self.crawled >= self.gated && self.gated >= self.labeled && self.labeled >= self.kept
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AcquisitionSection {
    pub label_set: Vec<String>,
    pub funnel: Vec<FunnelRow>,
    pub caption_failures: usize,
    #[serde(default)]
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RehearsalSection {
    pub memory_entries: usize,
    pub retrieved: usize,
    pub unique: usize,
    pub captioned: usize,
    pub filter_kept: usize,
    #[serde(rename = "final")]
    pub final_count: usize,
    pub per_class: BTreeMap<String, usize>,
    pub query_failures: usize,
    pub caption_failures: usize,
    pub rejected_no_nouns: usize,
    pub rejected_below_threshold: usize,
}

impl RehearsalSection {
    pub fn is_monotone(&self) -> bool {
        self.retrieved >= self.unique
            && self.unique >= self.captioned
            && self.captioned >= self.filter_kept
            && self.filter_kept >= self.final_count
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartsEcho {
    pub seg: f64,
    pub cls: f64,
    pub kde: f64,
    pub kdl: f64,
}

impl From<LossParts> for PartsEcho {
    fn from(p: LossParts) -> Self {
        Self {
            seg: p.seg,
            cls: p.cls,
            kde: p.kde,
            kdl: p.kdl,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToyEcho {
    pub epochs: usize,
    pub learning_rate: f64,
    pub smoothing: f64,
    pub kde_norm: String,
    pub weights: WeightsEcho,
    pub seed: u64,
    pub web_rehearsal: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToySection {
    pub config: ToyEcho,
    pub train_images: usize,
    pub rehearsal_images: usize,
    /// Entry 0 is the loss before the first update.
    pub epoch_loss: Vec<f64>,
    pub epoch_parts: Vec<PartsEcho>,
    pub decreasing_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AblationCell {
    pub threshold: f64,
    pub nouns: String,
    pub pairs: usize,
    pub kept: usize,
    pub kept_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AblationSection {
    pub pairs: usize,
    pub cells: Vec<AblationCell>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Summary {
    pub format: String,
    pub steps: Vec<StepReport>,
}

/// Groups reports by step (ascending); reports of the same step are merged
/// in input order.
pub fn merge(reports: Vec<StepReport>) -> Summary {
    let mut by_step: BTreeMap<usize, StepReport> = BTreeMap::new();
    for r in reports {
        match by_step.get_mut(&r.step) {
            Some(existing) => existing.absorb(r),
            None => {
                by_step.insert(r.step, r);
            }
        }
    }
    Summary {
        format: SUMMARY_FORMAT.to_string(),
        steps: by_step.into_values().collect(),
    }
}

fn curve(values: &[f64]) -> String {
    values.iter().map(|v| format!("{v:.4}")).collect::<Vec<_>>().join(" ")
}

pub fn render_text(summary: &Summary) -> String {
    let mut s = String::new();
    for r in &summary.steps {
        let _ = writeln!(s, "step {}{}", r.step, r.plan.as_ref().map(|p| format!(" ({p})")).unwrap_or_default());
        if let Some(d) = &r.discriminator {
            let _ = writeln!(s, "  discriminator: {} dataset / {} web images", d.dataset_images, d.web_images);
            let _ = writeln!(s, "    accuracy: {:.4} -> {}", d.initial_accuracy, curve(&d.epoch_accuracy));
            if let Some(h) = d.holdout_accuracy {
                let _ = writeln!(s, "    holdout accuracy: {h:.4}");
            }
        }
        if let Some(a) = &r.acquisition {
            let _ = writeln!(s, "  acquisition");
            let _ = writeln!(s, "    {:<16} {:>8} {:>8} {:>8} {:>8}", "class", "crawled", "gated", "labeled", "kept");
            for f in &a.funnel {
                let _ = writeln!(
                    s,
                    "    {:<16} {:>8} {:>8} {:>8} {:>8}",
                    f.class, f.crawled, f.gated, f.labeled, f.kept
                );
            }
            for w in &a.warnings {
                let _ = writeln!(s, "    warning: {w}");
            }
        }
        if let Some(h) = &r.rehearsal {
            let _ = writeln!(s, "  rehearsal");
            let _ = writeln!(
                s,
                "    memory {}  retrieved {}  unique {}  captioned {}  filter_kept {}  final {}",
                h.memory_entries, h.retrieved, h.unique, h.captioned, h.filter_kept, h.final_count
            );
            let per: Vec<String> = h.per_class.iter().map(|(c, n)| format!("{c} {n}")).collect();
            let _ = writeln!(s, "    per class: {}", per.join(", "));
            let _ = writeln!(
                s,
                "    rejected: {} without nouns, {} below threshold",
                h.rejected_no_nouns, h.rejected_below_threshold
            );
        }
        if let Some(t) = &r.toy {
            let w = &t.config.weights;
            let _ = writeln!(s, "  toy trainer");
            let _ = writeln!(
                s,
                "    epochs {}  lr {}  weights seg {} cls {} kde {} kdl {}",
                t.config.epochs, t.config.learning_rate, w.seg, w.cls, w.kde, w.kdl
            );
            let _ = writeln!(s, "    loss: {}", curve(&t.epoch_loss));
            let _ = writeln!(s, "    decreasing transitions: {:.1}%", t.decreasing_fraction * 100.0);
        }
        if let Some(a) = &r.ablation {
            let _ = writeln!(s, "  filter ablation over {} pairs", a.pairs);
            for c in &a.cells {
                let _ = writeln!(s, "    T={:<5} N={:<4} kept {:>5} ({:.3})", c.threshold, c.nouns, c.kept, c.kept_rate);
            }
        }
    }
    s
}

/// Toy loss curves of every step on one chart, or `None` when no step has
/// one.
pub fn render_svg(summary: &Summary) -> Option<String> {
    let curves: Vec<(usize, &[f64])> = summary
        .steps
        .iter()
        .filter_map(|r| r.toy.as_ref().map(|t| (r.step, t.epoch_loss.as_slice())))
        .filter(|(_, c)| !c.is_empty())
        .collect();
    if curves.is_empty() {
        return None;
    }
    let (w, h, pad) = (640.0, 400.0, 40.0);
    let max_len = curves.iter().map(|(_, c)| c.len()).max().unwrap_or(1).max(2) - 1;
    let all = curves.iter().flat_map(|(_, c)| c.iter().copied());
    let (lo, hi) = all.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    let span = if hi > lo { hi - lo } else { 1.0 };
    let colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"];
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#);
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<path d="M{pad} {pad} V{} H{}" fill="none" stroke="black"/>"#,
        h - pad,
        w - pad
    );
    let _ = writeln!(s, r#"<text x="{pad}" y="{}" font-size="12">{hi:.4}</text>"#, pad - 6.0);
    let _ = writeln!(s, r#"<text x="{pad}" y="{}" font-size="12">{lo:.4}</text>"#, h - pad + 16.0);
    for (k, (step, c)) in curves.iter().enumerate() {
        let pts: Vec<String> = c
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let x = pad + (w - 2.0 * pad) * i as f64 / max_len as f64;
                let y = h - pad - (h - 2.0 * pad) * (v - lo) / span;
                format!("{x:.2},{y:.2}")
            })
            .collect();
        let color = colors[k % colors.len()];
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
            pts.join(" ")
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-size="12" fill="{color}">step {step}</text>"#,
            w - pad - 50.0,
            pad + 14.0 * (k as f64 + 1.0)
        );
    }
    s.push_str("</svg>\n");
    Some(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn acq(step: usize) -> StepReport {
        let mut r = StepReport::new(step, Some("p".into()));
        r.acquisition = Some(AcquisitionSection {
            label_set: vec!["dog".into()],
            funnel: vec![FunnelRow {
                class: "dog".into(),
                crawled: 10,
                gated: 7,
                labeled: 4,
                kept: 3,
            }],
            caption_failures: 0,
            warnings: vec![],
        });
        r
    }

    fn toy(step: usize) -> StepReport {
        let mut r = StepReport::new(step, None);
        r.toy = Some(ToySection {
            config: ToyEcho {
                epochs: 2,
                learning_rate: 0.5,
                smoothing: 0.1,
                kde_norm: "squared".into(),
                weights: WeightsEcho {
                    seg: 1.0,
                    cls: 1.0,
                    kde: 0.5,
                    kdl: 1.0,
                },
                seed: 0,
                web_rehearsal: true,
            },
            train_images: 1,
            rehearsal_images: 0,
            epoch_loss: vec![2.0, 1.5, 1.2],
            epoch_parts: vec![],
            decreasing_fraction: 1.0,
        });
        r
    }

    #[test]
    fn merge_orders_steps_and_combines_sections() {
        let s = merge(vec![toy(2), acq(1), toy(1)]);
        assert_eq!(s.steps.iter().map(|r| r.step).collect::<Vec<_>>(), vec![1, 2]);
        assert!(s.steps[0].acquisition.is_some() && s.steps[0].toy.is_some());
        assert_eq!(s.steps[0].plan.as_deref(), Some("p"));
    }

    #[test]
    fn text_echoes_counts() {
        let t = render_text(&merge(vec![acq(1)]));
        assert!(t.contains("dog"), "{t}");
        assert!(t.contains("      10        7        4        3"), "{t}");
    }

    #[test]
    fn svg_only_with_curves() {
        assert!(render_svg(&merge(vec![acq(1)])).is_none());
        let svg = render_svg(&merge(vec![toy(1), toy(2)])).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 2);
    }

    #[test]
    fn json_round_trip() {
        let r = toy(3);
        let back: StepReport = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
        assert_eq!(back, r);
    }
}
