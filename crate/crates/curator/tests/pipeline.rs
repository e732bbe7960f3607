use std::path::PathBuf;
use std::sync::OnceLock;

use curator::checkpoint::Checkpoint;
use curator::fixture::{self, shipped_dir};
use curator::pipeline::{self, DiscSettings};
use curator::plan::StepPlan;
use curator::report::{self, StepReport};
use curator::websource::{build_caption_memory, CaptionMemory, Manifest, ManifestCaptions, MockBackend};
use curator::CuratorError;
use curator_core::lexicon::ClassLexicon;
use curator_core::semfilter::WordnetGraph;

fn fx(rel: &str) -> PathBuf {
    shipped_dir().join(rel)
}

fn gate() -> &'static Checkpoint {
    static GATE: OnceLock<Checkpoint> = OnceLock::new();
    GATE.get_or_init(|| {
        let ds = Manifest::load(&fx(fixture::STEP0_MANIFEST)).unwrap();
        let web = Manifest::load(&fx(fixture::NEGATIVES_MANIFEST)).unwrap();
        pipeline::train_discriminator(&ds, &web, None, &DiscSettings::default()).unwrap().0
    })
}

fn web() -> Manifest {
    Manifest::load(&fx(fixture::WEB_MANIFEST)).unwrap()
}

fn plan() -> StepPlan {
    StepPlan::load(&fx(fixture::FIXTURE_PLAN)).unwrap()
}

fn acquire(plan: &StepPlan) -> curator::Result<pipeline::Acquisition> {
    let web = web();
    let captions = ManifestCaptions::from_manifests([&web]);
    pipeline::acquire(plan, gate(), &ClassLexicon::voc(), &captions, &MockBackend::new(web))
}

fn memory() -> CaptionMemory {
    let step0 = Manifest::load(&fx(fixture::STEP0_MANIFEST)).unwrap();
    build_caption_memory(&step0, &ManifestCaptions::from_manifests([&step0])).unwrap()
}

fn rehearse(plan: &StepPlan) -> pipeline::Rehearsal {
    let web = web();
    let captions = ManifestCaptions::from_manifests([&web]);
    pipeline::rehearse(plan, &memory(), &MockBackend::new(web), &captions, &WordnetGraph::mini()).unwrap()
}

#[test]
fn acquired_rows_always_carry_the_queried_class() {
    let a = acquire(&plan()).unwrap();
    assert!(!a.records.is_empty());
    let set = &a.section.label_set;
    for r in &a.records {
        let i = set.iter().position(|c| *c == r.queried_class).unwrap();
        assert_eq!(r.label[i], 1, "{} lacks {}", r.id, r.queried_class);
        assert!(r.classes.contains(&r.queried_class));
        assert!(!r.caption.contains("cat sleeping"), "cat-only caption kept: {}", r.caption);
    }
}

#[test]
fn co_occurring_classes_get_both_bits() {
    let a = acquire(&plan()).unwrap();
    let row = a
        .records
        .iter()
        .find(|r| r.caption == "a person standing on a boat")
        .expect("person-on-boat row is acquired");
    assert!(row.classes.contains(&"person".to_string()) && row.classes.contains(&"boat".to_string()));
}

#[test]
fn funnel_is_monotone_and_sorted_by_score() {
    let p = plan();
    let a = acquire(&p).unwrap();
    for f in &a.section.funnel {
        assert!(f.is_monotone(), "{f:?}");
        assert!(f.kept <= p.budget.per_class_keep);
        let scores: Vec<f64> = a.records.iter().filter(|r| r.queried_class == f.class).map(|r| r.score).collect();
        assert_eq!(scores.len(), f.kept);
        assert!(scores.windows(2).all(|w| w[0] >= w[1]));
    }
}

#[test]
fn short_classes_are_reported() {
    let mut p = plan();
    p.budget.per_class_keep = 50;
    let a = acquire(&p).unwrap();
    assert_eq!(a.section.warnings.len(), p.new_classes.len());
    assert!(a.section.warnings[0].contains("fewer than per_class_keep"));
}

#[test]
fn empty_class_is_a_data_error_unless_allowed() {
    let mut p = plan();
    p.new_classes = vec!["bus".into()];
    assert!(matches!(acquire(&p), Err(CuratorError::Data(_))));
    p.allow_empty = true;
    let a = acquire(&p).unwrap();
    assert!(a.records.is_empty());
    assert_eq!(a.section.funnel[0].kept, 0);
    assert_eq!(a.section.warnings.len(), 1);
}

#[test]
fn unknown_class_is_a_config_error() {
    let mut p = plan();
    p.new_classes = vec!["unicorn".into()];
    assert!(matches!(acquire(&p), Err(CuratorError::Config(_))));
}

#[test]
fn rehearsal_respects_the_per_class_cap() {
    let mut p = plan();
    p.budget.rehearsal_per_class = 5;
    let r = rehearse(&p);
    assert!(r.section.per_class.values().all(|&n| n <= 5), "{:?}", r.section.per_class);
    assert!(r.section.is_monotone());
    for c in r.section.per_class.keys() {
        let n = r.records.iter().filter(|x| x.classes.contains(c)).count();
        assert_eq!(n, r.section.per_class[c]);
    }
    assert!(r.records.iter().all(|x| !x.classes.contains(&p.background)));
}

#[test]
fn rehearsal_is_deterministic() {
    let p = plan();
    assert_eq!(rehearse(&p), rehearse(&p));
}

#[test]
fn rehearsed_captions_pass_the_filter() {
    let p = plan();
    let r = rehearse(&p);
    assert!(r.records.iter().all(|x| x.similarity >= p.filter_threshold && x.best_pair.is_some()));
    assert_eq!(
        r.section.captioned,
        r.section.filter_kept + r.section.rejected_no_nouns + r.section.rejected_below_threshold
    );
}

#[test]
fn merge_orders_steps() {
    let reports = vec![StepReport::new(3, None), StepReport::new(1, None), StepReport::new(2, None)];
    let s = report::merge(reports);
    let steps: Vec<usize> = s.steps.iter().map(|r| r.step).collect();
    assert_eq!(steps, [1, 2, 3]);
}
