//! Generator for the bundled offline corpus under `fixtures/`.
//!
//! Everything is derived from one seed, so `curator fixture --out DIR`
//! reproduces the shipped tree byte for byte.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use curator_core::imaging::{netpbm, RasterImage};
use curator_core::lexicon::pluralize;
use curator_core::toy::{synthetic_fixture, ToySample};
use curator_core::wilss::codec;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::io;
use crate::pipeline::ToyRow;
use crate::websource::ManifestRecord;

pub const SEED: u64 = 2024;
pub const IMAGE_SIDE: usize = 32;

pub const STEP0_MANIFEST: &str = "step0/manifest.jsonl";
pub const STEP0_HOLDOUT: &str = "step0/holdout.jsonl";
pub const NEGATIVES_MANIFEST: &str = "negatives/manifest.jsonl";
pub const NEGATIVES_HOLDOUT: &str = "negatives/holdout.jsonl";
pub const WEB_MANIFEST: &str = "web/manifest.jsonl";
pub const CAPTION_PAIRS: &str = "caption_pairs.tsv";
pub const TOY_TRAIN: &str = "toy/train.jsonl";
pub const TOY_REHEARSAL: &str = "toy/rehearsal.jsonl";
pub const FIXTURE_PLAN: &str = "plans/fixture.plan";
pub const TOY_PLAN: &str = "plans/toy.plan";
pub const TOY_PLAN_NO_REHEARSAL: &str = "plans/toy-no-rehearsal.plan";

const STEP0_TRAIN: usize = 50;
const HOLDOUT: usize = 20;

const PLANS: &[(&str, &str)] = &[
    (
        FIXTURE_PLAN,
        "# Bundled fixture step: three old classes, three new ones, web rehearsal.
name = fixture
protocol = fixture 3-3
step = 1
old_classes = cat, person, sofa
new_classes = dog, horse, boat
train_source = web
rehearsal = web
per_class_crawl = 40
per_class_keep = 6
per_caption = 20
rehearsal_per_class = 100
filter_threshold = 0.6
filter_nouns = 2
seed = 7
",
    ),
    (
        TOY_PLAN,
        "# 8x8 toy step over the old background/cat model, dog is new.
name = toy
step = 1
old_classes = cat
new_classes = dog
rehearsal = web
toy_epochs = 30
toy_learning_rate = 0.5
toy_smoothing = 0.1
seed = 0
",
    ),
    (
        TOY_PLAN_NO_REHEARSAL,
        "name = toy-no-rehearsal
step = 1
old_classes = cat
new_classes = dog
rehearsal = none
toy_epochs = 30
toy_learning_rate = 0.5
seed = 0
",
    ),
    (
        "plans/voc-15-5.plan",
        "# VOC 15-5 overlapped, step 1.
name = voc-15-5
protocol = 15-5 overlapped
step = 1
old_classes = aeroplane, bicycle, bird, boat, bottle, bus, car, cat, chair, cow, dining table, dog, horse, motorbike, person
new_classes = potted plant, sheep, sofa, train, tv
train_source = web
rehearsal = web
",
    ),
    (
        "plans/voc-10-10.plan",
        "# VOC 10-10 overlapped, step 1.
name = voc-10-10
protocol = 10-10 overlapped
step = 1
old_classes = aeroplane, bicycle, bird, boat, bottle, bus, car, cat, chair, cow
new_classes = dining table, dog, horse, motorbike, person, potted plant, sheep, sofa, train, tv
train_source = web
rehearsal = web
",
    ),
    (
        "plans/voc-15-1.plan",
        "# VOC 15-1 overlapped, first of five steps; later steps add sheep,
# sofa, train and tv one at a time.
name = voc-15-1
protocol = 15-1 overlapped
step = 1
old_classes = aeroplane, bicycle, bird, boat, bottle, bus, car, cat, chair, cow, dining table, dog, horse, motorbike, person
new_classes = potted plant
train_source = web
rehearsal = web
",
    ),
    (
        "plans/voc-10-1.plan",
        "# VOC 10-1 overlapped, first of ten steps.
name = voc-10-1
protocol = 10-1 overlapped
step = 1
old_classes = aeroplane, bicycle, bird, boat, bottle, bus, car, cat, chair, cow
new_classes = dining table
train_source = web
rehearsal = web
",
    ),
];

fn q(v: f64) -> f64 {
    (v.clamp(0.0, 1.0) * 255.0).round() / 255.0
}

fn color(rng: &mut ChaCha8Rng) -> [f64; 3] {
    [rng.gen_range(0.1..0.9), rng.gen_range(0.1..0.9), rng.gen_range(0.1..0.9)]
}

/// Two-color linear gradient with a soft blob: what the dataset looks like.
pub fn smooth_image(rng: &mut ChaCha8Rng) -> RasterImage {
    let (c0, c1, c2) = (color(rng), color(rng), color(rng));
    let theta = rng.gen_range(0.0..std::f64::consts::TAU);
    let (cx, cy) = (rng.gen_range(4.0..28.0), rng.gen_range(4.0..28.0));
    let r = rng.gen_range(6.0..14.0);
    let s = IMAGE_SIDE as f64;
    RasterImage::from_fn(IMAGE_SIDE, IMAGE_SIDE, |x, y| {
        let (x, y) = (x as f64, y as f64);
        let t = (((x - s / 2.0) * theta.cos() + (y - s / 2.0) * theta.sin()) / s + 0.5).clamp(0.0, 1.0);
        let w = 0.5 * (-((x - cx).powi(2) + (y - cy).powi(2)) / (2.0 * r * r)).exp();
        let mut px = [0.0; 3];
        for k in 0..3 {
            px[k] = q(((1.0 - t) * c0[k] + t * c1[k]) * (1.0 - w) + c2[k] * w);
        }
        px
    })
    .expect("fixture image")
}

/// Fine checkerboard or per-pixel noise: what the web looks like.
pub fn busy_image(rng: &mut ChaCha8Rng) -> RasterImage {
    let (a, b) = (color(rng), color(rng));
    let checker = rng.gen_bool(0.5);
    let period = rng.gen_range(1..=3);
    let mut noise = ChaCha8Rng::seed_from_u64(rng.gen());
    RasterImage::from_fn(IMAGE_SIDE, IMAGE_SIDE, |x, y| {
        let mut px = [0.0; 3];
        let on = ((x / period) + (y / period)) % 2 == 0;
        for k in 0..3 {
            px[k] = if checker {
                let base = if on { a[k] + 0.3 } else { b[k] - 0.3 };
                q(base + noise.gen_range(-0.08..0.08))
            } else {
                q(a[k] + noise.gen_range(-0.45..0.45))
            };
        }
        px
    })
    .expect("fixture image")
}

fn strings(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

struct Tree {
    files: BTreeMap<PathBuf, Vec<u8>>,
}

impl Tree {
    fn put(&mut self, rel: &str, bytes: Vec<u8>) {
        self.files.insert(PathBuf::from(rel), bytes);
    }

    fn image(&mut self, rel: &str, img: &RasterImage) {
        self.put(rel, netpbm::encode_ppm(img));
    }

    fn jsonl<T: serde::Serialize>(&mut self, rel: &str, rows: &[T]) {
        self.put(rel, io::to_jsonl(rows).into_bytes());
    }
}

const SUBJECTS: &[(&str, &str, &str)] = &[
    ("a cat", "cat", "cat"),
    ("a tabby cat", "cat", "cat"),
    ("a kitten", "kitten", "cat"),
    ("a man", "man", "person"),
    ("a woman", "woman", "person"),
    ("a child", "child", "person"),
    ("two people", "people", "person"),
    ("a sofa", "sofa", "sofa"),
    ("a couch", "couch", "sofa"),
];

const SCENES: &[(&str, &str, Option<&str>)] = &[
    ("in a living room", "room", None),
    ("near a window", "window", None),
    ("on a sofa", "sofa", Some("sofa")),
    ("on a couch", "couch", Some("sofa")),
    ("in a garden", "garden", None),
    ("next to a lamp", "lamp", None),
    ("by the lake", "lake", None),
    ("with a cat", "cat", Some("cat")),
    ("beside a woman", "woman", Some("person")),
    ("under a painting", "painting", None),
];

fn step0_record(rng: &mut ChaCha8Rng, id: String, file: String) -> ManifestRecord {
    let (subj, kw, class) = *SUBJECTS.choose(rng).unwrap();
    let (scene, skw, sclass) = *SCENES.iter().filter(|s| s.1 != kw).collect::<Vec<_>>().choose(rng).unwrap();
    let mut classes = vec![class.to_string()];
    if let Some(c) = sclass {
        if *c != class {
            classes.push(c.to_string());
        }
    }
    classes.sort();
    ManifestRecord {
        id,
        file,
        keywords: strings(&[kw, skw]),
        caption: Some(format!("{subj} {scene}")),
        classes,
    }
}

const DOG_CAPTIONS: &[&str] = &[
    "a dog running on the grass",
    "two dogs playing in a park",
    "a dog sleeping on a sofa",
    "a man walking a dog on the beach",
];
const CAT_ONLY: &[&str] = &["a cat sleeping on a bed", "a cat sitting near a window", "a kitten on a chair"];
const HORSE_CAPTIONS: &[&str] = &[
    "a horse in a field",
    "a man riding a horse",
    "two horses on a beach",
    "a horse and a dog on a farm",
];
const HORSE_OTHER: &[&str] = &["a pony in a field", "a stallion near a fence"];
const BOAT_CAPTIONS: &[&str] = &[
    "a person standing on a boat",
    "a boat on the lake",
    "a ship in the harbor",
    "people on a boat on the river",
];
const BOAT_OTHER: &[&str] = &["a sailboat on the sea", "a canoe near the shore"];
const SCENERY: &[&str] = &["grass", "park", "field", "beach", "lake", "river", "sea"];

/// Rehearsal targets: keywords of old-class images and what a captioner
/// might say about them now.
const REHEARSAL_CLOSE: &[&str] = &[
    "a cat lying on a couch",
    "a kitten sitting on a sofa",
    "a woman sitting on a sofa",
    "a man reading in a living room",
    "a child playing with a cat",
    "a sofa near a window",
    "a couch in a room",
    "two people talking in a garden",
];
const REHEARSAL_FAR: &[&str] = &[
    "a plate of pizza on a table",
    "a red car on the street",
    "a train at a station",
    "a bottle of wine",
];
const REHEARSAL_NONE: &[&str] = &["a very blurry shot", "something dark and blurry"];

fn web_records(rng: &mut ChaCha8Rng, tree: &mut Tree) -> Vec<ManifestRecord> {
    let mut out = Vec::new();
    let mut push = |tree: &mut Tree, rng: &mut ChaCha8Rng, id: String, busy: bool, keywords: Vec<String>, caption: String| {
        let file = format!("images/{id}.ppm");
        let img = if busy { busy_image(rng) } else { smooth_image(rng) };
        tree.image(&format!("web/{file}"), &img);
        out.push(ManifestRecord {
            id,
            file,
            keywords,
            caption: Some(caption),
            classes: vec![],
        });
    };
    // half of the dog-tagged records carry cat-only captions
    for k in 0..16 {
        let cap = if k % 2 == 0 { DOG_CAPTIONS[(k / 2) % 4] } else { CAT_ONLY[(k / 2) % 3] };
        let kw = vec!["dog".to_string(), SCENERY.choose(rng).unwrap().to_string()];
        push(tree, rng, format!("dog_{k:03}"), k % 4 == 3, kw, cap.to_string());
    }
    for k in 0..12 {
        let cap = if k % 4 == 1 { HORSE_OTHER[(k / 4) % 2] } else { HORSE_CAPTIONS[k % 4] };
        let kw = vec!["horse".to_string(), SCENERY.choose(rng).unwrap().to_string()];
        push(tree, rng, format!("horse_{k:03}"), k % 4 == 3, kw, cap.to_string());
    }
    for k in 0..12 {
        let cap = if k % 4 == 1 { BOAT_OTHER[(k / 4) % 2] } else { BOAT_CAPTIONS[k % 4] };
        let kw = vec!["boat".to_string(), SCENERY.choose(rng).unwrap().to_string()];
        push(tree, rng, format!("boat_{k:03}"), k % 4 == 3, kw, cap.to_string());
    }
    for k in 0..60 {
        let (_, kw, _) = *SUBJECTS.choose(rng).unwrap();
        let (_, skw, _) = *SCENES.choose(rng).unwrap();
        let roll: f64 = rng.gen();
        let pool = if roll < 0.6 {
            REHEARSAL_CLOSE
        } else if roll < 0.85 {
            REHEARSAL_FAR
        } else {
            REHEARSAL_NONE
        };
        let cap = pool.choose(rng).unwrap().to_string();
        push(tree, rng, format!("old_{k:03}"), false, strings(&[kw, skw]), cap);
    }
    out
}

const PAIR_NOUNS: &[&str] = &[
    "cat", "dog", "horse", "boat", "sofa", "man", "woman", "child", "car", "bus", "bicycle", "train", "sheep", "cow",
    "bird", "bottle", "chair", "table", "tv", "plant", "grass", "field", "beach", "sea", "street", "road", "room",
    "kitchen", "tree", "flower", "water", "sky", "river", "bridge", "house", "park", "snow", "mountain", "lake",
    "window", "lamp", "pizza", "truck", "elephant", "zebra", "umbrella", "laptop", "kitten", "puppy", "ship",
];
const LINKS: &[&str] = &["on", "near", "with", "in", "next to", "under", "and", "beside"];

fn noun_phrase(rng: &mut ChaCha8Rng) -> String {
    let n = *PAIR_NOUNS.choose(rng).unwrap();
    if rng.gen_bool(0.25) {
        format!("two {}", pluralize(n))
    } else if n.starts_with(['a', 'e', 'i', 'o', 'u']) {
        format!("an {n}")
    } else {
        format!("a {n}")
    }
}

fn random_caption(rng: &mut ChaCha8Rng) -> String {
    let k = rng.gen_range(1..=4);
    let mut s = noun_phrase(rng);
    for _ in 1..k {
        s = format!("{s} {} {}", LINKS.choose(rng).unwrap(), noun_phrase(rng));
    }
    s
}

fn caption_pairs(rng: &mut ChaCha8Rng) -> String {
    let mut s = String::from("# stored caption <TAB> regenerated caption\n");
    for i in 0..500 {
        let a = random_caption(rng);
        let b = match i % 10 {
            0 => a.clone(),
            1 if i % 20 == 1 => REHEARSAL_NONE.choose(rng).unwrap().to_string(),
            _ => random_caption(rng),
        };
        s.push_str(&format!("{a}\t{b}\n"));
    }
    s
}

fn toy_files(tree: &mut Tree) {
    let fx = synthetic_fixture(0);
    let emit = |tree: &mut Tree, prefix: &str, samples: &[ToySample]| -> Vec<ToyRow> {
        samples
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let id = format!("{prefix}_{i:02}");
                let img = RasterImage::new(s.width, s.height, s.rgb.clone()).expect("toy image");
                let row = ToyRow {
                    id: id.clone(),
                    file: format!("images/{id}.ppm"),
                    y_d_prev: format!("maps/{id}.wsm"),
                    e_prev: format!("maps/{id}.wfm"),
                    labels: s
                        .label
                        .as_ref()
                        .map(|l| l.positives().into_iter().map(String::from).collect()),
                };
                tree.image(&format!("toy/{}", row.file), &img);
                tree.put(&format!("toy/{}", row.y_d_prev), codec::encode_score_map(&s.y_d_prev));
                tree.put(&format!("toy/{}", row.e_prev), codec::encode_feature_map(&s.e_prev));
                row
            })
            .collect()
    };
    let train = emit(tree, "train", &fx.train);
    let rehearsal = emit(tree, "rehearsal", &fx.rehearsal);
    tree.jsonl(TOY_TRAIN, &train);
    tree.jsonl(TOY_REHEARSAL, &rehearsal);
}

/// Every fixture file, keyed by its path relative to the fixture root.
pub fn fixture_files() -> BTreeMap<PathBuf, Vec<u8>> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut tree = Tree { files: BTreeMap::new() };

    let mut step0 = Vec::new();
    let mut holdout = Vec::new();
    for i in 0..STEP0_TRAIN + HOLDOUT {
        let (prefix, list) = if i < STEP0_TRAIN { ("ds", &mut step0) } else { ("ho", &mut holdout) };
        let id = format!("{prefix}_{i:03}");
        let file = format!("images/{id}.ppm");
        tree.image(&format!("step0/{file}"), &smooth_image(&mut rng));
        list.push(step0_record(&mut rng, id, file));
    }
    tree.jsonl(STEP0_MANIFEST, &step0);
    tree.jsonl(STEP0_HOLDOUT, &holdout);

    let mut neg = Vec::new();
    let mut neg_holdout = Vec::new();
    for i in 0..STEP0_TRAIN + HOLDOUT {
        let (prefix, list) = if i < STEP0_TRAIN { ("wb", &mut neg) } else { ("wh", &mut neg_holdout) };
        let id = format!("{prefix}_{i:03}");
        let file = format!("images/{id}.ppm");
        tree.image(&format!("negatives/{file}"), &busy_image(&mut rng));
        list.push(ManifestRecord {
            id,
            file,
            keywords: vec![],
            caption: None,
            classes: vec![],
        });
    }
    tree.jsonl(NEGATIVES_MANIFEST, &neg);
    tree.jsonl(NEGATIVES_HOLDOUT, &neg_holdout);

    let web = web_records(&mut rng, &mut tree);
    tree.jsonl(WEB_MANIFEST, &web);
    tree.put(CAPTION_PAIRS, caption_pairs(&mut rng).into_bytes());
    toy_files(&mut tree);
    for (path, text) in PLANS {
        tree.put(path, text.as_bytes().to_vec());
    }
    tree.files
}

/// Writes the fixture tree under `dir`.
pub fn write_fixture(dir: &Path) -> Result<usize> {
    let files = fixture_files();
    for (rel, bytes) in &files {
        io::write_bytes(&dir.join(rel), bytes)?;
    }
    Ok(files.len())
}

/// The fixture directory shipped with this crate.
pub fn shipped_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}
