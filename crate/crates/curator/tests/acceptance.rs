//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line per
//! criterion and exits non-zero if any failed.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use curator::fixture::{self, shipped_dir};
use curator::pipeline::{self, DiscSettings};
use curator::plan::StepPlan;
use curator::report::StepReport;
use curator::websource::Manifest;
use curator_core::discriminator::{self, MlpModel};
use curator_core::imaging::{amplitude, dft2, GrayGrid};
use curator_core::lexicon::{pluralize, tokenize, Caption, CaptionSource, ClassLexicon, MultiLabel, VOC_LEXICON};
use curator_core::semfilter::{
    FilterConfig, NounCount, WordnetGraph, IRREGULAR_LEMMAS, MINI_WORDNET_DATA, MINI_WORDNET_INDEX, STOPWORDS,
};
use curator_core::wilss::{
    self, fuse_pseudo, ngwp_pool, FeatureMap, KdeNorm, LossParts, LossWeights, ScoreMap, StepContext,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn fx(rel: &str) -> PathBuf {
    shipped_dir().join(rel)
}

// ---------------------------------------------------------------- 1

/// Textbook O(W^2 H^2) transform with exact twiddles.
fn naive_dft(g: &GrayGrid) -> Vec<(f64, f64)> {
    let (w, h) = (g.width(), g.height());
    let tw = |k: usize, n: usize| {
        let t = -2.0 * std::f64::consts::PI * k as f64 / n as f64;
        (t.cos(), t.sin())
    };
    let row_tw: Vec<(f64, f64)> = (0..w).map(|k| tw(k, w)).collect();
    let col_tw: Vec<(f64, f64)> = (0..h).map(|k| tw(k, h)).collect();
    let mut out = vec![(0.0, 0.0); w * h];
    for v in 0..h {
        for u in 0..w {
            let (mut re, mut im) = (0.0, 0.0);
            for y in 0..h {
                let (mut ire, mut iim) = (0.0, 0.0);
                for x in 0..w {
                    let (c, s) = row_tw[(u * x) % w];
                    let val = g.get(x, y);
                    ire += val * c;
                    iim += val * s;
                }
                let (c, s) = col_tw[(v * y) % h];
                re += ire * c - iim * s;
                im += ire * s + iim * c;
            }
            out[v * w + u] = (re, im);
        }
    }
    out
}

fn random_grid(r: &mut ChaCha8Rng, w: usize, h: usize) -> GrayGrid {
    GrayGrid::new(w, h, (0..w * h).map(|_| r.gen_range(0.0..1.0)).collect()).unwrap()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut r = rng(1);
    let (mut max_err, mut max_parseval) = (0.0f64, 0.0f64);
    let mut fft_time = 0.0;
    for i in 0..200 {
        let (w, h) = match i % 4 {
            0 => (64, 64),
            1 => (1 << r.gen_range(0..=6), 1 << r.gen_range(0..=6)),
            _ => (r.gen_range(1..=64), r.gen_range(1..=64)),
        };
        let g = random_grid(&mut r, w, h);
        let t = Instant::now();
        let f = dft2(&g);
        fft_time += t.elapsed().as_secs_f64();
        let oracle = naive_dft(&g);
        let mut energy = 0.0;
        for v in 0..h {
            for u in 0..w {
                let c = f.get(u, v);
                let (re, im) = oracle[v * w + u];
                max_err = max_err.max((c.re - re).abs()).max((c.im - im).abs());
                energy += c.norm_sqr();
            }
        }
        let spatial: f64 = g.data().iter().map(|v| v * v).sum::<f64>() * (w * h) as f64;
        max_parseval = max_parseval.max((energy - spatial).abs() / spatial);
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        max_err <= 1e-9 && max_parseval <= 1e-8 && secs < 5.0,
        format!(
            "200 grids: max bin error {max_err:.2e} (<= 1e-9), Parseval {max_parseval:.2e} (<= 1e-8), \
             {secs:.2}s total with oracle, {fft_time:.3}s in dft2 (< 5s)"
        ),
    )
}

// ---------------------------------------------------------------- 2

fn criterion_2() -> Outcome {
    let mut r = rng(2);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let (w, h) = (r.gen_range(2..=48), r.gen_range(2..=48));
        let g = random_grid(&mut r, w, h);
        let (dx, dy) = (r.gen_range(0..w), r.gen_range(0..h));
        let shifted = GrayGrid::from_fn(w, h, |x, y| g.get((x + w - dx) % w, (y + h - dy) % h)).unwrap();
        let a = amplitude(&dft2(&g));
        let b = amplitude(&dft2(&shifted));
        for (p, q) in a.data().iter().zip(b.data()) {
            worst = worst.max((p - q).abs());
        }
    }
    outcome(worst <= 1e-8, format!("100 circular shifts: max amplitude change {worst:.2e} (<= 1e-8)"))
}

// ---------------------------------------------------------------- 3

fn disc_inputs() -> (Manifest, Manifest, Manifest, Manifest) {
    (
        Manifest::load(&fx(fixture::STEP0_MANIFEST)).unwrap(),
        Manifest::load(&fx(fixture::NEGATIVES_MANIFEST)).unwrap(),
        Manifest::load(&fx(fixture::STEP0_HOLDOUT)).unwrap(),
        Manifest::load(&fx(fixture::NEGATIVES_HOLDOUT)).unwrap(),
    )
}

fn criterion_3() -> Outcome {
    let (ds, wb, hd, hw) = disc_inputs();
    let settings = DiscSettings::default();
    let t = Instant::now();
    let (ckpt, section) = pipeline::train_discriminator(&ds, &wb, Some((&hd, &hw)), &settings).unwrap();
    let secs = t.elapsed().as_secs_f64();
    let (again, _) = pipeline::train_discriminator(&ds, &wb, Some((&hd, &hw)), &settings).unwrap();
    let identical = ckpt.to_bytes() == again.to_bytes();
    let train = *section.epoch_accuracy.last().unwrap();
    let holdout = section.holdout_accuracy.unwrap();
    outcome(
        section.epoch_accuracy.len() <= 10 && train >= 0.80 && holdout >= 0.75 && identical && secs < 30.0,
        format!(
            "{}+{} images, {} epochs: train accuracy {train:.3} (>= 0.80), holdout {holdout:.3} (>= 0.75), \
             rerun identical: {identical}, {secs:.2}s (< 30s)",
            section.dataset_images,
            section.web_images,
            section.epoch_accuracy.len()
        ),
    )
}

// ---------------------------------------------------------------- 4

const H: f64 = 1e-5;

struct GradTally {
    checked: usize,
    failed: usize,
    worst: f64,
}

impl GradTally {
    fn new() -> Self {
        Self {
            checked: 0,
            failed: 0,
            worst: 0.0,
        }
    }

    fn check(&mut self, numeric: f64, analytic: f64) {
        let err = (numeric - analytic).abs();
        let scale = numeric.abs().max(analytic.abs());
        self.checked += 1;
        if err > 1e-7 && err > 1e-4 * scale {
            self.failed += 1;
        }
        if err > 1e-7 {
            self.worst = self.worst.max(err / scale);
        }
    }

    /// Central differences of `f` around `x` against `grad`.
    fn check_all(&mut self, x: &[f64], grad: &[f64], f: impl Fn(&[f64]) -> f64) {
        let mut p = x.to_vec();
        for i in 0..x.len() {
            p[i] = x[i] + H;
            let up = f(&p);
            p[i] = x[i] - H;
            let down = f(&p);
            p[i] = x[i];
            self.check((up - down) / (2.0 * H), grad[i]);
        }
    }
}

fn names(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

struct Instance {
    ctx: StepContext,
    n: usize,
    z: Vec<f64>,
    y_d: Vec<f64>,
    target: Vec<f64>,
    y_prev: Vec<f64>,
    e_t: Vec<f64>,
    e_prev: Vec<f64>,
    dim: usize,
    label: MultiLabel,
}

fn instance(r: &mut ChaCha8Rng) -> Instance {
    let mut old = vec!["bg".to_string()];
    old.extend(names("old", r.gen_range(1..=2)));
    let new = names("new", r.gen_range(1..=2));
    let ctx = StepContext::new(old.clone(), new.clone(), "bg").unwrap();
    let n = r.gen_range(2..=10);
    let k = ctx.all_classes().len();
    let dim = r.gen_range(1..=4);
    let prob = |r: &mut ChaCha8Rng, len: usize| (0..len).map(|_| r.gen_range(0.02..0.98)).collect::<Vec<_>>();
    let bits = (0..new.len()).map(|_| r.gen_bool(0.5)).collect();
    Instance {
        z: (0..n * k).map(|_| r.gen_range(-3.0..3.0)).collect(),
        y_d: prob(r, n * k),
        target: prob(r, n * k),
        y_prev: prob(r, n * old.len()),
        e_t: (0..n * dim).map(|_| r.gen_range(-1.0..1.0)).collect(),
        e_prev: (0..n * dim).map(|_| r.gen_range(-1.0..1.0)).collect(),
        label: MultiLabel::new(new, bits).unwrap(),
        ctx,
        n,
        dim,
    }
}

impl Instance {
    fn z(&self, v: &[f64]) -> ScoreMap {
        ScoreMap::logits(self.n, self.ctx.all_classes(), v.to_vec()).unwrap()
    }

    fn probs(&self, v: &[f64]) -> ScoreMap {
        ScoreMap::probabilities(self.n, self.ctx.all_classes(), v.to_vec()).unwrap()
    }

    fn prev(&self) -> ScoreMap {
        ScoreMap::probabilities(self.n, self.ctx.old_classes().to_vec(), self.y_prev.clone()).unwrap()
    }

    fn feats(&self, v: &[f64]) -> FeatureMap {
        FeatureMap::new(self.n, self.dim, v.to_vec()).unwrap()
    }

    fn cls(&self, z: &[f64]) -> f64 {
        let y_l = ngwp_pool(&self.z(z)).unwrap();
        wilss::loss_cls(&self.label, &y_l, self.ctx.new_classes()).unwrap()
    }

    fn cls_grad(&self) -> Vec<f64> {
        let z = self.z(&self.z);
        let y_l = ngwp_pool(&z).unwrap();
        let g = wilss::loss_cls_grad(&self.label, &y_l, self.ctx.new_classes()).unwrap();
        wilss::ngwp_pool_backward(&z, &g).unwrap()
    }

    fn seg(&self, y_d: &[f64]) -> f64 {
        wilss::loss_seg(&self.probs(&self.target), &self.probs(y_d)).unwrap()
    }

    fn kde(&self, e: &[f64], norm: KdeNorm) -> f64 {
        wilss::loss_kde(&self.feats(e), &self.feats(&self.e_prev), norm).unwrap()
    }

    fn kdl(&self, z: &[f64]) -> f64 {
        wilss::loss_kdl(&self.z(z), &self.prev(), self.ctx.old_classes()).unwrap()
    }

    fn total(&self, z: &[f64], y_d: &[f64], e: &[f64], w: &LossWeights) -> f64 {
        let parts = LossParts {
            seg: self.seg(y_d),
            cls: self.cls(z),
            kde: self.kde(e, KdeNorm::Squared),
            kdl: self.kdl(z),
        };
        wilss::total_loss(&parts, w).unwrap()
    }
}

fn mlp_instance(r: &mut ChaCha8Rng, seed: u64) -> (MlpModel, Vec<Vec<f64>>, Vec<usize>) {
    let dims = [r.gen_range(2..=8), r.gen_range(2..=6), r.gen_range(2..=5), 2];
    let mut m = MlpModel::init(&dims, seed).unwrap();
    for b in m.biases_mut() {
        b.iter_mut().for_each(|v| *v = r.gen_range(-0.3..0.3));
    }
    let count = r.gen_range(1..=5);
    let xs = (0..count).map(|_| (0..dims[0]).map(|_| r.gen_range(-2.0..2.0)).collect()).collect();
    let ys = (0..count).map(|_| r.gen_range(0..2)).collect();
    (m, xs, ys)
}

fn flat(m: &MlpModel) -> Vec<f64> {
    m.weights().iter().chain(m.biases()).flatten().copied().collect()
}

fn with_params(m: &MlpModel, p: &[f64]) -> MlpModel {
    let mut out = m.clone();
    let mut it = p.iter().copied();
    // weights first, then biases, in the order `flat` reads them
    for w in out.weights_mut() {
        w.iter_mut().for_each(|v| *v = it.next().unwrap());
    }
    for b in out.biases_mut() {
        b.iter_mut().for_each(|v| *v = it.next().unwrap());
    }
    out
}

fn criterion_4() -> Outcome {
    let mut r = rng(4);
    let mut tallies: BTreeMap<&str, GradTally> = BTreeMap::new();
    for case in 0..50 {
        let inst = instance(&mut r);
        let t = tallies.entry("cls").or_insert_with(GradTally::new);
        t.check_all(&inst.z, &inst.cls_grad(), |z| inst.cls(z));

        let g = wilss::loss_seg_grad(&inst.probs(&inst.target), &inst.probs(&inst.y_d)).unwrap();
        let t = tallies.entry("seg").or_insert_with(GradTally::new);
        t.check_all(&inst.y_d, &g, |y| inst.seg(y));

        for (key, norm) in [("kde squared", KdeNorm::Squared), ("kde euclidean", KdeNorm::Euclidean)] {
            let g = wilss::loss_kde_grad(&inst.feats(&inst.e_t), &inst.feats(&inst.e_prev), norm).unwrap();
            let t = tallies.entry(key).or_insert_with(GradTally::new);
            t.check_all(&inst.e_t, &g, |e| inst.kde(e, norm));
        }

        let g = wilss::loss_kdl_grad(&inst.z(&inst.z), &inst.prev(), inst.ctx.old_classes()).unwrap();
        let t = tallies.entry("kdl").or_insert_with(GradTally::new);
        t.check_all(&inst.z, &g, |z| inst.kdl(z));

        let w = LossWeights {
            seg: r.gen_range(0.1..2.0),
            cls: r.gen_range(0.1..2.0),
            kde: r.gen_range(0.1..2.0),
            kdl: r.gen_range(0.1..2.0),
        };
        let kdl = wilss::loss_kdl_grad(&inst.z(&inst.z), &inst.prev(), inst.ctx.old_classes()).unwrap();
        let gz: Vec<f64> = inst.cls_grad().iter().zip(&kdl).map(|(a, b)| w.cls * a + w.kdl * b).collect();
        let gy: Vec<f64> = wilss::loss_seg_grad(&inst.probs(&inst.target), &inst.probs(&inst.y_d))
            .unwrap()
            .iter()
            .map(|v| w.seg * v)
            .collect();
        let ge: Vec<f64> = wilss::loss_kde_grad(&inst.feats(&inst.e_t), &inst.feats(&inst.e_prev), KdeNorm::Squared)
            .unwrap()
            .iter()
            .map(|v| w.kde * v)
            .collect();
        let t = tallies.entry("total").or_insert_with(GradTally::new);
        t.check_all(&inst.z, &gz, |z| inst.total(z, &inst.y_d, &inst.e_t, &w));
        t.check_all(&inst.y_d, &gy, |y| inst.total(&inst.z, y, &inst.e_t, &w));
        t.check_all(&inst.e_t, &ge, |e| inst.total(&inst.z, &inst.y_d, e, &w));

        let (m, xs, ys) = mlp_instance(&mut r, case);
        let (_, g) = discriminator::loss_and_gradient(&m, &xs, &ys).unwrap();
        let analytic: Vec<f64> = g.weights.iter().chain(&g.biases).flatten().copied().collect();
        let t = tallies.entry("mlp").or_insert_with(GradTally::new);
        t.check_all(&flat(&m), &analytic, |p| {
            discriminator::loss_and_gradient(&with_params(&m, p), &xs, &ys).unwrap().0
        });
    }
    let failed: usize = tallies.values().map(|t| t.failed).sum();
    let parts: Vec<String> = tallies
        .iter()
        .map(|(k, t)| format!("{k} {}/{} ok, worst rel {:.1e}", t.checked - t.failed, t.checked, t.worst))
        .collect();
    outcome(failed == 0, format!("50 instances each: {}", parts.join("; ")))
}

// ---------------------------------------------------------------- 5

fn shuffled(r: &mut ChaCha8Rng, v: &[String]) -> Vec<String> {
    use rand::seq::SliceRandom;
    let mut v = v.to_vec();
    v.shuffle(r);
    v
}

fn criterion_5() -> Outcome {
    let mut r = rng(5);
    let mut mismatches = 0;
    for _ in 0..100 {
        let mut old = vec!["background".to_string()];
        old.extend(names("o", r.gen_range(0..=3)));
        let new = names("n", r.gen_range(1..=3));
        let ctx = StepContext::new(shuffled(&mut r, &old), new.clone(), "background").unwrap();
        let all: Vec<String> = old.iter().chain(&new).cloned().collect();
        let n = r.gen_range(1..=16);
        let l_order = shuffled(&mut r, &all);
        let p_order = shuffled(&mut r, &old);
        let l_vals: Vec<f64> = (0..n * l_order.len()).map(|_| r.gen_range(0.0..=1.0)).collect();
        let p_vals: Vec<f64> = (0..n * p_order.len()).map(|_| r.gen_range(0.0..=1.0)).collect();
        let y_l = ScoreMap::probabilities(n, l_order.clone(), l_vals.clone()).unwrap();
        let y_p = ScoreMap::probabilities(n, p_order.clone(), p_vals.clone()).unwrap();
        let fused = fuse_pseudo(&y_l, &y_p, &ctx).unwrap();
        if fused.class_order() != ctx.all_classes().as_slice() {
            mismatches += 1;
            continue;
        }
        let at = |order: &[String], vals: &[f64], i: usize, c: &str| {
            vals[i * order.len() + order.iter().position(|o| o == c).unwrap()]
        };
        for i in 0..n {
            for (j, c) in fused.class_order().iter().enumerate() {
                let expect = if c == "background" {
                    at(&p_order, &p_vals, i, c).min(at(&l_order, &l_vals, i, c))
                } else if new.contains(c) {
                    at(&l_order, &l_vals, i, c)
                } else {
                    at(&p_order, &p_vals, i, c)
                };
                if fused.scores()[i * fused.num_classes() + j] != expect {
                    mismatches += 1;
                }
            }
        }
    }
    outcome(mismatches == 0, format!("100 random pairs: {mismatches} entries differ from the oracle (exact)"))
}

// ---------------------------------------------------------------- 6

fn criterion_6() -> Outcome {
    let lex = ClassLexicon::voc();
    let all: Vec<String> = lex.classes().to_vec();
    let mut rows = 0;
    let mut bad = Vec::new();
    for line in VOC_LEXICON.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        rows += 1;
        let (class, forms) = line.split_once(':').unwrap();
        let class = class.trim();
        let mut words: Vec<String> = vec![class.to_string()];
        words.extend(forms.split(',').map(str::trim).filter(|f| !f.is_empty() && *f != "-").map(String::from));
        for w in &words {
            for surface in [w.clone(), pluralize(w)] {
                let cap = Caption::new(format!("there is a {surface} here"), CaptionSource::Provider);
                let label = lex.derive_label(&cap, &all).unwrap();
                if label.positives() != vec![class] || lex.class_of(&tokenize(&surface).join(" ")) != Some(class) {
                    bad.push(format!("{surface} -> {:?}", label.positives()));
                }
            }
        }
    }
    let worked = Caption::new("a person standing on a boat", CaptionSource::Provider);
    let got = lex.derive_label(&worked, &all).unwrap();
    let got: BTreeSet<&str> = got.positives().into_iter().collect();
    let worked_ok = got == BTreeSet::from(["person", "boat"]);
    outcome(
        bad.is_empty() && worked_ok && rows == all.len(),
        format!(
            "{rows} lexicon rows, {} surface forms failing {:?}; worked example -> {got:?}",
            bad.len(),
            bad.iter().take(5).collect::<Vec<_>>()
        ),
    )
}

// ---------------------------------------------------------------- 7

/// Independent reading of the WordNet files: lemma senses, hypernym edges,
/// root depths by breadth-first search from the roots.
struct Oracle {
    senses: BTreeMap<String, Vec<u64>>,
    parents: BTreeMap<u64, Vec<u64>>,
    depth: BTreeMap<u64, usize>,
    max_depth: usize,
    stop: BTreeSet<String>,
}

impl Oracle {
    fn load() -> Self {
        let mut parents: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
        for line in MINI_WORDNET_DATA.lines().filter(|l| !l.starts_with(' ') && !l.trim().is_empty()) {
            let f: Vec<&str> = line.split_whitespace().collect();
            let id: u64 = f[0].parse().unwrap();
            let words = usize::from_str_radix(f[3], 16).unwrap();
            let at = 4 + 2 * words;
            let ptrs: usize = f[at].parse().unwrap();
            let mut ps = Vec::new();
            for p in 0..ptrs {
                let q = &f[at + 1 + 4 * p..at + 5 + 4 * p];
                if (q[0] == "@" || q[0] == "@i") && q[2] == "n" {
                    ps.push(q[1].parse().unwrap());
                }
            }
            parents.insert(id, ps);
        }
        let mut senses = BTreeMap::new();
        for line in MINI_WORDNET_INDEX.lines().filter(|l| !l.starts_with(' ') && !l.trim().is_empty()) {
            let f: Vec<&str> = line.split_whitespace().collect();
            let count: usize = f[2].parse().unwrap();
            senses.insert(f[0].to_string(), f[f.len() - count..].iter().map(|s| s.parse().unwrap()).collect());
        }
        let mut children: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
        for (c, ps) in &parents {
            for p in ps {
                children.entry(*p).or_default().push(*c);
            }
        }
        let mut depth = BTreeMap::new();
        let mut queue: VecDeque<u64> = parents.iter().filter(|(_, p)| p.is_empty()).map(|(c, _)| *c).collect();
        for r in &queue {
            depth.insert(*r, 0);
        }
        while let Some(s) = queue.pop_front() {
            let d = depth[&s];
            for c in children.get(&s).into_iter().flatten() {
                if !depth.contains_key(c) {
                    depth.insert(*c, d + 1);
                    queue.push_back(*c);
                }
            }
        }
        let stop = STOPWORDS
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(str::to_lowercase)
            .collect();
        let max_depth = depth.values().copied().max().unwrap();
        Self {
            senses,
            parents,
            depth,
            max_depth,
            stop,
        }
    }

    fn lemma(&self, t: &str) -> String {
        if let Some((_, l)) = IRREGULAR_LEMMAS.iter().find(|(p, _)| *p == t) {
            return l.to_string();
        }
        let candidates = [
            t.strip_suffix("ies").map(|s| format!("{s}y")),
            t.strip_suffix("es").map(String::from),
            t.strip_suffix('s').map(String::from),
        ];
        candidates
            .into_iter()
            .flatten()
            .find(|c| !c.is_empty() && self.senses.contains_key(c))
            .unwrap_or_else(|| t.to_string())
    }

    fn nouns(&self, text: &str, limit: usize) -> Vec<String> {
        tokenize(text)
            .into_iter()
            .filter(|t| !self.stop.contains(t))
            .map(|t| self.lemma(&t))
            .filter(|l| !self.stop.contains(l) && self.senses.contains_key(l))
            .take(limit)
            .collect()
    }

    fn descriptor(&self, lemma: &str) -> Vec<f64> {
        let mut seen = BTreeSet::new();
        let mut queue: VecDeque<u64> = self.senses[lemma].iter().copied().collect();
        while let Some(s) = queue.pop_front() {
            if seen.insert(s) {
                queue.extend(self.parents[&s].iter().copied());
            }
        }
        let mut v = vec![0.0; self.max_depth + 1];
        for s in seen {
            v[self.depth[&s]] += 1.0;
        }
        v
    }

    fn similarity(&self, a: &str, b: &str, limit: usize) -> Option<f64> {
        let (na, nb) = (self.nouns(a, limit), self.nouns(b, limit));
        if na.is_empty() || nb.is_empty() {
            return None;
        }
        let mut best = f64::NEG_INFINITY;
        for x in &na {
            for y in &nb {
                let (p, q) = (self.descriptor(x), self.descriptor(y));
                let dot: f64 = p.iter().zip(&q).map(|(a, b)| a * b).sum();
                let norm = (p.iter().map(|a| a * a).sum::<f64>() * q.iter().map(|a| a * a).sum::<f64>()).sqrt();
                best = best.max(if norm == 0.0 { 0.0 } else { dot / norm });
            }
        }
        Some(best)
    }
}

fn caption_pairs() -> Vec<(String, String)> {
    let path = fx(fixture::CAPTION_PAIRS);
    pipeline::parse_caption_pairs(&std::fs::read_to_string(&path).unwrap(), &path).unwrap()
}

fn criterion_7() -> Outcome {
    let graph = WordnetGraph::mini();
    let oracle = Oracle::load();
    let pairs = caption_pairs();
    let mut disagreements = 0;
    let mut rates = Vec::new();
    for t in [0.5, 0.6, 0.7] {
        let cfg = FilterConfig::new(t, NounCount::First(2)).unwrap();
        let mut kept = 0;
        for (a, b) in &pairs {
            let d = graph.filter_pair(
                &Caption::new(a.clone(), CaptionSource::Stored),
                &Caption::new(b.clone(), CaptionSource::Regenerated),
                &cfg,
            );
            let expect = oracle.similarity(a, b, 2).is_some_and(|s| s >= t);
            if d.kept != expect {
                disagreements += 1;
            }
            kept += usize::from(d.kept);
        }
        rates.push(kept as f64 / pairs.len() as f64);
    }
    let cfg = FilterConfig::default();
    let identical: Vec<&(String, String)> =
        pairs.iter().filter(|(a, b)| a == b && !oracle.nouns(a, 2).is_empty()).collect();
    let identical_dropped = identical
        .iter()
        .filter(|(a, _)| {
            let c = Caption::new(a.clone(), CaptionSource::Stored);
            !graph.filter_pair(&c, &c, &cfg).kept
        })
        .count();
    let monotone = rates.windows(2).all(|w| w[0] >= w[1]);
    outcome(
        disagreements == 0 && identical_dropped == 0 && monotone && !identical.is_empty(),
        format!(
            "{} pairs x T in {{0.5, 0.6, 0.7}}: {disagreements} disagreements with the oracle; \
             {} identical pairs, {identical_dropped} dropped; kept-rates {rates:.3?} (non-increasing: {monotone})",
            pairs.len(),
            identical.len()
        ),
    )
}

// ---------------------------------------------------------------- 8

fn curator(args: &[&str]) {
    let out = Command::new(env!("CARGO_BIN_EXE_curator")).args(args).output().unwrap();
    assert!(
        out.status.success(),
        "curator {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

fn pipeline_run(dir: &Path, model: &Path) {
    let s = |p: &Path| p.to_str().unwrap().to_string();
    let plan = s(&fx(fixture::FIXTURE_PLAN));
    let web = s(&fx(fixture::WEB_MANIFEST));
    let mem = dir.join("memory");
    curator(&["build-memory", "--manifest", &s(&fx(fixture::STEP0_MANIFEST)), "--out", &s(&mem), "--seed", "7"]);
    curator(&[
        "acquire", "--plan", &plan, "--manifest", &web, "--model", &s(model), "--out", &s(&dir.join("acquire")),
        "--seed", "7",
    ]);
    curator(&[
        "rehearse",
        "--plan",
        &plan,
        "--manifest",
        &web,
        "--memory",
        &s(&mem.join("caption_memory.jsonl")),
        "--out",
        &s(&dir.join("rehearse")),
        "--seed",
        "7",
    ]);
}

fn criterion_8() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let (ds, wb, _, _) = disc_inputs();
    let (ckpt, _) = pipeline::train_discriminator(&ds, &wb, None, &DiscSettings::default()).unwrap();
    let model = tmp.path().join("discriminator.bin");
    ckpt.save(&model).unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    pipeline_run(&a, &model);
    pipeline_run(&b, &model);
    let files = [
        "memory/caption_memory.jsonl",
        "acquire/acquired.jsonl",
        "acquire/report.json",
        "rehearse/rehearsal.jsonl",
        "rehearse/report.json",
    ];
    let identical = files
        .iter()
        .all(|f| std::fs::read(a.join(f)).unwrap() == std::fs::read(b.join(f)).unwrap());

    let acq: StepReport = serde_json::from_slice(&std::fs::read(a.join("acquire/report.json")).unwrap()).unwrap();
    let reh: StepReport = serde_json::from_slice(&std::fs::read(a.join("rehearse/report.json")).unwrap()).unwrap();
    let acq = acq.acquisition.unwrap();
    let reh = reh.rehearsal.unwrap();
    let plan = StepPlan::load(&fx(fixture::FIXTURE_PLAN)).unwrap();
    let m = plan.budget.rehearsal_per_class;
    let n_cap = plan.budget.per_caption;
    let funnels_ok = acq.funnel.iter().all(|f| f.is_monotone()) && reh.is_monotone();
    let max_class = reh.per_class.values().copied().max().unwrap_or(0);
    let within = max_class <= m && reh.final_count <= reh.memory_entries * n_cap && reh.unique <= reh.memory_entries * n_cap;
    let funnel: Vec<String> =
        acq.funnel.iter().map(|f| format!("{} {}/{}/{}/{}", f.class, f.crawled, f.gated, f.labeled, f.kept)).collect();
    outcome(
        identical && funnels_ok && within && m == 100 && n_cap == 20,
        format!(
            "byte-identical reruns: {identical}; funnels monotone: {funnels_ok} [{}]; rehearsal {} images, \
             max {max_class} per class (<= M = {m}), <= |memory| x N_CAP = {}",
            funnel.join(", "),
            reh.final_count,
            reh.memory_entries * n_cap
        ),
    )
}

// ---------------------------------------------------------------- 9

fn criterion_9() -> Outcome {
    let t = Instant::now();
    let plan = StepPlan::load(&fx(fixture::TOY_PLAN)).unwrap();
    let ctx = plan.context().unwrap();
    let train = pipeline::load_toy_samples(&fx(fixture::TOY_TRAIN), &ctx).unwrap();
    let reh = pipeline::load_toy_samples(&fx(fixture::TOY_REHEARSAL), &ctx).unwrap();
    let run = pipeline::toy_step(&plan, &train, &reh, None, plan.seed).unwrap();
    let secs = t.elapsed().as_secs_f64();
    let s = &run.section;
    let plain = StepPlan::load(&fx(fixture::TOY_PLAN_NO_REHEARSAL)).unwrap();
    let kde_ok = s.config.web_rehearsal && s.config.weights.kde == 0.5 && plain.weights.kde == 1.0;
    let side_ok = train.iter().chain(&reh).all(|x| x.width == 8 && x.height == 8);
    outcome(
        s.decreasing_fraction >= 0.9 && kde_ok && side_ok && secs < 60.0,
        format!(
            "{} epochs on {}+{} 8x8 images: loss {:.4} -> {:.4}, decreasing on {:.1}% of transitions (>= 90%); \
             web-rehearsal w_kde = {} (plain plan {}); {secs:.2}s (< 60s)",
            s.config.epochs,
            s.train_images,
            s.rehearsal_images,
            s.epoch_loss[0],
            s.epoch_loss.last().unwrap(),
            s.decreasing_fraction * 100.0,
            s.config.weights.kde,
            plain.weights.kde
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("DFT oracle equivalence", criterion_1),
        ("amplitude translation invariance", criterion_2),
        ("discriminator accuracy and determinism", criterion_3),
        ("gradient checks", criterion_4),
        ("fusion oracle", criterion_5),
        ("labeler conformance", criterion_6),
        ("filter correctness", criterion_7),
        ("pipeline determinism and funnels", criterion_8),
        ("toy end-to-end", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let o = std::panic::catch_unwind(f).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        });
        println!(
            "criterion {} {}: {} - {} [{:.2}s]",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            name,
            o.detail,
            t.elapsed().as_secs_f64()
        );
        failed += usize::from(!o.pass);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
