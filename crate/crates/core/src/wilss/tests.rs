use super::*;
use alloc::string::ToString;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn names(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

const LN2: f64 = core::f64::consts::LN_2;

fn rand_map(rng: &mut ChaCha8Rng, pixels: usize, classes: &[&str], kind: ScoreKind) -> ScoreMap {
    let scores = (0..pixels * classes.len())
        .map(|_| match kind {
            ScoreKind::Logits => rng.gen_range(-3.0..3.0),
            ScoreKind::Probabilities => rng.gen_range(0.02..0.98),
        })
        .collect();
    ScoreMap::new(pixels, names(classes), scores, kind).unwrap()
}

fn fd_check(f: impl Fn(&[f64]) -> f64, x: &[f64], analytic: &[f64]) {
    let h = 1e-5;
    for i in 0..x.len() {
        let mut p = x.to_vec();
        let mut m = x.to_vec();
        p[i] += h;
        m[i] -= h;
        let numeric = (f(&p) - f(&m)) / (2.0 * h);
        let err = (numeric - analytic[i]).abs();
        let scale = numeric.abs().max(analytic[i].abs());
        assert!(
            err <= 1e-7 || err <= 1e-4 * scale,
            "coord {i}: numeric {numeric} analytic {}",
            analytic[i]
        );
    }
}

#[test]
fn ngwp_single_pixel_matches_formula() {
    let z = ScoreMap::logits(1, names(&["dog"]), vec![6.0]).unwrap();
    let y = ngwp_pool(&z).unwrap();
    // one class: softmax mask is 1
    assert!(close(y.values[0], sigmoid(6.0) / 2.0, 1e-15));
    assert!(y.values[0] <= 0.5);

    let z = ScoreMap::logits(1, names(&["bg", "dog"]), vec![0.3, -1.2]).unwrap();
    let y = ngwp_pool(&z).unwrap();
    let e = (libm::exp(0.3), libm::exp(-1.2));
    let m = (e.0 / (e.0 + e.1), e.1 / (e.0 + e.1));
    assert!(close(y.values[0], m.0 * sigmoid(0.3) / (1.0 + m.0), 1e-15));
    assert!(close(y.values[1], m.1 * sigmoid(-1.2) / (1.0 + m.1), 1e-15));
}

#[test]
fn ngwp_symmetric_for_equal_logits() {
    let z = ScoreMap::logits(4, names(&["a", "b", "c"]), vec![0.7; 12]).unwrap();
    let y = ngwp_pool(&z).unwrap();
    assert!(y.values.iter().all(|&v| v == y.values[0]));
    assert!(ngwp_pool(&rand_map(&mut ChaCha8Rng::seed_from_u64(1), 2, &["a"], ScoreKind::Probabilities)).is_err());
}

#[test]
fn smooth_examples() {
    let y = ScoreMap::probabilities(1, names(&["a", "b"]), vec![1.0, 0.0]).unwrap();
    let s = smooth(&y, 0.1).unwrap();
    assert!(close(s.scores()[0], 0.95, 1e-15) && close(s.scores()[1], 0.05, 1e-15));
    assert_eq!(smooth(&y, 0.0).unwrap(), y);
    assert!(smooth(&y, 1.0).is_err());
}

fn label(classes: &[&str], bits: &[bool]) -> MultiLabel {
    MultiLabel::new(names(classes), bits.to_vec()).unwrap()
}

#[test]
fn loss_cls_examples() {
    let y = label(&["dog"], &[true]);
    let yl = ClassScores {
        class_order: names(&["dog"]),
        values: vec![0.5],
    };
    assert!(close(loss_cls(&y, &yl, &names(&["dog"])).unwrap(), LN2, 1e-12));

    let y = label(&["cat", "dog"], &[true, false]);
    let yl = ClassScores {
        class_order: names(&["cat", "dog"]),
        values: vec![0.5, 0.5],
    };
    assert!(close(loss_cls(&y, &yl, &names(&["cat", "dog"])).unwrap(), LN2, 1e-12));

    let perfect = ClassScores {
        class_order: names(&["cat", "dog"]),
        values: vec![1.0 - EPS, EPS],
    };
    assert!(loss_cls(&y, &perfect, &names(&["cat", "dog"])).unwrap() < 1e-6);
    assert!(loss_cls(&y, &perfect, &[]).is_err());
    assert!(loss_cls(&y, &perfect, &names(&["cow"])).is_err());
}

#[test]
fn fuse_examples() {
    let ctx = StepContext::new(names(&["bg", "cat"]), names(&["dog"]), "bg").unwrap();
    let yl = ScoreMap::probabilities(1, names(&["bg", "cat", "dog"]), vec![0.2, 0.3, 0.7]).unwrap();
    let prev = ScoreMap::probabilities(1, names(&["bg", "cat"]), vec![0.9, 0.05]).unwrap();
    let f = fuse_pseudo(&yl, &prev, &ctx).unwrap();
    assert_eq!(f.class_order(), &names(&["bg", "cat", "dog"])[..]);
    assert_eq!(f.scores(), &[0.2, 0.05, 0.7]);

    let other_prev = ScoreMap::probabilities(1, names(&["bg", "cat"]), vec![0.1, 0.9]).unwrap();
    assert_eq!(fuse_pseudo(&yl, &other_prev, &ctx).unwrap().get(0, 2), 0.7);

    let short = ScoreMap::probabilities(1, names(&["bg", "cat"]), vec![0.2, 0.3]).unwrap();
    assert_eq!(
        fuse_pseudo(&short, &prev, &ctx),
        Err(WilssError::MissingClass("dog".into()))
    );
}

#[test]
fn context_validation() {
    assert!(StepContext::new(names(&["cat"]), names(&["dog"]), "bg").is_err());
    assert!(StepContext::new(names(&["bg", "dog"]), names(&["dog"]), "bg").is_err());
    assert!(StepContext::new(names(&["bg"]), names(&[]), "bg").is_err());
}

#[test]
fn loss_seg_examples() {
    let t = ScoreMap::probabilities(1, names(&["a"]), vec![1.0]).unwrap();
    let p = ScoreMap::probabilities(1, names(&["a"]), vec![0.5]).unwrap();
    assert!(close(loss_seg(&t, &p).unwrap(), LN2, 1e-12));

    let hard = ScoreMap::probabilities(2, names(&["a", "b"]), vec![EPS, 1.0 - EPS, 1.0 - EPS, EPS]).unwrap();
    assert!(loss_seg(&hard, &hard).unwrap() < 1e-5);

    let other = ScoreMap::probabilities(1, names(&["b"]), vec![0.5]).unwrap();
    assert!(loss_seg(&t, &other).is_err());
}

#[test]
fn loss_kde_examples() {
    let a = FeatureMap::new(1, 2, vec![1.0, 0.0]).unwrap();
    let b = FeatureMap::new(1, 2, vec![0.0, 1.0]).unwrap();
    assert_eq!(loss_kde(&a, &b, KdeNorm::Squared).unwrap(), 2.0);
    assert!(close(loss_kde(&a, &b, KdeNorm::Euclidean).unwrap(), libm::sqrt(2.0), 1e-15));
    assert_eq!(loss_kde(&a, &a, KdeNorm::Squared).unwrap(), 0.0);
    assert_eq!(loss_kde_grad(&a, &a, KdeNorm::Euclidean).unwrap(), vec![0.0, 0.0]);
}

#[test]
fn loss_kdl_examples() {
    let z = ScoreMap::logits(1, names(&["a"]), vec![0.0]).unwrap();
    let p = ScoreMap::probabilities(1, names(&["a"]), vec![1.0]).unwrap();
    assert!(close(loss_kdl(&z, &p, &names(&["a"])).unwrap(), LN2, 1e-12));

    // target equal to sigmoid(z): the loss is the binary entropy
    let zv = 0.8;
    let s = sigmoid(zv);
    let z = ScoreMap::logits(1, names(&["a", "new"]), vec![zv, 5.0]).unwrap();
    let p = ScoreMap::probabilities(1, names(&["a"]), vec![s]).unwrap();
    let h = -(s * libm::log(s) + (1.0 - s) * libm::log(1.0 - s));
    assert!(close(loss_kdl(&z, &p, &names(&["a"])).unwrap(), h, 1e-12));
}

#[test]
fn total_loss_examples() {
    let ones = LossParts {
        seg: 1.0,
        cls: 1.0,
        kde: 1.0,
        kdl: 1.0,
    };
    assert_eq!(total_loss(&LossParts::default(), &LossWeights::default()).unwrap(), 0.0);
    assert_eq!(total_loss(&ones, &LossWeights::default()).unwrap(), 4.0);
    assert_eq!(total_loss(&ones, &LossWeights::web_rehearsal()).unwrap(), 3.5);
    let neg = LossWeights {
        seg: -1.0,
        ..LossWeights::default()
    };
    assert!(total_loss(&ones, &neg).is_err());
}

#[test]
fn pixel_labels() {
    let classes = names(&["bg", "cat", "dog"]);
    let mut s = Vec::new();
    for i in 0..6 {
        if i < 3 {
            s.extend([0.1, 0.2, 0.7]);
        } else {
            s.extend([0.8, 0.1, 0.1]);
        }
    }
    let m = ScoreMap::probabilities(6, classes.clone(), s).unwrap();
    let l = image_label_from_pixel(&m, 1).unwrap();
    assert_eq!(l.positives(), ["bg", "dog"]);
    assert_eq!(image_label_from_pixel(&m, 4).unwrap().positives(), Vec::<&str>::new());

    let uniform_bg = ScoreMap::probabilities(2, classes, vec![0.6, 0.2, 0.2, 0.9, 0.05, 0.05]).unwrap();
    assert_eq!(image_label_from_pixel(&uniform_bg, 1).unwrap().positives(), ["bg"]);
}

#[test]
fn rehearsal_composition() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let old = names(&["bg", "cat"]);
    let prev = rand_map(&mut rng, 5, &["bg", "cat"], ScoreKind::Probabilities);
    let yd = rand_map(&mut rng, 5, &["bg", "cat", "dog"], ScoreKind::Probabilities);
    let z = rand_map(&mut rng, 5, &["bg", "cat", "dog"], ScoreKind::Logits);
    let yl = ngwp_pool(&z).unwrap();
    let (seg, cls) = rehearsal_losses(&prev, &yd, &yl, &old).unwrap();
    let padded = prev.project(yd.class_order(), 0.0).unwrap();
    assert_eq!(seg, loss_seg(&padded, &yd).unwrap());
    let lab = image_label_from_pixel(&prev, 1).unwrap();
    assert_eq!(cls, loss_cls(&lab, &yl, &old).unwrap());

    let hard = ScoreMap::probabilities(2, old.clone(), vec![1.0 - EPS, EPS, EPS, 1.0 - EPS]).unwrap();
    let (seg, _) = rehearsal_losses(&hard, &hard, &yl, &old).unwrap();
    assert!(seg < 1e-5);
}

#[test]
fn gradients_match_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let classes = ["bg", "cat", "dog"];
    for _ in 0..10 {
        let z = rand_map(&mut rng, 4, &classes, ScoreKind::Logits);
        let target = rand_map(&mut rng, 4, &classes, ScoreKind::Probabilities);
        let yd = rand_map(&mut rng, 4, &classes, ScoreKind::Probabilities);
        let prev = rand_map(&mut rng, 4, &["bg", "cat"], ScoreKind::Probabilities);
        let y = label(&classes, &[false, rng.gen(), true]);
        let cls_classes = names(&["cat", "dog"]);
        let old = names(&["bg", "cat"]);

        // classification through pooling
        let yl = ngwp_pool(&z).unwrap();
        let g = loss_cls_grad(&y, &yl, &cls_classes).unwrap();
        let dz = ngwp_pool_backward(&z, &g).unwrap();
        let f = |x: &[f64]| {
            let zz = ScoreMap::logits(4, names(&classes), x.to_vec()).unwrap();
            loss_cls(&y, &ngwp_pool(&zz).unwrap(), &cls_classes).unwrap()
        };
        fd_check(f, z.scores(), &dz);

        let f = |x: &[f64]| {
            let p = ScoreMap::probabilities(4, names(&classes), x.to_vec()).unwrap();
            loss_seg(&target, &p).unwrap()
        };
        fd_check(f, yd.scores(), &loss_seg_grad(&target, &yd).unwrap());

        let f = |x: &[f64]| {
            let zz = ScoreMap::logits(4, names(&classes), x.to_vec()).unwrap();
            loss_kdl(&zz, &prev, &old).unwrap()
        };
        fd_check(f, z.scores(), &loss_kdl_grad(&z, &prev, &old).unwrap());

        let et = FeatureMap::new(4, 3, (0..12).map(|_| rng.gen_range(-2.0..2.0)).collect()).unwrap();
        let ep = FeatureMap::new(4, 3, (0..12).map(|_| rng.gen_range(-2.0..2.0)).collect()).unwrap();
        for norm in [KdeNorm::Squared, KdeNorm::Euclidean] {
            let f = |x: &[f64]| loss_kde(&FeatureMap::new(4, 3, x.to_vec()).unwrap(), &ep, norm).unwrap();
            fd_check(f, et.data(), &loss_kde_grad(&et, &ep, norm).unwrap());
        }
    }
}

#[test]
fn clamped_regions_have_zero_gradient() {
    let t = ScoreMap::probabilities(1, names(&["a"]), vec![1.0]).unwrap();
    let p = ScoreMap::probabilities(1, names(&["a"]), vec![0.0]).unwrap();
    assert_eq!(loss_seg_grad(&t, &p).unwrap(), vec![0.0]);
    assert!(loss_seg(&t, &p).unwrap().is_finite());

    let z = ScoreMap::logits(1, names(&["a"]), vec![-60.0]).unwrap();
    assert_eq!(ngwp_pool(&z).unwrap().values[0], EPS);
    assert_eq!(ngwp_pool_backward(&z, &[1.0]).unwrap(), vec![0.0]);
}

fn prob_row(k: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(0.01f64..1.0, k).prop_map(|v| {
        let s: f64 = v.iter().sum();
        v.into_iter().map(|x| x / s).collect()
    })
}

proptest! {
    #[test]
    fn smooth_keeps_rows_stochastic(rows in proptest::collection::vec(prob_row(4), 1..6), alpha in 0.0f64..0.99) {
        let n = rows.len();
        let m = ScoreMap::probabilities(n, names(&["a", "b", "c", "d"]), rows.concat()).unwrap();
        let s = smooth(&m, alpha).unwrap();
        for i in 0..n {
            let sum: f64 = s.row(i).iter().sum();
            prop_assert!((sum - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn losses_are_non_negative(
        t in proptest::collection::vec(0.0f64..=1.0, 6),
        p in proptest::collection::vec(0.0f64..=1.0, 6),
        z in proptest::collection::vec(-40.0f64..40.0, 6),
    ) {
        let cls = names(&["a", "b"]);
        let tm = ScoreMap::probabilities(3, cls.clone(), t).unwrap();
        let pm = ScoreMap::probabilities(3, cls.clone(), p).unwrap();
        let zm = ScoreMap::logits(3, cls.clone(), z).unwrap();
        prop_assert!(loss_seg(&tm, &pm).unwrap() >= 0.0);
        prop_assert!(loss_kdl(&zm, &tm, &cls).unwrap() >= 0.0);
        let yl = ngwp_pool(&zm).unwrap();
        prop_assert!(yl.values.iter().all(|&v| v > 0.0 && v < 1.0));
        let lab = image_label_from_pixel(&tm, 1).unwrap();
        prop_assert!(loss_cls(&lab, &yl, &cls).unwrap() >= 0.0);
    }

    #[test]
    fn fusion_keeps_old_columns(
        l in proptest::collection::vec(0.0f64..=1.0, 16),
        d in proptest::collection::vec(0.0f64..=1.0, 8),
    ) {
        let ctx = StepContext::new(names(&["bg", "cat"]), names(&["dog", "cow"]), "bg").unwrap();
        let yl = ScoreMap::probabilities(4, names(&["bg", "cat", "dog", "cow"]), l).unwrap();
        let prev = ScoreMap::probabilities(4, names(&["bg", "cat"]), d).unwrap();
        let f = fuse_pseudo(&yl, &prev, &ctx).unwrap();
        for i in 0..4 {
            prop_assert_eq!(f.get(i, 1).to_bits(), prev.get(i, 1).to_bits());
            prop_assert!(f.row(i).iter().all(|v| (0.0..=1.0).contains(v)));
        }
    }

    #[test]
    fn pooling_masks_ignore_pixel_shift(row in proptest::collection::vec(-5.0f64..5.0, 3), k in -3.0f64..3.0) {
        // one pixel: ordering of pooled scores follows the logits for any shift
        let cls = names(&["a", "b", "c"]);
        let z = ScoreMap::logits(1, cls.clone(), row.clone()).unwrap();
        let shifted = ScoreMap::logits(1, cls, row.iter().map(|v| v + k).collect()).unwrap();
        let argmax = |v: &[f64]| (0..v.len()).fold(0, |b, i| if v[i] > v[b] { i } else { b });
        let m1 = pixel_softmax(&z).unwrap();
        let m2 = pixel_softmax(&shifted).unwrap();
        for (a, b) in m1.scores().iter().zip(m2.scores()) {
            prop_assert!((a - b).abs() < 1e-12);
        }
        prop_assert_eq!(argmax(&ngwp_pool(&z).unwrap().values), argmax(&ngwp_pool(&shifted).unwrap().values));
    }

    #[test]
    fn seg_loss_ignores_pixel_order(t in proptest::collection::vec(0.0f64..=1.0, 8), p in proptest::collection::vec(0.0f64..=1.0, 8)) {
        let cls = names(&["a", "b"]);
        let loss = |t: Vec<f64>, p: Vec<f64>| {
            loss_seg(&ScoreMap::probabilities(4, cls.clone(), t).unwrap(), &ScoreMap::probabilities(4, cls.clone(), p).unwrap()).unwrap()
        };
        let rot = |v: &[f64]| { let mut r = v[2..].to_vec(); r.extend_from_slice(&v[..2]); r };
        prop_assert!((loss(t.clone(), p.clone()) - loss(rot(&t), rot(&p))).abs() < 1e-12);
    }
}
