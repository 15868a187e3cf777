mod common;

use common::{brute_eer, rng};
use proptest::prelude::*;
use rand::Rng;
use softbio_core::evaluation::{cross_validate, eer, eer_point, mean_std, roc_curve, FoldLabel};
use softbio_core::ScoreSet;

fn random_set(rng: &mut rand_chacha::ChaCha8Rng) -> ScoreSet {
    let n = rng.random_range(10..=500usize);
    let ng = rng.random_range(1..n);
    // Coarse grids produce plenty of ties, continuous draws almost none.
    let coarse = rng.random_bool(0.5);
    let shift: f64 = rng.random_range(0.0..2.0);
    let mut draw = |offset: f64| {
        let x: f64 = rng.random_range(0.0..4.0) + offset;
        if coarse {
            (x * 4.0).round() / 4.0
        } else {
            x
        }
    };
    let genuine = (0..ng).map(|_| draw(shift)).collect();
    let impostor = (0..n - ng).map(|_| draw(0.0)).collect();
    ScoreSet::new(genuine, impostor).unwrap()
}

#[test]
fn eer_matches_brute_force_on_random_sets() {
    let mut r = rng(11);
    for case in 0..1000 {
        let s = random_set(&mut r);
        let fast = eer(&s).unwrap();
        let slow = brute_eer(&s.genuine, &s.impostor);
        assert!((fast - slow).abs() <= 1e-9, "case {case}: {fast} vs {slow}");
    }
}

#[test]
fn perfect_separation_is_exactly_zero() {
    let mut r = rng(12);
    for _ in 0..200 {
        let ng = r.random_range(1..50);
        let ni = r.random_range(1..50);
        let gap: f64 = r.random_range(0.001..3.0);
        let impostor: Vec<f64> = (0..ni).map(|_| r.random_range(-5.0..0.0)).collect();
        let genuine: Vec<f64> = (0..ng).map(|_| r.random_range(0.0..5.0) + gap).collect();
        assert_eq!(eer(&ScoreSet::new(genuine, impostor).unwrap()).unwrap(), 0.0);
    }
}

#[test]
fn eer_is_a_rate_and_bracketed_by_the_crossing() {
    let mut r = rng(13);
    for _ in 0..300 {
        let s = random_set(&mut r);
        let roc = roc_curve(&s).unwrap();
        let p = roc.eer_point();
        assert!((0.0..=1.0).contains(&p.eer));
        let k = roc.points.iter().position(|q| q.far <= q.frr).unwrap();
        let lo = roc.points[k].far.min(roc.points[k.saturating_sub(1)].far);
        let hi = roc.points[k.saturating_sub(1)].far.max(roc.points[k].far);
        assert!(p.eer >= lo - 1e-12 && p.eer <= hi + 1e-12);
    }
}

#[test]
fn identical_scores_are_degenerate() {
    let p = eer_point(&ScoreSet::new(vec![0.3; 4], vec![0.3; 7]).unwrap()).unwrap();
    assert!(p.degenerate);
    assert_eq!(p.eer, 0.5);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn eer_invariant_under_positive_affine_maps(
        genuine in prop::collection::vec(-10.0f64..10.0, 1..60),
        impostor in prop::collection::vec(-10.0f64..10.0, 1..60),
        a in 0.01f64..100.0,
        b in -50.0f64..50.0,
    ) {
        let s = ScoreSet::new(genuine, impostor).unwrap();
        let base = eer(&s).unwrap();
        let mapped = s.map(|x| a * x + b);
        // Only an order-preserving map keeps every threshold comparison; an
        // affine map can merge nearly equal floats, so compare against the
        // oracle on the mapped set as well.
        let after = eer(&mapped).unwrap();
        prop_assert!((after - brute_eer(&mapped.genuine, &mapped.impostor)).abs() <= 1e-12);
        let order_kept = {
            let all: Vec<f64> = s.genuine.iter().chain(&s.impostor).copied().collect();
            all.iter().all(|&x| all.iter().all(|&y| (x < y) == (a * x + b < a * y + b)))
        };
        if order_kept {
            prop_assert!((after - base).abs() <= 1e-12, "{base} vs {after}");
        }
    }

    #[test]
    fn eer_invariant_under_monotone_maps(
        genuine in prop::collection::vec(-3.0f64..3.0, 1..60),
        impostor in prop::collection::vec(-3.0f64..3.0, 1..60),
    ) {
        let s = ScoreSet::new(genuine, impostor).unwrap();
        let base = eer(&s).unwrap();
        let mapped = eer(&s.map(f64::exp)).unwrap();
        prop_assert!((base - mapped).abs() <= 1e-12);
    }

    #[test]
    fn swapping_classes_mirrors_negation(
        genuine in prop::collection::vec(-3.0f64..3.0, 1..40),
        impostor in prop::collection::vec(-3.0f64..3.0, 1..40),
    ) {
        // Negating scores and swapping labels describes the same classifier.
        let s = ScoreSet::new(genuine.clone(), impostor.clone()).unwrap();
        let swapped = ScoreSet::new(
            impostor.iter().map(|x| -x).collect(),
            genuine.iter().map(|x| -x).collect(),
        )
        .unwrap();
        let (a, b) = (eer(&s).unwrap(), eer(&swapped).unwrap());
        // Ties are accepted on one side of the threshold only, so the mirror
        // can differ by at most one tied block.
        prop_assert!((0.0..=1.0).contains(&b));
        if s.genuine.iter().chain(&s.impostor).all(|x| {
            s.genuine.iter().chain(&s.impostor).filter(|y| *y == x).count() == 1
        }) {
            prop_assert!((a - b).abs() <= 1e-9, "{a} vs {b}");
        }
    }
}

#[test]
fn fold_aggregation_matches_per_fold_oracle() {
    let mut r = rng(14);
    for _ in 0..50 {
        let folds = r.random_range(2..8usize);
        let mut labels = Vec::new();
        let mut scores = Vec::new();
        for f in 0..folds {
            for g in [true, false] {
                for _ in 0..r.random_range(1..30) {
                    labels.push(FoldLabel { fold: f, genuine: g });
                    scores.push(r.random_range(0.0..1.0) + if g { 0.3 } else { 0.0 });
                }
            }
        }
        let cv = cross_validate(&labels, true, |_, i| Some(scores[i])).unwrap();
        let per_fold: Vec<f64> = (0..folds)
            .map(|f| {
                let pick = |g: bool| -> Vec<f64> {
                    labels
                        .iter()
                        .zip(&scores)
                        .filter(|(l, _)| l.fold == f && l.genuine == g)
                        .map(|(_, &s)| s)
                        .collect()
                };
                brute_eer(&pick(true), &pick(false))
            })
            .collect();
        let mean = per_fold.iter().sum::<f64>() / folds as f64;
        let std = (per_fold.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (folds as f64 - 1.0)).sqrt();
        assert!((cv.report.eer_mean - mean).abs() <= 1e-12);
        assert!((cv.report.eer_std - std).abs() <= 1e-12);
        assert_eq!(mean_std(&per_fold).0, cv.report.eer_mean);
        assert_eq!(cv.report.folds.len(), folds);
        assert!(cv.report.accuracy_mean.unwrap() > 0.0);
    }
}

#[test]
fn scorer_sees_only_its_round() {
    let labels: Vec<FoldLabel> = (0..3)
        .flat_map(|f| [FoldLabel { fold: f, genuine: true }, FoldLabel { fold: f, genuine: false }])
        .collect();
    let cv = cross_validate(&labels, false, |held_out, i| {
        assert_eq!(labels[i].fold, held_out, "training items scored without threshold training");
        Some(if labels[i].genuine { 1.0 } else { 0.0 })
    })
    .unwrap();
    assert_eq!(cv.report.eer_mean, 0.0);
    assert_eq!(cv.report.accuracy_mean, None);
}
