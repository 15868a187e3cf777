//! Seeded fixtures shared by the criterion benches.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use softbio_core::ingestion::{index_annotations, join, AgeMode, GapPolicy, ScoreTable};
use softbio_core::synthgen::{generate_face_scores, generate_pairs, generate_population};
use softbio_core::{AgeCuts, FaceScoreModel, JoinedPair, ScoreSet, SoftProfile, SynthSpec};

/// Overlapping genuine and impostor scores with many ties.
pub fn score_set(per_class: usize, seed: u64) -> ScoreSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |shift: f64| -> Vec<f64> {
        (0..per_class)
            .map(|_| ((rng.random::<f64>() + shift) * 1000.0).round() / 1000.0)
            .collect()
    };
    let genuine = draw(0.3);
    let impostor = draw(0.0);
    ScoreSet::new(genuine, impostor).expect("finite scores")
}

/// Profile pairs drawn from a synthetic population.
pub fn profile_pairs(n: usize, seed: u64) -> Vec<(SoftProfile, SoftProfile)> {
    protocol(1, n / 2, seed)
        .into_iter()
        .map(|j| (j.left_profile, j.right_profile))
        .collect()
}

/// Joined synthetic protocol: `folds` folds of `per_class` pairs per class.
pub fn protocol(folds: usize, per_class: usize, seed: u64) -> Vec<JoinedPair> {
    let spec = SynthSpec {
        seed,
        ..SynthSpec::default()
    };
    let population = generate_population(&spec).expect("valid spec");
    let pairs = generate_pairs(&population, folds, per_class, seed).expect("enough subjects");
    let model = FaceScoreModel::TargetEer { target_eer: 0.12 };
    let mut table = ScoreTable::new("face");
    for s in generate_face_scores(&pairs, &model, "face", seed).expect("valid model") {
        table.insert(&s.left_image, &s.right_image, s.score).expect("unique pairs");
    }
    let cuts = AgeCuts::default();
    let index = index_annotations(&population.annotations(), AgeMode::Categorical, &cuts).expect("valid annotations");
    join(&pairs, &index, Some(&table), GapPolicy::Strict)
        .expect("closed protocol")
        .joined
}
