//! Seeded synthetic populations, verification pairs and face scores.
//!
//! Every generator draws from its own ChaCha stream derived from the seed, so
//! identical specs produce identical outputs.

use std::collections::HashSet;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand::distr::weighted::WeightedIndex;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal as StdNormal};
use thiserror::Error;

use crate::ingestion::{image_id, AgeMode, AnnotationRecord, PairLabel, PairRecord, ScoreRecord};
use crate::profiles::{AgeCuts, ProfileSource, SoftProfile, TraitKind, TraitValue, MAX_AGE_YEARS};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SynthError {
    #[error("invalid synthetic spec: {0}")]
    Spec(String),
    #[error("fold {fold}: {message}")]
    Shortfall { fold: usize, message: String },
}

fn spec_err(message: impl Into<String>) -> SynthError {
    SynthError::Spec(message.into())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ImagesPerSubject {
    Fixed(usize),
    /// `(image count, weight)` entries.
    Histogram(Vec<(usize, f64)>),
}

/// Instance probabilities per trait, indexed by code.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraitPriors(pub [Vec<f64>; 6]);

impl Default for TraitPriors {
    fn default() -> Self {
        TraitPriors([
            vec![0.78, 0.22],
            vec![0.005, 0.005, 0.12, 0.67, 0.20],
            vec![0.815, 0.04, 0.055, 0.02, 0.07],
            vec![0.80, 0.186, 0.014],
            vec![0.06, 0.94],
            vec![0.10, 0.90],
        ])
    }
}

impl TraitPriors {
    pub fn get(&self, kind: TraitKind) -> &[f64] {
        &self.0[kind.index()]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub n_subjects: usize,
    pub images_per_subject: ImagesPerSubject,
    pub priors: TraitPriors,
    /// Per-trait probability that an image's observation is corrupted.
    pub label_noise: [f64; 6],
    pub age_mode: AgeMode,
    /// Standard deviation of the per-image age jitter in years mode.
    pub age_drift_years: f64,
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            n_subjects: 2000,
            images_per_subject: ImagesPerSubject::Fixed(4),
            priors: TraitPriors::default(),
            label_noise: [0.05; 6],
            age_mode: AgeMode::Categorical,
            age_drift_years: 3.0,
            seed: 0,
        }
    }
}

impl SynthSpec {
    pub fn validate(&self) -> Result<(), SynthError> {
        if self.n_subjects == 0 {
            return Err(spec_err("n_subjects must be positive"));
        }
        match &self.images_per_subject {
            ImagesPerSubject::Fixed(0) => return Err(spec_err("images per subject must be positive")),
            ImagesPerSubject::Fixed(_) => {}
            ImagesPerSubject::Histogram(h) => {
                if h.is_empty() || h.iter().any(|&(n, w)| n == 0 || !w.is_finite() || w < 0.0) {
                    return Err(spec_err("histogram needs positive counts and non-negative weights"));
                }
                if h.iter().map(|&(_, w)| w).sum::<f64>() <= 0.0 {
                    return Err(spec_err("histogram weights sum to zero"));
                }
            }
        }
        for kind in TraitKind::ALL {
            let p = self.priors.get(kind);
            if p.len() != kind.code_count() {
                return Err(spec_err(format!(
                    "{kind} prior needs {} probabilities, got {}",
                    kind.code_count(),
                    p.len()
                )));
            }
            if p.iter().any(|&x| !(0.0..=1.0).contains(&x)) || (p.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
                return Err(spec_err(format!("{kind} prior must be probabilities summing to 1")));
            }
        }
        if self.label_noise.iter().any(|&r| !(0.0..=1.0).contains(&r)) {
            return Err(spec_err("noise rates must lie in [0, 1]"));
        }
        if !(self.age_drift_years >= 0.0 && self.age_drift_years.is_finite()) {
            return Err(spec_err("age drift must be a non-negative number of years"));
        }
        Ok(())
    }
}

/// One synthetic identity and its observed images.
#[derive(Debug, Clone, PartialEq)]
pub struct Subject {
    pub name: String,
    pub latent: SoftProfile,
    pub images: Vec<AnnotationRecord>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    pub subjects: Vec<Subject>,
}

impl Population {
    pub fn annotations(&self) -> Vec<AnnotationRecord> {
        self.subjects.iter().flat_map(|s| s.images.iter().cloned()).collect()
    }
}

/// Stream ids so that population, pairs and scores never share draws.
const POPULATION_STREAM: u64 = 1;
const PAIRS_STREAM: u64 = 2;
const SCORES_STREAM: u64 = 3;

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn subject_name(i: usize) -> String {
    format!("Synth_Subject_{i:05}")
}

/// Draws a continuous age inside the years bin of a category.
fn years_in_category(code: u8, cuts: &AgeCuts, rng: &mut ChaCha8Rng) -> f64 {
    let c = cuts.values();
    let lo = if code == 0 { 0.0 } else { c[code as usize - 1] };
    let hi = if code as usize == c.len() { 90.0f64.max(c[3] + 1.0) } else { c[code as usize] };
    rng.random_range(lo..hi)
}

fn observe(kind: TraitKind, latent: TraitValue, spec: &SynthSpec, rng: &mut ChaCha8Rng) -> TraitValue {
    let noisy = rng.random_bool(spec.label_noise[kind.index()]);
    match latent {
        TraitValue::Years(y) => {
            let jitter = if spec.age_drift_years > 0.0 {
                Normal::new(0.0, spec.age_drift_years)
                    .expect("validated drift")
                    .sample(rng)
            } else {
                0.0
            };
            TraitValue::Years((y + jitter).clamp(0.0, MAX_AGE_YEARS))
        }
        TraitValue::Categorical(code) if noisy && kind.is_ordinal() => {
            let shifted = if rng.random_bool(0.5) { code as i16 + 1 } else { code as i16 - 1 };
            TraitValue::Categorical(shifted.clamp(0, kind.max_code() as i16) as u8)
        }
        TraitValue::Categorical(code) if noisy => {
            let offset = rng.random_range(1..kind.code_count() as u8);
            TraitValue::Categorical((code + offset) % kind.code_count() as u8)
        }
        v => v,
    }
}

/// Draws latent subject profiles from the priors and noisy per-image
/// observations of them.
pub fn generate_population(spec: &SynthSpec) -> Result<Population, SynthError> {
    spec.validate()?;
    let mut rng = rng_for(spec.seed, POPULATION_STREAM);
    let cuts = AgeCuts::default();
    let samplers: Vec<WeightedIndex<f64>> = TraitKind::ALL
        .iter()
        .map(|&k| WeightedIndex::new(spec.priors.get(k)).map_err(|e| spec_err(format!("{k} prior: {e}"))))
        .collect::<Result<_, _>>()?;
    let histogram = match &spec.images_per_subject {
        ImagesPerSubject::Histogram(h) => Some((
            h.iter().map(|&(n, _)| n).collect::<Vec<_>>(),
            WeightedIndex::new(h.iter().map(|&(_, w)| w)).map_err(|e| spec_err(e.to_string()))?,
        )),
        ImagesPerSubject::Fixed(_) => None,
    };

    let mut subjects = Vec::with_capacity(spec.n_subjects);
    for s in 0..spec.n_subjects {
        let name = subject_name(s);
        let mut latent = SoftProfile::missing(ProfileSource::Synthetic);
        for kind in TraitKind::ALL {
            let code = samplers[kind.index()].sample(&mut rng) as u8;
            let value = match (kind, spec.age_mode) {
                (TraitKind::Age, AgeMode::Years) => TraitValue::Years(years_in_category(code, &cuts, &mut rng)),
                _ => TraitValue::Categorical(code),
            };
            latent.set(kind, value).expect("sampled within range");
        }
        let count = match (&spec.images_per_subject, &histogram) {
            (ImagesPerSubject::Fixed(n), _) => *n,
            (_, Some((counts, dist))) => counts[dist.sample(&mut rng)],
            _ => unreachable!("histogram sampler built for histogram spec"),
        };
        let images = (1..=count)
            .map(|i| {
                let mut profile = SoftProfile::missing(ProfileSource::Synthetic);
                for kind in TraitKind::ALL {
                    let v = observe(kind, latent.get(kind), spec, &mut rng);
                    profile.set(kind, v).expect("observation stays in range");
                }
                AnnotationRecord {
                    image_id: image_id(&name, i as u32),
                    subject_id: name.clone(),
                    profile,
                }
            })
            .collect();
        subjects.push(Subject { name, latent, images });
    }
    Ok(Population { subjects })
}

/// Builds a pairs list with subject-disjoint folds: genuine pairs compare two
/// images of one subject, impostor pairs images of two subjects of the same
/// fold. No pair repeats within a fold.
pub fn generate_pairs(
    population: &Population,
    folds: usize,
    per_class: usize,
    seed: u64,
) -> Result<Vec<PairRecord>, SynthError> {
    if folds == 0 || per_class == 0 {
        return Err(spec_err("folds and pairs per class must be positive"));
    }
    let mut rng = rng_for(seed, PAIRS_STREAM);
    let mut order: Vec<usize> = (0..population.subjects.len()).collect();
    order.shuffle(&mut rng);
    let mut members: Vec<Vec<&Subject>> = vec![Vec::new(); folds];
    for (slot, &s) in order.iter().enumerate() {
        members[slot % folds].push(&population.subjects[s]);
    }

    let mut pairs = Vec::with_capacity(folds * 2 * per_class);
    for (fold, subjects) in members.iter().enumerate() {
        let multi: Vec<&Subject> = subjects.iter().copied().filter(|s| s.images.len() >= 2).collect();
        let genuine_capacity: usize = multi.iter().map(|s| s.images.len() * (s.images.len() - 1) / 2).sum();
        if genuine_capacity < per_class {
            return Err(SynthError::Shortfall {
                fold,
                message: format!(
                    "only {genuine_capacity} distinct genuine pairs available, {per_class} requested ({} short)",
                    per_class - genuine_capacity
                ),
            });
        }
        let images: usize = subjects.iter().map(|s| s.images.len()).sum();
        let same: usize = subjects.iter().map(|s| s.images.len().pow(2)).sum();
        let impostor_capacity = (images * images - same) / 2;
        if subjects.len() < 2 || impostor_capacity < per_class {
            return Err(SynthError::Shortfall {
                fold,
                message: format!(
                    "only {impostor_capacity} distinct impostor pairs available, {per_class} requested"
                ),
            });
        }

        let mut seen: HashSet<(String, String)> = HashSet::new();
        let mut add = |l: &str, r: &str, label, out: &mut Vec<PairRecord>| {
            let key = if l < r { (l.to_string(), r.to_string()) } else { (r.to_string(), l.to_string()) };
            if seen.insert(key) {
                out.push(PairRecord {
                    fold,
                    left_image: l.to_string(),
                    right_image: r.to_string(),
                    label,
                });
                true
            } else {
                false
            }
        };

        let mut made = 0;
        while made < per_class {
            let s = multi.choose(&mut rng).expect("capacity checked");
            let picked: Vec<&AnnotationRecord> = s.images.choose_multiple(&mut rng, 2).collect();
            if add(&picked[0].image_id, &picked[1].image_id, PairLabel::Genuine, &mut pairs) {
                made += 1;
            }
        }
        made = 0;
        while made < per_class {
            let two: Vec<&&Subject> = subjects.choose_multiple(&mut rng, 2).collect();
            let l = two[0].images.choose(&mut rng).expect("subjects have images");
            let r = two[1].images.choose(&mut rng).expect("subjects have images");
            if add(&l.image_id, &r.image_id, PairLabel::Impostor, &mut pairs) {
                made += 1;
            }
        }
    }
    Ok(pairs)
}

/// Gaussian face-score model, either explicit or solved from a target EER.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum FaceScoreModel {
    Gaussian {
        genuine_mean: f64,
        genuine_std: f64,
        impostor_mean: f64,
        impostor_std: f64,
    },
    /// Unit-variance classes separated by `d' = 2 z(1 - target_eer)`.
    TargetEer { target_eer: f64 },
}

impl FaceScoreModel {
    /// `(genuine_mean, genuine_std, impostor_mean, impostor_std)`
    pub fn parameters(&self) -> Result<(f64, f64, f64, f64), SynthError> {
        match *self {
            FaceScoreModel::Gaussian {
                genuine_mean,
                genuine_std,
                impostor_mean,
                impostor_std,
            } => {
                if !(genuine_std > 0.0 && impostor_std > 0.0) {
                    return Err(spec_err("score standard deviations must be positive"));
                }
                if !(genuine_mean.is_finite() && impostor_mean.is_finite()) {
                    return Err(spec_err("score means must be finite"));
                }
                Ok((genuine_mean, genuine_std, impostor_mean, impostor_std))
            }
            FaceScoreModel::TargetEer { target_eer } => {
                if !(target_eer > 0.0 && target_eer < 0.5) {
                    return Err(spec_err(format!("target EER must lie in (0, 0.5), got {target_eer}")));
                }
                Ok((d_prime_for_eer(target_eer), 1.0, 0.0, 1.0))
            }
        }
    }
}

/// Separation of two unit-variance Gaussians whose EER is `eer`.
pub fn d_prime_for_eer(eer: f64) -> f64 {
    let z = StdNormal::new(0.0, 1.0).expect("standard normal").inverse_cdf(1.0 - eer);
    2.0 * z
}

/// Draws one face score per pair, in pair order.
pub fn generate_face_scores(
    pairs: &[PairRecord],
    model: &FaceScoreModel,
    matcher_id: &str,
    seed: u64,
) -> Result<Vec<ScoreRecord>, SynthError> {
    let (gm, gs, im, is) = model.parameters()?;
    let genuine = Normal::new(gm, gs).map_err(|e| spec_err(e.to_string()))?;
    let impostor = Normal::new(im, is).map_err(|e| spec_err(e.to_string()))?;
    let mut rng = rng_for(seed, SCORES_STREAM);
    Ok(pairs
        .iter()
        .map(|p| ScoreRecord {
            left_image: p.left_image.clone(),
            right_image: p.right_image.clone(),
            score: match p.label {
                PairLabel::Genuine => genuine.sample(&mut rng),
                PairLabel::Impostor => impostor.sample(&mut rng),
            },
            matcher_id: matcher_id.to_string(),
        })
        .collect())
}
