//! Score normalization and weighted score-level fusion.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FusionError {
    #[error("cannot fit a normalizer on an empty score list")]
    EmptyTraining,
    #[error("non-finite training score {0}")]
    NonFinite(f64),
    #[error("fusion weights must be non-negative and sum to 1, got ({0}, {1})")]
    BadWeights(f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum NormMethod {
    #[default]
    MinMax,
    ZScore,
}

/// A fitted normalization. Degenerate fits (a single distinct value) map
/// every input to 0.5 (min-max) or 0 (z-score).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "lowercase")]
pub enum Normalizer {
    MinMax { min: f64, max: f64, degenerate: bool },
    ZScore { mean: f64, std: f64, degenerate: bool },
}

impl Normalizer {
    pub fn fit(scores: &[f64], method: NormMethod) -> Result<Self, FusionError> {
        if scores.is_empty() {
            return Err(FusionError::EmptyTraining);
        }
        if let Some(&bad) = scores.iter().find(|s| !s.is_finite()) {
            return Err(FusionError::NonFinite(bad));
        }
        Ok(match method {
            NormMethod::MinMax => {
                let min = scores.iter().copied().fold(f64::INFINITY, f64::min);
                let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                Normalizer::MinMax {
                    min,
                    max,
                    degenerate: min.partial_cmp(&max) != Some(std::cmp::Ordering::Less),
                }
            }
            NormMethod::ZScore => {
                let n = scores.len() as f64;
                let mean = scores.iter().sum::<f64>() / n;
                let std = if scores.len() < 2 {
                    0.0
                } else {
                    (scores.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
                };
                Normalizer::ZScore {
                    mean,
                    std,
                    degenerate: std.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater),
                }
            }
        })
    }

    pub fn is_degenerate(&self) -> bool {
        match *self {
            Normalizer::MinMax { degenerate, .. } | Normalizer::ZScore { degenerate, .. } => degenerate,
        }
    }

    pub fn apply(&self, x: f64) -> f64 {
        match *self {
            Normalizer::MinMax { degenerate: true, .. } => 0.5,
            Normalizer::ZScore { degenerate: true, .. } => 0.0,
            Normalizer::MinMax { min, max, .. } => (x - min) / (max - min),
            Normalizer::ZScore { mean, std, .. } => (x - mean) / std,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum SoftMissingFallback {
    /// Use the normalized face score alone.
    #[default]
    FaceOnly,
    DropPair,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FusionConfig {
    pub w_face: f64,
    pub w_soft: f64,
    pub soft_missing: SoftMissingFallback,
}

impl Default for FusionConfig {
    fn default() -> Self {
        FusionConfig {
            w_face: 0.5,
            w_soft: 0.5,
            soft_missing: SoftMissingFallback::FaceOnly,
        }
    }
}

impl FusionConfig {
    pub fn new(w_face: f64, w_soft: f64, soft_missing: SoftMissingFallback) -> Result<Self, FusionError> {
        if !(w_face >= 0.0 && w_soft >= 0.0 && (w_face + w_soft - 1.0).abs() <= 1e-12) {
            return Err(FusionError::BadWeights(w_face, w_soft));
        }
        Ok(FusionConfig {
            w_face,
            w_soft,
            soft_missing,
        })
    }
}

/// Fitted normalizers for the two modalities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FusionNorms {
    pub face: Normalizer,
    pub soft: Normalizer,
}

/// Fused score, or `None` when the pair has to be dropped: the face score is
/// missing, or the soft score is missing and the fallback drops the pair.
pub fn fuse(face: Option<f64>, soft: Option<f64>, norms: &FusionNorms, cfg: &FusionConfig) -> Option<f64> {
    let face = norms.face.apply(face?);
    match soft {
        Some(s) => Some(cfg.w_face * face + cfg.w_soft * norms.soft.apply(s)),
        None => match cfg.soft_missing {
            SoftMissingFallback::FaceOnly => Some(face),
            SoftMissingFallback::DropPair => None,
        },
    }
}

/// Fits a normalizer on the entries of `scores` whose fold differs from
/// `held_out`. Missing entries are skipped.
pub fn fit_on_training_folds(
    scores: &[Option<f64>],
    folds: &[usize],
    held_out: Option<usize>,
    method: NormMethod,
) -> Result<Normalizer, FusionError> {
    assert_eq!(scores.len(), folds.len(), "one fold id per score");
    let indices: Vec<usize> = (0..scores.len())
        .filter(|&i| Some(folds[i]) != held_out && scores[i].is_some())
        .collect();
    assert!(
        indices.iter().all(|&i| Some(folds[i]) != held_out),
        "held-out fold leaked into normalizer fitting"
    );
    let training: Vec<f64> = indices.iter().filter_map(|&i| scores[i]).collect();
    Normalizer::fit(&training, method)
}
