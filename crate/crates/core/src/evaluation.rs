//! Verification metrics and fold-wise cross validation.
//!
//! Scores are similarities: a pair is accepted at threshold `t` when its score
//! is `>= t`. FAR is the fraction of impostors accepted, FRR the fraction of
//! genuines rejected (`score < t`).

use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("score set has no {0} scores")]
    EmptyClass(&'static str),
    #[error("non-finite score {0}")]
    NonFinite(f64),
    #[error("protocol needs at least 2 folds, found {0}")]
    TooFewFolds(usize),
    #[error("fold {fold} has no {class} pairs")]
    FoldMissingClass { fold: usize, class: &'static str },
    #[error("scores and labels differ in length ({scores} vs {labels})")]
    LengthMismatch { scores: usize, labels: usize },
}

/// Genuine and impostor scores for one evaluation unit.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ScoreSet {
    pub genuine: Vec<f64>,
    pub impostor: Vec<f64>,
}

impl ScoreSet {
    pub fn new(genuine: Vec<f64>, impostor: Vec<f64>) -> Result<Self, EvalError> {
        if let Some(&bad) = genuine.iter().chain(&impostor).find(|s| !s.is_finite()) {
            return Err(EvalError::NonFinite(bad));
        }
        Ok(ScoreSet { genuine, impostor })
    }

    pub fn len(&self) -> usize {
        self.genuine.len() + self.impostor.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn check_nonempty(&self) -> Result<(), EvalError> {
        if self.genuine.is_empty() {
            return Err(EvalError::EmptyClass("genuine"));
        }
        if self.impostor.is_empty() {
            return Err(EvalError::EmptyClass("impostor"));
        }
        Ok(())
    }

    /// Applies `f` to every score.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> ScoreSet {
        ScoreSet {
            genuine: self.genuine.iter().map(|&s| f(s)).collect(),
            impostor: self.impostor.iter().map(|&s| f(s)).collect(),
        }
    }
}

fn sorted(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    v
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    /// Decision threshold; the last point sits above every score and is
    /// serialized as `null`.
    pub threshold: f64,
    pub far: f64,
    pub frr: f64,
}

/// Operating points at every distinct score plus one above the maximum.
///
/// Thresholds rise along the curve, so `far` is non-increasing and `frr`
/// non-decreasing; the first point has `far = 1` and the last `far = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocCurve {
    pub points: Vec<RocPoint>,
}

pub fn roc_curve(scores: &ScoreSet) -> Result<RocCurve, EvalError> {
    scores.check_nonempty()?;
    let genuine = sorted(&scores.genuine);
    let impostor = sorted(&scores.impostor);
    let (ng, ni) = (genuine.len() as f64, impostor.len() as f64);
    let mut thresholds: Vec<f64> = genuine.iter().chain(&impostor).copied().collect();
    thresholds.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    thresholds.dedup();

    // `rejected_*` count scores strictly below the current threshold.
    let mut rejected_g = 0usize;
    let mut rejected_i = 0usize;
    let mut points = Vec::with_capacity(thresholds.len() + 1);
    for &t in &thresholds {
        while rejected_g < genuine.len() && genuine[rejected_g] < t {
            rejected_g += 1;
        }
        while rejected_i < impostor.len() && impostor[rejected_i] < t {
            rejected_i += 1;
        }
        points.push(RocPoint {
            threshold: t,
            far: (impostor.len() - rejected_i) as f64 / ni,
            frr: rejected_g as f64 / ng,
        });
    }
    points.push(RocPoint {
        threshold: f64::INFINITY,
        far: 0.0,
        frr: 1.0,
    });
    Ok(RocCurve { points })
}

/// Equal error rate with the operating threshold where it was found.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EerPoint {
    pub eer: f64,
    /// Lower threshold of the bracketing pair (or the exact crossing).
    pub threshold: f64,
    /// All scores were identical; the EER of 0.5 is a convention.
    pub degenerate: bool,
}

impl RocCurve {
    /// First FAR/FRR crossing along the curve, linearly interpolated between
    /// the two thresholds that bracket the sign change of `far - frr`.
    pub fn eer_point(&self) -> EerPoint {
        let pts = &self.points;
        let degenerate = pts.len() == 2;
        let diff = |p: &RocPoint| p.far - p.frr;
        let k = pts
            .iter()
            .position(|p| diff(p) <= 0.0)
            .expect("last roc point always has far - frr = -1");
        let hit = pts[k];
        if diff(&hit) == 0.0 || k == 0 {
            return EerPoint {
                eer: hit.far,
                threshold: hit.threshold,
                degenerate,
            };
        }
        let prev = pts[k - 1];
        let alpha = diff(&prev) / (diff(&prev) - diff(&hit));
        EerPoint {
            eer: prev.far + alpha * (hit.far - prev.far),
            threshold: prev.threshold,
            degenerate,
        }
    }
}

pub fn eer_point(scores: &ScoreSet) -> Result<EerPoint, EvalError> {
    Ok(roc_curve(scores)?.eer_point())
}

pub fn eer(scores: &ScoreSet) -> Result<f64, EvalError> {
    eer_point(scores).map(|p| p.eer)
}

/// Fraction of correct decisions when accepting scores `>= t`.
pub fn accuracy_at_threshold(scores: &ScoreSet, t: f64) -> Result<f64, EvalError> {
    if scores.is_empty() {
        return Err(EvalError::EmptyClass("genuine or impostor"));
    }
    let correct = scores.genuine.iter().filter(|&&s| s >= t).count()
        + scores.impostor.iter().filter(|&&s| s < t).count();
    Ok(correct as f64 / scores.len() as f64)
}

/// Threshold minimizing `(FAR + FRR) / 2`. Candidates are midpoints between
/// adjacent distinct scores plus one point below and one above all scores;
/// ties keep the lowest threshold.
pub fn min_hter_threshold(scores: &ScoreSet) -> Result<f64, EvalError> {
    let roc = roc_curve(scores)?;
    let pts = &roc.points;
    let mut best = (f64::INFINITY, 0usize);
    for (i, p) in pts.iter().enumerate() {
        let hter = 0.5 * (p.far + p.frr);
        if hter < best.0 {
            best = (hter, i);
        }
    }
    let i = best.1;
    let last_score = pts[pts.len() - 2].threshold;
    Ok(match i {
        0 => pts[0].threshold - 1.0,
        i if i == pts.len() - 1 => last_score + 1.0,
        i => 0.5 * (pts[i - 1].threshold + pts[i].threshold),
    })
}

/// Fold membership and ground truth of one scored item.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldLabel {
    pub fold: usize,
    pub genuine: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub fold: usize,
    pub eer: f64,
    pub accuracy: Option<f64>,
    pub threshold: Option<f64>,
    pub genuine: usize,
    pub impostor: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldReport {
    pub folds: Vec<FoldResult>,
    pub eer_mean: f64,
    pub eer_std: f64,
    pub accuracy_mean: Option<f64>,
    pub accuracy_std: Option<f64>,
    /// Items the scorer could not score.
    pub unscored: usize,
}

/// Mean and sample standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Per-fold report together with the held-out scores it was computed from.
#[derive(Debug, Clone)]
pub struct CrossValidation {
    pub report: FoldReport,
    pub fold_scores: Vec<(usize, ScoreSet)>,
}

/// Runs the held-out-fold protocol.
///
/// `scorer(held_out, i)` scores item `i` for the round in which `held_out` is
/// the test fold; it returns `None` for items that cannot be scored. Scores of
/// the other folds in the same round are used to train the accuracy threshold
/// when `train_threshold` is set.
pub fn cross_validate<F>(labels: &[FoldLabel], train_threshold: bool, scorer: F) -> Result<CrossValidation, EvalError>
where
    F: Fn(usize, usize) -> Option<f64>,
{
    let mut folds: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
    for l in labels {
        let entry = folds.entry(l.fold).or_default();
        if l.genuine {
            entry.0 += 1;
        } else {
            entry.1 += 1;
        }
    }
    if folds.len() < 2 {
        return Err(EvalError::TooFewFolds(folds.len()));
    }
    for (&fold, &(g, i)) in &folds {
        if g == 0 {
            return Err(EvalError::FoldMissingClass { fold, class: "genuine" });
        }
        if i == 0 {
            return Err(EvalError::FoldMissingClass { fold, class: "impostor" });
        }
    }

    let mut results = Vec::with_capacity(folds.len());
    let mut fold_scores = Vec::with_capacity(folds.len());
    let mut unscored = 0;
    for &held_out in folds.keys() {
        let mut test = ScoreSet::default();
        let mut train = ScoreSet::default();
        for (i, l) in labels.iter().enumerate() {
            let is_test = l.fold == held_out;
            if !is_test && !train_threshold {
                continue;
            }
            let Some(score) = scorer(held_out, i) else {
                if is_test {
                    unscored += 1;
                }
                continue;
            };
            if !score.is_finite() {
                return Err(EvalError::NonFinite(score));
            }
            let target = if is_test { &mut test } else { &mut train };
            if l.genuine {
                target.genuine.push(score);
            } else {
                target.impostor.push(score);
            }
        }
        let fold_err = |e: EvalError| match e {
            EvalError::EmptyClass(class) => EvalError::FoldMissingClass { fold: held_out, class },
            e => e,
        };
        let eer = eer(&test).map_err(fold_err)?;
        let (threshold, accuracy) = if train_threshold {
            let t = min_hter_threshold(&train).map_err(fold_err)?;
            (Some(t), Some(accuracy_at_threshold(&test, t)?))
        } else {
            (None, None)
        };
        results.push(FoldResult {
            fold: held_out,
            eer,
            accuracy,
            threshold,
            genuine: test.genuine.len(),
            impostor: test.impostor.len(),
        });
        fold_scores.push((held_out, test));
    }

    let eers: Vec<f64> = results.iter().map(|r| r.eer).collect();
    let (eer_mean, eer_std) = mean_std(&eers);
    let (accuracy_mean, accuracy_std) = if train_threshold {
        let accs: Vec<f64> = results.iter().filter_map(|r| r.accuracy).collect();
        let (m, s) = mean_std(&accs);
        (Some(m), Some(s))
    } else {
        (None, None)
    };
    Ok(CrossValidation {
        report: FoldReport {
            folds: results,
            eer_mean,
            eer_std,
            accuracy_mean,
            accuracy_std,
            unscored,
        },
        fold_scores,
    })
}
