//! Annotation statistics and COTS estimator quality.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingestion::{subject_of, AnnotationRecord, CotsRecord};
use crate::profiles::{age_to_category, AgeCuts, ProfileError, SoftProfile, TraitKind, TraitValue};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("vectors differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("need at least 2 observations, got {0}")]
    TooShort(usize),
    #[error("groundtruth and COTS files share no image ids")]
    EmptyIntersection,
    #[error(transparent)]
    Profile(#[from] ProfileError),
}

/// Pearson correlation with population moments. `None` when either vector is
/// constant.
pub fn pearson(a: &[f64], b: &[f64]) -> Result<Option<f64>, AnalysisError> {
    if a.len() != b.len() {
        return Err(AnalysisError::LengthMismatch(a.len(), b.len()));
    }
    if a.len() < 2 {
        return Err(AnalysisError::TooShort(a.len()));
    }
    let n = a.len() as f64;
    let mean_a = a.iter().sum::<f64>() / n;
    let mean_b = b.iter().sum::<f64>() / n;
    let (mut cov, mut var_a, mut var_b) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - mean_a, y - mean_b);
        cov += dx * dy;
        var_a += dx * dx;
        var_b += dy * dy;
    }
    if var_a == 0.0 || var_b == 0.0 {
        return Ok(None);
    }
    Ok(Some((cov / (var_a.sqrt() * var_b.sqrt())).clamp(-1.0, 1.0)))
}

fn code_of(kind: TraitKind, value: TraitValue, cuts: &AgeCuts) -> Result<Option<u8>, ProfileError> {
    Ok(match value {
        TraitValue::Categorical(c) => Some(c),
        TraitValue::Years(y) if kind == TraitKind::Age => Some(age_to_category(y, cuts)?),
        _ => None,
    })
}

/// Pairwise correlations of the quantized trait codes over [`TraitKind::ALL`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    /// `None` where fewer than two images have both traits, or one trait is
    /// constant over them.
    pub values: [[Option<f64>; 6]; 6],
}

impl CorrelationMatrix {
    pub fn get(&self, a: TraitKind, b: TraitKind) -> Option<f64> {
        self.values[a.index()][b.index()]
    }

    /// Square CSV with trait names on both axes; undefined cells are empty.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("trait");
        for k in TraitKind::ALL {
            out.push(',');
            out.push_str(k.name());
        }
        out.push('\n');
        for a in TraitKind::ALL {
            out.push_str(a.name());
            for b in TraitKind::ALL {
                out.push(',');
                if let Some(v) = self.get(a, b) {
                    out.push_str(&format!("{v:.6}"));
                }
            }
            out.push('\n');
        }
        out
    }
}

/// Correlation matrix with pairwise deletion of missing values.
pub fn correlation_matrix(profiles: &[SoftProfile], cuts: &AgeCuts) -> Result<CorrelationMatrix, AnalysisError> {
    let codes: Vec<[Option<u8>; 6]> = profiles
        .iter()
        .map(|p| {
            let mut row = [None; 6];
            for k in TraitKind::ALL {
                row[k.index()] = code_of(k, p.get(k), cuts)?;
            }
            Ok(row)
        })
        .collect::<Result<_, ProfileError>>()?;
    let mut values = [[None; 6]; 6];
    for i in 0..6 {
        for j in i..6 {
            let (a, b): (Vec<f64>, Vec<f64>) = codes
                .iter()
                .filter_map(|row| Some((row[i]? as f64, row[j]? as f64)))
                .unzip();
            let r = if a.len() < 2 {
                None
            } else if i == j {
                pearson(&a, &b)?.map(|_| 1.0)
            } else {
                pearson(&a, &b)?
            };
            values[i][j] = r;
            values[j][i] = r;
        }
    }
    Ok(CorrelationMatrix { values })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceShare {
    pub instance: String,
    pub count: usize,
    pub percent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraitFrequencies {
    pub kind: TraitKind,
    pub instances: Vec<InstanceShare>,
    pub missing: usize,
}

/// Per-trait instance percentages over non-missing entries.
pub fn demographic_stats(records: &[AnnotationRecord], cuts: &AgeCuts) -> Result<Vec<TraitFrequencies>, AnalysisError> {
    TraitKind::ALL
        .into_iter()
        .map(|kind| {
            let mut counts = vec![0usize; kind.code_count()];
            let mut missing = 0;
            for r in records {
                match code_of(kind, r.profile.get(kind), cuts)? {
                    Some(c) => counts[c as usize] += 1,
                    None => missing += 1,
                }
            }
            let total: usize = counts.iter().sum();
            let instances = kind
                .instances()
                .iter()
                .zip(&counts)
                .map(|(name, &count)| InstanceShare {
                    instance: name.to_string(),
                    count,
                    percent: if total == 0 {
                        0.0
                    } else {
                        100.0 * count as f64 / total as f64
                    },
                })
                .collect();
            Ok(TraitFrequencies {
                kind,
                instances,
                missing,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceAccuracy {
    pub instance: String,
    pub support: usize,
    pub correct: usize,
    /// Percent; `None` when the instance has no support.
    pub accuracy: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraitAccuracy {
    pub kind: TraitKind,
    /// `None` when the COTS does not estimate this trait.
    pub instances: Option<Vec<InstanceAccuracy>>,
    pub evaluated: usize,
    pub correct: usize,
    pub overall: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccuracyTable {
    pub traits: Vec<TraitAccuracy>,
    pub images: usize,
    pub detected: usize,
    /// Percent of intersected images with a detected face.
    pub detection_rate: f64,
}

impl AccuracyTable {
    pub fn get(&self, kind: TraitKind) -> &TraitAccuracy {
        &self.traits[kind.index()]
    }
}

/// Accuracy of COTS estimates against manual groundtruth, in percent.
///
/// Ages in years are thresholded into categories first. Undetected faces
/// count against the detection rate only. Ethnicity is scored only on
/// groundtruth instances the COTS is able to output.
pub fn cots_accuracy(
    groundtruth: &[AnnotationRecord],
    cots: &[CotsRecord],
    cuts: &AgeCuts,
) -> Result<AccuracyTable, AnalysisError> {
    let truth: HashMap<&str, &SoftProfile> = groundtruth
        .iter()
        .map(|r| (r.image_id.as_str(), &r.profile))
        .collect();
    let joined: Vec<(&SoftProfile, &CotsRecord)> = cots
        .iter()
        .filter_map(|c| truth.get(c.image_id.as_str()).map(|&gt| (gt, c)))
        .collect();
    if joined.is_empty() {
        return Err(AnalysisError::EmptyIntersection);
    }
    let detected: Vec<(&SoftProfile, &CotsRecord)> =
        joined.iter().copied().filter(|(_, c)| c.detected).collect();

    let mut traits = Vec::with_capacity(6);
    for kind in TraitKind::ALL {
        let mut pairs = Vec::new();
        for (gt, c) in &detected {
            let (Some(t), Some(e)) = (
                code_of(kind, gt.get(kind), cuts)?,
                code_of(kind, c.profile.get(kind), cuts)?,
            ) else {
                continue;
            };
            pairs.push((t, e));
        }
        let outputs: Vec<bool> = (0..kind.code_count() as u8)
            .map(|code| pairs.iter().any(|&(_, e)| e == code))
            .collect();
        if pairs.is_empty() {
            traits.push(TraitAccuracy {
                kind,
                instances: None,
                evaluated: 0,
                correct: 0,
                overall: None,
            });
            continue;
        }
        if kind == TraitKind::Ethnicity {
            pairs.retain(|&(t, _)| outputs[t as usize]);
        }
        let mut instances = Vec::new();
        for (code, name) in kind.instances().iter().enumerate() {
            if kind == TraitKind::Ethnicity && !outputs[code] {
                continue;
            }
            let support = pairs.iter().filter(|&&(t, _)| t as usize == code).count();
            let correct = pairs
                .iter()
                .filter(|&&(t, e)| t as usize == code && t == e)
                .count();
            instances.push(InstanceAccuracy {
                instance: name.to_string(),
                support,
                correct,
                accuracy: (support > 0).then(|| 100.0 * correct as f64 / support as f64),
            });
        }
        let evaluated = pairs.len();
        let correct = pairs.iter().filter(|(t, e)| t == e).count();
        traits.push(TraitAccuracy {
            kind,
            instances: Some(instances),
            evaluated,
            correct,
            overall: (evaluated > 0).then(|| 100.0 * correct as f64 / evaluated as f64),
        });
    }
    Ok(AccuracyTable {
        traits,
        images: joined.len(),
        detected: detected.len(),
        detection_rate: 100.0 * detected.len() as f64 / joined.len() as f64,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum StdDenominator {
    /// `n - 1`
    #[default]
    Sample,
    /// `n`
    Population,
}

pub fn std_dev(values: &[f64], denominator: StdDenominator) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let ss = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>();
    let d = match denominator {
        StdDenominator::Sample => n - 1,
        StdDenominator::Population => n,
    };
    (ss / d as f64).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgeStabilityRow {
    /// `"1"`..`"15"`, `"more than 15"` or `"more than 3"`.
    pub images_per_identity: String,
    pub identities: usize,
    pub mean_std: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgeStabilityTable {
    pub rows: Vec<AgeStabilityRow>,
    pub total_identities: usize,
    /// No identity had two or more age estimates.
    pub empty: bool,
}

impl AgeStabilityTable {
    pub fn row(&self, label: &str) -> Option<&AgeStabilityRow> {
        self.rows.iter().find(|r| r.images_per_identity == label)
    }
}

/// Largest image count with its own row.
pub const AGE_STABILITY_MAX_K: usize = 15;

/// Spread of estimated ages across images of the same identity.
///
/// Identities are grouped by their number of images with an age estimate.
/// Rows `1..=15` hold identities with exactly that many images, a
/// `"more than 15"` row holds the rest, and `"more than 3"` aggregates every
/// identity with at least four images.
pub fn age_stability(cots: &[CotsRecord], denominator: StdDenominator) -> AgeStabilityTable {
    let mut by_subject: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    for r in cots.iter().filter(|r| r.detected) {
        if let (TraitValue::Years(y), Some(subject)) = (r.profile.get(TraitKind::Age), subject_of(&r.image_id)) {
            by_subject.entry(subject).or_default().push(y);
        }
    }
    let stds: Vec<(usize, f64)> = by_subject
        .values()
        .map(|ages| (ages.len(), std_dev(ages, denominator)))
        .collect();

    let row = |label: String, pick: &dyn Fn(usize) -> bool| {
        let group: Vec<f64> = stds.iter().filter(|(k, _)| pick(*k)).map(|&(_, s)| s).collect();
        AgeStabilityRow {
            images_per_identity: label,
            identities: group.len(),
            mean_std: (!group.is_empty()).then(|| group.iter().sum::<f64>() / group.len() as f64),
        }
    };
    let mut rows: Vec<AgeStabilityRow> = (1..=AGE_STABILITY_MAX_K)
        .map(|k| row(k.to_string(), &|n| n == k))
        .collect();
    rows.push(row(
        format!("more than {AGE_STABILITY_MAX_K}"),
        &|n| n > AGE_STABILITY_MAX_K,
    ));
    rows.push(row("more than 3".into(), &|n| n > 3));
    AgeStabilityTable {
        rows,
        total_identities: stds.len(),
        empty: !stds.iter().any(|&(k, _)| k >= 2),
    }
}
