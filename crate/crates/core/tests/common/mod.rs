//! Reference implementations used as oracles by the integration tests.
//! They favor obviousness over speed.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use softbio_core::profiles::{AgeNormalization, GlassesVariant, MatchConfig, ProfileSource};
use softbio_core::{SoftProfile, TraitKind, TraitSet, TraitValue};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// EER by direct counting at every candidate threshold. Accept means
/// `score >= t`. The crossing is the first threshold where FAR no longer
/// exceeds FRR; away from an exact tie the value is interpolated linearly
/// from the previous threshold.
pub fn brute_eer(genuine: &[f64], impostor: &[f64]) -> f64 {
    let mut thresholds: Vec<f64> = genuine.iter().chain(impostor).copied().collect();
    thresholds.sort_by(f64::total_cmp);
    thresholds.dedup();
    thresholds.push(f64::INFINITY);
    let rates: Vec<(f64, f64)> = thresholds
        .iter()
        .map(|&t| {
            let far = impostor.iter().filter(|&&s| s >= t).count() as f64 / impostor.len() as f64;
            let frr = genuine.iter().filter(|&&s| s < t).count() as f64 / genuine.len() as f64;
            (far, frr)
        })
        .collect();
    for (k, &(far, frr)) in rates.iter().enumerate() {
        if far - frr <= 0.0 {
            if far == frr || k == 0 {
                return far;
            }
            let (pfar, pfrr) = rates[k - 1];
            let (d0, d1) = (pfar - pfrr, far - frr);
            return pfar + d0 / (d0 - d1) * (far - pfar);
        }
    }
    unreachable!("the infinite threshold always rejects everything")
}

/// Dissimilarity written trait by trait from the definitions.
pub fn brute_dissimilarity(p: &SoftProfile, q: &SoftProfile, set: TraitSet, cfg: &MatchConfig) -> Option<f64> {
    let mut distances = Vec::new();
    for kind in TraitKind::ALL {
        if !set.contains(kind) {
            continue;
        }
        let (mut a, mut b) = (p.get(kind), q.get(kind));
        if kind == TraitKind::Glasses && cfg.glasses_variant == GlassesVariant::NoSunglasses {
            if a == TraitValue::Categorical(2) {
                a = TraitValue::Missing;
            }
            if b == TraitValue::Categorical(2) {
                b = TraitValue::Missing;
            }
        }
        let d = match (kind, a, b) {
            (_, TraitValue::Missing, _) | (_, _, TraitValue::Missing) => continue,
            (TraitKind::Age, TraitValue::Categorical(x), TraitValue::Categorical(y)) => {
                let raw = (x as f64 - y as f64).abs();
                match cfg.age_normalization {
                    AgeNormalization::Normalized => raw / 4.0,
                    AgeNormalization::Raw => raw,
                }
            }
            (TraitKind::Age, TraitValue::Years(x), TraitValue::Years(y)) => {
                let raw = (x - y).abs();
                match cfg.age_normalization {
                    AgeNormalization::Normalized => (raw / cfg.age_span_years).min(1.0),
                    AgeNormalization::Raw => raw,
                }
            }
            (_, TraitValue::Categorical(x), TraitValue::Categorical(y)) => {
                if x == y {
                    0.0
                } else {
                    1.0
                }
            }
            _ => panic!("oracle given mixed value kinds"),
        };
        distances.push(d);
    }
    if distances.is_empty() {
        None
    } else {
        Some(distances.iter().sum::<f64>() / distances.len() as f64)
    }
}

/// Profile with each trait missing with probability `p_missing`.
pub fn random_profile(rng: &mut ChaCha8Rng, p_missing: f64) -> SoftProfile {
    let mut values = [TraitValue::Missing; 6];
    for kind in TraitKind::ALL {
        if !rng.random_bool(p_missing) {
            values[kind.index()] = TraitValue::Categorical(rng.random_range(0..kind.code_count() as u8));
        }
    }
    SoftProfile::from_values(values, ProfileSource::Manual).unwrap()
}

pub fn random_years_profile(rng: &mut ChaCha8Rng) -> SoftProfile {
    let mut p = random_profile(rng, 0.0);
    p.set(TraitKind::Age, TraitValue::Years(rng.random_range(0.0..120.0))).unwrap();
    p
}

/// Textbook two-pass Pearson correlation.
pub fn brute_pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let mut sab = 0.0;
    let mut saa = 0.0;
    let mut sbb = 0.0;
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    sab / (saa * sbb).sqrt()
}

pub fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}
