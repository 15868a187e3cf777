//! Trait taxonomy and the soft-biometric matcher.
//!
//! Every trait is quantized into a small set of instances. Nominal traits are
//! compared with a Hamming distance (0 when equal, 1 otherwise); age is
//! ordinal and compared with an absolute (Euclidean) distance. The overall
//! dissimilarity averages the per-trait distances over the traits that carry
//! evidence on both sides, and the matcher score is a strictly decreasing map
//! of that dissimilarity.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest age accepted in years.
pub const MAX_AGE_YEARS: f64 = 120.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProfileError {
    #[error("unknown {kind} label {text:?}")]
    UnknownLabel { kind: TraitKind, text: String },
    #[error("{kind} code {code} out of range 0..={max}")]
    CodeOutOfRange { kind: TraitKind, code: i64, max: u8 },
    #[error("age {0} years outside [0, 120]")]
    YearsOutOfRange(f64),
    #[error("{kind} cannot hold {detail}")]
    TypeMismatch { kind: TraitKind, detail: String },
    #[error("no trait in {0} is defined on both profiles")]
    NoEvidence(TraitSet),
    #[error("trait {0} is missing on at least one profile")]
    MissingTrait(TraitKind),
    #[error("invalid configuration: {0}")]
    Config(String),
}

/// The six soft traits, in the fixed tie-break order used across the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TraitKind {
    Gender,
    Age,
    Ethnicity,
    Glasses,
    Beard,
    Moustache,
}

const GENDER_LABELS: &[&str] = &["Male", "Female"];
const AGE_LABELS: &[&str] = &["Baby", "Child", "Youth", "Middle Aged", "Senior"];
const ETHNICITY_LABELS: &[&str] = &["Caucasian", "Black", "Asian", "Indian", "Other"];
const GLASSES_LABELS: &[&str] = &["No Glasses", "Eye Wear", "Sunglasses"];
const YES_NO_LABELS: &[&str] = &["Yes", "No"];

/// Glasses code for sunglasses.
pub const SUNGLASSES: u8 = 2;

impl TraitKind {
    pub const ALL: [TraitKind; 6] = [
        TraitKind::Gender,
        TraitKind::Age,
        TraitKind::Ethnicity,
        TraitKind::Glasses,
        TraitKind::Beard,
        TraitKind::Moustache,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(index: usize) -> Option<TraitKind> {
        Self::ALL.get(index).copied()
    }

    /// Lower-case column / flag name.
    pub fn name(self) -> &'static str {
        match self {
            TraitKind::Gender => "gender",
            TraitKind::Age => "age",
            TraitKind::Ethnicity => "ethnicity",
            TraitKind::Glasses => "glasses",
            TraitKind::Beard => "beard",
            TraitKind::Moustache => "moustache",
        }
    }

    /// Canonical instance names, indexed by code.
    pub fn instances(self) -> &'static [&'static str] {
        match self {
            TraitKind::Gender => GENDER_LABELS,
            TraitKind::Age => AGE_LABELS,
            TraitKind::Ethnicity => ETHNICITY_LABELS,
            TraitKind::Glasses => GLASSES_LABELS,
            TraitKind::Beard | TraitKind::Moustache => YES_NO_LABELS,
        }
    }

    pub fn code_count(self) -> usize {
        self.instances().len()
    }

    pub fn max_code(self) -> u8 {
        (self.code_count() - 1) as u8
    }

    /// Age is the only ordinal trait.
    pub fn is_ordinal(self) -> bool {
        self == TraitKind::Age
    }

    fn aliases(self) -> &'static [(&'static str, u8)] {
        match self {
            TraitKind::Ethnicity => &[("white", 0)],
            TraitKind::Glasses => &[("eyewear", 1), ("noglasses", 0), ("none", 0)],
            TraitKind::Age => &[("middleage", 3), ("middle", 3)],
            _ => &[],
        }
    }
}

impl fmt::Display for TraitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TraitKind {
    type Err = ProfileError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = fold_label(s);
        TraitKind::ALL
            .into_iter()
            .find(|k| k.name() == key || (key == "mustache" && *k == TraitKind::Moustache))
            .ok_or_else(|| ProfileError::Config(format!("unknown trait name {s:?}")))
    }
}

/// One trait value: a quantized code, a continuous age, or nothing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TraitValue {
    Categorical(u8),
    Years(f64),
    Missing,
}

impl TraitValue {
    pub fn is_missing(self) -> bool {
        matches!(self, TraitValue::Missing)
    }

    /// Checks the value against the kind's admissible range.
    pub fn validate(self, kind: TraitKind) -> Result<(), ProfileError> {
        match self {
            TraitValue::Missing => Ok(()),
            TraitValue::Categorical(code) if code <= kind.max_code() => Ok(()),
            TraitValue::Categorical(code) => Err(ProfileError::CodeOutOfRange {
                kind,
                code: code as i64,
                max: kind.max_code(),
            }),
            TraitValue::Years(_) if kind != TraitKind::Age => Err(ProfileError::TypeMismatch {
                kind,
                detail: "an age in years".into(),
            }),
            TraitValue::Years(y) if (0.0..=MAX_AGE_YEARS).contains(&y) => Ok(()),
            TraitValue::Years(y) => Err(ProfileError::YearsOutOfRange(y)),
        }
    }
}

fn fold_label(text: &str) -> String {
    text.chars()
        .filter(|c| !c.is_whitespace() && *c != '_' && *c != '-')
        .flat_map(char::to_lowercase)
        .collect()
}

/// Parses an instance name, a decimal code, or (age only) `"<years>y"`.
///
/// Empty text is `Missing`.
pub fn parse_trait_label(kind: TraitKind, text: &str) -> Result<TraitValue, ProfileError> {
    let trimmed = text.trim();
    if trimmed.is_empty() {
        return Ok(TraitValue::Missing);
    }
    if let Ok(code) = trimmed.parse::<i64>() {
        if code < 0 || code > kind.max_code() as i64 {
            return Err(ProfileError::CodeOutOfRange {
                kind,
                code,
                max: kind.max_code(),
            });
        }
        return Ok(TraitValue::Categorical(code as u8));
    }
    if kind == TraitKind::Age {
        if let Some(num) = trimmed.strip_suffix(['y', 'Y']) {
            if let Ok(years) = num.trim().parse::<f64>() {
                let value = TraitValue::Years(years);
                value.validate(kind)?;
                return Ok(value);
            }
        }
    }
    let key = fold_label(trimmed);
    if let Some(code) = kind.instances().iter().position(|name| fold_label(name) == key) {
        return Ok(TraitValue::Categorical(code as u8));
    }
    if let Some(&(_, code)) = kind.aliases().iter().find(|(alias, _)| *alias == key) {
        return Ok(TraitValue::Categorical(code));
    }
    Err(ProfileError::UnknownLabel {
        kind,
        text: text.to_string(),
    })
}

/// Canonical text for a value; inverse of [`parse_trait_label`].
pub fn format_trait_label(kind: TraitKind, value: TraitValue) -> String {
    match value {
        TraitValue::Missing => String::new(),
        TraitValue::Categorical(code) => kind
            .instances()
            .get(code as usize)
            .map(|s| s.to_string())
            .unwrap_or_else(|| code.to_string()),
        TraitValue::Years(y) => format!("{y}y"),
    }
}

/// Where a profile came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileSource {
    #[default]
    Manual,
    CotsFacePlusPlus,
    CotsMicrosoft,
    Synthetic,
}

/// The six trait values observed on one image.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SoftProfile {
    values: [TraitValue; 6],
    pub source: ProfileSource,
}

impl SoftProfile {
    pub fn missing(source: ProfileSource) -> Self {
        SoftProfile {
            values: [TraitValue::Missing; 6],
            source,
        }
    }

    pub fn from_values(values: [TraitValue; 6], source: ProfileSource) -> Result<Self, ProfileError> {
        for (kind, value) in TraitKind::ALL.into_iter().zip(values) {
            value.validate(kind)?;
        }
        Ok(SoftProfile { values, source })
    }

    /// Builds a profile from six categorical codes in trait order.
    pub fn from_codes(codes: [u8; 6], source: ProfileSource) -> Result<Self, ProfileError> {
        Self::from_values(codes.map(TraitValue::Categorical), source)
    }

    pub fn get(&self, kind: TraitKind) -> TraitValue {
        self.values[kind.index()]
    }

    pub fn set(&mut self, kind: TraitKind, value: TraitValue) -> Result<(), ProfileError> {
        value.validate(kind)?;
        self.values[kind.index()] = value;
        Ok(())
    }

    pub fn values(&self) -> &[TraitValue; 6] {
        &self.values
    }

    pub fn is_all_missing(&self) -> bool {
        self.values.iter().all(|v| v.is_missing())
    }

    /// Replaces a continuous age with its category.
    pub fn with_categorical_age(mut self, cuts: &AgeCuts) -> Result<Self, ProfileError> {
        if let TraitValue::Years(y) = self.get(TraitKind::Age) {
            self.values[TraitKind::Age.index()] = TraitValue::Categorical(age_to_category(y, cuts)?);
        }
        Ok(self)
    }
}

/// A nonempty set of traits, stored as a bitmask over [`TraitKind::index`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TraitSet(u8);

impl TraitSet {
    pub const FULL: TraitSet = TraitSet(0b11_1111);

    pub fn new<I: IntoIterator<Item = TraitKind>>(kinds: I) -> Result<Self, ProfileError> {
        let mask = kinds.into_iter().fold(0u8, |m, k| m | (1 << k.index()));
        Self::from_mask(mask)
    }

    pub fn from_mask(mask: u8) -> Result<Self, ProfileError> {
        if mask == 0 {
            return Err(ProfileError::Config("trait set must not be empty".into()));
        }
        if mask & !Self::FULL.0 != 0 {
            return Err(ProfileError::Config(format!("trait mask {mask:#b} has unknown bits")));
        }
        Ok(TraitSet(mask))
    }

    pub fn mask(self) -> u8 {
        self.0
    }

    pub fn contains(self, kind: TraitKind) -> bool {
        self.0 & (1 << kind.index()) != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        false
    }

    /// Members in the fixed trait order.
    pub fn iter(self) -> impl Iterator<Item = TraitKind> {
        TraitKind::ALL.into_iter().filter(move |k| self.contains(*k))
    }
}

impl fmt::Display for TraitSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.iter().map(TraitKind::name).collect();
        f.write_str(&names.join("+"))
    }
}

impl FromStr for TraitSet {
    type Err = ProfileError;

    /// Accepts names separated by commas or `+`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let kinds = s
            .split([',', '+'])
            .map(str::trim)
            .filter(|p| !p.is_empty())
            .map(TraitKind::from_str)
            .collect::<Result<Vec<_>, _>>()?;
        TraitSet::new(kinds)
    }
}

impl Serialize for TraitSet {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for TraitSet {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let kinds = Vec::<TraitKind>::deserialize(deserializer)?;
        TraitSet::new(kinds).map_err(serde::de::Error::custom)
    }
}

/// Four strictly ascending year cut points separating the five age
/// categories. Bins are half-open: a year equal to a cut falls in the upper bin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgeCuts([f64; 4]);

impl AgeCuts {
    pub fn new(cuts: [f64; 4]) -> Result<Self, ProfileError> {
        if cuts.iter().any(|c| !c.is_finite()) || cuts.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ProfileError::Config(format!(
                "age cuts must be finite and strictly ascending, got {cuts:?}"
            )));
        }
        Ok(AgeCuts(cuts))
    }

    pub fn values(&self) -> [f64; 4] {
        self.0
    }
}

impl Default for AgeCuts {
    fn default() -> Self {
        AgeCuts([3.0, 13.0, 40.0, 61.0])
    }
}

impl FromStr for AgeCuts {
    type Err = ProfileError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parsed = s
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| ProfileError::Config(format!("bad age cuts {s:?}: {e}")))?;
        let cuts: [f64; 4] = parsed
            .try_into()
            .map_err(|_| ProfileError::Config(format!("expected 4 age cuts, got {s:?}")))?;
        AgeCuts::new(cuts)
    }
}

/// Maps a continuous age to its category code.
pub fn age_to_category(years: f64, cuts: &AgeCuts) -> Result<u8, ProfileError> {
    if !(0.0..=MAX_AGE_YEARS).contains(&years) {
        return Err(ProfileError::YearsOutOfRange(years));
    }
    Ok(cuts.0.iter().filter(|&&c| years >= c).count() as u8)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum AgeNormalization {
    /// Categorical distance divided by 4, years distance divided by the span.
    #[default]
    Normalized,
    Raw,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ScoreMap {
    /// `1 / (1 + d)`
    #[default]
    ReciprocalShifted,
    /// `-d`
    Negated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum GlassesVariant {
    #[default]
    Full,
    /// Sunglasses carry no glasses evidence.
    NoSunglasses,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum MissingPolicy {
    #[default]
    ExcludeTrait,
    Fail,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchConfig {
    pub age_normalization: AgeNormalization,
    pub age_span_years: f64,
    pub score_map: ScoreMap,
    pub glasses_variant: GlassesVariant,
    pub missing_policy: MissingPolicy,
}

impl Default for MatchConfig {
    fn default() -> Self {
        MatchConfig {
            age_normalization: AgeNormalization::Normalized,
            age_span_years: 80.0,
            score_map: ScoreMap::ReciprocalShifted,
            glasses_variant: GlassesVariant::Full,
            missing_policy: MissingPolicy::ExcludeTrait,
        }
    }
}

impl MatchConfig {
    pub fn validate(&self) -> Result<(), ProfileError> {
        if !(self.age_span_years.is_finite() && self.age_span_years > 0.0) {
            return Err(ProfileError::Config(format!(
                "age span must be positive, got {}",
                self.age_span_years
            )));
        }
        Ok(())
    }
}

/// Distance between two values of one trait, or `None` when either side is
/// missing.
pub fn trait_distance(
    kind: TraitKind,
    a: TraitValue,
    b: TraitValue,
    cfg: &MatchConfig,
) -> Result<Option<f64>, ProfileError> {
    a.validate(kind)?;
    b.validate(kind)?;
    let normalized = cfg.age_normalization == AgeNormalization::Normalized;
    match (a, b) {
        (TraitValue::Missing, _) | (_, TraitValue::Missing) => Ok(None),
        (TraitValue::Categorical(x), TraitValue::Categorical(y)) if kind.is_ordinal() => {
            let delta = x.abs_diff(y) as f64;
            Ok(Some(if normalized {
                delta / kind.max_code() as f64
            } else {
                delta
            }))
        }
        (TraitValue::Categorical(x), TraitValue::Categorical(y)) => {
            Ok(Some(if x == y { 0.0 } else { 1.0 }))
        }
        (TraitValue::Years(x), TraitValue::Years(y)) => {
            let delta = (x - y).abs();
            Ok(Some(if normalized {
                (delta / cfg.age_span_years).min(1.0)
            } else {
                delta
            }))
        }
        _ => Err(ProfileError::TypeMismatch {
            kind,
            detail: "a mix of categorical and year ages".into(),
        }),
    }
}

fn effective_value(kind: TraitKind, value: TraitValue, cfg: &MatchConfig) -> TraitValue {
    match (kind, value, cfg.glasses_variant) {
        (TraitKind::Glasses, TraitValue::Categorical(SUNGLASSES), GlassesVariant::NoSunglasses) => {
            TraitValue::Missing
        }
        _ => value,
    }
}

/// Mean of the defined per-trait distances over `set`.
pub fn profile_dissimilarity(
    p: &SoftProfile,
    q: &SoftProfile,
    set: TraitSet,
    cfg: &MatchConfig,
) -> Result<f64, ProfileError> {
    let mut sum = 0.0;
    let mut defined = 0usize;
    for kind in set.iter() {
        let a = effective_value(kind, p.get(kind), cfg);
        let b = effective_value(kind, q.get(kind), cfg);
        match trait_distance(kind, a, b, cfg)? {
            Some(d) => {
                sum += d;
                defined += 1;
            }
            None if cfg.missing_policy == MissingPolicy::Fail => {
                return Err(ProfileError::MissingTrait(kind));
            }
            None => {}
        }
    }
    if defined == 0 {
        return Err(ProfileError::NoEvidence(set));
    }
    Ok(sum / defined as f64)
}

/// Maps a dissimilarity to a similarity score, strictly decreasing in `d`.
pub fn soft_score(d: f64, map: ScoreMap) -> f64 {
    debug_assert!(d >= 0.0, "dissimilarity must be non-negative, got {d}");
    match map {
        ScoreMap::ReciprocalShifted => 1.0 / (1.0 + d),
        ScoreMap::Negated => -d,
    }
}
