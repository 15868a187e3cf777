//! Flags shared by several subcommands.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::Serialize;
use softbio_core::fusion::SoftMissingFallback;
use softbio_core::ingestion::{
    index_annotations, index_cots, join, load_annotations, load_cots, load_pairs, load_scores, AgeMode, DroppedPair,
    GapPolicy, JoinedPair, ProfileIndex, ScoreTable,
};
use softbio_core::profiles::{AgeNormalization, GlassesVariant, ProfileSource, ScoreMap};
use softbio_core::{AgeCuts, FusionConfig, MatchConfig, NormMethod};

use crate::error::{CliError, Result};
use crate::output::{digest, Format, InputDigest};

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum GlassesArg {
    Full,
    NoSunglasses,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum AgeModeArg {
    Categorical,
    Years,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum AgeNormArg {
    Normalized,
    Raw,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ScoreMapArg {
    ReciprocalShifted,
    Negated,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum NormArg {
    Minmax,
    Zscore,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SoftMissingArg {
    FaceOnly,
    DropPair,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum GapArg {
    Drop,
    Strict,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum CotsSourceArg {
    FacePlusPlus,
    Microsoft,
}

impl From<CotsSourceArg> for ProfileSource {
    fn from(v: CotsSourceArg) -> Self {
        match v {
            CotsSourceArg::FacePlusPlus => ProfileSource::CotsFacePlusPlus,
            CotsSourceArg::Microsoft => ProfileSource::CotsMicrosoft,
        }
    }
}

impl From<AgeModeArg> for AgeMode {
    fn from(v: AgeModeArg) -> Self {
        match v {
            AgeModeArg::Categorical => AgeMode::Categorical,
            AgeModeArg::Years => AgeMode::Years,
        }
    }
}

impl From<GapArg> for GapPolicy {
    fn from(v: GapArg) -> Self {
        match v {
            GapArg::Drop => GapPolicy::Drop,
            GapArg::Strict => GapPolicy::Strict,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Directory for reports and the run manifest.
    #[arg(long)]
    pub out_dir: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Both)]
    pub format: Format,
}

/// Where per-image soft profiles come from.
#[derive(Debug, Clone, Args)]
#[group(required = true, multiple = false)]
pub struct ProfileArgs {
    /// Manual annotation CSV.
    #[arg(long)]
    pub annotations: Option<PathBuf>,
    /// COTS estimate CSV used as the profile source.
    #[arg(long)]
    pub cots: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct MatchArgs {
    #[arg(long, value_enum, default_value_t = GlassesArg::Full)]
    pub glasses_variant: GlassesArg,
    #[arg(long, value_enum, default_value_t = AgeModeArg::Categorical)]
    pub age_mode: AgeModeArg,
    /// Four increasing year boundaries between the age categories.
    #[arg(long, default_value = "3,13,40,61")]
    pub age_cuts: AgeCuts,
    #[arg(long, value_enum, default_value_t = AgeNormArg::Normalized)]
    pub age_normalization: AgeNormArg,
    /// Years that map to the maximum age distance in years mode.
    #[arg(long, default_value_t = 80.0)]
    pub age_span: f64,
    #[arg(long, value_enum, default_value_t = ScoreMapArg::ReciprocalShifted)]
    pub score_map: ScoreMapArg,
    #[arg(long, value_enum, default_value_t = CotsSourceArg::Microsoft)]
    pub cots_source: CotsSourceArg,
    #[arg(long, value_enum, default_value_t = GapArg::Drop)]
    pub gap_policy: GapArg,
}

impl MatchArgs {
    pub fn match_config(&self) -> Result<MatchConfig> {
        let cfg = MatchConfig {
            age_normalization: match self.age_normalization {
                AgeNormArg::Normalized => AgeNormalization::Normalized,
                AgeNormArg::Raw => AgeNormalization::Raw,
            },
            age_span_years: self.age_span,
            score_map: match self.score_map {
                ScoreMapArg::ReciprocalShifted => ScoreMap::ReciprocalShifted,
                ScoreMapArg::Negated => ScoreMap::Negated,
            },
            glasses_variant: match self.glasses_variant {
                GlassesArg::Full => GlassesVariant::Full,
                GlassesArg::NoSunglasses => GlassesVariant::NoSunglasses,
            },
            ..MatchConfig::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Loads and indexes the profile source, recording its digest.
    pub fn load_profiles(&self, source: &ProfileArgs, inputs: &mut Vec<InputDigest>) -> Result<ProfileIndex> {
        let mode = self.age_mode.into();
        match (&source.annotations, &source.cots) {
            (Some(path), None) => {
                inputs.push(digest("annotations", path)?);
                let records = load_annotations(path)?;
                Ok(index_annotations(&records, mode, &self.age_cuts)?)
            }
            (None, Some(path)) => {
                inputs.push(digest("cots", path)?);
                let records = load_cots(path, self.cots_source.into())?;
                Ok(index_cots(&records, mode, &self.age_cuts)?)
            }
            _ => Err(CliError::usage("give exactly one of --annotations and --cots")),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct ScoreArgs {
    /// Face matcher score CSV.
    #[arg(long)]
    pub scores: Option<PathBuf>,
    /// Matcher id; defaults to the score file name.
    #[arg(long)]
    pub matcher_id: Option<String>,
    /// Scores are distances: negate them on load.
    #[arg(long)]
    pub invert: bool,
}

#[derive(Debug, Clone, Args)]
pub struct FusionArgs {
    /// Fuse the soft score with the face score.
    #[arg(long)]
    pub fuse: bool,
    #[arg(long, value_enum, default_value_t = NormArg::Minmax)]
    pub norm: NormArg,
    /// Face and soft weights, summing to 1.
    #[arg(long, default_value = "0.5,0.5")]
    pub weights: String,
    #[arg(long, value_enum, default_value_t = SoftMissingArg::FaceOnly)]
    pub soft_missing: SoftMissingArg,
}

impl FusionArgs {
    pub fn norm(&self) -> NormMethod {
        match self.norm {
            NormArg::Minmax => NormMethod::MinMax,
            NormArg::Zscore => NormMethod::ZScore,
        }
    }

    pub fn fusion_config(&self) -> Result<FusionConfig> {
        let parts: Vec<&str> = self.weights.split(',').map(str::trim).collect();
        let [face, soft] = parts[..] else {
            return Err(CliError::usage(format!("--weights needs two numbers, got {:?}", self.weights)));
        };
        let parse = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| CliError::usage(format!("bad weight {s:?}")))
        };
        let fallback = match self.soft_missing {
            SoftMissingArg::FaceOnly => SoftMissingFallback::FaceOnly,
            SoftMissingArg::DropPair => SoftMissingFallback::DropPair,
        };
        FusionConfig::new(parse(face)?, parse(soft)?, fallback).map_err(|e| CliError::usage(e.to_string()))
    }
}

/// Resolved matching options as recorded in manifests.
#[derive(Debug, Clone, Serialize)]
pub struct ResolvedMatching {
    pub matching: MatchConfig,
    pub age_mode: AgeMode,
    pub age_cuts: [f64; 4],
    pub gap_policy: GapPolicy,
    pub cots_source: ProfileSource,
}

impl MatchArgs {
    pub fn resolved(&self) -> Result<ResolvedMatching> {
        Ok(ResolvedMatching {
            matching: self.match_config()?,
            age_mode: self.age_mode.into(),
            age_cuts: self.age_cuts.values(),
            gap_policy: self.gap_policy.into(),
            cots_source: self.cots_source.into(),
        })
    }
}

impl ScoreArgs {
    pub fn load(&self, inputs: &mut Vec<InputDigest>) -> Result<Option<ScoreTable>> {
        let Some(path) = &self.scores else { return Ok(None) };
        inputs.push(digest("scores", path)?);
        Ok(Some(load_scores(path, self.matcher_id.as_deref(), self.invert)?))
    }
}

/// Joins a pairs file with profiles and optional scores.
pub fn joined_pairs(
    role: &str,
    path: &Path,
    profiles: &ProfileIndex,
    scores: Option<&ScoreTable>,
    policy: GapPolicy,
    inputs: &mut Vec<InputDigest>,
) -> Result<(Vec<JoinedPair>, Vec<DroppedPair>)> {
    inputs.push(digest(role, path)?);
    let pairs = load_pairs(path)?;
    let out = join(&pairs.pairs, profiles, scores, policy)?;
    if out.joined.is_empty() {
        return Err(CliError::data(format!("no pair of {} could be joined", path.display())));
    }
    Ok((out.joined, out.dropped))
}
