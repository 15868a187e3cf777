use std::fs;
use std::path::PathBuf;

use clap::Args;
use serde::Serialize;
use softbio_core::ingestion::{write_annotations, write_pairs, write_scores};
use softbio_core::synthgen::{generate_face_scores, generate_pairs, generate_population, ImagesPerSubject};
use softbio_core::{FaceScoreModel, SynthSpec};

use crate::args::{AgeModeArg, OutputArgs};
use crate::error::{CliError, Result};
use crate::output::{digest, to_json, OutputDir, RunManifest};

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    /// Population spec as JSON; replaces the population flags.
    #[arg(long, conflicts_with_all = ["subjects", "images_per_subject", "noise", "age_mode", "age_drift"])]
    pub spec: Option<PathBuf>,
    #[arg(long, default_value_t = 2000)]
    pub subjects: usize,
    #[arg(long, default_value_t = 4)]
    pub images_per_subject: usize,
    /// Per-trait label noise rate.
    #[arg(long, default_value_t = 0.05)]
    pub noise: f64,
    #[arg(long, value_enum, default_value_t = AgeModeArg::Categorical)]
    pub age_mode: AgeModeArg,
    /// Standard deviation of per-image age jitter in years mode.
    #[arg(long, default_value_t = 3.0)]
    pub age_drift: f64,
    #[arg(long, default_value_t = 10)]
    pub folds: usize,
    /// Genuine (and impostor) pairs per fold.
    #[arg(long, default_value_t = 300)]
    pub per_class: usize,
    /// Face score separation solved from this EER.
    #[arg(long, default_value_t = 0.12, conflicts_with = "genuine_mean")]
    pub target_eer: f64,
    #[arg(long, requires_all = ["genuine_std", "impostor_mean", "impostor_std"])]
    pub genuine_mean: Option<f64>,
    #[arg(long)]
    pub genuine_std: Option<f64>,
    #[arg(long)]
    pub impostor_mean: Option<f64>,
    #[arg(long)]
    pub impostor_std: Option<f64>,
    /// Name of the synthetic face matcher and of its score file.
    #[arg(long, default_value = "face")]
    pub matcher_id: String,
    #[arg(long, env = "SOFTBIO_SEED")]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Serialize)]
struct Resolved {
    population: SynthSpec,
    folds: usize,
    per_class: usize,
    face_model: FaceScoreModel,
    matcher_id: String,
}

pub fn run(a: &SynthArgs, argv: &[String]) -> Result<()> {
    if a.matcher_id.is_empty()
        || !a
            .matcher_id
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
    {
        return Err(CliError::usage(format!(
            "--matcher-id {:?} must be a plain file name",
            a.matcher_id
        )));
    }
    let mut inputs = Vec::new();
    let mut spec = match &a.spec {
        Some(path) => {
            inputs.push(digest("spec", path)?);
            let text = fs::read_to_string(path).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
            serde_json::from_str::<SynthSpec>(&text)
                .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?
        }
        None => SynthSpec {
            n_subjects: a.subjects,
            images_per_subject: ImagesPerSubject::Fixed(a.images_per_subject),
            label_noise: [a.noise; 6],
            age_mode: a.age_mode.into(),
            age_drift_years: a.age_drift,
            ..SynthSpec::default()
        },
    };
    if let Some(seed) = a.seed {
        spec.seed = seed;
    }
    let model = match (a.genuine_mean, a.genuine_std, a.impostor_mean, a.impostor_std) {
        (Some(genuine_mean), Some(genuine_std), Some(impostor_mean), Some(impostor_std)) => FaceScoreModel::Gaussian {
            genuine_mean,
            genuine_std,
            impostor_mean,
            impostor_std,
        },
        _ => FaceScoreModel::TargetEer {
            target_eer: a.target_eer,
        },
    };
    model.parameters()?;

    let population = generate_population(&spec)?;
    let pairs = generate_pairs(&population, a.folds, a.per_class, spec.seed)?;
    let scores = generate_face_scores(&pairs, &model, &a.matcher_id, spec.seed)?;

    let mut annotations = Vec::new();
    write_annotations(&population.annotations(), &mut annotations)?;
    let mut pairs_text = Vec::new();
    write_pairs(&pairs, &mut pairs_text)?;
    let mut scores_text = Vec::new();
    write_scores(&scores, &mut scores_text)?;

    let config = Resolved {
        population: spec.clone(),
        folds: a.folds,
        per_class: a.per_class,
        face_model: model,
        matcher_id: a.matcher_id.clone(),
    };
    // Dataset files are written whatever --format says.
    let mut out = OutputDir::create(&a.output.out_dir, a.output.format)?;
    out.write("annotations.csv", &annotations)?;
    out.write("pairs.txt", &pairs_text)?;
    out.write(&format!("{}.csv", a.matcher_id), &scores_text)?;
    out.write("spec.json", &to_json(&config)?)?;
    out.finish(RunManifest::new("synth", argv, &config, inputs, Some(spec.seed))?)
}
