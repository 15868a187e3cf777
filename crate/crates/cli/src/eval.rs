use std::path::PathBuf;

use clap::Args;
use serde::Serialize;
use softbio_core::evaluation::roc_curve;
use softbio_core::experiment::{evaluate, fused_scores_by_fold, EvalOptions, System};
use softbio_core::ingestion::{write_scores, DroppedPair, ScoreRecord};
use softbio_core::{FoldReport, FusionConfig, NormMethod, RocCurve, TraitSet};

use crate::args::{joined_pairs, FusionArgs, MatchArgs, OutputArgs, ProfileArgs, ResolvedMatching, ScoreArgs};
use crate::error::{CliError, Result};
use crate::output::{field, opt_pct, pct, OutputDir, RunManifest};

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    /// Pairs file with the test folds.
    #[arg(long)]
    pub pairs: PathBuf,
    #[command(flatten)]
    pub profiles: ProfileArgs,
    #[command(flatten)]
    pub scores: ScoreArgs,
    /// Soft traits to match on, e.g. `age,ethnicity,gender`.
    #[arg(long)]
    pub traits: Option<TraitSet>,
    #[command(flatten)]
    pub matching: MatchArgs,
    #[command(flatten)]
    pub fusion: FusionArgs,
    /// Train a minimum-HTER threshold on the other folds and report accuracy.
    #[arg(long)]
    pub train_threshold: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Serialize)]
struct Resolved {
    traits: Option<TraitSet>,
    systems: Vec<String>,
    #[serde(flatten)]
    matching: ResolvedMatching,
    fuse: bool,
    norm: NormMethod,
    fusion: FusionConfig,
    train_threshold: bool,
}

#[derive(Serialize)]
struct FoldCurve {
    fold: usize,
    roc: RocCurve,
}

#[derive(Serialize)]
struct SystemReport {
    system: String,
    report: FoldReport,
    curves: Vec<FoldCurve>,
}

#[derive(Serialize)]
struct EvalReport {
    pairs_joined: usize,
    dropped: Vec<DroppedPair>,
    systems: Vec<SystemReport>,
}

/// Which systems a flag combination asks for.
fn systems(traits: Option<TraitSet>, has_scores: bool, fuse: bool) -> Result<Vec<System>> {
    match (traits, has_scores, fuse) {
        (None, false, _) => Err(CliError::usage("nothing to evaluate: give --traits, --scores or both")),
        (_, _, true) if traits.is_none() || !has_scores => Err(CliError::usage("--fuse needs both --traits and --scores")),
        (Some(t), true, true) => Ok(vec![System::Face, System::Soft(t), System::Fused(t)]),
        (Some(t), true, false) => Ok(vec![System::Face, System::Soft(t)]),
        (Some(t), false, false) => Ok(vec![System::Soft(t)]),
        (None, true, false) => Ok(vec![System::Face]),
        _ => unreachable!("all flag combinations handled"),
    }
}

pub fn run(a: &EvalArgs, argv: &[String]) -> Result<()> {
    let systems = systems(a.traits, a.scores.scores.is_some(), a.fusion.fuse)?;
    let resolved_matching = a.matching.resolved()?;
    let opts = EvalOptions {
        matching: resolved_matching.matching,
        fusion: a.fusion.fusion_config()?,
        norm: a.fusion.norm(),
        train_threshold: a.train_threshold,
    };

    let mut inputs = Vec::new();
    let profiles = a.matching.load_profiles(&a.profiles, &mut inputs)?;
    let table = a.scores.load(&mut inputs)?;
    let face_id = table.as_ref().map(|t| t.matcher_id.clone()).unwrap_or_default();
    let (joined, dropped) = joined_pairs(
        "pairs",
        &a.pairs,
        &profiles,
        table.as_ref(),
        resolved_matching.gap_policy,
        &mut inputs,
    )?;

    let mut reports = Vec::new();
    for &system in &systems {
        let cv = evaluate(&joined, system, &opts)?;
        let curves = cv
            .fold_scores
            .iter()
            .map(|(fold, s)| Ok(FoldCurve { fold: *fold, roc: roc_curve(s).map_err(|e| CliError::data(e.to_string()))? }))
            .collect::<Result<_>>()?;
        reports.push(SystemReport {
            system: system.label(&face_id),
            report: cv.report,
            curves,
        });
    }

    let mut summary = String::from("system,eer_mean,eer_std,accuracy_mean,accuracy_std,unscored\n");
    let mut folds = String::from("system,fold,eer,accuracy\n");
    for r in &reports {
        let label = field(&r.system);
        summary.push_str(&format!(
            "{label},{},{},{},{},{}\n",
            pct(r.report.eer_mean),
            pct(r.report.eer_std),
            opt_pct(r.report.accuracy_mean),
            opt_pct(r.report.accuracy_std),
            r.report.unscored
        ));
        for f in &r.report.folds {
            folds.push_str(&format!("{label},{},{},{}\n", f.fold, pct(f.eer), opt_pct(f.accuracy)));
        }
    }

    let mut out = OutputDir::create(&a.output.out_dir, a.output.format)?;
    out.csv("summary.csv", &summary)?;
    out.csv("folds.csv", &folds)?;
    if let Some(&System::Fused(t)) = systems.iter().find(|s| matches!(s, System::Fused(_))) {
        let matcher_id = System::Fused(t).label(&face_id);
        let fused = fused_scores_by_fold(&joined, t, &opts)?;
        let records: Vec<ScoreRecord> = joined
            .iter()
            .zip(fused)
            .filter_map(|(j, s)| {
                Some(ScoreRecord {
                    left_image: j.pair.left_image.clone(),
                    right_image: j.pair.right_image.clone(),
                    score: s?,
                    matcher_id: matcher_id.clone(),
                })
            })
            .collect();
        let mut bytes = Vec::new();
        write_scores(&records, &mut bytes)?;
        out.write("scores_fused.csv", &bytes)?;
    }
    out.json(
        "report.json",
        &EvalReport {
            pairs_joined: joined.len(),
            dropped,
            systems: reports,
        },
    )?;

    let config = Resolved {
        traits: a.traits,
        systems: systems.iter().map(|s| s.label(&face_id)).collect(),
        matching: resolved_matching,
        fuse: a.fusion.fuse,
        norm: opts.norm,
        fusion: opts.fusion,
        train_threshold: a.train_threshold,
    };
    out.finish(RunManifest::new("eval", argv, &config, inputs, None)?)
}
