use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use serde::Serialize;
use softbio_core::experiment::{evaluate, exhaustive_traits, select_traits, EvalOptions, System};
use softbio_core::selection::ExhaustiveResult;
use softbio_core::{FusionConfig, NormMethod, SelectionTrace, TraitSet};

use crate::args::{joined_pairs, FusionArgs, MatchArgs, OutputArgs, ProfileArgs, ResolvedMatching, ScoreArgs};
use crate::error::{CliError, Result};
use crate::output::{digest, field, pct, OutputDir, RunManifest};

#[derive(Debug, Clone, Args)]
pub struct SffsArgs {
    /// Development pairs; the selection criterion is their pooled EER.
    #[arg(long)]
    pub dev_pairs: PathBuf,
    /// Test pairs on which every selected set is re-evaluated.
    #[arg(long)]
    pub test_pairs: Option<PathBuf>,
    #[command(flatten)]
    pub profiles: ProfileArgs,
    #[command(flatten)]
    pub scores: ScoreArgs,
    /// Traits to select from.
    #[arg(long, default_value = "gender,age,ethnicity,glasses,beard,moustache")]
    pub candidates: TraitSet,
    /// Largest set size; defaults to every candidate.
    #[arg(long)]
    pub max_n: Option<usize>,
    /// Also run the exhaustive search and check SFFS against it.
    #[arg(long)]
    pub oracle: bool,
    #[command(flatten)]
    pub matching: MatchArgs,
    #[command(flatten)]
    pub fusion: FusionArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Serialize)]
struct Resolved {
    candidates: TraitSet,
    max_n: usize,
    oracle: bool,
    #[serde(flatten)]
    matching: ResolvedMatching,
    fuse: bool,
    norm: NormMethod,
    fusion: FusionConfig,
}

#[derive(Serialize)]
struct SizeRow {
    n: usize,
    traits: TraitSet,
    dev_eer: f64,
    test_eer_mean: Option<f64>,
    test_eer_std: Option<f64>,
}

#[derive(Serialize)]
struct SffsReport {
    trace: SelectionTrace,
    rows: Vec<SizeRow>,
    exhaustive: Option<ExhaustiveResult>,
}

fn same_file(a: &Path, b: &Path) -> Result<bool> {
    if let (Ok(x), Ok(y)) = (fs::canonicalize(a), fs::canonicalize(b)) {
        if x == y {
            return Ok(true);
        }
    }
    Ok(digest("dev_pairs", a)?.sha256 == digest("test_pairs", b)?.sha256)
}

pub fn run(a: &SffsArgs, argv: &[String]) -> Result<()> {
    if let Some(test) = &a.test_pairs {
        if same_file(&a.dev_pairs, test)? {
            return Err(CliError::usage(
                "--dev-pairs and --test-pairs are the same data; selecting on the test set would leak",
            ));
        }
    }
    let max_n = a.max_n.unwrap_or(a.candidates.len());
    if max_n == 0 || max_n > a.candidates.len() {
        return Err(CliError::usage(format!(
            "--max-n must lie in 1..={}, got {max_n}",
            a.candidates.len()
        )));
    }
    if a.fusion.fuse && a.scores.scores.is_none() {
        return Err(CliError::usage("--fuse needs --scores"));
    }
    let resolved_matching = a.matching.resolved()?;
    let opts = EvalOptions {
        matching: resolved_matching.matching,
        fusion: a.fusion.fusion_config()?,
        norm: a.fusion.norm(),
        train_threshold: false,
    };

    let mut inputs = Vec::new();
    let profiles = a.matching.load_profiles(&a.profiles, &mut inputs)?;
    let table = if a.fusion.fuse { a.scores.load(&mut inputs)? } else { None };
    let policy = resolved_matching.gap_policy;
    let (dev, _) = joined_pairs("dev_pairs", &a.dev_pairs, &profiles, table.as_ref(), policy, &mut inputs)?;
    let test = match &a.test_pairs {
        Some(p) => Some(joined_pairs("test_pairs", p, &profiles, table.as_ref(), policy, &mut inputs)?.0),
        None => None,
    };

    let trace = select_traits(&dev, a.candidates, max_n, a.fusion.fuse, &opts)?;
    let system = |t: TraitSet| if a.fusion.fuse { System::Fused(t) } else { System::Soft(t) };
    let mut rows = Vec::new();
    for b in &trace.best {
        let traits = b.set.to_trait_set().expect("selection runs over trait indices");
        let (mean, std) = match &test {
            Some(t) => {
                let r = evaluate(t, system(traits), &opts)?.report;
                (Some(r.eer_mean), Some(r.eer_std))
            }
            None => (None, None),
        };
        rows.push(SizeRow {
            n: b.size,
            traits,
            dev_eer: b.criterion,
            test_eer_mean: mean,
            test_eer_std: std,
        });
    }

    let exhaustive = if a.oracle {
        let ex = exhaustive_traits(&dev, a.candidates, a.fusion.fuse, &opts)?;
        for row in &rows {
            let best = ex.best.iter().find(|b| b.size == row.n).map(|b| b.criterion);
            if best.is_none_or(|v| v > row.dev_eer) {
                return Err(CliError::data(format!(
                    "exhaustive search lost to SFFS at size {}: {best:?} > {}",
                    row.n, row.dev_eer
                )));
            }
        }
        Some(ex)
    } else {
        None
    };

    let mut csv = String::from("n,traits,dev_eer,test_eer_mean,test_eer_std\n");
    for r in &rows {
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            r.n,
            field(&r.traits.to_string()),
            pct(r.dev_eer),
            r.test_eer_mean.map(pct).unwrap_or_default(),
            r.test_eer_std.map(pct).unwrap_or_default()
        ));
    }

    let mut out = OutputDir::create(&a.output.out_dir, a.output.format)?;
    out.csv("selection.csv", &csv)?;
    if let Some(ex) = &exhaustive {
        let mut ex_csv = String::from("n,traits,dev_eer\n");
        for b in &ex.best {
            let traits = b.set.to_trait_set().expect("selection runs over trait indices");
            ex_csv.push_str(&format!("{},{},{}\n", b.size, field(&traits.to_string()), pct(b.criterion)));
        }
        out.csv("exhaustive.csv", &ex_csv)?;
    }
    out.json("trace.json", &SffsReport { trace, rows, exhaustive })?;

    let config = Resolved {
        candidates: a.candidates,
        max_n,
        oracle: a.oracle,
        matching: resolved_matching,
        fuse: a.fusion.fuse,
        norm: opts.norm,
        fusion: opts.fusion,
    };
    out.finish(RunManifest::new("sffs", argv, &config, inputs, None)?)
}
