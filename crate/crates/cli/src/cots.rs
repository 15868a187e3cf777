use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::Serialize;
use softbio_core::analysis::{age_stability, cots_accuracy, AccuracyTable, AgeStabilityTable, StdDenominator};
use softbio_core::ingestion::{load_annotations, load_cots};
use softbio_core::profiles::ProfileSource;
use softbio_core::AgeCuts;

use crate::args::{CotsSourceArg, OutputArgs};
use crate::error::Result;
use crate::output::{digest, field, OutputDir, RunManifest};

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum StdArg {
    Sample,
    Population,
}

#[derive(Debug, Clone, Args)]
pub struct CotsArgs {
    /// Manual groundtruth annotations.
    #[arg(long)]
    pub annotations: PathBuf,
    /// COTS estimates to score.
    #[arg(long)]
    pub cots: PathBuf,
    #[arg(long, value_enum, default_value_t = CotsSourceArg::Microsoft)]
    pub cots_source: CotsSourceArg,
    #[arg(long, default_value = "3,13,40,61")]
    pub age_cuts: AgeCuts,
    /// Denominator of the per-identity age standard deviation.
    #[arg(long, value_enum, default_value_t = StdArg::Sample)]
    pub std: StdArg,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Serialize)]
struct Resolved {
    cots_source: ProfileSource,
    age_cuts: [f64; 4],
    std: StdDenominator,
}

fn opt2(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.2}")).unwrap_or_default()
}

fn accuracy_csv(table: &AccuracyTable) -> String {
    let mut csv = String::from("trait,instance,support,correct,accuracy\n");
    for t in &table.traits {
        let Some(instances) = &t.instances else { continue };
        for i in instances {
            csv.push_str(&format!(
                "{},{},{},{},{}\n",
                t.kind,
                field(&i.instance),
                i.support,
                i.correct,
                opt2(i.accuracy)
            ));
        }
        csv.push_str(&format!("{},Overall,{},{},{}\n", t.kind, t.evaluated, t.correct, opt2(t.overall)));
    }
    csv.push_str(&format!(
        "Detection,Overall,{},{},{:.2}\n",
        table.images, table.detected, table.detection_rate
    ));
    csv
}

fn stability_csv(table: &AgeStabilityTable) -> String {
    let mut csv = String::from("images_per_identity,identities,mean_std\n");
    for r in &table.rows {
        csv.push_str(&format!("{},{},{}\n", field(&r.images_per_identity), r.identities, opt2(r.mean_std)));
    }
    csv
}

pub fn run(a: &CotsArgs, argv: &[String]) -> Result<()> {
    let inputs = vec![digest("annotations", &a.annotations)?, digest("cots", &a.cots)?];
    let gt = load_annotations(&a.annotations)?;
    let source: ProfileSource = a.cots_source.into();
    let cots = load_cots(&a.cots, source)?;
    let accuracy = cots_accuracy(&gt, &cots, &a.age_cuts)?;
    let std = match a.std {
        StdArg::Sample => StdDenominator::Sample,
        StdArg::Population => StdDenominator::Population,
    };
    let stability = age_stability(&cots, std);

    let mut out = OutputDir::create(&a.output.out_dir, a.output.format)?;
    out.csv("accuracy.csv", &accuracy_csv(&accuracy))?;
    out.json("accuracy.json", &accuracy)?;
    out.csv("age_stability.csv", &stability_csv(&stability))?;
    out.json("age_stability.json", &stability)?;
    let config = Resolved {
        cots_source: source,
        age_cuts: a.age_cuts.values(),
        std,
    };
    out.finish(RunManifest::new("cots", argv, &config, inputs, None)?)
}
