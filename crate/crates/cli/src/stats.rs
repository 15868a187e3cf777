use std::path::PathBuf;

use clap::Args;
use serde::Serialize;
use softbio_core::analysis::{correlation_matrix, demographic_stats};
use softbio_core::ingestion::load_annotations;
use softbio_core::AgeCuts;

use crate::args::OutputArgs;
use crate::error::Result;
use crate::output::{digest, field, OutputDir, RunManifest};

#[derive(Debug, Clone, Args)]
pub struct StatsArgs {
    #[arg(long)]
    pub annotations: PathBuf,
    #[arg(long, default_value = "3,13,40,61")]
    pub age_cuts: AgeCuts,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Serialize)]
struct Resolved {
    age_cuts: [f64; 4],
}

pub fn run(a: &StatsArgs, argv: &[String]) -> Result<()> {
    let inputs = vec![digest("annotations", &a.annotations)?];
    let records = load_annotations(&a.annotations)?;
    let demographics = demographic_stats(&records, &a.age_cuts)?;
    let profiles: Vec<_> = records.iter().map(|r| r.profile).collect();
    let matrix = correlation_matrix(&profiles, &a.age_cuts)?;

    let mut csv = String::from("trait,instance,count,percent\n");
    for t in &demographics {
        for i in &t.instances {
            csv.push_str(&format!("{},{},{},{:.1}\n", t.kind, field(&i.instance), i.count, i.percent));
        }
        if t.missing > 0 {
            csv.push_str(&format!("{},Missing,{},\n", t.kind, t.missing));
        }
    }

    let mut out = OutputDir::create(&a.output.out_dir, a.output.format)?;
    out.csv("demographics.csv", &csv)?;
    out.json("demographics.json", &demographics)?;
    out.csv("correlation.csv", &matrix.to_csv())?;
    out.json("correlation.json", &matrix)?;
    let config = Resolved {
        age_cuts: a.age_cuts.values(),
    };
    out.finish(RunManifest::new("stats", argv, &config, inputs, None)?)
}
