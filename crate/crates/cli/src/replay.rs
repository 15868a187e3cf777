use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser};

use crate::error::{CliError, Result};
use crate::output::{digest, RunManifest};
use crate::{dispatch, Cli, Command};

#[derive(Debug, Clone, Args)]
pub struct ReplayArgs {
    /// Manifest written by an earlier run.
    #[arg(long)]
    pub manifest: PathBuf,
    /// Where to write the reproduced outputs.
    #[arg(long)]
    pub out_dir: PathBuf,
}

pub fn run(a: &ReplayArgs) -> Result<()> {
    let text = fs::read_to_string(&a.manifest)
        .map_err(|e| CliError::usage(format!("cannot read {}: {e}", a.manifest.display())))?;
    let manifest: RunManifest = serde_json::from_str(&text)
        .map_err(|e| CliError::usage(format!("{} is not a run manifest: {e}", a.manifest.display())))?;
    if manifest.tool != env!("CARGO_PKG_NAME") {
        return Err(CliError::usage(format!("manifest was written by {:?}", manifest.tool)));
    }
    for input in &manifest.inputs {
        let now = digest(&input.role, &input.path)?;
        if now.sha256 != input.sha256 {
            return Err(CliError::data(format!(
                "{} changed since the manifest was written",
                input.path.display()
            )));
        }
    }

    let mut argv = vec![env!("CARGO_BIN_NAME").to_string(), manifest.subcommand.clone()];
    argv.extend(manifest.args.iter().cloned());
    argv.push("--out-dir".into());
    argv.push(a.out_dir.display().to_string());
    let mut cli = Cli::try_parse_from(&argv).map_err(|e| CliError::usage(format!("manifest arguments: {e}")))?;
    match &mut cli.command {
        Command::Replay(_) => return Err(CliError::usage("a replay manifest cannot be replayed")),
        Command::Synth(s) => s.seed = manifest.seed,
        _ => {}
    }
    dispatch(&cli.command, &manifest.args)
}
