//! `softbio`: soft-biometric verification experiments from the command line.

mod args;
mod cots;
mod error;
mod eval;
mod output;
mod replay;
mod sffs;
mod stats;
mod synth;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::error::Result;

#[derive(Debug, Parser)]
#[command(name = "softbio", version, about = "Soft-biometric verification, fusion and trait selection")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Demographics and trait correlations of an annotation file.
    Stats(stats::StatsArgs),
    /// Cross-validated EER of soft, face or fused matching.
    Eval(eval::EvalArgs),
    /// Sequential floating forward selection of soft traits.
    Sffs(sffs::SffsArgs),
    /// Accuracy and age stability of COTS estimates.
    Cots(cots::CotsArgs),
    /// Synthetic annotations, pairs and face scores.
    Synth(synth::SynthArgs),
    /// Rerun the command recorded in a manifest.
    Replay(replay::ReplayArgs),
}

pub fn dispatch(command: &Command, argv: &[String]) -> Result<()> {
    match command {
        Command::Stats(a) => stats::run(a, argv),
        Command::Eval(a) => eval::run(a, argv),
        Command::Sffs(a) => sffs::run(a, argv),
        Command::Cots(a) => cots::run(a, argv),
        Command::Synth(a) => synth::run(a, argv),
        Command::Replay(a) => replay::run(a),
    }
}

/// Arguments after the subcommand, without the output directory, which is
/// the one thing a replay changes.
fn recorded_args(args: impl Iterator<Item = String>) -> Vec<String> {
    let mut out = Vec::new();
    let mut skip_next = false;
    for a in args {
        if skip_next {
            skip_next = false;
        } else if a == "--out-dir" {
            skip_next = true;
        } else if !a.starts_with("--out-dir=") {
            out.push(a);
        }
    }
    out
}

fn main() -> ExitCode {
    let cli = Cli::try_parse().unwrap_or_else(|e| e.exit());
    let argv = recorded_args(std::env::args().skip(2));
    match dispatch(&cli.command, &argv) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("softbio: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
