//! `retention-lab`: synthesize cohorts, train, evaluate and explain dropout
//! models from the command line.

mod commands;
mod output;
mod settings;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use retention_core::error::ErrorKind;

use crate::settings::ExplainSplit;

#[derive(Debug, Parser)]
#[command(name = "retention-lab", version, about = "Student dropout modeling with boosted trees and SHAP")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a seeded synthetic cohort CSV.
    Synth(SynthArgs),
    /// Split, bin and train; writes model.json and history.csv.
    Train(TrainArgs),
    /// Score the held-out split; writes metrics.json and metrics.txt.
    Evaluate(EvaluateArgs),
    /// Write SHAP values, importance table, dependence data and plots.
    Explain(ExplainArgs),
}

#[derive(Debug, Args)]
struct ConfigArg {
    /// Flat `key = value` settings file; flags take precedence.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[command(flatten)]
    config: ConfigArg,
    /// Number of students.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Target dropout share, in (0, 1).
    #[arg(long)]
    base_rate: Option<f64>,
    /// Standard deviation of the per-student log-odds noise.
    #[arg(long)]
    noise: Option<f64>,
    /// Output CSV path.
    #[arg(long, value_name = "PATH")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct DataArgs {
    /// Cohort CSV.
    #[arg(long, value_name = "PATH")]
    data: PathBuf,
    /// Count and skip unparsable rows instead of failing.
    #[arg(long)]
    skip_bad_rows: bool,
    /// Directory for the command's output files.
    #[arg(long, value_name = "DIR", default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Debug, Args)]
struct TrainArgs {
    #[command(flatten)]
    config: ConfigArg,
    #[command(flatten)]
    data: DataArgs,
    /// Boosting rounds.
    #[arg(long)]
    iterations: Option<usize>,
    #[arg(long)]
    max_bin: Option<usize>,
    #[arg(long)]
    learning_rate: Option<f64>,
    #[arg(long)]
    num_leaves: Option<usize>,
    #[arg(long)]
    min_data: Option<usize>,
    #[arg(long)]
    boost_from_average: Option<bool>,
    #[arg(long)]
    lambda_l2: Option<f64>,
    /// Share of rows used for training.
    #[arg(long)]
    split_ratio: Option<f64>,
    /// Split seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Split each class separately.
    #[arg(long)]
    stratified: bool,
    /// Stop after this many rounds without held-out improvement.
    #[arg(long)]
    early_stopping_rounds: Option<usize>,
}

#[derive(Debug, Args)]
struct ModelArg {
    /// Model file written by `train`.
    #[arg(long, value_name = "PATH", default_value = "model.json")]
    model: PathBuf,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    #[command(flatten)]
    config: ConfigArg,
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    model: ModelArg,
    /// Probability at or above which a student is predicted to drop out.
    #[arg(long)]
    threshold: Option<f64>,
    /// Expected split seed; must match the model's.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Args)]
struct ExplainArgs {
    #[command(flatten)]
    config: ConfigArg,
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    model: ModelArg,
    /// Rows to explain.
    #[arg(long, value_enum)]
    split: Option<ExplainSplit>,
    /// Feature pair `A,B` for interaction output; repeatable.
    #[arg(long, value_name = "A,B")]
    interactions: Vec<String>,
    /// Expected split seed; must match the model's.
    #[arg(long)]
    seed: Option<u64>,
}

fn exit_code(kind: ErrorKind) -> u8 {
    match kind {
        ErrorKind::Config => 2,
        ErrorKind::Data => 3,
        ErrorKind::Internal => 4,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Synth(a) => commands::synth(a),
        Command::Train(a) => commands::train(a),
        Command::Evaluate(a) => commands::evaluate(a),
        Command::Explain(a) => commands::explain(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {failure}");
            ExitCode::from(exit_code(failure.kind))
        }
    }
}
