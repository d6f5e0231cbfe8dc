//! `qboost` — train quantile boosted trees, build paired-quantile prediction
//! intervals, and evaluate them from the command line.
//!
//! Exit codes: 0 on success, 2 on usage errors (bad flags or flag values),
//! 1 on runtime errors (missing files, schema mismatches, ...).

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "qboost", version, about = "Quantile boosted trees and prediction intervals")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a toy dataset with heteroscedastic noise and write it as CSV.
    Simulate(SimulateArgs),
    /// Train a model on a CSV dataset and save it.
    Train(TrainArgs),
    /// Predict with a saved model and append a `prediction` column.
    Predict(PredictArgs),
    /// Evaluate a lower/upper model pair as prediction intervals.
    EvalPi(EvalPiArgs),
    /// Run the full paired-quantile experiment into a report directory.
    Experiment(ExperimentArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// Number of rows to draw.
    #[arg(long, default_value_t = 1000)]
    n: usize,
    #[arg(long, default_value_t = 0.0)]
    x_min: f64,
    #[arg(long, default_value_t = 10.0)]
    x_max: f64,
    #[arg(long, default_value_t = 1.5)]
    sigma_min: f64,
    #[arg(long, default_value_t = 2.5)]
    sigma_max: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Output CSV path (columns x,y).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct TrainArgs {
    /// Training dataset (CSV with a header row).
    #[arg(long)]
    data: PathBuf,
    /// Name of the target column.
    #[arg(long)]
    target: String,
    /// Objective: `squared` or `quantile`.
    #[arg(long, default_value = "quantile")]
    objective: String,
    /// Quantile level; required for the quantile objective.
    #[arg(long)]
    tau: Option<f64>,
    /// Huber smoothing threshold for the quantile objective.
    #[arg(long, default_value_t = 2.0)]
    upsilon: f64,
    /// Boosting rounds.
    #[arg(long, default_value_t = 300)]
    rounds: usize,
    /// Maximum tree depth (1 = a single leaf).
    #[arg(long, default_value_t = 3)]
    depth: usize,
    /// Learning rate (shrinkage).
    #[arg(long, default_value_t = 0.05)]
    lr: f64,
    /// L2 penalty on leaf weights.
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    /// Per-leaf complexity penalty (minimum split gain).
    #[arg(long, default_value_t = 0.0)]
    gamma: f64,
    /// Minimum hessian sum per child.
    #[arg(long, default_value_t = 1.0)]
    min_child_weight: f64,
    /// Initial prediction; defaults to the objective's choice.
    #[arg(long)]
    base_score: Option<f64>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Output model path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct PredictArgs {
    /// Saved model file.
    #[arg(long)]
    model: PathBuf,
    /// Input CSV; all columns except `--target` are treated as features.
    #[arg(long)]
    data: PathBuf,
    /// Target column to exclude from the features, if present.
    #[arg(long)]
    target: Option<String>,
    /// Output CSV: input columns plus a `prediction` column.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EvalPiArgs {
    /// Lower-bound model file.
    #[arg(long)]
    lower: PathBuf,
    /// Upper-bound model file.
    #[arg(long)]
    upper: PathBuf,
    /// Optional point-prediction model for the plot file.
    #[arg(long)]
    point: Option<PathBuf>,
    /// Evaluation dataset (CSV).
    #[arg(long)]
    data: PathBuf,
    /// Optional training dataset, for the training PICP row.
    #[arg(long)]
    train_data: Option<PathBuf>,
    /// Name of the target column.
    #[arg(long)]
    target: String,
    /// Nominal coverage level the CWC penalizes against.
    #[arg(long, default_value_t = 0.9)]
    mu: f64,
    /// CWC penalty steepness.
    #[arg(long, default_value_t = 50.0)]
    eta: f64,
    /// Interval padding fraction.
    #[arg(long, default_value_t = 0.0)]
    pad: f64,
    /// Write the input columns plus appended lower/upper bound columns.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Where to write the plot-ready interval data.
    #[arg(long)]
    plot_out: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Experiment spec (TOML); omitted fields take the reference defaults.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Report directory; overrides `output_dir` from the spec.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the spec's seed.
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(args) => commands::simulate(args),
        Command::Train(args) => commands::train(args),
        Command::Predict(args) => commands::predict(args),
        Command::EvalPi(args) => commands::eval_pi(args),
        Command::Experiment(args) => commands::experiment(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            if err.is::<commands::UsageError>() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
