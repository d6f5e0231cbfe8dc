//! Subcommand implementations.

use std::fmt;

use anyhow::{Context, Result};
use qboost::data::{read_table, write_csv, write_table};
use qboost::experiment::{
    evaluate_pair, run_experiment, write_interval_plot, ExperimentSpec, PairEvaluation,
};
use qboost::metrics::point_metrics;
use qboost::{load_csv, simulate as draw, Ensemble, Objective, SimulateParams, TrainConfig};

use crate::{EvalPiArgs, ExperimentArgs, PredictArgs, SimulateArgs, TrainArgs};

/// Marker for flag-value problems; `main` turns it into exit code 2.
#[derive(Debug)]
pub struct UsageError(String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage_err(message: impl Into<String>) -> anyhow::Error {
    anyhow::Error::new(UsageError(message.into()))
}

fn as_usage(err: qboost::Error) -> anyhow::Error {
    usage_err(err.to_string())
}

pub fn simulate(args: SimulateArgs) -> Result<()> {
    let params = SimulateParams {
        n: args.n,
        x_min: args.x_min,
        x_max: args.x_max,
        sigma_min: args.sigma_min,
        sigma_max: args.sigma_max,
    };
    params.validate().map_err(as_usage)?;
    let dataset = draw(&params, args.seed)?;
    write_csv(&dataset, "y", &args.out)
        .with_context(|| format!("writing {}", args.out.display()))?;
    println!("wrote {} rows to {}", dataset.n_rows(), args.out.display());
    Ok(())
}

pub fn train(args: TrainArgs) -> Result<()> {
    let objective = match args.objective.as_str() {
        "squared" => Objective::SquaredError,
        "quantile" => {
            let tau = args
                .tau
                .ok_or_else(|| usage_err("--tau is required for the quantile objective"))?;
            Objective::quantile(tau, args.upsilon).map_err(as_usage)?
        }
        other => {
            return Err(usage_err(format!(
                "unknown objective `{other}`; expected `squared` or `quantile`"
            )))
        }
    };
    let config = TrainConfig {
        n_estimators: args.rounds,
        max_depth: args.depth,
        learning_rate: args.lr,
        lambda: args.lambda,
        gamma: args.gamma,
        min_child_weight: args.min_child_weight,
        base_score: args.base_score,
        seed: args.seed,
    };
    config.validate().map_err(as_usage)?;

    let dataset = load_csv(&args.data, &args.target)
        .with_context(|| format!("loading {}", args.data.display()))?;
    let result = qboost::train(&dataset, objective, &config)?;

    let rounds = result.round_losses.len();
    for (i, loss) in result.round_losses.iter().enumerate() {
        let round = i + 1;
        if round % 50 == 0 && round != rounds {
            println!("round {round}: mean training loss {loss:.6}");
        }
    }
    let final_loss = result.round_losses.last().copied().unwrap_or(f64::NAN);
    result
        .ensemble
        .save(&args.out)
        .with_context(|| format!("writing {}", args.out.display()))?;
    println!("round {rounds}: final training loss {final_loss:.6}");
    println!("wrote model to {}", args.out.display());
    Ok(())
}

pub fn predict(args: PredictArgs) -> Result<()> {
    let model = Ensemble::load(&args.model)
        .with_context(|| format!("loading {}", args.model.display()))?;
    let mut table = read_table(&args.data)
        .with_context(|| format!("loading {}", args.data.display()))?;
    let (names, columns) = table.feature_view(args.target.as_deref());
    let predictions = model.predict_columns(&names, &columns)?;
    let n = predictions.len();
    table.push_column("prediction", predictions)?;
    write_table(&table, &args.out)
        .with_context(|| format!("writing {}", args.out.display()))?;
    println!("wrote {n} predictions to {}", args.out.display());
    Ok(())
}

pub fn eval_pi(args: EvalPiArgs) -> Result<()> {
    if !(args.mu > 0.0 && args.mu < 1.0) {
        return Err(usage_err(format!("--mu must lie strictly inside (0, 1), got {}", args.mu)));
    }
    if args.eta < 0.0 || args.eta.is_nan() {
        return Err(usage_err(format!("--eta must be >= 0, got {}", args.eta)));
    }
    if args.pad < 0.0 || args.pad.is_nan() {
        return Err(usage_err(format!("--pad must be >= 0, got {}", args.pad)));
    }

    let lower = Ensemble::load(&args.lower)
        .with_context(|| format!("loading {}", args.lower.display()))?;
    let upper = Ensemble::load(&args.upper)
        .with_context(|| format!("loading {}", args.upper.display()))?;
    let table = read_table(&args.data)
        .with_context(|| format!("loading {}", args.data.display()))?;
    let test = table.to_dataset(&args.target)?;
    let eval = evaluate_pair(&lower, &upper, &test, args.mu, args.eta, args.pad)?;

    let train_eval: Option<PairEvaluation> = match &args.train_data {
        Some(path) => {
            let train_ds = load_csv(path, &args.target)
                .with_context(|| format!("loading {}", path.display()))?;
            Some(evaluate_pair(&lower, &upper, &train_ds, args.mu, args.eta, args.pad)?)
        }
        None => None,
    };

    println!("nominal coverage {} | eta {} | pad {}", args.mu, args.eta, args.pad);
    print_interval_table(train_eval.as_ref(), &eval);
    if let Some(train_eval) = &train_eval {
        println!("crossings repaired (train): {}", train_eval.crossings_repaired);
    }
    println!("crossings repaired (test):  {}", eval.crossings_repaired);

    let point_predictions = match &args.point {
        Some(path) => {
            let model = Ensemble::load(path)
                .with_context(|| format!("loading {}", path.display()))?;
            let predictions = model.predict_dataset(&test)?;
            let metrics = point_metrics(test.targets(), &predictions)?;
            match metrics.r_squared {
                Some(r2) => println!("point model: rmse {:.6}, r2 {:.6}", metrics.rmse, r2),
                None => println!("point model: rmse {:.6}, r2 NA", metrics.rmse),
            }
            Some(predictions)
        }
        None => None,
    };

    if let Some(out) = &args.out {
        let mut with_bounds = table.clone();
        with_bounds.push_column("lower", eval.lower_padded.clone())?;
        with_bounds.push_column("upper", eval.upper_padded.clone())?;
        write_table(&with_bounds, out).with_context(|| format!("writing {}", out.display()))?;
        println!("wrote bounds to {}", out.display());
    }

    if let Some(plot_out) = &args.plot_out {
        write_interval_plot(
            plot_out,
            &test,
            &eval.lower_padded,
            &eval.upper_padded,
            point_predictions.as_deref(),
        )?;
        println!("wrote plot data to {}", plot_out.display());
    }
    Ok(())
}

pub fn experiment(args: ExperimentArgs) -> Result<()> {
    let mut spec = match &args.spec {
        Some(path) => ExperimentSpec::from_toml_file(path).map_err(|e| match e {
            qboost::Error::Io(_) => anyhow::Error::new(e).context(format!("reading {}", path.display())),
            other => usage_err(other.to_string()),
        })?,
        None => ExperimentSpec::default(),
    };
    if let Some(seed) = args.seed {
        spec.seed = seed;
    }
    spec.validate().map_err(as_usage)?;
    let out_dir = args
        .out
        .clone()
        .or_else(|| spec.output_dir.clone())
        .ok_or_else(|| usage_err("no output directory: pass --out or set output_dir in the spec"))?;

    let report = run_experiment(&spec, &out_dir)?;

    println!(
        "experiment: {} train rows, {} test rows, seed {}",
        report.n_train, report.n_test, spec.seed
    );
    println!("nominal coverage {} | eta {} | pad {}", spec.nominal_coverage, spec.eta, spec.pad_fraction);
    println!(
        "{:<16} {:>12} {:>12}",
        "metric", "unpadded", "padded"
    );
    println!("{:<16} {:>12.6} {:>12.6}", "training PICP", report.train_unpadded.picp, report.train_padded.picp);
    println!("{:<16} {:>12.6} {:>12.6}", "testing PICP", report.test_unpadded.picp, report.test_padded.picp);
    println!("{:<16} {:>12.6} {:>12.6}", "testing PINAW", report.test_unpadded.pinaw, report.test_padded.pinaw);
    println!("{:<16} {:>12.6} {:>12.6}", "testing CWC", report.test_unpadded.cwc, report.test_padded.cwc);
    println!(
        "crossings repaired: {} train, {} test",
        report.crossings_train, report.crossings_test
    );
    match report.point.r_squared {
        Some(r2) => println!("point model: rmse {:.6}, r2 {:.6}", report.point.rmse, r2),
        None => println!("point model: rmse {:.6}, r2 NA", report.point.rmse),
    }
    for path in &report.artifacts {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn print_interval_table(train_eval: Option<&PairEvaluation>, test_eval: &PairEvaluation) {
    println!("{:<16} {:>12} {:>12}", "metric", "unpadded", "padded");
    if let Some(train_eval) = train_eval {
        println!(
            "{:<16} {:>12.6} {:>12.6}",
            "training PICP", train_eval.unpadded.picp, train_eval.padded.picp
        );
    }
    println!(
        "{:<16} {:>12.6} {:>12.6}",
        "testing PICP", test_eval.unpadded.picp, test_eval.padded.picp
    );
    println!(
        "{:<16} {:>12.6} {:>12.6}",
        "testing PINAW", test_eval.unpadded.pinaw, test_eval.padded.pinaw
    );
    println!(
        "{:<16} {:>12.6} {:>12.6}",
        "testing CWC", test_eval.unpadded.cwc, test_eval.padded.cwc
    );
}
