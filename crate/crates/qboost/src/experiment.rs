//! End-to-end paired-quantile experiment: simulate or load a dataset, split
//! it, train lower/upper/point models, evaluate the intervals, and write a
//! report directory.
//!
//! All artifacts are deterministic functions of the resolved spec: the three
//! models train on seeds derived from the spec seed by fixed offsets, so the
//! concurrent training below produces exactly what sequential training would.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::booster::{train, Ensemble, TrainConfig};
use crate::data::{load_csv, simulate, train_test_split, write_table, Dataset, NumericTable, SimulateParams};
use crate::error::{Error, Result};
use crate::metrics::{
    interval_report, pad_intervals, point_metrics, repair_crossings, IntervalReport, PointMetrics,
};
use crate::objective::Objective;

/// Where the experiment's rows come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataSource {
    /// Draw from the heteroscedastic toy generator.
    Simulate(SimulateParams),
    /// Load a CSV file and extract the named target column.
    Csv { path: PathBuf, target: String },
}

impl Default for DataSource {
    fn default() -> Self {
        DataSource::Simulate(SimulateParams::default())
    }
}

/// Fully describes one paired-quantile experiment. Parses from a TOML
/// document; omitted fields take the defaults below, which reproduce the
/// reference simulated run (n = 1000, 75/25 split, tau 0.05/0.95,
/// upsilon = 2, pad 3%, 300 trees of depth 3 at learning rate 0.05).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentSpec {
    pub data: DataSource,
    pub train_fraction: f64,
    pub seed: u64,
    pub lower_tau: f64,
    pub upper_tau: f64,
    /// Coverage level the CWC penalizes against. Usually `upper_tau -
    /// lower_tau`; the relationship is documented, not enforced.
    pub nominal_coverage: f64,
    pub eta: f64,
    pub pad_fraction: f64,
    /// Huber smoothing threshold shared by both quantile models.
    pub upsilon: f64,
    pub lower_model: TrainConfig,
    pub upper_model: TrainConfig,
    pub point_model: TrainConfig,
    pub output_dir: Option<PathBuf>,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        ExperimentSpec {
            data: DataSource::default(),
            train_fraction: 0.75,
            seed: 42,
            lower_tau: 0.05,
            upper_tau: 0.95,
            nominal_coverage: 0.9,
            eta: 50.0,
            pad_fraction: 0.03,
            upsilon: 2.0,
            lower_model: TrainConfig::default(),
            upper_model: TrainConfig::default(),
            point_model: TrainConfig::default(),
            output_dir: None,
        }
    }
}

impl ExperimentSpec {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::SpecFormat(e.to_string()))
    }

    pub fn from_toml_file(path: &Path) -> Result<Self> {
        Self::from_toml_str(&fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("spec serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if let DataSource::Simulate(params) = &self.data {
            params.validate()?;
        }
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(Error::domain("train_fraction", "must lie strictly inside (0, 1)"));
        }
        if self.lower_tau >= self.upper_tau || self.lower_tau.is_nan() || self.upper_tau.is_nan() {
            return Err(Error::domain(
                "lower_tau/upper_tau",
                format!("need lower_tau < upper_tau, got {} vs {}", self.lower_tau, self.upper_tau),
            ));
        }
        Objective::quantile(self.lower_tau, self.upsilon)?;
        Objective::quantile(self.upper_tau, self.upsilon)?;
        if !(self.nominal_coverage > 0.0 && self.nominal_coverage < 1.0) {
            return Err(Error::domain("nominal_coverage", "must lie strictly inside (0, 1)"));
        }
        if self.eta < 0.0 || self.eta.is_nan() {
            return Err(Error::domain("eta", "must be >= 0"));
        }
        if self.pad_fraction < 0.0 || self.pad_fraction.is_nan() {
            return Err(Error::domain("pad_fraction", "must be >= 0"));
        }
        self.lower_model.validate()?;
        self.upper_model.validate()?;
        self.point_model.validate()?;
        Ok(())
    }

    /// Per-role seeds derived from the spec seed by fixed offsets:
    /// data +0, split +1, lower +2, upper +3, point +4.
    fn derived_seed(&self, offset: u64) -> u64 {
        self.seed.wrapping_add(offset)
    }
}

/// Joint evaluation of a (lower, upper) model pair on one dataset.
/// Crossed rows are repaired by swapping before padding is applied.
#[derive(Debug, Clone)]
pub struct PairEvaluation {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub lower_padded: Vec<f64>,
    pub upper_padded: Vec<f64>,
    pub crossings_repaired: usize,
    pub unpadded: IntervalReport,
    pub padded: IntervalReport,
}

/// Predict both bounds over a dataset and evaluate the resulting intervals,
/// both as-is and padded by `pad_fraction`.
pub fn evaluate_pair(
    lower_model: &Ensemble,
    upper_model: &Ensemble,
    dataset: &Dataset,
    nominal_coverage: f64,
    eta: f64,
    pad_fraction: f64,
) -> Result<PairEvaluation> {
    let mut lower = lower_model.predict_dataset(dataset)?;
    let mut upper = upper_model.predict_dataset(dataset)?;
    let crossings_repaired = repair_crossings(&mut lower, &mut upper);
    let (lower_padded, upper_padded) = pad_intervals(&lower, &upper, pad_fraction)?;
    let targets = dataset.targets();
    Ok(PairEvaluation {
        unpadded: interval_report(targets, &lower, &upper, nominal_coverage, eta)?,
        padded: interval_report(targets, &lower_padded, &upper_padded, nominal_coverage, eta)?,
        lower,
        upper,
        lower_padded,
        upper_padded,
        crossings_repaired,
    })
}

/// Everything the experiment measured, mirroring the four artifact files.
#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub train_unpadded: IntervalReport,
    pub train_padded: IntervalReport,
    pub test_unpadded: IntervalReport,
    pub test_padded: IntervalReport,
    pub crossings_train: usize,
    pub crossings_test: usize,
    pub point: PointMetrics,
    pub pad_fraction: f64,
    pub n_train: usize,
    pub n_test: usize,
    pub artifacts: Vec<PathBuf>,
}

/// Run the full experiment and write `config.toml`, `metrics.csv`,
/// `intervals.csv`, and `intervals_ordered.csv` into `out_dir`.
pub fn run_experiment(spec: &ExperimentSpec, out_dir: &Path) -> Result<ExperimentReport> {
    spec.validate().map_err(|e| e.stage("validate spec"))?;

    let dataset = match &spec.data {
        DataSource::Simulate(params) => {
            simulate(params, spec.derived_seed(0)).map_err(|e| e.stage("simulate data"))?
        }
        DataSource::Csv { path, target } => {
            load_csv(path, target).map_err(|e| e.stage("load data"))?
        }
    };

    let (train_ds, test_ds) = train_test_split(&dataset, spec.train_fraction, spec.derived_seed(1))
        .map_err(|e| e.stage("split data"))?;

    let lower_objective =
        Objective::quantile(spec.lower_tau, spec.upsilon).map_err(|e| e.stage("validate spec"))?;
    let upper_objective =
        Objective::quantile(spec.upper_tau, spec.upsilon).map_err(|e| e.stage("validate spec"))?;

    let lower_config = TrainConfig { seed: spec.derived_seed(2), ..spec.lower_model };
    let upper_config = TrainConfig { seed: spec.derived_seed(3), ..spec.upper_model };
    let point_config = TrainConfig { seed: spec.derived_seed(4), ..spec.point_model };

    // The three models are independent; train them concurrently.
    let (lower_result, (upper_result, point_result)) = rayon::join(
        || train(&train_ds, lower_objective, &lower_config),
        || {
            rayon::join(
                || train(&train_ds, upper_objective, &upper_config),
                || train(&train_ds, Objective::SquaredError, &point_config),
            )
        },
    );
    let lower_model = lower_result.map_err(|e| e.stage("train lower-bound model"))?.ensemble;
    let upper_model = upper_result.map_err(|e| e.stage("train upper-bound model"))?.ensemble;
    let point_model = point_result.map_err(|e| e.stage("train point model"))?.ensemble;

    let train_eval = evaluate_pair(
        &lower_model,
        &upper_model,
        &train_ds,
        spec.nominal_coverage,
        spec.eta,
        spec.pad_fraction,
    )
    .map_err(|e| e.stage("evaluate train split"))?;
    let test_eval = evaluate_pair(
        &lower_model,
        &upper_model,
        &test_ds,
        spec.nominal_coverage,
        spec.eta,
        spec.pad_fraction,
    )
    .map_err(|e| e.stage("evaluate test split"))?;

    let point_predictions = point_model
        .predict_dataset(&test_ds)
        .map_err(|e| e.stage("evaluate test split"))?;
    let point = point_metrics(test_ds.targets(), &point_predictions)
        .map_err(|e| e.stage("evaluate test split"))?;

    fs::create_dir_all(out_dir).map_err(|e| Error::from(e).stage("write artifacts"))?;
    let resolved = ExperimentSpec { output_dir: Some(out_dir.to_path_buf()), ..spec.clone() };
    let config_path = out_dir.join("config.toml");
    fs::write(&config_path, resolved.to_toml()).map_err(|e| Error::from(e).stage("write artifacts"))?;

    let metrics_path = out_dir.join("metrics.csv");
    write_metrics_file(&metrics_path, spec, &train_eval, &test_eval, &point)
        .map_err(|e| e.stage("write artifacts"))?;

    let intervals_path = out_dir.join("intervals.csv");
    write_interval_plot(
        &intervals_path,
        &test_ds,
        &test_eval.lower_padded,
        &test_eval.upper_padded,
        Some(&point_predictions),
    )
    .map_err(|e| e.stage("write artifacts"))?;

    let ordered_path = out_dir.join("intervals_ordered.csv");
    write_ordered_file(&ordered_path, &test_ds, &test_eval)
        .map_err(|e| e.stage("write artifacts"))?;

    Ok(ExperimentReport {
        train_unpadded: train_eval.unpadded,
        train_padded: train_eval.padded,
        test_unpadded: test_eval.unpadded,
        test_padded: test_eval.padded,
        crossings_train: train_eval.crossings_repaired,
        crossings_test: test_eval.crossings_repaired,
        point,
        pad_fraction: spec.pad_fraction,
        n_train: train_ds.n_rows(),
        n_test: test_ds.n_rows(),
        artifacts: vec![config_path, metrics_path, intervals_path, ordered_path],
    })
}

fn write_metrics_file(
    path: &Path,
    spec: &ExperimentSpec,
    train_eval: &PairEvaluation,
    test_eval: &PairEvaluation,
    point: &PointMetrics,
) -> Result<()> {
    let mut out = String::from("metric,value\n");
    let mut push = |name: &str, value: String| {
        out.push_str(name);
        out.push(',');
        out.push_str(&value);
        out.push('\n');
    };
    push("nominal_coverage", format!("{}", spec.nominal_coverage));
    push("eta", format!("{}", spec.eta));
    push("pad_fraction", format!("{}", spec.pad_fraction));
    push("train_picp", format!("{}", train_eval.unpadded.picp));
    push("train_picp_padded", format!("{}", train_eval.padded.picp));
    push("test_picp", format!("{}", test_eval.unpadded.picp));
    push("test_picp_padded", format!("{}", test_eval.padded.picp));
    push("test_pinaw", format!("{}", test_eval.unpadded.pinaw));
    push("test_pinaw_padded", format!("{}", test_eval.padded.pinaw));
    push("test_cwc", format!("{}", test_eval.unpadded.cwc));
    push("test_cwc_padded", format!("{}", test_eval.padded.cwc));
    push("crossings_repaired_train", format!("{}", train_eval.crossings_repaired));
    push("crossings_repaired_test", format!("{}", test_eval.crossings_repaired));
    push("point_rmse", format!("{}", point.rmse));
    push(
        "point_r_squared",
        point.r_squared.map_or_else(|| "NA".to_string(), |r| format!("{r}")),
    );
    fs::write(path, out)?;
    Ok(())
}

/// Write plot-ready interval data: one row per observation with its target,
/// bounds, and optionally a point prediction. Rows are sorted by x when the
/// dataset has a single feature, otherwise kept in row order behind a
/// `row_index` column.
pub fn write_interval_plot(
    path: &Path,
    dataset: &Dataset,
    lower: &[f64],
    upper: &[f64],
    point: Option<&[f64]>,
) -> Result<()> {
    let n = dataset.n_rows();
    let mut order: Vec<usize> = (0..n).collect();
    let (axis_name, axis): (String, Vec<f64>) = if dataset.n_features() == 1 {
        let x = dataset.column(0);
        order.sort_by(|&a, &b| x[a].partial_cmp(&x[b]).unwrap());
        (dataset.feature_names()[0].clone(), x.to_vec())
    } else {
        ("row_index".to_string(), (0..n).map(|i| i as f64).collect())
    };
    let gather = |source: &[f64]| order.iter().map(|&i| source[i]).collect::<Vec<f64>>();
    let mut table = NumericTable {
        headers: vec![axis_name, "target".into(), "lower".into(), "upper".into()],
        columns: vec![
            gather(&axis),
            gather(dataset.targets()),
            gather(lower),
            gather(upper),
        ],
    };
    if let Some(point) = point {
        table.push_column("point", gather(point))?;
    }
    write_table(&table, path)
}

/// Ordered-and-centered intervals: rows sorted by interval width, bounds
/// re-expressed as offsets from each interval's midpoint.
fn write_ordered_file(path: &Path, test_ds: &Dataset, eval: &PairEvaluation) -> Result<()> {
    let n = test_ds.n_rows();
    let widths: Vec<f64> = eval
        .lower_padded
        .iter()
        .zip(&eval.upper_padded)
        .map(|(lo, hi)| hi - lo)
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| widths[a].partial_cmp(&widths[b]).unwrap());

    let mut rank = Vec::with_capacity(n);
    let mut width_col = Vec::with_capacity(n);
    let mut lower_centered = Vec::with_capacity(n);
    let mut upper_centered = Vec::with_capacity(n);
    let mut target_centered = Vec::with_capacity(n);
    let mut covered = Vec::with_capacity(n);
    for (k, &i) in order.iter().enumerate() {
        let mid = 0.5 * (eval.lower_padded[i] + eval.upper_padded[i]);
        let target = test_ds.targets()[i];
        rank.push(k as f64);
        width_col.push(widths[i]);
        lower_centered.push(eval.lower_padded[i] - mid);
        upper_centered.push(eval.upper_padded[i] - mid);
        target_centered.push(target - mid);
        covered.push(
            if eval.lower_padded[i] <= target && target <= eval.upper_padded[i] { 1.0 } else { 0.0 },
        );
    }
    let table = NumericTable {
        headers: vec![
            "rank".into(),
            "width".into(),
            "lower_centered".into(),
            "upper_centered".into(),
            "target_centered".into(),
            "covered".into(),
        ],
        columns: vec![rank, width_col, lower_centered, upper_centered, target_centered, covered],
    };
    write_table(&table, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_toml_round_trip() {
        let spec = ExperimentSpec::default();
        let text = spec.to_toml();
        let back = ExperimentSpec::from_toml_str(&text).unwrap();
        assert_eq!(back, spec);
    }

    #[test]
    fn empty_spec_means_defaults() {
        let spec = ExperimentSpec::from_toml_str("").unwrap();
        assert_eq!(spec, ExperimentSpec::default());
    }

    #[test]
    fn partial_spec_overrides_only_named_fields() {
        let text = r#"
            seed = 7
            pad_fraction = 0.0

            [data.simulate]
            n = 50

            [lower_model]
            n_estimators = 10
        "#;
        let spec = ExperimentSpec::from_toml_str(text).unwrap();
        assert_eq!(spec.seed, 7);
        assert_eq!(spec.pad_fraction, 0.0);
        assert_eq!(spec.lower_model.n_estimators, 10);
        assert_eq!(spec.lower_model.max_depth, 3);
        assert_eq!(spec.upper_model, TrainConfig::default());
        match spec.data {
            DataSource::Simulate(p) => {
                assert_eq!(p.n, 50);
                assert_eq!(p.x_max, 10.0);
            }
            _ => panic!("expected simulate source"),
        }
    }

    #[test]
    fn unknown_fields_are_rejected() {
        assert!(ExperimentSpec::from_toml_str("sede = 7").is_err());
    }

    #[test]
    fn spec_validation_catches_bad_quantiles() {
        let swapped = ExperimentSpec { lower_tau: 0.95, upper_tau: 0.05, ..Default::default() };
        assert!(swapped.validate().is_err());
        let out_of_range = ExperimentSpec { upper_tau: 1.5, ..Default::default() };
        assert!(out_of_range.validate().is_err());
    }

    #[test]
    fn csv_source_parses() {
        let text = r#"
            [data.csv]
            path = "noise.csv"
            target = "level"
        "#;
        let spec = ExperimentSpec::from_toml_str(text).unwrap();
        assert_eq!(
            spec.data,
            DataSource::Csv { path: PathBuf::from("noise.csv"), target: "level".into() }
        );
    }
}
