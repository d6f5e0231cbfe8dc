//! Tabular dataset storage, delimited-file ingestion, train/test splitting,
//! and the heteroscedastic toy-data simulator.
//!
//! All randomness goes through `ChaCha8Rng` seeded with a caller-supplied
//! `u64`, so a seed reproduces the same draws on every platform for the
//! dependency versions pinned in the lockfile.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Uniform};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Column-oriented feature matrix with a target vector; the unit of training
/// and prediction. All values are finite and all columns share one length.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    feature_names: Vec<String>,
    columns: Vec<Vec<f64>>,
    targets: Vec<f64>,
}

impl Dataset {
    pub fn new(
        feature_names: Vec<String>,
        columns: Vec<Vec<f64>>,
        targets: Vec<f64>,
    ) -> Result<Self> {
        if feature_names.len() != columns.len() {
            return Err(Error::Dataset(format!(
                "{} feature names for {} columns",
                feature_names.len(),
                columns.len()
            )));
        }
        if columns.is_empty() {
            return Err(Error::Dataset("dataset needs at least one feature".into()));
        }
        if targets.is_empty() {
            return Err(Error::Dataset("dataset needs at least one row".into()));
        }
        let n_rows = targets.len();
        for (name, column) in feature_names.iter().zip(&columns) {
            if column.len() != n_rows {
                return Err(Error::Dataset(format!(
                    "column `{name}` has {} values, expected {n_rows}",
                    column.len()
                )));
            }
            if let Some(bad) = column.iter().position(|v| !v.is_finite()) {
                return Err(Error::Dataset(format!(
                    "non-finite value in column `{name}` at row {bad}"
                )));
            }
        }
        if let Some(bad) = targets.iter().position(|v| !v.is_finite()) {
            return Err(Error::Dataset(format!("non-finite target at row {bad}")));
        }
        Ok(Dataset {
            feature_names,
            columns,
            targets,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.targets.len()
    }

    pub fn n_features(&self) -> usize {
        self.columns.len()
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn column(&self, index: usize) -> &[f64] {
        &self.columns[index]
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.columns
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    /// Gather one row across all feature columns.
    pub fn row(&self, index: usize) -> Vec<f64> {
        self.columns.iter().map(|c| c[index]).collect()
    }

    /// New dataset holding only the given rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> Dataset {
        Dataset {
            feature_names: self.feature_names.clone(),
            columns: self
                .columns
                .iter()
                .map(|c| rows.iter().map(|&r| c[r]).collect())
                .collect(),
            targets: rows.iter().map(|&r| self.targets[r]).collect(),
        }
    }
}

/// Parameters of the toy-data simulator. The target is
/// `y = 1.5 * x * sin(x) + eps` with `x ~ Uniform(x_min, x_max)` and
/// `eps ~ Normal(0, sigma)` where each row draws its own
/// `sigma ~ Uniform(sigma_min, sigma_max)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateParams {
    pub n: usize,
    pub x_min: f64,
    pub x_max: f64,
    pub sigma_min: f64,
    pub sigma_max: f64,
}

impl Default for SimulateParams {
    fn default() -> Self {
        SimulateParams {
            n: 1000,
            x_min: 0.0,
            x_max: 10.0,
            sigma_min: 1.5,
            sigma_max: 2.5,
        }
    }
}

impl SimulateParams {
    pub fn validate(&self) -> Result<()> {
        if self.n < 1 {
            return Err(Error::domain("n", "must be at least 1"));
        }
        if self.x_min >= self.x_max || self.x_min.is_nan() || self.x_max.is_nan() {
            return Err(Error::domain(
                "x_min/x_max",
                format!("need x_min < x_max, got [{}, {}]", self.x_min, self.x_max),
            ));
        }
        if !(self.sigma_min > 0.0 && self.sigma_min <= self.sigma_max) {
            return Err(Error::domain(
                "sigma_min/sigma_max",
                format!(
                    "need 0 < sigma_min <= sigma_max, got [{}, {}]",
                    self.sigma_min, self.sigma_max
                ),
            ));
        }
        Ok(())
    }
}

/// Noiseless conditional mean of the simulated target.
pub fn sim_mean(x: f64) -> f64 {
    1.5 * x * x.sin()
}

/// Draw a simulated dataset with a single feature `x` and target `y`.
/// Deterministic given the seed.
pub fn simulate(params: &SimulateParams, seed: u64) -> Result<Dataset> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x_dist = Uniform::new(params.x_min, params.x_max)
        .map_err(|e| Error::domain("x_min/x_max", e.to_string()))?;
    let sigma_dist = Uniform::new_inclusive(params.sigma_min, params.sigma_max)
        .map_err(|e| Error::domain("sigma_min/sigma_max", e.to_string()))?;

    let mut xs = Vec::with_capacity(params.n);
    let mut ys = Vec::with_capacity(params.n);
    for _ in 0..params.n {
        let x = x_dist.sample(&mut rng);
        let sigma = sigma_dist.sample(&mut rng);
        let noise = Normal::new(0.0, sigma)
            .map_err(|e| Error::domain("sigma", e.to_string()))?
            .sample(&mut rng);
        xs.push(x);
        ys.push(sim_mean(x) + noise);
    }
    Dataset::new(vec!["x".to_string()], vec![xs], ys)
}

/// Deterministic train/test partition of the rows. The train side gets
/// `round(fraction * n)` rows of a seeded uniform permutation; both sides
/// keep their rows in the original dataset order.
pub fn train_test_split(
    dataset: &Dataset,
    train_fraction: f64,
    seed: u64,
) -> Result<(Dataset, Dataset)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::domain(
            "train_fraction",
            format!("must lie strictly inside (0, 1), got {train_fraction}"),
        ));
    }
    let n = dataset.n_rows();
    if n < 2 {
        return Err(Error::Dataset(format!("cannot split {n} row(s)")));
    }
    let train_size = (train_fraction * n as f64).round() as usize;
    if train_size == 0 || train_size == n {
        return Err(Error::Dataset(format!(
            "degenerate split: {train_size} of {n} rows on the train side"
        )));
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    perm.shuffle(&mut rng);
    let mut train_rows = perm[..train_size].to_vec();
    let mut test_rows = perm[train_size..].to_vec();
    train_rows.sort_unstable();
    test_rows.sort_unstable();
    Ok((dataset.select_rows(&train_rows), dataset.select_rows(&test_rows)))
}

/// A numeric delimited file in memory: header plus column-major values.
/// Keeps the original column order so prediction outputs can preserve the
/// input layout and append columns.
#[derive(Debug, Clone, PartialEq)]
pub struct NumericTable {
    pub headers: Vec<String>,
    pub columns: Vec<Vec<f64>>,
}

impl NumericTable {
    pub fn n_rows(&self) -> usize {
        self.columns.first().map_or(0, |c| c.len())
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.headers
            .iter()
            .position(|h| h == name)
            .map(|i| self.columns[i].as_slice())
    }

    /// Append a column; its length must match the existing rows.
    pub fn push_column(&mut self, name: impl Into<String>, values: Vec<f64>) -> Result<()> {
        if values.len() != self.n_rows() {
            return Err(Error::Dataset(format!(
                "appended column has {} values for {} rows",
                values.len(),
                self.n_rows()
            )));
        }
        self.headers.push(name.into());
        self.columns.push(values);
        Ok(())
    }

    /// Split off the named target column; the remaining columns become
    /// features in header order.
    pub fn to_dataset(&self, target: &str) -> Result<Dataset> {
        let Some(target_idx) = self.headers.iter().position(|h| h == target) else {
            return Err(Error::MissingTargetColumn {
                target: target.to_string(),
                available: self.headers.clone(),
            });
        };
        let mut names = Vec::new();
        let mut columns = Vec::new();
        for (i, (name, column)) in self.headers.iter().zip(&self.columns).enumerate() {
            if i != target_idx {
                names.push(name.clone());
                columns.push(column.clone());
            }
        }
        Dataset::new(names, columns, self.columns[target_idx].clone())
    }

    /// Feature view for prediction: all columns except an optional target.
    pub fn feature_view(&self, exclude: Option<&str>) -> (Vec<String>, Vec<Vec<f64>>) {
        let mut names = Vec::new();
        let mut columns = Vec::new();
        for (name, column) in self.headers.iter().zip(&self.columns) {
            if Some(name.as_str()) != exclude {
                names.push(name.clone());
                columns.push(column.clone());
            }
        }
        (names, columns)
    }
}

/// Read a comma-separated numeric file with a mandatory header row.
pub fn read_table(path: &Path) -> Result<NumericTable> {
    let text = fs::read_to_string(path)?;
    let display = path.display().to_string();
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let Some((_, header)) = lines.next() else {
        return Err(Error::Dataset(format!("{display}: empty file")));
    };
    let headers: Vec<String> = header.split(',').map(|h| h.trim().to_string()).collect();
    if headers.iter().any(|h| h.is_empty()) {
        return Err(Error::Dataset(format!("{display}: blank column name in header")));
    }
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); headers.len()];
    for (line_idx, line) in lines {
        let row = line_idx + 1; // 1-based, counting the header
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != headers.len() {
            return Err(Error::Dataset(format!(
                "{display}: row {row} has {} cells, expected {}",
                cells.len(),
                headers.len()
            )));
        }
        for (j, cell) in cells.iter().enumerate() {
            let value: f64 = cell.trim().parse().map_err(|_| Error::CsvParse {
                path: display.clone(),
                row,
                column: headers[j].clone(),
                message: format!("cannot parse `{}` as a number", cell.trim()),
            })?;
            if !value.is_finite() {
                return Err(Error::CsvParse {
                    path: display.clone(),
                    row,
                    column: headers[j].clone(),
                    message: format!("non-finite value `{}`", cell.trim()),
                });
            }
            columns[j].push(value);
        }
    }
    if columns.iter().all(|c| c.is_empty()) {
        return Err(Error::Dataset(format!("{display}: no data rows")));
    }
    Ok(NumericTable { headers, columns })
}

/// Write a table as comma-separated text. Values use the shortest decimal
/// representation that round-trips the underlying double exactly.
pub fn write_table(table: &NumericTable, path: &Path) -> Result<()> {
    let mut out = String::new();
    out.push_str(&table.headers.join(","));
    out.push('\n');
    for row in 0..table.n_rows() {
        for (j, column) in table.columns.iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            let _ = write!(out, "{}", column[row]);
        }
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

/// Load a dataset from a CSV file, extracting the named target column.
pub fn load_csv(path: &Path, target: &str) -> Result<Dataset> {
    read_table(path)?.to_dataset(target)
}

/// Write a dataset as CSV with the target as the last column.
pub fn write_csv(dataset: &Dataset, target_name: &str, path: &Path) -> Result<()> {
    let mut headers = dataset.feature_names().to_vec();
    headers.push(target_name.to_string());
    let mut columns = dataset.columns().to_vec();
    columns.push(dataset.targets().to_vec());
    write_table(&NumericTable { headers, columns }, path)
}
