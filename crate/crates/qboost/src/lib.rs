//! Newton-boosted regression trees with a pluggable second-order objective.
//!
//! The flagship objective is a Huber-smoothed quantile (pinball) loss: the
//! absolute-value kink of the pinball loss is replaced by the Huber norm so
//! that the loss has finite first and second derivatives everywhere, which is
//! what the second-order (Newton) boosting step requires. Training one model
//! at a low quantile and one at a high quantile yields per-row prediction
//! intervals, evaluated here with coverage (PICP), normalized width (PINAW),
//! and the combined coverage-width criterion (CWC).
//!
//! Crate layout:
//!
//! * [`objective`] — loss functions and their gradient/hessian statistics
//! * [`booster`] — exact greedy tree growing, training loop, model (de)serialization
//! * [`metrics`] — interval and point-prediction quality measures
//! * [`data`] — dataset container, CSV ingestion, splitting, toy-data simulator
//! * [`experiment`] — end-to-end paired-quantile experiment runner

pub mod booster;
pub mod data;
pub mod error;
pub mod experiment;
pub mod metrics;
pub mod objective;

pub use booster::{train, Ensemble, TrainConfig, TrainResult, TreeNode};
pub use data::{load_csv, simulate, train_test_split, Dataset, NumericTable, SimulateParams};
pub use error::{Error, Result};
pub use metrics::IntervalReport;
pub use objective::{GradHess, Objective, QuantileHuberParams};
