//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter was outside its mathematical domain.
    #[error("parameter `{name}` out of domain: {message}")]
    ParameterDomain { name: &'static str, message: String },

    /// A leaf's hessian sum plus lambda was not positive, so the optimal
    /// weight -G/(H+lambda) is undefined.
    #[error("degenerate leaf: hessian sum {hess_sum} + lambda {lambda} is not positive")]
    DegenerateLeaf { hess_sum: f64, lambda: f64 },

    /// Structural problem with a dataset (empty, ragged, non-finite values).
    #[error("dataset error: {0}")]
    Dataset(String),

    /// The requested target column does not exist in the file.
    #[error("target column `{target}` not found; available columns: {}", available.join(", "))]
    MissingTargetColumn {
        target: String,
        available: Vec<String>,
    },

    /// A cell failed to parse. Rows are 1-based and count the header.
    #[error("{path}: row {row}, column `{column}`: {message}")]
    CsvParse {
        path: String,
        row: usize,
        column: String,
        message: String,
    },

    /// Prediction-time features do not match the schema the model was trained on.
    #[error("feature schema mismatch: model expects [{}], data has [{}]", expected.join(", "), found.join(", "))]
    SchemaMismatch {
        expected: Vec<String>,
        found: Vec<String>,
    },

    /// A serialized model could not be read back.
    #[error("model file error: {0}")]
    ModelFormat(String),

    /// An experiment spec file could not be parsed.
    #[error("experiment spec error: {0}")]
    SpecFormat(String),

    /// An experiment stage failed; wraps the underlying error with the stage name.
    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(name: &'static str, message: impl Into<String>) -> Self {
        Error::ParameterDomain {
            name,
            message: message.into(),
        }
    }

    /// Label this error with the experiment stage it occurred in.
    pub fn stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
