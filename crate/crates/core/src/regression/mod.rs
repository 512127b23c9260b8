//! Extra-Trees regression, recursive feature elimination and correlation.

pub mod forest;
pub mod io;
pub mod metrics;
pub mod rfe;
pub mod tree;

pub use forest::{schema_hash, ForestModel, Hyperparams, Samples};
pub use io::{load_model, save_model, FORMAT_VERSION};
pub use metrics::{plcc, r_squared};
pub use rfe::rfe_select;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum RegressionError {
    #[error("need at least two samples, got {0}")]
    TooFewSamples(usize),
    #[error("feature schema does not match the model ({expected} vs {found})")]
    SchemaMismatch { expected: String, found: String },
    #[error("inputs have zero variance")]
    DegenerateInput,
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("{dim} features cannot be reduced to {target}")]
    NothingToEliminate { dim: usize, target: usize },
    #[error("model load failed: {0}")]
    ModelLoadFailed(String),
    #[error("non-finite feature value in sample {0}")]
    NonFinite(usize),
    #[error("a forest needs at least one tree")]
    NoTrees,
}
