//! Experiment protocol: datasets, fold training, ladder prediction and
//! evaluation, plus the synthetic cohort used for end-to-end runs.

pub mod cohort;
pub mod crossover;
pub mod dataset;
pub mod files;
pub mod protocol;

pub use cohort::{synthetic_cohort, CohortSpec, CohortVideo};
pub use dataset::FeatureTable;
pub use protocol::{
    by_video, evaluate_ladders, hull_curve, inference_subset, predicted_curves, proposed_ladders,
    train_quality_folds, FoldModel,
};

use crate::evaluation::EvalError;
use crate::ladder::LadderError;
use crate::regression::RegressionError;

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error(transparent)]
    Regression(#[from] RegressionError),
    #[error(transparent)]
    Ladder(#[from] LadderError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("no training samples for round {0}")]
    NoTrainingData(usize),
    #[error("video `{0}` has no fold model")]
    NoModel(String),
    #[error("{0}")]
    Invalid(String),
}
