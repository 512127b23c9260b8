//! Bjøntegaard metrics, ladder-to-curve reconstruction, f75, fold plans,
//! CRF mapping and cohort reports.

pub mod bd;
pub mod crfmap;
pub mod curve;
pub mod f75;
pub mod kfold;
pub mod report;

pub use bd::{bd_quality, bd_quality_with, bd_rate, bd_rate_with, BdDirection, BdReport};
pub use crfmap::{crf_map, CrfMap};
pub use curve::rq_curve_from_ladder;
pub use f75::{f75, GainPair, VideoGains};
pub use kfold::{kfold_split, FoldPlan, Round};
pub use report::{evaluate_method, evaluate_video, write_report_csv, ReportRow, VideoEvaluation};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum EvalError {
    #[error("curves do not overlap")]
    NoOverlap,
    #[error("no rate-quality points collected for the ladder")]
    EmptyCurve,
    #[error("no samples to aggregate")]
    EmptyInput,
    #[error("{n} videos cannot fill {k} folds")]
    TooFewVideos { n: usize, k: usize },
    #[error("the two point sets share no video")]
    NoCommonVideos,
}
