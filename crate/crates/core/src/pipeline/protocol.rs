//! Fold training, ladder prediction and per-video evaluation.

use std::collections::BTreeMap;

use rayon::prelude::*;

use super::dataset::FeatureTable;
use super::PipelineError;
use crate::evaluation::{evaluate_video, rq_curve_from_ladder, FoldPlan, VideoEvaluation};
use crate::ladder::{convex_hull, hull_ladder, ladder_from_predictions, BitrateLadder, PredictedCurve, QualityWindow, RqCurve};
use crate::regression::{plcc, ForestModel, Hyperparams};
use crate::types::{Resolution, RqPoint, RqRecord};

pub fn by_video(records: &[RqRecord]) -> BTreeMap<String, Vec<RqRecord>> {
    let mut out: BTreeMap<String, Vec<RqRecord>> = BTreeMap::new();
    for r in records {
        out.entry(r.point.job.video_id.clone()).or_default().push(r.clone());
    }
    out
}

pub fn inference_subset(records: &[RqRecord], crfs: &[i32]) -> Vec<RqRecord> {
    records
        .iter()
        .filter(|r| crfs.contains(&r.point.job.crf))
        .cloned()
        .collect()
}

pub fn hull_curve(records: &[RqRecord], window: QualityWindow) -> Result<RqCurve, PipelineError> {
    let points: Vec<RqPoint> = records.iter().map(|r| r.point.clone()).collect();
    Ok(convex_hull(&points, window)?)
}

/// Groups `(bitrate, predicted quality)` by resolution; records the
/// predictor rejects are dropped.
pub fn predicted_curves(records: &[RqRecord], predict: impl Fn(&RqRecord) -> Option<f64>) -> Vec<PredictedCurve> {
    let mut by_res: BTreeMap<Resolution, Vec<(f64, f64)>> = BTreeMap::new();
    for r in records {
        if let Some(q) = predict(r) {
            by_res.entry(r.point.resolution()).or_default().push((r.point.bitrate, q));
        }
    }
    by_res
        .into_iter()
        .map(|(resolution, points)| PredictedCurve { resolution, points })
        .collect()
}

/// One round's quality model with held-out correlations.
#[derive(Debug, Clone)]
pub struct FoldModel {
    pub round: usize,
    pub model: ForestModel,
    pub validation_plcc: Option<f64>,
    pub test_plcc: Option<f64>,
    pub test_plcc_by_resolution: BTreeMap<Resolution, f64>,
}

fn gather<'a>(records: &'a BTreeMap<String, Vec<RqRecord>>, ids: &[String]) -> Vec<&'a RqRecord> {
    ids.iter().filter_map(|id| records.get(id)).flatten().collect()
}

/// Trains one model per round on its train ids; correlations are computed
/// over every record of the validation and test ids.
pub fn train_quality_folds(
    table: &FeatureTable,
    records: &BTreeMap<String, Vec<RqRecord>>,
    plan: &FoldPlan,
    with_stats: bool,
    hp: &Hyperparams,
) -> Result<Vec<FoldModel>, PipelineError> {
    plan.rounds
        .iter()
        .enumerate()
        .map(|(i, round)| {
            let train = table.samples(gather(records, &round.train), with_stats);
            if train.len() < 2 {
                return Err(PipelineError::NoTrainingData(i));
            }
            let model = ForestModel::train(&train, hp)?;
            let score = |recs: &[&RqRecord]| -> Result<(Option<f64>, Vec<(Resolution, f64, f64)>), PipelineError> {
                let s = table.samples(recs.iter().copied(), with_stats);
                let pred = model.predict_many(&s.x)?;
                let rows: Vec<(Resolution, f64, f64)> = recs
                    .iter()
                    .filter(|r| table.row(r, with_stats).is_some())
                    .zip(pred.iter().zip(&s.y))
                    .map(|(r, (&p, &t))| (r.point.resolution(), t, p))
                    .collect();
                Ok((plcc(&s.y, &pred).ok(), rows))
            };
            let (validation_plcc, _) = score(&gather(records, &round.validation))?;
            let (test_plcc, rows) = score(&gather(records, &round.test))?;
            let mut per_res: BTreeMap<Resolution, (Vec<f64>, Vec<f64>)> = BTreeMap::new();
            for (r, t, p) in rows {
                let e = per_res.entry(r).or_default();
                e.0.push(t);
                e.1.push(p);
            }
            let test_plcc_by_resolution = per_res
                .into_iter()
                .filter_map(|(r, (t, p))| plcc(&t, &p).ok().map(|v| (r, v)))
                .collect();
            Ok(FoldModel {
                round: i,
                model,
                validation_plcc,
                test_plcc,
                test_plcc_by_resolution,
            })
        })
        .collect()
}

/// Ladders for every test video, each predicted by the model of the round
/// that held it out.
pub fn proposed_ladders(
    table: &FeatureTable,
    folds: &[FoldModel],
    plan: &FoldPlan,
    inference: &BTreeMap<String, Vec<RqRecord>>,
    with_stats: bool,
    steps: &[f64],
) -> BTreeMap<String, Result<BitrateLadder, PipelineError>> {
    let mut jobs: Vec<(&String, &FoldModel)> = Vec::new();
    for fold in folds {
        for id in &plan.rounds[fold.round].test {
            jobs.push((id, fold));
        }
    }
    jobs.par_iter()
        .map(|(id, fold)| {
            let out = (|| {
                let recs = inference.get(*id).ok_or_else(|| PipelineError::NoModel((*id).clone()))?;
                let curves = predicted_curves(recs, |r| {
                    table.row(r, with_stats).and_then(|row| fold.model.predict(&row).ok())
                });
                Ok(ladder_from_predictions(&curves, steps)?)
            })();
            ((*id).clone(), out)
        })
        .collect()
}

/// Scores `ladders` on each video's target-encoder records. The reference
/// curve is the one the hull ladder collects, so the hull scores zero
/// against itself. Videos without a ladder are evaluated with no method
/// curve.
pub fn evaluate_ladders(
    ladders: &BTreeMap<String, BitrateLadder>,
    target: &BTreeMap<String, Vec<RqRecord>>,
    fixed: &BitrateLadder,
    window: QualityWindow,
    steps: &[f64],
) -> BTreeMap<String, Result<VideoEvaluation, PipelineError>> {
    target
        .par_iter()
        .map(|(id, recs)| {
            let out = (|| {
                let points: Vec<RqPoint> = recs
                    .iter()
                    .map(|r| r.point.clone())
                    .filter(|p| window.contains(p.quality))
                    .collect();
                let hull = hull_curve(recs, window)?;
                let reference = rq_curve_from_ladder(&hull_ladder(&hull, steps)?, &points)?;
                let method = ladders.get(id).and_then(|l| rq_curve_from_ladder(l, &points).ok());
                let fixed_curve = rq_curve_from_ladder(fixed, &points).ok();
                Ok(evaluate_video(id, method.as_ref(), &reference, fixed_curve.as_ref()))
            })();
            (id.clone(), out)
        })
        .collect()
}
