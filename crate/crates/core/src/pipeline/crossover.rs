//! Cross-over bitrate baseline: per-pair regressors on source features with
//! a cascade from the highest resolution pair downwards.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::protocol::predicted_curves;
use super::PipelineError;
use crate::ladder::baselines::ascending_resolutions;
use crate::ladder::{crossover_bitrates, crossover_ladder, top_bottom_correction, BitrateLadder};
use crate::regression::{rfe_select, ForestModel, Hyperparams, Samples};
use crate::types::RqRecord;

pub const SELECTED_FEATURES: usize = 9;

/// Measured cross-overs (kbps) from one video's full encode grid.
pub fn true_crossovers(records: &[RqRecord]) -> Option<Vec<f64>> {
    let curves = predicted_curves(records, |r| Some(r.point.quality));
    if curves.len() != ascending_resolutions().len() {
        return None;
    }
    crossover_bitrates(&curves)
}

/// One model per adjacent pair, `pairs[k]` switching from the k-th to the
/// (k+1)-th ascending resolution.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairModel {
    /// Indices into the source feature vector.
    pub selected: Vec<usize>,
    pub model: ForestModel,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CrossoverModel {
    pub pairs: Vec<PairModel>,
}

fn pair_row(features: &[f64], selected: &[usize], higher: &[f64]) -> Vec<f64> {
    selected.iter().map(|&i| features[i]).chain(higher.iter().copied()).collect()
}

impl CrossoverModel {
    /// `data` maps video id to (source features, measured cross-overs).
    /// Higher-pair inputs use measured values in training.
    pub fn train(
        feature_names: &[String],
        data: &BTreeMap<String, (Vec<f64>, Vec<f64>)>,
        hp: &Hyperparams,
    ) -> Result<Self, PipelineError> {
        let n_pairs = ascending_resolutions().len() - 1;
        if data.values().any(|(f, c)| f.len() != feature_names.len() || c.len() != n_pairs) {
            return Err(PipelineError::Invalid("cross-over training rows have inconsistent shapes".into()));
        }
        let mut pairs: Vec<Option<PairModel>> = vec![None; n_pairs];
        for k in (0..n_pairs).rev() {
            let y: Vec<f64> = data.values().map(|(_, c)| c[k].log10()).collect();
            let base = Samples::new(
                feature_names.to_vec(),
                data.values().map(|(f, _)| f.clone()).collect(),
                y.clone(),
            );
            let selected = if base.dim() > SELECTED_FEATURES {
                rfe_select(&base, SELECTED_FEATURES, hp)?
            } else {
                (0..base.dim()).collect()
            };
            let mut names: Vec<String> = selected.iter().map(|&i| feature_names[i].clone()).collect();
            names.extend((k + 1..n_pairs).map(|j| format!("log10_crossover_{j}")));
            let x: Vec<Vec<f64>> = data
                .values()
                .map(|(f, c)| {
                    let higher: Vec<f64> = c[k + 1..].iter().map(|v| v.log10()).collect();
                    pair_row(f, &selected, &higher)
                })
                .collect();
            let model = ForestModel::train(&Samples::new(names, x, y), hp)?;
            pairs[k] = Some(PairModel { selected, model });
        }
        Ok(Self {
            pairs: pairs.into_iter().map(|p| p.expect("trained")).collect(),
        })
    }

    /// Predicted cross-overs in kbps, ascending pair order.
    pub fn predict(&self, features: &[f64]) -> Result<Vec<f64>, PipelineError> {
        let n = self.pairs.len();
        let mut logs = vec![0.0; n];
        for k in (0..n).rev() {
            let p = &self.pairs[k];
            logs[k] = p.model.predict(&pair_row(features, &p.selected, &logs[k + 1..]))?;
        }
        Ok(logs.into_iter().map(|l| 10f64.powf(l)).collect())
    }

    pub fn ladder(&self, features: &[f64], steps: &[f64]) -> Result<BitrateLadder, PipelineError> {
        let c = self.predict(features)?;
        Ok(top_bottom_correction(&crossover_ladder(&c, &ascending_resolutions(), steps)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::cohort::{feature_names, synthetic_cohort, CohortSpec};
    use crate::pipeline::protocol::by_video;
    use crate::pipeline::protocol::tests::cohort_records;

    #[test]
    fn measured_crossovers_follow_the_family() {
        let spec = CohortSpec {
            n_videos: 5,
            ..CohortSpec::default()
        };
        let (_, recs) = cohort_records(&spec);
        for (v, (_, r)) in synthetic_cohort(&spec).iter().zip(by_video(&recs)) {
            let c = true_crossovers(&r).unwrap();
            for k in 0..4 {
                // linear interpolation between grid points, within a crf step
                assert!((c[k].ln() - v.crossovers[k].ln()).abs() < 0.2, "{} {k}: {} vs {}", v.video_id, c[k], v.crossovers[k]);
            }
        }
    }

    #[test]
    fn cascade_predicts_monotone_ladders() {
        let spec = CohortSpec {
            n_videos: 20,
            ..CohortSpec::default()
        };
        let (table, recs) = cohort_records(&spec);
        let data: BTreeMap<String, (Vec<f64>, Vec<f64>)> = by_video(&recs)
            .into_iter()
            .map(|(id, r)| (id.clone(), (table.rows[&id].clone(), true_crossovers(&r).unwrap())))
            .collect();
        let hp = Hyperparams {
            n_trees: 10,
            ..Hyperparams::default()
        };
        let m = CrossoverModel::train(&feature_names(), &data, &hp).unwrap();
        assert_eq!(m.pairs.len(), 4);
        assert_eq!(m.pairs[3].selected.len(), SELECTED_FEATURES);
        assert_eq!(m.pairs[0].model.feature_names.len(), SELECTED_FEATURES + 3);
        let (f, c) = data.values().next().unwrap();
        let p = m.predict(f).unwrap();
        for k in 0..4 {
            assert!((p[k].log10() - c[k].log10()).abs() < 0.5);
        }
        assert!(m.ladder(f, &crate::ladder::STEPS_KBPS).unwrap().is_monotone());
    }
}
