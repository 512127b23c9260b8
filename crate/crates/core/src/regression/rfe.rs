//! Recursive feature elimination by impurity importance.

use super::{ForestModel, Hyperparams, RegressionError, Samples};

/// Repeatedly trains a forest and drops the least important remaining
/// feature (ties drop the later column) until `target_count` remain.
/// Returns the surviving column indices in ascending order.
pub fn rfe_select(samples: &Samples, target_count: usize, hp: &Hyperparams) -> Result<Vec<usize>, RegressionError> {
    let dim = samples.dim();
    if dim <= target_count {
        return Err(RegressionError::NothingToEliminate {
            dim,
            target: target_count,
        });
    }
    let mut keep: Vec<usize> = (0..dim).collect();
    while keep.len() > target_count {
        let model = ForestModel::train(&samples.select(&keep), hp)?;
        let worst = model
            .importances
            .iter()
            .enumerate()
            .fold(0usize, |w, (i, &v)| if v <= model.importances[w] { i } else { w });
        keep.remove(worst);
    }
    Ok(keep)
}
