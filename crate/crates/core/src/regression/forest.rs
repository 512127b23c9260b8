//! Extra-Trees ensemble.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::tree::{GrowParams, Tree};
use super::RegressionError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Hyperparams {
    pub n_trees: usize,
    pub min_samples_leaf: usize,
    /// Fraction of features drawn as split candidates at each node.
    pub max_features: f64,
    pub seed: u64,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Self {
            n_trees: 100,
            min_samples_leaf: 2,
            max_features: 1.0,
            seed: 0,
        }
    }
}

/// Training matrix with named columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Samples {
    pub names: Vec<String>,
    pub x: Vec<Vec<f64>>,
    pub y: Vec<f64>,
}

impl Samples {
    pub fn new(names: Vec<String>, x: Vec<Vec<f64>>, y: Vec<f64>) -> Self {
        assert_eq!(x.len(), y.len());
        Self { names, x, y }
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    /// Keeps only the columns in `cols`, in that order.
    pub fn select(&self, cols: &[usize]) -> Samples {
        Samples {
            names: cols.iter().map(|&c| self.names[c].clone()).collect(),
            x: self.x.iter().map(|r| cols.iter().map(|&c| r[c]).collect()).collect(),
            y: self.y.clone(),
        }
    }
}

/// Hex SHA-256 of the ordered feature names.
pub fn schema_hash(names: &[String]) -> String {
    let mut h = Sha256::new();
    for n in names {
        h.update(n.as_bytes());
        h.update([0u8]);
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    pub hyperparams: Hyperparams,
    pub feature_names: Vec<String>,
    pub schema_hash: String,
    pub target_range: (f64, f64),
    /// Total impurity decrease per feature, normalized to sum to 1.
    pub importances: Vec<f64>,
    pub trees: Vec<Tree>,
}

fn row_cmp(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(std::cmp::Ordering::Equal)
}

impl ForestModel {
    pub fn train(samples: &Samples, hp: &Hyperparams) -> Result<Self, RegressionError> {
        if hp.n_trees == 0 {
            return Err(RegressionError::NoTrees);
        }
        let n = samples.len();
        if n < 2 {
            return Err(RegressionError::TooFewSamples(n));
        }
        if let Some(i) = samples
            .x
            .iter()
            .zip(&samples.y)
            .position(|(r, y)| !y.is_finite() || r.iter().any(|v| !v.is_finite()))
        {
            return Err(RegressionError::NonFinite(i));
        }
        let d = samples.dim();
        // canonical row order makes the model independent of input order
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| row_cmp(&samples.x[a], &samples.x[b]).then(samples.y[a].total_cmp(&samples.y[b])));
        let x: Vec<Vec<f64>> = order.iter().map(|&i| samples.x[i].clone()).collect();
        let y: Vec<f64> = order.iter().map(|&i| samples.y[i]).collect();

        let params = GrowParams {
            min_samples_leaf: hp.min_samples_leaf.max(1),
            n_candidates: ((hp.max_features * d as f64).round() as usize).clamp(1, d.max(1)),
        };
        let grown: Vec<(Tree, Vec<f64>)> = (0..hp.n_trees)
            .into_par_iter()
            .map(|t| {
                let mut rng = ChaCha8Rng::seed_from_u64(hp.seed);
                rng.set_stream(t as u64);
                let mut imp = vec![0.0; d];
                let tree = Tree::grow(&x, &y, (0..n).collect(), &params, &mut rng, &mut imp);
                (tree, imp)
            })
            .collect();
        let mut importances = vec![0.0; d];
        for (_, imp) in &grown {
            for (a, b) in importances.iter_mut().zip(imp) {
                *a += b;
            }
        }
        let total: f64 = importances.iter().sum();
        if total > 0.0 {
            importances.iter_mut().for_each(|v| *v /= total);
        }
        let (lo, hi) = y
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        Ok(ForestModel {
            hyperparams: *hp,
            feature_names: samples.names.clone(),
            schema_hash: schema_hash(&samples.names),
            target_range: (lo, hi),
            importances,
            trees: grown.into_iter().map(|(t, _)| t).collect(),
        })
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    /// Errors unless `names` hash to this model's schema.
    pub fn check_schema(&self, names: &[String]) -> Result<(), RegressionError> {
        let found = schema_hash(names);
        if found != self.schema_hash {
            return Err(RegressionError::SchemaMismatch {
                expected: self.schema_hash.clone(),
                found,
            });
        }
        Ok(())
    }

    /// Mean of the per-tree leaf values.
    pub fn predict(&self, row: &[f64]) -> Result<f64, RegressionError> {
        if row.len() != self.n_features() {
            return Err(RegressionError::SchemaMismatch {
                expected: format!("{} features", self.n_features()),
                found: format!("{} features", row.len()),
            });
        }
        let preds: Vec<f64> = self.trees.iter().map(|t| t.predict(row)).collect();
        let Some(&first) = preds.first() else {
            return Err(RegressionError::NoTrees);
        };
        Ok(first + preds.iter().map(|p| p - first).sum::<f64>() / preds.len() as f64)
    }

    pub fn predict_many(&self, rows: &[Vec<f64>]) -> Result<Vec<f64>, RegressionError> {
        rows.par_iter().map(|r| self.predict(r)).collect()
    }
}
