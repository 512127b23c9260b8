//! Seeded k-fold plans with a 90/10 train/validation split per round.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::EvalError;

pub const VALIDATION_FRACTION: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Round {
    pub test: Vec<String>,
    pub train: Vec<String>,
    pub validation: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub folds: Vec<Vec<String>>,
    pub rounds: Vec<Round>,
}

/// Shuffles `ids` with `seed`, deals them into `k` folds (the first `n % k`
/// folds get one extra id) and builds one round per held-out fold.
pub fn kfold_split(ids: &[String], k: usize, seed: u64) -> Result<FoldPlan, EvalError> {
    if k == 0 || ids.len() < k {
        return Err(EvalError::TooFewVideos { n: ids.len(), k });
    }
    let mut shuffled = ids.to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    shuffled.shuffle(&mut rng);

    let (base, extra) = (ids.len() / k, ids.len() % k);
    let mut folds = Vec::with_capacity(k);
    let mut start = 0;
    for f in 0..k {
        let len = base + usize::from(f < extra);
        folds.push(shuffled[start..start + len].to_vec());
        start += len;
    }

    let rounds = (0..k)
        .map(|t| {
            let mut rest: Vec<String> = folds
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != t)
                .flat_map(|(_, f)| f.iter().cloned())
                .collect();
            let mut round_rng = ChaCha8Rng::seed_from_u64(seed);
            round_rng.set_stream(t as u64 + 1);
            rest.shuffle(&mut round_rng);
            let n_val = (rest.len() as f64 * VALIDATION_FRACTION).round() as usize;
            let validation = rest.split_off(rest.len() - n_val);
            Round {
                test: folds[t].clone(),
                train: rest,
                validation,
            }
        })
        .collect();
    Ok(FoldPlan { folds, rounds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn ids(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("v{i:03}")).collect()
    }

    #[test]
    fn ten_ids_five_folds() {
        let plan = kfold_split(&ids(10), 5, 1).unwrap();
        assert!(plan.folds.iter().all(|f| f.len() == 2));
        let tested: Vec<&String> = plan.rounds.iter().flat_map(|r| &r.test).collect();
        assert_eq!(tested.len(), 10);
        assert_eq!(tested.iter().collect::<HashSet<_>>().len(), 10);
    }

    #[test]
    fn uneven_fold_sizes() {
        let plan = kfold_split(&ids(217), 5, 9).unwrap();
        let sizes: Vec<usize> = plan.folds.iter().map(Vec::len).collect();
        assert_eq!(sizes, vec![44, 44, 43, 43, 43]);
        for r in &plan.rounds {
            let train: HashSet<_> = r.train.iter().collect();
            assert!(r.test.iter().all(|t| !train.contains(t)));
            assert!(r.validation.iter().all(|t| !train.contains(t)));
            assert_eq!(r.train.len() + r.validation.len() + r.test.len(), 217);
        }
    }

    #[test]
    fn deterministic_and_too_small() {
        assert_eq!(kfold_split(&ids(30), 5, 3).unwrap(), kfold_split(&ids(30), 5, 3).unwrap());
        assert_ne!(kfold_split(&ids(30), 5, 3).unwrap(), kfold_split(&ids(30), 5, 4).unwrap());
        assert_eq!(kfold_split(&ids(4), 5, 0).unwrap_err(), EvalError::TooFewVideos { n: 4, k: 5 });
    }
}
