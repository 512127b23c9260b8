//! JSON model files.
//!
//! Layout: `{ "format_version": u32, "model": ForestModel }` where the model
//! carries hyperparameters, ordered feature names, their schema hash, the
//! training target range, importances and the trees as flat node arrays
//! (`{"kind": "split", feature, threshold, left, right}` or
//! `{"kind": "leaf", value}`, root at index 0).

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{ForestModel, RegressionError};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Serialize)]
struct FileOut<'a> {
    format_version: u32,
    model: &'a ForestModel,
}

#[derive(Deserialize)]
struct Header {
    format_version: u32,
}

#[derive(Deserialize)]
struct FileIn {
    model: ForestModel,
}

pub fn to_json(model: &ForestModel) -> String {
    serde_json::to_string(&FileOut {
        format_version: FORMAT_VERSION,
        model,
    })
    .expect("model serializes")
}

pub fn from_json(text: &str) -> Result<ForestModel, RegressionError> {
    let header: Header = serde_json::from_str(text).map_err(|e| RegressionError::ModelLoadFailed(e.to_string()))?;
    if header.format_version != FORMAT_VERSION {
        return Err(RegressionError::ModelLoadFailed(format!(
            "unsupported format version {} (expected {FORMAT_VERSION})",
            header.format_version
        )));
    }
    let file: FileIn = serde_json::from_str(text).map_err(|e| RegressionError::ModelLoadFailed(e.to_string()))?;
    Ok(file.model)
}

pub fn save_model(model: &ForestModel, path: &Path) -> std::io::Result<()> {
    std::fs::write(path, to_json(model))
}

pub fn load_model(path: &Path) -> Result<ForestModel, RegressionError> {
    let text = std::fs::read_to_string(path).map_err(|e| RegressionError::ModelLoadFailed(e.to_string()))?;
    from_json(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regression::{Hyperparams, Samples};
    use rand::{Rng, SeedableRng};

    fn model() -> ForestModel {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        let x: Vec<Vec<f64>> = (0..60).map(|_| (0..3).map(|_| rng.random::<f64>()).collect()).collect();
        let y = x.iter().map(|r| r[0].sin() + r[1] / 3.0).collect();
        let s = Samples::new(vec!["a".into(), "b".into(), "c".into()], x, y);
        ForestModel::train(
            &s,
            &Hyperparams {
                n_trees: 10,
                ..Hyperparams::default()
            },
        )
        .unwrap()
    }

    #[test]
    fn round_trip_predicts_identically() {
        let m = model();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.json");
        save_model(&m, &p).unwrap();
        let back = load_model(&p).unwrap();
        assert_eq!(back, m);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let r: Vec<f64> = (0..3).map(|_| rng.random::<f64>() * 2.0 - 0.5).collect();
            assert_eq!(m.predict(&r).unwrap().to_bits(), back.predict(&r).unwrap().to_bits());
        }
    }

    #[test]
    fn truncated_and_wrong_version() {
        let text = to_json(&model());
        assert!(matches!(
            from_json(&text[..text.len() / 2]),
            Err(RegressionError::ModelLoadFailed(_))
        ));
        let bumped = text.replacen("\"format_version\":1", "\"format_version\":99", 1);
        match from_json(&bumped) {
            Err(RegressionError::ModelLoadFailed(msg)) => assert!(msg.contains("version")),
            other => panic!("{other:?}"),
        }
    }
}
