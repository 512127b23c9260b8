//! CSV feature store: `video_id,set_id,<feature names...>`, one feature set
//! per file.

use std::path::Path;

use super::{FeatureSetId, FeatureVector};

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("feature store is malformed: {0}")]
    Malformed(String),
}

/// Features of one source video.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRow {
    pub video_id: String,
    pub features: FeatureVector,
}

pub fn write_features(path: &Path, rows: &[FeatureRow]) -> Result<(), StoreError> {
    let Some(first) = rows.first() else {
        return Err(StoreError::Malformed("no rows to write".into()));
    };
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["video_id".to_string(), "set_id".to_string()];
    header.extend(first.features.names.iter().cloned());
    w.write_record(&header)?;
    for r in rows {
        if r.features.names != first.features.names || r.features.set_id != first.features.set_id {
            return Err(StoreError::Malformed(format!(
                "row {} has a different feature layout",
                r.video_id
            )));
        }
        let mut rec = vec![r.video_id.clone(), r.features.set_id.to_string()];
        rec.extend(r.features.values.iter().map(|v| v.to_string()));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_features(path: &Path) -> Result<Vec<FeatureRow>, StoreError> {
    let mut r = csv::Reader::from_path(path)?;
    let header = r.headers()?.clone();
    if header.len() < 3 || &header[0] != "video_id" || &header[1] != "set_id" {
        return Err(StoreError::Malformed("header must start with video_id,set_id".into()));
    }
    let names: Vec<String> = header.iter().skip(2).map(str::to_string).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let set_id: FeatureSetId = rec[1].parse().map_err(StoreError::Malformed)?;
        let values = rec
            .iter()
            .skip(2)
            .map(|s| s.parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| StoreError::Malformed(e.to_string()))?;
        rows.push(FeatureRow {
            video_id: rec[0].to_string(),
            features: FeatureVector::new(set_id, names.clone(), values),
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.csv");
        let rows: Vec<FeatureRow> = (0..3)
            .map(|i| FeatureRow {
                video_id: format!("v{i}"),
                features: FeatureVector::new(
                    FeatureSetId::Llf1,
                    vec!["a".into(), "b".into()],
                    vec![0.1 * i as f64 + 1e-17, -1.0 / 3.0],
                ),
            })
            .collect();
        write_features(&path, &rows).unwrap();
        assert_eq!(read_features(&path).unwrap(), rows);
    }

    #[test]
    fn mixed_layouts_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let a = FeatureRow {
            video_id: "a".into(),
            features: FeatureVector::new(FeatureSetId::Llf1, vec!["x".into()], vec![1.0]),
        };
        let mut b = a.clone();
        b.features.set_id = FeatureSetId::Viff;
        assert!(write_features(&dir.path().join("f.csv"), &[a, b]).is_err());
    }
}
