//! Content-addressed cache of finished encodes.

use std::path::{Path, PathBuf};

use super::MediaError;
use crate::types::{EncodeJob, RqRecord};

#[derive(Debug, Clone)]
pub struct EncodeCache {
    dir: PathBuf,
}

impl EncodeCache {
    pub fn new(dir: impl Into<PathBuf>) -> Result<Self, MediaError> {
        let dir = dir.into();
        std::fs::create_dir_all(&dir).map_err(MediaError::io(&dir))?;
        Ok(Self { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn record_path(&self, job: &EncodeJob) -> PathBuf {
        self.dir.join(format!("{}.rq.json", job.cache_key()))
    }

    pub fn log_path(&self, job: &EncodeJob) -> PathBuf {
        self.dir.join(format!("{}.log", job.cache_key()))
    }

    /// The cached record, if present and written for this exact job.
    pub fn get(&self, job: &EncodeJob) -> Option<RqRecord> {
        let text = std::fs::read_to_string(self.record_path(job)).ok()?;
        let rec: RqRecord = serde_json::from_str(&text).ok()?;
        (rec.point.job == *job).then_some(rec)
    }

    pub fn put(&self, record: &RqRecord) -> Result<(), MediaError> {
        let path = self.record_path(&record.point.job);
        let tmp = path.with_extension("tmp");
        let text = serde_json::to_string(record).map_err(|e| MediaError::Store(e.to_string()))?;
        std::fs::write(&tmp, text).map_err(MediaError::io(&tmp))?;
        std::fs::rename(&tmp, &path).map_err(MediaError::io(&path))
    }
}
