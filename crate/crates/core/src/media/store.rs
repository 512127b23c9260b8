//! Append-only CSV store of rate-quality records.

use std::fs::OpenOptions;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use super::MediaError;
use crate::types::{Codec, CompressionStats, EncodeJob, RqPoint, RqRecord};

pub const HEADER: &str = "video_id,codec,preset,width,height,crf,bitrate_kbps,vmaf,qp_i,qp_p,qp_b,br_i,br_p,br_b";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Row {
    video_id: String,
    codec: Codec,
    preset: String,
    width: u32,
    height: u32,
    crf: i32,
    bitrate_kbps: f64,
    vmaf: f64,
    qp_i: f64,
    qp_p: f64,
    qp_b: f64,
    br_i: f64,
    br_p: f64,
    br_b: f64,
}

impl From<&RqRecord> for Row {
    fn from(r: &RqRecord) -> Self {
        let j = &r.point.job;
        let s = &r.stats;
        Row {
            video_id: j.video_id.clone(),
            codec: j.codec,
            preset: j.preset.clone(),
            width: j.width,
            height: j.height,
            crf: j.crf,
            bitrate_kbps: r.point.bitrate,
            vmaf: r.point.quality,
            qp_i: s.qp_i,
            qp_p: s.qp_p,
            qp_b: s.qp_b,
            br_i: s.br_i,
            br_p: s.br_p,
            br_b: s.br_b,
        }
    }
}

impl From<Row> for RqRecord {
    fn from(r: Row) -> Self {
        RqRecord {
            point: RqPoint {
                job: EncodeJob {
                    video_id: r.video_id,
                    codec: r.codec,
                    preset: r.preset,
                    width: r.width,
                    height: r.height,
                    crf: r.crf,
                },
                bitrate: r.bitrate_kbps,
                quality: r.vmaf,
            },
            stats: CompressionStats::from_array([r.qp_i, r.qp_p, r.qp_b, r.br_i, r.br_p, r.br_b]),
        }
    }
}

/// Single-writer handle; each `append` writes whole rows under a lock.
#[derive(Debug)]
pub struct RqStore {
    path: PathBuf,
    lock: Mutex<()>,
}

impl RqStore {
    pub fn open(path: impl Into<PathBuf>) -> Self {
        Self {
            path: path.into(),
            lock: Mutex::new(()),
        }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn append(&self, records: &[RqRecord]) -> Result<(), MediaError> {
        let _guard = self.lock.lock().unwrap_or_else(|e| e.into_inner());
        let fresh = std::fs::metadata(&self.path).map(|m| m.len() == 0).unwrap_or(true);
        let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
        for r in records {
            writer.serialize(Row::from(r)).map_err(|e| MediaError::Store(e.to_string()))?;
        }
        let mut bytes = writer.into_inner().map_err(|e| MediaError::Store(e.to_string()))?;
        if fresh {
            let mut head = format!("{HEADER}\n").into_bytes();
            head.append(&mut bytes);
            bytes = head;
        }
        if let Some(dir) = self.path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).map_err(MediaError::io(dir))?;
        }
        let mut file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&self.path)
            .map_err(MediaError::io(&self.path))?;
        file.write_all(&bytes).map_err(MediaError::io(&self.path))?;
        file.flush().map_err(MediaError::io(&self.path))
    }
}

/// Reads every record. Later rows for the same job replace earlier ones.
pub fn read_rq_store(path: &Path) -> Result<Vec<RqRecord>, MediaError> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| MediaError::Store(format!("{}: {e}", path.display())))?;
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| MediaError::Store(e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    if header.join(",") != HEADER {
        return Err(MediaError::Store(format!("unexpected header in {}", path.display())));
    }
    let mut out: Vec<RqRecord> = Vec::new();
    let mut index = std::collections::HashMap::new();
    for row in reader.deserialize::<Row>() {
        let rec = RqRecord::from(row.map_err(|e| MediaError::Store(e.to_string()))?);
        match index.get(&rec.point.job) {
            Some(&i) => out[i] = rec,
            None => {
                index.insert(rec.point.job.clone(), out.len());
                out.push(rec);
            }
        }
    }
    Ok(out)
}
