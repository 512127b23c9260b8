//! Ladder and hull CSV files.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::PipelineError;
use crate::ladder::{BitrateLadder, LadderStep, RqCurve};
use crate::types::{EncoderSetting, EncodeJob, Resolution, RqPoint};

#[derive(Debug, Serialize, Deserialize)]
struct LadderRow {
    video_id: String,
    method: String,
    step_kbps: f64,
    width: u32,
    height: u32,
}

#[derive(Debug, Serialize, Deserialize)]
struct HullRow {
    video_id: String,
    width: u32,
    height: u32,
    crf: i32,
    bitrate_kbps: f64,
    vmaf: f64,
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> PipelineError + '_ {
    move |e| PipelineError::Invalid(format!("{}: {e}", path.display()))
}

fn create_parent(path: &Path) -> Result<(), PipelineError> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| PipelineError::Invalid(format!("{}: {e}", dir.display())))?;
    }
    Ok(())
}

/// Writes `video_id,method,step_kbps,width,height`, videos in key order.
pub fn write_ladders(path: &Path, method: &str, ladders: &BTreeMap<String, BitrateLadder>) -> Result<(), PipelineError> {
    create_parent(path)?;
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    for (id, l) in ladders {
        for s in &l.steps {
            w.serialize(LadderRow {
                video_id: id.clone(),
                method: method.to_string(),
                step_kbps: s.bitrate_kbps,
                width: s.resolution.width,
                height: s.resolution.height,
            })
            .map_err(csv_err(path))?;
        }
    }
    w.flush().map_err(|e| PipelineError::Invalid(e.to_string()))
}

/// Ladders keyed by video id, plus the method named in the file.
pub fn read_ladders(path: &Path) -> Result<(String, BTreeMap<String, BitrateLadder>), PipelineError> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err(path))?;
    let mut out: BTreeMap<String, BitrateLadder> = BTreeMap::new();
    let mut method = String::new();
    for row in r.deserialize::<LadderRow>() {
        let row = row.map_err(csv_err(path))?;
        if method.is_empty() {
            method = row.method.clone();
        }
        out.entry(row.video_id).or_insert(BitrateLadder { steps: Vec::new() }).steps.push(LadderStep {
            bitrate_kbps: row.step_kbps,
            resolution: Resolution::new(row.width, row.height),
        });
    }
    for l in out.values_mut() {
        l.steps.sort_by(|a, b| a.bitrate_kbps.total_cmp(&b.bitrate_kbps));
    }
    Ok((method, out))
}

pub fn write_hulls(path: &Path, hulls: &BTreeMap<String, RqCurve>) -> Result<(), PipelineError> {
    create_parent(path)?;
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    for (id, h) in hulls {
        for p in &h.points {
            w.serialize(HullRow {
                video_id: id.clone(),
                width: p.job.width,
                height: p.job.height,
                crf: p.job.crf,
                bitrate_kbps: p.bitrate,
                vmaf: p.quality,
            })
            .map_err(csv_err(path))?;
        }
    }
    w.flush().map_err(|e| PipelineError::Invalid(e.to_string()))
}

pub fn read_hulls(path: &Path, setting: &EncoderSetting) -> Result<BTreeMap<String, RqCurve>, PipelineError> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err(path))?;
    let mut out: BTreeMap<String, RqCurve> = BTreeMap::new();
    for row in r.deserialize::<HullRow>() {
        let row = row.map_err(csv_err(path))?;
        out.entry(row.video_id.clone()).or_insert(RqCurve { points: Vec::new() }).points.push(RqPoint {
            job: EncodeJob {
                video_id: row.video_id,
                codec: setting.codec,
                preset: setting.preset.clone(),
                width: row.width,
                height: row.height,
                crf: row.crf,
            },
            bitrate: row.bitrate_kbps,
            quality: row.vmaf,
        });
    }
    Ok(out)
}

/// File stem for an encoder setting, e.g. `x265_veryfast`.
pub fn setting_stem(setting: &EncoderSetting) -> String {
    format!("{}_{}", setting.codec, setting.preset)
}
