//! Encode-grid planning and execution.

use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;

use super::probe::probe_frame_stats;
use super::x265_log::parse_x265_log;
use super::{EncodeCache, EncodeOutput, Encoder, MediaError, QualityScorer, RqStore, SourceRef};
use crate::types::{Codec, CompressionStats, EncodeJob, EncoderSetting, Resolution, RqPoint, RqRecord, STANDARD_RESOLUTIONS};

/// Jobs ordered by video (manifest order), resolution descending, crf
/// ascending. Repeated resolutions or crfs are planned once.
pub fn plan_encode_grid(
    videos: &[String],
    setting: &EncoderSetting,
    resolutions: &[Resolution],
    crfs: &[i32],
) -> Result<Vec<EncodeJob>, MediaError> {
    if videos.is_empty() {
        return Err(MediaError::EmptyManifest);
    }
    if resolutions.is_empty() {
        return Err(MediaError::EmptyGrid("resolutions"));
    }
    if crfs.is_empty() {
        return Err(MediaError::EmptyGrid("crfs"));
    }
    if let Some(r) = resolutions.iter().find(|r| !STANDARD_RESOLUTIONS.contains(r)) {
        return Err(MediaError::InvalidResolution(*r));
    }
    let (lo, hi) = setting.codec.crf_bounds();
    if let Some(&crf) = crfs.iter().find(|&&c| c < lo || c > hi) {
        return Err(MediaError::InvalidCrf {
            codec: setting.codec,
            crf,
        });
    }
    let res: BTreeSet<Resolution> = resolutions.iter().copied().collect();
    let crfs: BTreeSet<i32> = crfs.iter().copied().collect();
    let mut seen = BTreeSet::new();
    let mut jobs = Vec::with_capacity(videos.len() * res.len() * crfs.len());
    for v in videos {
        if !seen.insert(v) {
            continue;
        }
        for r in res.iter().rev() {
            for &crf in &crfs {
                jobs.push(EncodeJob {
                    video_id: v.clone(),
                    codec: setting.codec,
                    preset: setting.preset.clone(),
                    width: r.width,
                    height: r.height,
                    crf,
                });
            }
        }
    }
    Ok(jobs)
}

#[derive(Debug)]
pub struct GridOutcome {
    pub job: EncodeJob,
    pub result: Result<RqRecord, MediaError>,
    pub cached: bool,
}

/// Executes jobs over a worker pool, reusing cached cells.
pub struct GridRunner<'a> {
    pub encoder: &'a dyn Encoder,
    pub scorer: &'a dyn QualityScorer,
    pub cache: &'a EncodeCache,
    pub store: Option<&'a RqStore>,
    pub ffprobe: String,
    pub workers: usize,
}

fn stats_for(job: &EncodeJob, out: &EncodeOutput, ffprobe: &str, fps: f64) -> Result<CompressionStats, MediaError> {
    if let Some(s) = out.stats {
        return Ok(s);
    }
    if job.codec == Codec::X265 {
        return parse_x265_log(&out.log);
    }
    probe_frame_stats(ffprobe, &out.path, Some(fps))
}

impl GridRunner<'_> {
    fn run_one(&self, job: &EncodeJob, source: Option<&SourceRef>) -> Result<RqRecord, MediaError> {
        let source = source.ok_or_else(|| MediaError::UnknownVideo(job.video_id.clone()))?;
        let out = self.encoder.encode(job, source, self.cache.dir())?;
        let log_path = self.cache.log_path(job);
        std::fs::write(&log_path, &out.log).map_err(MediaError::io(&log_path))?;
        let quality = self.scorer.score(source, &out.path)?;
        let stats = stats_for(job, &out, &self.ffprobe, source.fps).unwrap_or_else(|e| {
            log::warn!("{}: no compression statistics ({e})", job.cache_key());
            CompressionStats::absent()
        });
        let record = RqRecord {
            point: RqPoint {
                job: job.clone(),
                bitrate: out.bitrate_kbps,
                quality,
            },
            stats,
        };
        self.cache.put(&record)?;
        Ok(record)
    }

    /// Outcomes in job order. `on_done` sees each outcome as it completes.
    pub fn run(
        &self,
        jobs: &[EncodeJob],
        sources: &HashMap<String, SourceRef>,
        on_done: &(dyn Fn(&GridOutcome) + Sync),
    ) -> Result<Vec<GridOutcome>, MediaError> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.workers.max(1))
            .build()
            .map_err(|e| MediaError::Store(e.to_string()))?;
        let outcomes: Vec<GridOutcome> = pool.install(|| {
            jobs.par_iter()
                .map(|job| {
                    let outcome = match self.cache.get(job) {
                        Some(rec) => GridOutcome {
                            job: job.clone(),
                            result: Ok(rec),
                            cached: true,
                        },
                        None => {
                            let result = self.run_one(job, sources.get(&job.video_id));
                            if let (Ok(rec), Some(store)) = (&result, self.store) {
                                if let Err(e) = store.append(std::slice::from_ref(rec)) {
                                    log::error!("{}: {e}", job.cache_key());
                                }
                            }
                            GridOutcome {
                                job: job.clone(),
                                result,
                                cached: false,
                            }
                        }
                    };
                    on_done(&outcome);
                    outcome
                })
                .collect()
        });
        Ok(outcomes)
    }
}

/// Convenience wrapper around [`GridRunner::run`].
pub fn run_grid(
    runner: &GridRunner<'_>,
    jobs: &[EncodeJob],
    sources: &HashMap<String, SourceRef>,
) -> Result<Vec<GridOutcome>, MediaError> {
    runner.run(jobs, sources, &|_| {})
}
