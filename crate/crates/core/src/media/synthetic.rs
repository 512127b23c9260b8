//! Deterministic stand-in for a real encoder and quality scorer.
//!
//! Bitrate follows `exp(a - c * crf)` per resolution and quality a logistic
//! curve in log-bitrate. Encodes produce small JSON artifacts instead of
//! bitstreams so whole pipelines run without external tools.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::encode::{EncodeOutput, Encoder};
use super::quality::QualityScorer;
use super::x265_log::render_x265_log;
use super::{MediaError, SourceRef};
use crate::types::{CompressionStats, EncodeJob, Resolution, RqPoint, RqRecord};

pub const ARTIFACT_EXT: &str = "synth.json";

/// Rate law and logistic quality curve of one resolution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolutionModel {
    pub resolution: Resolution,
    /// log-kbps at crf 0
    pub rate_a: f64,
    /// log-kbps lost per crf step
    pub rate_c: f64,
    pub q_max: f64,
    /// log-kbps
    pub midpoint: f64,
    /// per log-kbps
    pub slope: f64,
}

impl ResolutionModel {
    pub fn bitrate(&self, crf: i32) -> f64 {
        (self.rate_a - self.rate_c * f64::from(crf)).exp()
    }

    /// Noise-free quality at a bitrate.
    pub fn quality(&self, bitrate_kbps: f64) -> f64 {
        self.q_max / (1.0 + (-self.slope * (bitrate_kbps.ln() - self.midpoint)).exp())
    }
}

/// Analogues of per-frame-type compression statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatModel {
    /// QP of I, P, B frames relative to the crf.
    pub qp_offset: [f64; 3],
    /// Relative frame sizes of I, P, B frames.
    pub size_weight: [f64; 3],
    /// Frames of each type in a clip; a zero count marks the type absent.
    pub frame_counts: [usize; 3],
}

impl Default for StatModel {
    fn default() -> Self {
        Self {
            qp_offset: [-3.0, 0.0, 2.0],
            size_weight: [6.0, 2.0, 1.0],
            frame_counts: [1, 16, 47],
        }
    }
}

impl StatModel {
    pub fn stats(&self, crf: i32, bitrate_kbps: f64) -> CompressionStats {
        let total: usize = self.frame_counts.iter().sum();
        let norm: f64 = (0..3)
            .map(|t| self.frame_counts[t] as f64 / total as f64 * self.size_weight[t])
            .sum();
        let mut a = [CompressionStats::ABSENT; 6];
        for t in 0..3 {
            if self.frame_counts[t] == 0 {
                continue;
            }
            a[t] = (f64::from(crf) + self.qp_offset[t]).max(0.0);
            a[3 + t] = bitrate_kbps * self.size_weight[t] / norm;
        }
        CompressionStats::from_array(a)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticCodecParams {
    pub resolutions: Vec<ResolutionModel>,
    #[serde(default)]
    pub stats: StatModel,
    /// VMAF units; one offset is drawn per (video, resolution).
    pub noise_sd: f64,
    pub seed: u64,
}

impl SyntheticCodecParams {
    pub fn validate(&self) -> Result<(), MediaError> {
        let bad = |m: String| Err(MediaError::InvalidParams(m));
        if !(self.noise_sd >= 0.0 && self.noise_sd.is_finite()) {
            return bad(format!("noise_sd {}", self.noise_sd));
        }
        for m in &self.resolutions {
            if !(m.q_max > 0.0 && m.q_max <= 100.0) {
                return bad(format!("q_max {} at {}", m.q_max, m.resolution));
            }
            if !(m.slope > 0.0 && m.slope.is_finite()) {
                return bad(format!("slope {} at {}", m.slope, m.resolution));
            }
            if !(m.rate_c > 0.0 && m.rate_a.is_finite() && m.midpoint.is_finite()) {
                return bad(format!("rate law at {}", m.resolution));
            }
        }
        if self.stats.frame_counts.iter().sum::<usize>() == 0 {
            return bad("frame_counts are all zero".into());
        }
        Ok(())
    }

    pub fn model(&self, resolution: Resolution) -> Option<&ResolutionModel> {
        self.resolutions.iter().find(|m| m.resolution == resolution)
    }

    /// Quality offset shared by every crf of a (video, resolution).
    pub fn noise_offset(&self, video_id: &str, resolution: Resolution) -> f64 {
        if self.noise_sd == 0.0 {
            return 0.0;
        }
        use sha2::{Digest, Sha256};
        let digest = Sha256::digest(format!("{}\u{1f}{video_id}\u{1f}{resolution}", self.seed).as_bytes());
        let mut key = [0u8; 8];
        key.copy_from_slice(&digest[..8]);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(u64::from_le_bytes(key));
        Normal::new(0.0, self.noise_sd).expect("validated sd").sample(&mut rng)
    }
}

/// Bitrate, quality and statistics of one synthetic encode.
pub fn synth_codec(params: &SyntheticCodecParams, job: &EncodeJob) -> Result<RqRecord, MediaError> {
    let model = params
        .model(job.resolution())
        .ok_or(MediaError::InvalidResolution(job.resolution()))?;
    let bitrate = model.bitrate(job.crf);
    let quality = (model.quality(bitrate) + params.noise_offset(&job.video_id, job.resolution())).clamp(0.0, 100.0);
    Ok(RqRecord {
        point: RqPoint {
            job: job.clone(),
            bitrate,
            quality,
        },
        stats: params.stats.stats(job.crf, bitrate),
    })
}

/// On-disk stand-in for an encoded bitstream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthArtifact {
    pub record: RqRecord,
    pub frames: usize,
}

impl SynthArtifact {
    pub fn read(path: &Path) -> Result<Self, MediaError> {
        let text = std::fs::read_to_string(path).map_err(MediaError::io(path))?;
        serde_json::from_str(&text).map_err(|e| MediaError::ParseFailed(format!("{}: {e}", path.display())))
    }

    pub fn write(&self, path: &Path) -> Result<(), MediaError> {
        let text = serde_json::to_string(self).map_err(|e| MediaError::Store(e.to_string()))?;
        std::fs::write(path, text).map_err(MediaError::io(path))
    }
}

/// Encoder backed by per-video synthetic models.
#[derive(Debug, Clone, Default)]
pub struct SyntheticEncoder {
    pub models: BTreeMap<String, SyntheticCodecParams>,
}

impl SyntheticEncoder {
    pub fn new(models: BTreeMap<String, SyntheticCodecParams>) -> Result<Self, MediaError> {
        for p in models.values() {
            p.validate()?;
        }
        Ok(Self { models })
    }
}

impl Encoder for SyntheticEncoder {
    fn encode(&self, job: &EncodeJob, source: &SourceRef, out_dir: &Path) -> Result<EncodeOutput, MediaError> {
        let params = self
            .models
            .get(&job.video_id)
            .ok_or_else(|| MediaError::UnknownVideo(job.video_id.clone()))?;
        let frames = source
            .frame_count()
            .map_err(|e| MediaError::EncodeFailed(format!("cannot read source: {e}")))?;
        if frames == 0 {
            return Err(MediaError::EncodeFailed(format!("{} holds no frames", source.path.display())));
        }
        let record = synth_codec(params, job)?;
        let path: PathBuf = out_dir.join(format!("{}.{ARTIFACT_EXT}", job.cache_key()));
        let log = render_x265_log(&record.stats, params.stats.frame_counts);
        let out = EncodeOutput {
            path: path.clone(),
            bitrate_kbps: record.point.bitrate,
            stats: Some(record.stats),
            log,
        };
        SynthArtifact { record, frames }.write(&path)?;
        Ok(out)
    }
}

/// Scorer that reads the quality recorded in a synthetic artifact.
#[derive(Debug, Clone, Copy, Default)]
pub struct SyntheticScorer;

impl QualityScorer for SyntheticScorer {
    fn score(&self, reference: &SourceRef, distorted: &Path) -> Result<f64, MediaError> {
        let ref_frames = reference.frame_count()?;
        if distorted == reference.path {
            return Ok(100.0);
        }
        let artifact = SynthArtifact::read(distorted)?;
        if artifact.frames != ref_frames {
            return Err(MediaError::FrameMismatch {
                reference: ref_frames,
                distorted: artifact.frames,
            });
        }
        Ok(artifact.record.point.quality)
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::types::Codec;

    pub(crate) fn params(noise_sd: f64) -> SyntheticCodecParams {
        SyntheticCodecParams {
            resolutions: vec![
                ResolutionModel {
                    resolution: Resolution::P1080,
                    rate_a: 10.0,
                    rate_c: 0.12,
                    q_max: 97.0,
                    midpoint: 7.0,
                    slope: 1.3,
                },
                ResolutionModel {
                    resolution: Resolution::P540,
                    rate_a: 8.5,
                    rate_c: 0.12,
                    q_max: 85.0,
                    midpoint: 5.5,
                    slope: 1.3,
                },
            ],
            stats: StatModel::default(),
            noise_sd,
            seed: 7,
        }
    }

    pub(crate) fn job(res: Resolution, crf: i32) -> EncodeJob {
        EncodeJob {
            video_id: "v".into(),
            codec: Codec::Synthetic,
            preset: "default".into(),
            width: res.width,
            height: res.height,
            crf,
        }
    }

    #[test]
    fn lower_crf_is_better_and_larger() {
        let p = params(0.0);
        let a = synth_codec(&p, &job(Resolution::P1080, 20)).unwrap().point;
        let b = synth_codec(&p, &job(Resolution::P1080, 22)).unwrap().point;
        assert!(a.bitrate > b.bitrate && a.quality > b.quality);
    }

    #[test]
    fn evaluates_model_directly() {
        let p = params(0.0);
        let r = synth_codec(&p, &job(Resolution::P540, 30)).unwrap().point;
        let expected_rate = (8.5f64 - 0.12 * 30.0).exp();
        assert_eq!(r.bitrate, expected_rate);
        let expected_q = 85.0 / (1.0 + (-1.3 * (expected_rate.ln() - 5.5)).exp());
        assert!((r.quality - expected_q).abs() < 1e-12);
    }

    #[test]
    fn midpoint_gives_half_quality() {
        let m = &params(0.0).resolutions[0];
        assert!((m.quality(m.midpoint.exp()) - m.q_max / 2.0).abs() < 1e-9);
        assert!(m.quality(1e-30) < 1e-9);
    }

    #[test]
    fn same_job_is_bit_identical() {
        let p = params(2.0);
        let j = job(Resolution::P1080, 30);
        assert_eq!(synth_codec(&p, &j).unwrap(), synth_codec(&p, &j).unwrap());
    }

    #[test]
    fn unknown_resolution_is_rejected() {
        let p = params(0.0);
        assert!(matches!(
            synth_codec(&p, &job(Resolution::P2160, 30)),
            Err(MediaError::InvalidResolution(_))
        ));
    }

    #[test]
    fn invalid_params_are_rejected() {
        let mut p = params(0.0);
        p.resolutions[0].q_max = 120.0;
        assert!(p.validate().is_err());
        let mut p = params(-1.0);
        assert!(p.validate().is_err());
        p.noise_sd = 0.0;
        p.resolutions[1].slope = 0.0;
        assert!(p.validate().is_err());
    }

    #[test]
    fn per_type_rates_average_to_stream_rate() {
        let m = StatModel::default();
        let s = m.stats(30, 1000.0);
        let n: usize = m.frame_counts.iter().sum();
        let weighted = (s.br_i * 1.0 + s.br_p * 16.0 + s.br_b * 47.0) / n as f64;
        assert!((weighted - 1000.0).abs() < 1e-9);
        assert_eq!(s.qp_p, 30.0);
        let no_b = StatModel {
            frame_counts: [1, 63, 0],
            ..StatModel::default()
        };
        let s = no_b.stats(30, 1000.0);
        assert_eq!((s.qp_b, s.br_b), (-1.0, -1.0));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn monotone_in_crf(crf in 0i32..99, noise in 0.0f64..3.0, seed in any::<u64>()) {
                let mut p = params(noise);
                p.seed = seed;
                for res in [Resolution::P540, Resolution::P1080] {
                    let a = synth_codec(&p, &job(res, crf)).unwrap().point;
                    let b = synth_codec(&p, &job(res, crf + 1)).unwrap().point;
                    prop_assert!(a.bitrate > b.bitrate);
                    prop_assert!(a.quality >= b.quality);
                    prop_assert!((0.0..=100.0).contains(&b.quality));
                }
            }
        }
    }
}
