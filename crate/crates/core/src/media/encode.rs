//! Transcoder invocation.

use std::path::{Path, PathBuf};
use std::process::Command;

use super::{excerpt, find_tool, MediaError, SourceRef};
use crate::types::{CompressionStats, EncodeJob};

#[derive(Debug, Clone, PartialEq)]
pub struct EncodeOutput {
    pub path: PathBuf,
    pub bitrate_kbps: f64,
    /// Encoder stderr, retained beside the encode.
    pub log: String,
    /// Statistics the encoder reported directly, if any.
    pub stats: Option<CompressionStats>,
}

pub trait Encoder: Send + Sync {
    fn encode(&self, job: &EncodeJob, source: &SourceRef, out_dir: &Path) -> Result<EncodeOutput, MediaError>;
}

/// Default ffmpeg argument template. `{scale}` expands to a Lanczos
/// resampling filter, or to nothing when the job is at source resolution.
pub const DEFAULT_ENCODE_TEMPLATE: &[&str] = &[
    "-hide_banner", "-y", "-f", "rawvideo", "-pix_fmt", "{pix_fmt}", "-s", "{src_w}x{src_h}", "-r", "{fps}",
    "-i", "{input}", "-frames:v", "{frames}", "{scale}", "-c:v", "{encoder}", "-preset", "{preset}", "-crf",
    "{crf}", "{output}",
];

#[derive(Debug, Clone, PartialEq)]
pub struct FfmpegEncoder {
    pub binary: String,
    pub template: Vec<String>,
}

impl Default for FfmpegEncoder {
    fn default() -> Self {
        Self {
            binary: "ffmpeg".into(),
            template: DEFAULT_ENCODE_TEMPLATE.iter().map(|s| s.to_string()).collect(),
        }
    }
}

impl FfmpegEncoder {
    pub fn output_path(job: &EncodeJob, out_dir: &Path) -> PathBuf {
        out_dir.join(format!("{}.mkv", job.cache_key()))
    }

    /// Expands the template for one job.
    pub fn command_args(&self, job: &EncodeJob, source: &SourceRef, frames: usize, output: &Path) -> Result<Vec<String>, MediaError> {
        let encoder = job
            .codec
            .ffmpeg_encoder()
            .ok_or_else(|| MediaError::EncodeFailed(format!("{} has no ffmpeg encoder", job.codec)))?;
        let subs = [
            ("{pix_fmt}", source.pix_fmt.clone()),
            ("{src_w}", source.width.to_string()),
            ("{src_h}", source.height.to_string()),
            ("{fps}", source.fps.to_string()),
            ("{input}", source.path.display().to_string()),
            ("{frames}", frames.to_string()),
            ("{encoder}", encoder.to_string()),
            ("{preset}", job.preset.clone()),
            ("{crf}", job.crf.to_string()),
            ("{width}", job.width.to_string()),
            ("{height}", job.height.to_string()),
            ("{output}", output.display().to_string()),
        ];
        let mut args = Vec::with_capacity(self.template.len() + 2);
        for token in &self.template {
            if token == "{scale}" {
                if job.resolution() != source.resolution() {
                    args.push("-vf".to_string());
                    args.push(format!("scale={}:{}:flags=lanczos:param0=3", job.width, job.height));
                }
                continue;
            }
            let mut t = token.clone();
            for (k, v) in &subs {
                t = t.replace(k, v);
            }
            args.push(t);
        }
        Ok(args)
    }
}

impl Encoder for FfmpegEncoder {
    fn encode(&self, job: &EncodeJob, source: &SourceRef, out_dir: &Path) -> Result<EncodeOutput, MediaError> {
        let bin = find_tool(&self.binary)?;
        let frames = source
            .frame_count()
            .map_err(|e| MediaError::EncodeFailed(format!("cannot read source: {e}")))?;
        if frames == 0 {
            return Err(MediaError::EncodeFailed(format!("{} holds no frames", source.path.display())));
        }
        let output = Self::output_path(job, out_dir);
        let args = self.command_args(job, source, frames, &output)?;
        let result = Command::new(bin)
            .args(&args)
            .output()
            .map_err(|e| MediaError::EncodeFailed(e.to_string()))?;
        let log = String::from_utf8_lossy(&result.stderr).into_owned();
        if !result.status.success() {
            return Err(MediaError::EncodeFailed(excerpt(&log, 20)));
        }
        let bytes = std::fs::metadata(&output).map_err(MediaError::io(&output))?.len();
        let seconds = frames as f64 / source.fps;
        Ok(EncodeOutput {
            path: output,
            bitrate_kbps: bytes as f64 * 8.0 / seconds / 1000.0,
            log,
            stats: None,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::Codec;

    fn source(w: u32, h: u32) -> SourceRef {
        SourceRef {
            video_id: "v".into(),
            path: "/data/v.yuv".into(),
            width: w,
            height: h,
            fps: 30.0,
            pix_fmt: "yuv420p10le".into(),
            frame_limit: 64,
        }
    }

    fn job(w: u32, h: u32) -> EncodeJob {
        EncodeJob {
            video_id: "v".into(),
            codec: Codec::X265,
            preset: "veryfast".into(),
            width: w,
            height: h,
            crf: 26,
        }
    }

    #[test]
    fn downscale_emits_lanczos_filter() {
        let enc = FfmpegEncoder::default();
        let args = enc
            .command_args(&job(1920, 1080), &source(3840, 2160), 64, Path::new("/o/x.mkv"))
            .unwrap();
        let vf = args.iter().position(|a| a == "-vf").unwrap();
        assert_eq!(args[vf + 1], "scale=1920:1080:flags=lanczos:param0=3");
        assert!(args.windows(2).any(|w| w == ["-c:v", "libx265"]));
        assert!(args.windows(2).any(|w| w == ["-crf", "26"]));
        assert!(args.windows(2).any(|w| w == ["-s", "3840x2160"]));
        assert_eq!(args.last().unwrap(), "/o/x.mkv");
    }

    #[test]
    fn native_resolution_skips_resampling() {
        let enc = FfmpegEncoder::default();
        let args = enc
            .command_args(&job(3840, 2160), &source(3840, 2160), 64, Path::new("/o/x.mkv"))
            .unwrap();
        assert!(!args.iter().any(|a| a == "-vf" || a.contains("scale=")));
    }

    #[test]
    fn malformed_source_fails_encode() {
        let enc = FfmpegEncoder {
            binary: "sh".into(),
            ..FfmpegEncoder::default()
        };
        let mut s = source(64, 64);
        s.path = "/nonexistent/dir/clip.yuv".into();
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(
            enc.encode(&job(64, 64), &s, dir.path()),
            Err(MediaError::EncodeFailed(_))
        ));
    }

    #[test]
    fn missing_binary_is_tool_not_found() {
        let enc = FfmpegEncoder {
            binary: "no-such-transcoder-9917".into(),
            ..FfmpegEncoder::default()
        };
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(
            enc.encode(&job(64, 64), &source(64, 64), dir.path()),
            Err(MediaError::ToolNotFound(_))
        ));
    }
}
