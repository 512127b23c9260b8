//! Full-reference quality scoring through ffmpeg's libvmaf filter.

use std::path::Path;
use std::process::Command;

use serde::Deserialize;

use super::{excerpt, find_tool, MediaError, SourceRef};
use crate::types::Resolution;

pub trait QualityScorer: Send + Sync {
    /// Mean VMAF of `distorted` against the raw reference clip.
    fn score(&self, reference: &SourceRef, distorted: &Path) -> Result<f64, MediaError>;
}

#[derive(Debug, Clone, PartialEq)]
pub struct LibvmafScorer {
    pub ffmpeg: String,
    pub ffprobe: String,
    /// Both clips are upsampled to this size before scoring.
    pub target: Resolution,
}

impl Default for LibvmafScorer {
    fn default() -> Self {
        Self {
            ffmpeg: "ffmpeg".into(),
            ffprobe: "ffprobe".into(),
            target: Resolution::P2160,
        }
    }
}

#[derive(Deserialize)]
struct VmafMean {
    mean: f64,
}

#[derive(Deserialize)]
struct Pooled {
    vmaf: VmafMean,
}

#[derive(Deserialize)]
struct VmafLog {
    pooled_metrics: Pooled,
}

/// Mean VMAF from a libvmaf JSON log.
pub fn parse_vmaf_json(text: &str) -> Result<f64, MediaError> {
    let log: VmafLog = serde_json::from_str(text).map_err(|e| MediaError::QualityToolFailed(format!("vmaf log: {e}")))?;
    Ok(log.pooled_metrics.vmaf.mean.clamp(0.0, 100.0))
}

fn raw_input(source: &SourceRef) -> Vec<String> {
    vec![
        "-f".into(),
        "rawvideo".into(),
        "-pix_fmt".into(),
        source.pix_fmt.clone(),
        "-s".into(),
        format!("{}x{}", source.width, source.height),
        "-r".into(),
        source.fps.to_string(),
        "-i".into(),
        source.path.display().to_string(),
    ]
}

impl LibvmafScorer {
    pub fn command_args(&self, reference: &SourceRef, frames: usize, distorted: &Path, log_path: &Path) -> Vec<String> {
        let (w, h) = (self.target.width, self.target.height);
        let graph = format!(
            "[0:v]scale={w}:{h}:flags=lanczos:param0=3,setpts=PTS-STARTPTS[dis];\
             [1:v]scale={w}:{h}:flags=lanczos:param0=3,setpts=PTS-STARTPTS[ref];\
             [dis][ref]libvmaf=log_fmt=json:log_path={}",
            log_path.display()
        );
        let mut args = vec!["-hide_banner".to_string()];
        if distorted == reference.path {
            args.extend(raw_input(reference));
        } else {
            args.extend(["-i".to_string(), distorted.display().to_string()]);
        }
        args.extend(raw_input(reference));
        args.extend(
            ["-frames:v", &frames.to_string(), "-lavfi", &graph, "-f", "null", "-"]
                .iter()
                .map(|s| s.to_string()),
        );
        args
    }

    fn count_frames(&self, path: &Path) -> Result<usize, MediaError> {
        let bin = find_tool(&self.ffprobe)?;
        let out = Command::new(bin)
            .args(["-v", "error", "-select_streams", "v:0", "-count_frames", "-show_entries"])
            .args(["stream=nb_read_frames", "-of", "csv=p=0"])
            .arg(path)
            .output()
            .map_err(|e| MediaError::QualityToolFailed(e.to_string()))?;
        if !out.status.success() {
            return Err(MediaError::QualityToolFailed(excerpt(&String::from_utf8_lossy(&out.stderr), 10)));
        }
        String::from_utf8_lossy(&out.stdout)
            .trim()
            .parse()
            .map_err(|_| MediaError::QualityToolFailed("unreadable frame count".into()))
    }
}

impl QualityScorer for LibvmafScorer {
    fn score(&self, reference: &SourceRef, distorted: &Path) -> Result<f64, MediaError> {
        let bin = find_tool(&self.ffmpeg)?;
        let ref_frames = reference.frame_count()?;
        let dis_frames = if distorted == reference.path {
            ref_frames
        } else {
            self.count_frames(distorted)?
        };
        if dis_frames != ref_frames {
            return Err(MediaError::FrameMismatch {
                reference: ref_frames,
                distorted: dis_frames,
            });
        }
        let log_path = distorted.with_extension("vmaf.json");
        let args = self.command_args(reference, ref_frames, distorted, &log_path);
        let out = Command::new(bin)
            .args(&args)
            .output()
            .map_err(|e| MediaError::QualityToolFailed(e.to_string()))?;
        if !out.status.success() {
            return Err(MediaError::QualityToolFailed(excerpt(&String::from_utf8_lossy(&out.stderr), 20)));
        }
        let text = std::fs::read_to_string(&log_path).map_err(MediaError::io(&log_path))?;
        parse_vmaf_json(&text)
    }
}
