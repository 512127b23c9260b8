//! Encode-grid planning, transcoder and quality-scorer wrappers, log and
//! probe parsing, the synthetic codec, the RQ store and the encode cache.

pub mod cache;
pub mod encode;
pub mod grid;
pub mod probe;
pub mod quality;
pub mod store;
pub mod synthetic;
pub mod x265_log;

use std::path::{Path, PathBuf};

pub use cache::EncodeCache;
pub use encode::{EncodeOutput, Encoder, FfmpegEncoder};
pub use grid::{plan_encode_grid, run_grid, GridOutcome, GridRunner};
pub use probe::{frame_stats, parse_ffprobe_json, probe_frame_stats, FramePacket};
pub use quality::{LibvmafScorer, QualityScorer};
pub use store::{read_rq_store, RqStore};
pub use synthetic::{synth_codec, SyntheticCodecParams, SyntheticEncoder, SyntheticScorer};
pub use x265_log::{parse_x265_log, render_x265_log};

use crate::types::{Codec, Resolution};
use crate::video::{ChromaFormat, RawFormat};

#[derive(Debug, thiserror::Error)]
pub enum MediaError {
    #[error("manifest lists no videos")]
    EmptyManifest,
    #[error("resolution {0} is not in the known set")]
    InvalidResolution(Resolution),
    #[error("crf {crf} outside the range accepted by {codec}")]
    InvalidCrf { codec: Codec, crf: i32 },
    #[error("grid has no {0}")]
    EmptyGrid(&'static str),
    #[error("encode failed: {0}")]
    EncodeFailed(String),
    #[error("`{0}` not found on PATH")]
    ToolNotFound(String),
    #[error("reference has {reference} frames, distorted has {distorted}")]
    FrameMismatch { reference: usize, distorted: usize },
    #[error("quality tool failed: {0}")]
    QualityToolFailed(String),
    #[error("parse failed: {0}")]
    ParseFailed(String),
    #[error("probe failed: {0}")]
    ProbeFailed(String),
    #[error("invalid synthetic parameters: {0}")]
    InvalidParams(String),
    #[error("no synthetic model for video `{0}`")]
    UnknownVideo(String),
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("store error: {0}")]
    Store(String),
}

impl MediaError {
    pub(crate) fn io(path: &Path) -> impl FnOnce(std::io::Error) -> MediaError + '_ {
        move |source| MediaError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}

/// A raw source clip as listed in the manifest.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceRef {
    pub video_id: String,
    pub path: PathBuf,
    pub width: u32,
    pub height: u32,
    pub fps: f64,
    pub pix_fmt: String,
    pub frame_limit: usize,
}

impl SourceRef {
    pub fn resolution(&self) -> Resolution {
        Resolution::new(self.width, self.height)
    }

    pub fn raw_format(&self) -> Result<RawFormat, MediaError> {
        let (chroma, bit_depth): (ChromaFormat, u8) = ChromaFormat::from_pix_fmt(&self.pix_fmt)
            .map_err(|e| MediaError::ParseFailed(e.to_string()))?;
        Ok(RawFormat {
            width: self.width as usize,
            height: self.height as usize,
            chroma,
            bit_depth,
        })
    }

    /// Complete frames in the file, capped at the frame limit.
    pub fn frame_count(&self) -> Result<usize, MediaError> {
        let bytes = std::fs::metadata(&self.path)
            .map_err(MediaError::io(&self.path))?
            .len();
        let per_frame = self.raw_format()?.frame_bytes() as u64;
        Ok(((bytes / per_frame) as usize).min(self.frame_limit))
    }
}

/// Locates an executable on `PATH` (or accepts an explicit path).
pub fn find_tool(name: &str) -> Result<PathBuf, MediaError> {
    let candidate = Path::new(name);
    if candidate.components().count() > 1 {
        return if candidate.is_file() {
            Ok(candidate.to_path_buf())
        } else {
            Err(MediaError::ToolNotFound(name.to_string()))
        };
    }
    std::env::var_os("PATH")
        .iter()
        .flat_map(std::env::split_paths)
        .map(|dir| dir.join(name))
        .find(|p| p.is_file())
        .ok_or_else(|| MediaError::ToolNotFound(name.to_string()))
}

/// Last `n` lines of a tool's output, for error messages.
pub(crate) fn excerpt(text: &str, n: usize) -> String {
    let lines: Vec<&str> = text.lines().collect();
    lines[lines.len().saturating_sub(n)..].join("\n")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn missing_tool_is_reported() {
        assert!(matches!(
            find_tool("definitely-not-a-real-binary-4821"),
            Err(MediaError::ToolNotFound(_))
        ));
        assert!(find_tool("sh").is_ok());
    }

    #[test]
    fn frame_count_is_capped() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.yuv");
        std::fs::write(&path, vec![0u8; 16 * 16 * 3 / 2 * 5]).unwrap();
        let mut src = SourceRef {
            video_id: "a".into(),
            path,
            width: 16,
            height: 16,
            fps: 30.0,
            pix_fmt: "yuv420p".into(),
            frame_limit: 64,
        };
        assert_eq!(src.frame_count().unwrap(), 5);
        src.frame_limit = 3;
        assert_eq!(src.frame_count().unwrap(), 3);
    }

    #[test]
    fn excerpt_keeps_tail() {
        assert_eq!(excerpt("a\nb\nc", 2), "b\nc");
    }
}
