//! Domain types shared across the pipeline: resolutions, codecs, encode
//! jobs, rate-quality points and per-frame-type compression statistics.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Frame dimensions in pixels.
///
/// Ordering is by pixel count (then width), so "higher resolution" compares
/// greater regardless of aspect ratio.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Resolution {
    pub width: u32,
    pub height: u32,
}

impl Resolution {
    pub const P2160: Resolution = Resolution::new(3840, 2160);
    pub const P1440: Resolution = Resolution::new(2560, 1440);
    pub const P1080: Resolution = Resolution::new(1920, 1080);
    pub const P720: Resolution = Resolution::new(1280, 720);
    pub const P540: Resolution = Resolution::new(960, 540);

    pub const fn new(width: u32, height: u32) -> Self {
        Self { width, height }
    }

    pub fn pixels(&self) -> u64 {
        u64::from(self.width) * u64::from(self.height)
    }
}

/// The five encoding resolutions, highest first.
pub const STANDARD_RESOLUTIONS: [Resolution; 5] = [
    Resolution::P2160,
    Resolution::P1440,
    Resolution::P1080,
    Resolution::P720,
    Resolution::P540,
];

impl Ord for Resolution {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.pixels()
            .cmp(&other.pixels())
            .then(self.width.cmp(&other.width))
    }
}

impl PartialOrd for Resolution {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Resolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.width, self.height)
    }
}

#[derive(Debug, thiserror::Error)]
#[error("invalid resolution `{0}`, expected WIDTHxHEIGHT")]
pub struct ParseResolutionError(String);

impl FromStr for Resolution {
    type Err = ParseResolutionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (w, h) = s
            .split_once(['x', 'X'])
            .ok_or_else(|| ParseResolutionError(s.to_string()))?;
        let width = w.trim().parse().map_err(|_| ParseResolutionError(s.to_string()))?;
        let height = h.trim().parse().map_err(|_| ParseResolutionError(s.to_string()))?;
        if width == 0 || height == 0 {
            return Err(ParseResolutionError(s.to_string()));
        }
        Ok(Self { width, height })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Codec {
    #[serde(rename = "x265")]
    X265,
    #[serde(rename = "svtav1")]
    SvtAv1,
    VpxVp9,
    AomAv1,
    Synthetic,
}

impl Codec {
    pub const ALL: [Codec; 5] = [
        Codec::X265,
        Codec::SvtAv1,
        Codec::VpxVp9,
        Codec::AomAv1,
        Codec::Synthetic,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Codec::X265 => "x265",
            Codec::SvtAv1 => "svtav1",
            Codec::VpxVp9 => "vpx-vp9",
            Codec::AomAv1 => "aom-av1",
            Codec::Synthetic => "synthetic",
        }
    }

    /// ffmpeg encoder name.
    pub fn ffmpeg_encoder(&self) -> Option<&'static str> {
        match self {
            Codec::X265 => Some("libx265"),
            Codec::SvtAv1 => Some("libsvtav1"),
            Codec::VpxVp9 => Some("libvpx-vp9"),
            Codec::AomAv1 => Some("libaom-av1"),
            Codec::Synthetic => None,
        }
    }

    /// Inclusive range of CRF values the encoder accepts.
    pub fn crf_bounds(&self) -> (i32, i32) {
        match self {
            Codec::X265 => (0, 51),
            Codec::SvtAv1 => (1, 63),
            Codec::VpxVp9 | Codec::AomAv1 => (0, 63),
            Codec::Synthetic => (0, 100),
        }
    }

    /// The x265 family logs per-frame-type statistics directly.
    pub fn is_x265_family(&self) -> bool {
        matches!(self, Codec::X265 | Codec::Synthetic)
    }
}

impl fmt::Display for Codec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, thiserror::Error)]
#[error("unknown codec `{0}` (expected one of x265, svtav1, vpx-vp9, aom-av1, synthetic)")]
pub struct ParseCodecError(pub String);

impl FromStr for Codec {
    type Err = ParseCodecError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "x265" | "libx265" => Ok(Codec::X265),
            "svtav1" | "libsvtav1" | "svt-av1" => Ok(Codec::SvtAv1),
            "vpx-vp9" | "libvpx-vp9" | "vp9" => Ok(Codec::VpxVp9),
            "aom-av1" | "libaom-av1" | "aom" => Ok(Codec::AomAv1),
            "synthetic" => Ok(Codec::Synthetic),
            other => Err(ParseCodecError(other.to_string())),
        }
    }
}

/// An encoder setting: codec plus preset.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EncoderSetting {
    pub codec: Codec,
    pub preset: String,
}

impl EncoderSetting {
    pub fn new(codec: Codec, preset: impl Into<String>) -> Self {
        Self {
            codec,
            preset: preset.into(),
        }
    }
}

impl fmt::Display for EncoderSetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.codec, self.preset)
    }
}

/// One cell of the encode grid.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EncodeJob {
    pub video_id: String,
    pub codec: Codec,
    pub preset: String,
    pub width: u32,
    pub height: u32,
    pub crf: i32,
}

impl EncodeJob {
    pub fn resolution(&self) -> Resolution {
        Resolution::new(self.width, self.height)
    }

    pub fn setting(&self) -> EncoderSetting {
        EncoderSetting::new(self.codec, self.preset.clone())
    }

    /// Stable content address of the job, used for the on-disk encode cache.
    pub fn cache_key(&self) -> String {
        use sha2::{Digest, Sha256};
        let mut hasher = Sha256::new();
        hasher.update(
            format!(
                "{}\u{1f}{}\u{1f}{}\u{1f}{}\u{1f}{}\u{1f}{}",
                self.video_id, self.codec, self.preset, self.width, self.height, self.crf
            )
            .as_bytes(),
        );
        let digest = hasher.finalize();
        digest[..12].iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Average QP and bitrate of I, P and B frames. Absent fields hold
/// [`CompressionStats::ABSENT`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompressionStats {
    pub qp_i: f64,
    pub qp_p: f64,
    pub qp_b: f64,
    pub br_i: f64,
    pub br_p: f64,
    pub br_b: f64,
}

impl CompressionStats {
    pub const ABSENT: f64 = -1.0;

    pub const NAMES: [&'static str; 6] = ["qp_i", "qp_p", "qp_b", "br_i", "br_p", "br_b"];

    pub fn absent() -> Self {
        Self {
            qp_i: Self::ABSENT,
            qp_p: Self::ABSENT,
            qp_b: Self::ABSENT,
            br_i: Self::ABSENT,
            br_p: Self::ABSENT,
            br_b: Self::ABSENT,
        }
    }

    pub fn to_array(&self) -> [f64; 6] {
        [self.qp_i, self.qp_p, self.qp_b, self.br_i, self.br_p, self.br_b]
    }

    pub fn from_array(a: [f64; 6]) -> Self {
        Self {
            qp_i: a[0],
            qp_p: a[1],
            qp_b: a[2],
            br_i: a[3],
            br_p: a[4],
            br_b: a[5],
        }
    }

    /// Every field is either the absence sentinel or non-negative.
    pub fn is_valid(&self) -> bool {
        self.to_array()
            .iter()
            .all(|&v| v == Self::ABSENT || (v.is_finite() && v >= 0.0))
    }
}

impl Default for CompressionStats {
    fn default() -> Self {
        Self::absent()
    }
}

/// One encoded rendition with its measured bitrate and quality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RqPoint {
    pub job: EncodeJob,
    /// kbps
    pub bitrate: f64,
    /// VMAF in [0, 100]
    pub quality: f64,
}

impl RqPoint {
    pub fn resolution(&self) -> Resolution {
        self.job.resolution()
    }
}

/// A full RQ-store row: the point plus its compression statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RqRecord {
    pub point: RqPoint,
    pub stats: CompressionStats,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resolution_orders_by_area() {
        let mut r = STANDARD_RESOLUTIONS.to_vec();
        r.sort();
        assert_eq!(r.first(), Some(&Resolution::P540));
        assert_eq!(r.last(), Some(&Resolution::P2160));
        assert_eq!("1920x1080".parse::<Resolution>().unwrap(), Resolution::P1080);
        assert!("1920".parse::<Resolution>().is_err());
    }

    #[test]
    fn codec_names_round_trip() {
        for c in Codec::ALL {
            assert_eq!(c.name().parse::<Codec>().unwrap(), c);
        }
        assert!("h264".parse::<Codec>().is_err());
    }

    #[test]
    fn cache_key_is_stable_and_distinct() {
        let job = EncodeJob {
            video_id: "a".into(),
            codec: Codec::X265,
            preset: "veryfast".into(),
            width: 1920,
            height: 1080,
            crf: 22,
        };
        let mut other = job.clone();
        other.crf = 24;
        assert_eq!(job.cache_key(), job.clone().cache_key());
        assert_ne!(job.cache_key(), other.cache_key());
    }
}
