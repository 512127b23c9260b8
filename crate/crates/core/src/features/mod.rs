//! Source-video features: the low-level bank (LLF1/LLF2) and the
//! wavelet-domain information features (VIFF).

pub mod color;
pub mod dct;
pub mod glcm;
pub mod llf;
pub mod pool;
pub mod spatial;
pub mod store;
pub mod temporal_coherence;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::types::Resolution;

pub use llf::{extract_llf, llf_names};
pub use pool::{pool, PoolSpec, Stat};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum FeatureError {
    #[error("cannot pool an empty sample")]
    EmptyPool,
    #[error("plane {width}x{height} is smaller than one {block}x{block} block")]
    BlockTooLarge {
        block: usize,
        width: usize,
        height: usize,
    },
    #[error("feature needs at least two frames")]
    NeedTwoFrames,
    #[error("video has no frames")]
    NoFrames,
    #[error("bitrate must be positive, got {0}")]
    InvalidBitrate(f64),
    #[error("LLF2 requires the encode bitrate")]
    MissingBitrate,
    #[error("subband has {blocks} blocks, need at least {needed}")]
    TooFewBlocks { blocks: usize, needed: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FeatureSetId {
    #[serde(rename = "LLF1")]
    Llf1,
    #[serde(rename = "LLF2")]
    Llf2,
    #[serde(rename = "VIFF")]
    Viff,
}

impl FeatureSetId {
    pub fn dimension(&self) -> usize {
        match self {
            FeatureSetId::Llf1 => 93,
            FeatureSetId::Llf2 => 96,
            FeatureSetId::Viff => 145,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            FeatureSetId::Llf1 => "LLF1",
            FeatureSetId::Llf2 => "LLF2",
            FeatureSetId::Viff => "VIFF",
        }
    }
}

impl fmt::Display for FeatureSetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FeatureSetId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "LLF1" => Ok(FeatureSetId::Llf1),
            "LLF2" => Ok(FeatureSetId::Llf2),
            "VIFF" => Ok(FeatureSetId::Viff),
            _ => Err(format!("unknown feature set `{s}`")),
        }
    }
}

/// Named, ordered feature values for one source video.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub set_id: FeatureSetId,
    pub names: Vec<String>,
    pub values: Vec<f64>,
}

impl FeatureVector {
    pub fn new(set_id: FeatureSetId, names: Vec<String>, values: Vec<f64>) -> Self {
        debug_assert_eq!(names.len(), values.len());
        Self {
            set_id,
            names,
            values,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| self.values[i])
    }
}

/// Knobs shared by the feature extractors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FeatureConfig {
    /// Frames are resized to this luma size first; `None` keeps native
    /// size. Written as `"WIDTHxHEIGHT"` or `"native"`.
    #[serde(with = "target_text")]
    pub target: Option<Resolution>,
    /// Optional 32x32 weights on DCT coefficient magnitudes (row-major).
    #[serde(default)]
    pub dct_weights: Option<Vec<f64>>,
    /// GSM noise variance for the information features.
    #[serde(default = "default_sigma_n_sq")]
    pub sigma_n_sq: f64,
}

mod target_text {
    use super::Resolution;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<Resolution>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(r) => s.serialize_str(&r.to_string()),
            None => s.serialize_str("native"),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Resolution>, D::Error> {
        let text = String::deserialize(d)?;
        if text.eq_ignore_ascii_case("native") {
            return Ok(None);
        }
        text.parse().map(Some).map_err(serde::de::Error::custom)
    }
}

fn default_sigma_n_sq() -> f64 {
    crate::vif::DEFAULT_SIGMA_N_SQ
}

impl Default for FeatureConfig {
    fn default() -> Self {
        Self {
            target: Some(Resolution::P2160),
            dct_weights: None,
            sigma_n_sq: default_sigma_n_sq(),
        }
    }
}

impl FeatureConfig {
    /// Native-resolution config, mostly for tests and quick runs.
    pub fn native() -> Self {
        Self {
            target: None,
            ..Self::default()
        }
    }
}
