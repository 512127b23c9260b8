//! Run configuration. A config file names a `defaults` profile and
//! overrides individual fields; relative paths resolve against the file's
//! directory.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::features::FeatureConfig;
use crate::ladder::{QualityWindow, STEPS_KBPS};
use crate::media::encode::DEFAULT_ENCODE_TEMPLATE;
use crate::regression::Hyperparams;
use crate::types::{Codec, EncoderSetting, Resolution, STANDARD_RESOLUTIONS};

pub const PAPER_PROFILE: &str = "paper";

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
    #[error("unknown defaults profile `{0}` (expected `paper`)")]
    UnknownProfile(String),
    #[error("unknown codec `{0}`; known codecs: x265, svtav1, vpx-vp9, aom-av1, synthetic")]
    UnknownCodec(String),
    #[error("codec `{0}` has no encoder entry in the config")]
    UnconfiguredCodec(Codec),
    #[error("preset `{preset}` is not configured for {codec}")]
    UnknownPreset { codec: Codec, preset: String },
    #[error("encoder setting `{0}` must look like CODEC:PRESET")]
    BadSetting(String),
    #[error("invalid config: {0}")]
    Invalid(String),
}

/// Inclusive CRF range with a stride.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrfRange {
    pub min: i32,
    pub max: i32,
    pub step: i32,
}

impl CrfRange {
    pub fn values(&self) -> Vec<i32> {
        (self.min..=self.max).step_by(self.step.max(1) as usize).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EncoderSpec {
    pub codec: String,
    pub presets: Vec<String>,
    pub crf: CrfRange,
    /// CRFs encoded at inference time when this codec is the fast encoder.
    pub inference_crfs: Vec<i32>,
}

impl EncoderSpec {
    pub fn codec(&self) -> Result<Codec, ConfigError> {
        self.codec.parse().map_err(|_| ConfigError::UnknownCodec(self.codec.clone()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tools {
    pub ffmpeg: String,
    pub ffprobe: String,
    pub encode_template: Vec<String>,
}

impl Default for Tools {
    fn default() -> Self {
        Self {
            ffmpeg: "ffmpeg".into(),
            ffprobe: "ffprobe".into(),
            encode_template: DEFAULT_ENCODE_TEMPLATE.iter().map(|s| s.to_string()).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Paths {
    pub work_dir: PathBuf,
    /// `None` uses the bundled table.
    pub fixed_ladder: Option<PathBuf>,
    /// JSON map of video id to synthetic codec parameters.
    pub synthetic_models: Option<PathBuf>,
}

impl Default for Paths {
    fn default() -> Self {
        Self {
            work_dir: PathBuf::from("work"),
            fixed_ladder: None,
            synthetic_models: None,
        }
    }
}

impl Paths {
    pub fn rq_store(&self) -> PathBuf {
        self.work_dir.join("rq.csv")
    }
    pub fn cache(&self) -> PathBuf {
        self.work_dir.join("encodes")
    }
    pub fn features(&self) -> PathBuf {
        self.work_dir.join("features")
    }
    pub fn models(&self) -> PathBuf {
        self.work_dir.join("models")
    }
    pub fn ladders(&self) -> PathBuf {
        self.work_dir.join("ladders")
    }
    pub fn hulls(&self) -> PathBuf {
        self.work_dir.join("hulls")
    }
    pub fn reports(&self) -> PathBuf {
        self.work_dir.join("reports")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub defaults: String,
    pub seed: u64,
    /// 0 uses every available core.
    pub workers: usize,
    pub folds: usize,
    pub fast_encoder: String,
    pub encoders: Vec<EncoderSpec>,
    #[serde(with = "resolution_strings")]
    pub resolutions: Vec<Resolution>,
    pub quality_window: QualityWindow,
    pub steps: Vec<f64>,
    pub model: Hyperparams,
    pub features: FeatureConfig,
    pub tools: Tools,
    pub paths: Paths,
}

mod resolution_strings {
    use super::Resolution;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Resolution], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|r| r.to_string()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Resolution>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|s| s.parse().map_err(serde::de::Error::custom))
            .collect()
    }
}

fn x265_like(codec: &str, presets: &[&str]) -> EncoderSpec {
    EncoderSpec {
        codec: codec.into(),
        presets: presets.iter().map(|s| s.to_string()).collect(),
        crf: CrfRange { min: 14, max: 50, step: 2 },
        inference_crfs: vec![18, 22, 26, 30, 34, 38, 42],
    }
}

fn av1_like(codec: &str, presets: &[&str]) -> EncoderSpec {
    EncoderSpec {
        codec: codec.into(),
        presets: presets.iter().map(|s| s.to_string()).collect(),
        crf: CrfRange { min: 16, max: 62, step: 2 },
        inference_crfs: vec![20, 26, 32, 38, 44, 50, 56, 62],
    }
}

/// Synthetic codec grid used when the config has no `synthetic` entry.
pub fn synthetic_encoder_spec() -> EncoderSpec {
    x265_like("synthetic", &["default"])
}

impl Default for RunConfig {
    fn default() -> Self {
        Self::paper()
    }
}

impl RunConfig {
    pub fn paper() -> Self {
        Self {
            defaults: PAPER_PROFILE.into(),
            seed: 0,
            workers: 0,
            folds: 5,
            fast_encoder: "x265:veryfast".into(),
            encoders: vec![
                x265_like("x265", &["veryfast", "fast", "medium", "slow"]),
                av1_like("svtav1", &["8", "6", "4"]),
                av1_like("vpx-vp9", &["4", "3"]),
                av1_like("aom-av1", &["7", "5"]),
            ],
            resolutions: STANDARD_RESOLUTIONS.to_vec(),
            quality_window: QualityWindow::default(),
            steps: STEPS_KBPS.to_vec(),
            model: Hyperparams::default(),
            features: FeatureConfig::default(),
            tools: Tools::default(),
            paths: Paths::default(),
        }
    }

    pub fn from_toml(text: &str, origin: &str) -> Result<Self, ConfigError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| ConfigError::Parse {
            path: origin.to_string(),
            message: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a config file and resolves its relative paths.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let mut cfg = Self::from_toml(&text, &path.display().to_string())?;
        cfg.resolve_paths(path.parent().unwrap_or(Path::new(".")));
        Ok(cfg)
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.paths.work_dir);
        if let Some(p) = self.paths.fixed_ladder.as_mut() {
            fix(p);
        }
        if let Some(p) = self.paths.synthetic_models.as_mut() {
            fix(p);
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.defaults != PAPER_PROFILE {
            return Err(ConfigError::UnknownProfile(self.defaults.clone()));
        }
        for e in &self.encoders {
            let codec = e.codec()?;
            let (lo, hi) = codec.crf_bounds();
            if e.crf.step <= 0 || e.crf.min > e.crf.max || e.crf.min < lo || e.crf.max > hi {
                return Err(ConfigError::Invalid(format!("crf range of {codec}")));
            }
            if e.presets.is_empty() {
                return Err(ConfigError::Invalid(format!("{codec} lists no presets")));
            }
        }
        if self.folds < 2 {
            return Err(ConfigError::Invalid("folds must be at least 2".into()));
        }
        if self.steps.is_empty() || self.steps.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ConfigError::Invalid("steps must be strictly increasing".into()));
        }
        if self.resolutions.is_empty() {
            return Err(ConfigError::Invalid("no resolutions".into()));
        }
        if !(self.quality_window.min < self.quality_window.max) {
            return Err(ConfigError::Invalid("empty quality window".into()));
        }
        self.fast_setting()?;
        Ok(())
    }

    /// Encoder entry for `codec`; the synthetic codec falls back to a
    /// built-in grid.
    pub fn encoder(&self, codec: Codec) -> Result<EncoderSpec, ConfigError> {
        for e in &self.encoders {
            if e.codec()? == codec {
                return Ok(e.clone());
            }
        }
        if codec == Codec::Synthetic {
            return Ok(synthetic_encoder_spec());
        }
        Err(ConfigError::UnconfiguredCodec(codec))
    }

    pub fn parse_codec(name: &str) -> Result<Codec, ConfigError> {
        name.parse().map_err(|_| ConfigError::UnknownCodec(name.to_string()))
    }

    /// Parses `CODEC:PRESET` and checks it against the encoder entries.
    pub fn setting(&self, text: &str) -> Result<EncoderSetting, ConfigError> {
        let (c, p) = text.split_once(':').ok_or_else(|| ConfigError::BadSetting(text.to_string()))?;
        let codec = Self::parse_codec(c)?;
        let spec = self.encoder(codec)?;
        if !spec.presets.iter().any(|x| x == p) {
            return Err(ConfigError::UnknownPreset {
                codec,
                preset: p.to_string(),
            });
        }
        Ok(EncoderSetting::new(codec, p))
    }

    pub fn fast_setting(&self) -> Result<EncoderSetting, ConfigError> {
        self.setting(&self.fast_encoder)
    }

    /// Every configured (codec, preset), or those of one codec.
    pub fn settings(&self, codec: Option<Codec>) -> Result<Vec<EncoderSetting>, ConfigError> {
        let specs = match codec {
            Some(c) => vec![self.encoder(c)?],
            None => self.encoders.clone(),
        };
        let mut out = Vec::new();
        for s in specs {
            let c = s.codec()?;
            out.extend(s.presets.iter().map(|p| EncoderSetting::new(c, p.clone())));
        }
        Ok(out)
    }

    pub fn worker_count(&self) -> usize {
        if self.workers == 0 {
            std::thread::available_parallelism().map_or(1, |n| n.get())
        } else {
            self.workers
        }
    }
}
