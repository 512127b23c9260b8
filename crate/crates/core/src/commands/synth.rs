//! `synth-cohort`: a self-contained work tree for the synthetic codec.
//!
//! Writes small raw sources whose texture, motion and colour follow each
//! video's latents, a manifest, the per-video codec models and a config that
//! runs every command against them.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{Context as _, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{synthetic_encoder_spec, RunConfig};
use crate::features::FeatureConfig;
use crate::manifest::{Manifest, ManifestEntry};
use crate::pipeline::{synthetic_cohort, CohortSpec, CohortVideo};
use crate::video::{write_raw_yuv, ChromaFormat, FrameYuv, Plane};

#[derive(Debug, Clone, PartialEq)]
pub struct SynthOptions {
    pub cohort: CohortSpec,
    pub width: usize,
    pub height: usize,
    pub frames: usize,
}

impl Default for SynthOptions {
    fn default() -> Self {
        Self {
            cohort: CohortSpec::default(),
            width: 192,
            height: 192,
            frames: 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthLayout {
    pub config: PathBuf,
    pub manifest: PathBuf,
    pub models: PathBuf,
    pub videos: Vec<CohortVideo>,
}

/// Frames for one cohort video. Texture amplitude tracks complexity,
/// spatial frequency tracks the curve slope, motion tracks onset and
/// chroma saturation tracks the quality ceiling.
pub fn render_video(v: &CohortVideo, width: usize, height: usize, frames: usize, seed: u64) -> Vec<FrameYuv> {
    let l = &v.latents;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let amp = 0.05 + 0.35 * l.complexity();
    let freq = 0.05 + 0.25 * l.slope;
    let speed = 0.5 + 4.0 * l.onset;
    let sat = 0.05 + 0.2 * l.ceiling;
    let grain: Vec<f64> = (0..width * height).map(|_| rng.random::<f64>() - 0.5).collect();
    let (cw, ch) = ChromaFormat::Yuv420.chroma_dims(width, height);
    (0..frames)
        .map(|t| {
            let shift = speed * t as f64;
            let y = Plane::from_fn(width, height, |x, yy| {
                let xs = x as f64 + shift;
                let wave = (freq * xs).sin() * (freq * 0.7 * yy as f64).cos();
                let g = grain[yy * width + (x + (shift as usize)) % width];
                (0.5 + amp * wave + amp * 0.5 * g).clamp(0.0, 1.0)
            });
            let u = Plane::from_fn(cw, ch, |x, yy| 0.5 + sat * ((x + yy) as f64 * 0.1 + shift * 0.05).sin());
            let vv = Plane::from_fn(cw, ch, |x, yy| 0.5 - sat * ((x as f64 - yy as f64) * 0.1).cos());
            FrameYuv::new(y, u, vv, ChromaFormat::Yuv420, 8).expect("consistent plane sizes")
        })
        .collect()
}

/// Writes `sources/`, `manifest.toml`, `synthetic_models.json` and
/// `config.toml` under `dir`.
pub fn synth_cohort(dir: &Path, opts: &SynthOptions) -> Result<SynthLayout> {
    let src_dir = dir.join("sources");
    std::fs::create_dir_all(&src_dir).with_context(|| format!("cannot create {}", src_dir.display()))?;
    let videos = synthetic_cohort(&opts.cohort);
    let mut entries = Vec::new();
    let mut models = BTreeMap::new();
    for (i, v) in videos.iter().enumerate() {
        let path = src_dir.join(format!("{}.yuv", v.video_id));
        let frames = render_video(v, opts.width, opts.height, opts.frames, opts.cohort.seed ^ (i as u64) << 8);
        write_raw_yuv(&path, &frames)?;
        entries.push(ManifestEntry {
            video_id: v.video_id.clone(),
            path: PathBuf::from("sources").join(format!("{}.yuv", v.video_id)),
            width: opts.width as u32,
            height: opts.height as u32,
            fps: 30.0,
            pix_fmt: "yuv420p".into(),
            bit_depth: 8,
            frame_limit: opts.frames,
        });
        models.insert(v.video_id.clone(), v.params.clone());
    }
    let manifest = Manifest { videos: entries };
    let manifest_path = dir.join("manifest.toml");
    std::fs::write(&manifest_path, manifest.to_toml())?;
    let models_path = dir.join("synthetic_models.json");
    std::fs::write(&models_path, serde_json::to_string_pretty(&models)?)?;

    let mut cfg = RunConfig::paper();
    cfg.seed = opts.cohort.seed;
    cfg.fast_encoder = "synthetic:default".into();
    cfg.encoders = vec![synthetic_encoder_spec()];
    cfg.features = FeatureConfig::native();
    cfg.paths.work_dir = PathBuf::from("work");
    cfg.paths.synthetic_models = Some(PathBuf::from("synthetic_models.json"));
    let config_path = dir.join("config.toml");
    std::fs::write(&config_path, toml::to_string(&cfg)?)?;
    Ok(SynthLayout {
        config: config_path,
        manifest: manifest_path,
        models: models_path,
        videos,
    })
}
