//! Batch commands behind the `shotladder` binary.
//!
//! Every command reads and writes under the configured work directory:
//! `rq.csv`, `encodes/`, `features/`, `models/`, `hulls/`, `ladders/` and
//! `reports/`.

pub mod synth;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Mutex;

use anyhow::{anyhow, bail, Context as _, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::evaluation::{crf_map, evaluate_method, kfold_split, write_report_csv, FoldPlan, ReportRow, VideoEvaluation};
use crate::features::store::{read_features, write_features, FeatureRow};
use crate::features::{extract_llf, FeatureSetId};
use crate::ladder::{fixed_ladder, hull_ladder, two_step_ladder, BitrateLadder, FixedLadderTable};
use crate::manifest::Manifest;
use crate::media::{
    plan_encode_grid, read_rq_store, EncodeCache, Encoder, FfmpegEncoder, GridRunner, LibvmafScorer, QualityScorer,
    RqStore, SyntheticCodecParams, SyntheticEncoder, SyntheticScorer,
};
use crate::pipeline::crossover::{true_crossovers, CrossoverModel};
use crate::pipeline::files::{read_hulls, read_ladders, setting_stem, write_hulls, write_ladders};
use crate::pipeline::{
    by_video, evaluate_ladders, hull_curve, inference_subset, proposed_ladders, train_quality_folds, FeatureTable,
    FoldModel,
};
use crate::regression::{load_model, save_model};
use crate::types::{Codec, EncoderSetting, Resolution, RqRecord};
use crate::video::read_raw_yuv;
use crate::vif::features::vif_features;

/// Source-feature sets a quality model can use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FeatureVariant {
    None,
    Llf2,
    Viff,
    Llf2Viff,
}

impl FeatureVariant {
    pub const ALL: [FeatureVariant; 4] = [Self::None, Self::Llf2, Self::Viff, Self::Llf2Viff];

    pub fn name(&self) -> &'static str {
        match self {
            Self::None => "none",
            Self::Llf2 => "llf2",
            Self::Viff => "viff",
            Self::Llf2Viff => "llf2+viff",
        }
    }

    /// Filesystem-safe form of [`name`](Self::name).
    pub fn stem(&self) -> &'static str {
        match self {
            Self::Llf2Viff => "llf2_viff",
            other => other.name(),
        }
    }

    /// Feature sets extracted from the sources for this variant.
    pub fn source_sets(&self) -> Vec<FeatureSetId> {
        match self {
            Self::None => vec![],
            Self::Llf2 => vec![FeatureSetId::Llf1],
            Self::Viff => vec![FeatureSetId::Viff],
            Self::Llf2Viff => vec![FeatureSetId::Llf1, FeatureSetId::Viff],
        }
    }
}

impl fmt::Display for FeatureVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FeatureVariant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|v| v.name() == s.to_ascii_lowercase())
            .ok_or_else(|| format!("unknown feature variant `{s}` (none, llf2, viff, llf2+viff)"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Method {
    Proposed,
    Fixed,
    Hull,
    TwoStep,
    Crossover,
}

impl Method {
    pub const ALL: [Method; 5] = [Self::Proposed, Self::Fixed, Self::Hull, Self::TwoStep, Self::Crossover];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Proposed => "proposed",
            Self::Fixed => "fixed",
            Self::Hull => "hull",
            Self::TwoStep => "two-step",
            Self::Crossover => "crossover",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|m| m.name() == s.to_ascii_lowercase())
            .ok_or_else(|| format!("unknown method `{s}` (proposed, fixed, hull, two-step, crossover)"))
    }
}

fn stats_tag(with_stats: bool) -> &'static str {
    if with_stats {
        "stats"
    } else {
        "nostats"
    }
}

/// Label used in ladder files and reports for a proposed-method variant.
pub fn proposed_label(variant: FeatureVariant, with_stats: bool) -> String {
    format!("proposed_{}_{}", variant.stem(), stats_tag(with_stats))
}

fn pool(cfg: &RunConfig) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.worker_count())
        .build()
        .map_err(|e| anyhow!("worker pool: {e}"))
}

fn create_dir(path: &Path) -> Result<()> {
    std::fs::create_dir_all(path).with_context(|| format!("cannot create {}", path.display()))
}

// ---------------------------------------------------------------- encode-grid

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GridSummary {
    pub planned: usize,
    pub executed: usize,
    pub cached: usize,
    pub failed: usize,
}

/// Settings of `codec`, or every configured setting.
pub fn target_settings(cfg: &RunConfig, codec: Option<Codec>) -> Result<Vec<EncoderSetting>> {
    Ok(cfg.settings(codec)?)
}

fn load_synthetic_models(cfg: &RunConfig) -> Result<BTreeMap<String, SyntheticCodecParams>> {
    let path = cfg
        .paths
        .synthetic_models
        .as_ref()
        .ok_or_else(|| anyhow!("the synthetic codec needs `paths.synthetic_models` in the config"))?;
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("{} is not a synthetic model map", path.display()))
}

fn backend(cfg: &RunConfig, codec: Codec) -> Result<(Box<dyn Encoder>, Box<dyn QualityScorer>)> {
    if codec == Codec::Synthetic {
        let enc = SyntheticEncoder::new(load_synthetic_models(cfg)?)?;
        return Ok((Box::new(enc), Box::new(SyntheticScorer)));
    }
    let enc = FfmpegEncoder {
        binary: cfg.tools.ffmpeg.clone(),
        template: cfg.tools.encode_template.clone(),
    };
    let scorer = LibvmafScorer {
        ffmpeg: cfg.tools.ffmpeg.clone(),
        ffprobe: cfg.tools.ffprobe.clone(),
        target: Resolution::P2160,
    };
    Ok((Box::new(enc), Box::new(scorer)))
}

/// Encodes and scores every (video, resolution, crf) cell of each setting,
/// skipping cells already in the cache.
pub fn encode_grid(cfg: &RunConfig, manifest: &Manifest, settings: &[EncoderSetting]) -> Result<GridSummary> {
    let mut plans = Vec::new();
    for s in settings {
        let spec = cfg.encoder(s.codec)?;
        plans.push((s.clone(), plan_encode_grid(&manifest.ids(), s, &cfg.resolutions, &spec.crf.values())?));
    }
    let cache = EncodeCache::new(cfg.paths.cache())?;
    let store = RqStore::open(cfg.paths.rq_store());
    let sources = manifest.sources();
    let mut summary = GridSummary::default();
    let stdout = Mutex::new(());
    for (setting, jobs) in plans {
        let (encoder, scorer) = backend(cfg, setting.codec)?;
        let runner = GridRunner {
            encoder: encoder.as_ref(),
            scorer: scorer.as_ref(),
            cache: &cache,
            store: Some(&store),
            ffprobe: cfg.tools.ffprobe.clone(),
            workers: cfg.worker_count(),
        };
        let outcomes = runner.run(&jobs, &sources, &|o| {
            let _guard = stdout.lock();
            match &o.result {
                Ok(r) if o.cached => log::debug!("cached {} {}", o.job.cache_key(), r.point.quality),
                Ok(r) => println!(
                    "{} {} {}x{} crf {}: {:.1} kbps, vmaf {:.2}",
                    o.job.video_id, setting, o.job.width, o.job.height, o.job.crf, r.point.bitrate, r.point.quality
                ),
                Err(e) => println!(
                    "{} {} {}x{} crf {}: FAILED {e}",
                    o.job.video_id, setting, o.job.width, o.job.height, o.job.crf
                ),
            }
        })?;
        summary.planned += outcomes.len();
        for o in &outcomes {
            match (&o.result, o.cached) {
                (Err(_), _) => summary.failed += 1,
                (Ok(_), true) => summary.cached += 1,
                (Ok(_), false) => summary.executed += 1,
            }
        }
    }
    Ok(summary)
}

// ----------------------------------------------------------- extract-features

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureFailure {
    pub video_id: String,
    pub set_id: String,
    pub error: String,
}

pub fn feature_store_path(cfg: &RunConfig, set: FeatureSetId) -> PathBuf {
    cfg.paths.features().join(format!("{set}.csv"))
}

/// Extracts the variant's source feature sets for every manifest video.
/// Videos that fail are written to `features/errors.csv` and skipped.
pub fn extract_features(
    cfg: &RunConfig,
    manifest: &Manifest,
    variant: FeatureVariant,
) -> Result<(usize, Vec<FeatureFailure>)> {
    create_dir(&cfg.paths.features())?;
    let sets = variant.source_sets();
    let results: Vec<(String, Result<Vec<FeatureRow>, String>)> = pool(cfg)?.install(|| {
        manifest
            .videos
            .par_iter()
            .map(|v| {
                let out = (|| {
                    let src = v.source();
                    let fmt = src.raw_format().map_err(|e| e.to_string())?;
                    let video = read_raw_yuv(&src.path, fmt, Some(src.frame_limit)).map_err(|e| e.to_string())?;
                    sets.iter()
                        .map(|&set| {
                            let fv = match set {
                                FeatureSetId::Viff => vif_features(&video, &cfg.features),
                                other => extract_llf(&video, other, None, &cfg.features),
                            };
                            fv.map(|features| FeatureRow {
                                video_id: v.video_id.clone(),
                                features,
                            })
                            .map_err(|e| format!("{set}: {e}"))
                        })
                        .collect()
                })();
                (v.video_id.clone(), out)
            })
            .collect()
    });
    let mut failures = Vec::new();
    let mut per_set: BTreeMap<FeatureSetId, Vec<FeatureRow>> = BTreeMap::new();
    for (id, r) in results {
        match r {
            Ok(rows) => {
                for row in rows {
                    per_set.entry(row.features.set_id).or_default().push(row);
                }
            }
            Err(error) => {
                log::warn!("{id}: {error}");
                failures.push(FeatureFailure {
                    video_id: id,
                    set_id: variant.name().to_string(),
                    error,
                });
            }
        }
    }
    let mut written = 0;
    for (set, rows) in &per_set {
        write_features(&feature_store_path(cfg, *set), rows)?;
        written = written.max(rows.len());
    }
    let err_path = cfg.paths.features().join("errors.csv");
    let mut w = csv::Writer::from_path(&err_path)?;
    if failures.is_empty() {
        w.write_record(["video_id", "set_id", "error"])?;
    }
    for f in &failures {
        w.serialize(f)?;
    }
    w.flush()?;
    Ok((written, failures))
}

fn load_set(cfg: &RunConfig, set: FeatureSetId) -> Result<FeatureTable> {
    let path = feature_store_path(cfg, set);
    let rows = read_features(&path).with_context(|| {
        format!(
            "no {set} features at {}; run `shotladder extract-features` first",
            path.display()
        )
    })?;
    Ok(FeatureTable::from_vectors(rows.iter().map(|r| (r.video_id.as_str(), &r.features))))
}

/// The regression input table for a variant. LLF2 is assembled from the
/// stored LLF1 values plus per-encode bitrate texture terms.
pub fn load_feature_table(cfg: &RunConfig, variant: FeatureVariant) -> Result<FeatureTable> {
    Ok(match variant {
        FeatureVariant::None => FeatureTable::default(),
        FeatureVariant::Llf2 => load_set(cfg, FeatureSetId::Llf1)?.with_bitrate_dct(),
        FeatureVariant::Viff => load_set(cfg, FeatureSetId::Viff)?,
        FeatureVariant::Llf2Viff => load_set(cfg, FeatureSetId::Llf1)?
            .with_bitrate_dct()
            .concat(&load_set(cfg, FeatureSetId::Viff)?),
    })
}

// ------------------------------------------------------------------- training

fn records_for(records: &[RqRecord], setting: &EncoderSetting) -> Vec<RqRecord> {
    records
        .iter()
        .filter(|r| r.point.job.codec == setting.codec && r.point.job.preset == setting.preset)
        .cloned()
        .collect()
}

fn load_records(cfg: &RunConfig) -> Result<Vec<RqRecord>> {
    let path = cfg.paths.rq_store();
    read_rq_store(&path).with_context(|| format!("no RQ store at {}; run `shotladder encode-grid` first", path.display()))
}

fn fast_records(cfg: &RunConfig) -> Result<(EncoderSetting, BTreeMap<String, Vec<RqRecord>>)> {
    let fast = cfg.fast_setting()?;
    let recs = records_for(&load_records(cfg)?, &fast);
    if recs.is_empty() {
        bail!("the RQ store has no rows for the fast encoder {fast}");
    }
    Ok((fast, by_video(&recs)))
}

fn model_dir(cfg: &RunConfig, variant: FeatureVariant, with_stats: bool) -> PathBuf {
    cfg.paths.models().join(variant.stem()).join(stats_tag(with_stats))
}

fn plan_path(cfg: &RunConfig, variant: FeatureVariant) -> PathBuf {
    cfg.paths.models().join(variant.stem()).join("folds.json")
}

fn usable_ids(table: &FeatureTable, videos: &BTreeMap<String, Vec<RqRecord>>) -> Vec<String> {
    videos
        .keys()
        .filter(|id| table.names.is_empty() || table.rows.contains_key(*id))
        .cloned()
        .collect()
}

/// One held-out correlation in the long-format training report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainRow {
    pub variant: String,
    pub with_stats: bool,
    pub round: usize,
    pub split: String,
    pub resolution: String,
    pub plcc: f64,
}

/// Trains one quality model per fold for each (variant, stats) pair.
/// Writes the models, the fold plan, `reports/train.csv` and a per-resolution
/// summary `reports/train_summary.csv` with one PLCC column per stats option.
pub fn train(cfg: &RunConfig, variants: &[FeatureVariant], stats_options: &[bool]) -> Result<Vec<TrainRow>> {
    let (_, videos) = fast_records(cfg)?;
    let mut rows = Vec::new();
    for &variant in variants {
        let table = load_feature_table(cfg, variant)?;
        let ids = usable_ids(&table, &videos);
        let plan = kfold_split(&ids, cfg.folds, cfg.seed)?;
        create_dir(&cfg.paths.models().join(variant.stem()))?;
        std::fs::write(plan_path(cfg, variant), serde_json::to_string_pretty(&plan)?)?;
        for &with_stats in stats_options {
            let folds = pool(cfg)?.install(|| train_quality_folds(&table, &videos, &plan, with_stats, &cfg.model))?;
            let dir = model_dir(cfg, variant, with_stats);
            create_dir(&dir)?;
            for f in &folds {
                save_model(&f.model, &dir.join(format!("fold{}.json", f.round)))?;
                let mut push = |split: &str, resolution: String, plcc: Option<f64>| {
                    rows.push(TrainRow {
                        variant: variant.name().into(),
                        with_stats,
                        round: f.round,
                        split: split.into(),
                        resolution,
                        plcc: plcc.unwrap_or(f64::NAN),
                    })
                };
                push("validation", "all".into(), f.validation_plcc);
                push("test", "all".into(), f.test_plcc);
                for (r, v) in &f.test_plcc_by_resolution {
                    push("test", r.to_string(), Some(*v));
                }
                println!(
                    "{} {} fold {}: validation plcc {:.4}, test plcc {:.4}",
                    variant,
                    stats_tag(with_stats),
                    f.round,
                    f.validation_plcc.unwrap_or(f64::NAN),
                    f.test_plcc.unwrap_or(f64::NAN)
                );
            }
        }
    }
    create_dir(&cfg.paths.reports())?;
    let mut w = csv::Writer::from_path(cfg.paths.reports().join("train.csv"))?;
    for r in &rows {
        w.serialize(r)?;
    }
    w.flush()?;
    write_train_summary(&cfg.paths.reports().join("train_summary.csv"), &rows)?;
    Ok(rows)
}

fn write_train_summary(path: &Path, rows: &[TrainRow]) -> Result<()> {
    let mut acc: BTreeMap<(String, String), [(f64, usize); 2]> = BTreeMap::new();
    for r in rows.iter().filter(|r| r.split == "test" && r.plcc.is_finite()) {
        let e = acc.entry((r.variant.clone(), r.resolution.clone())).or_default();
        let slot = &mut e[usize::from(r.with_stats)];
        slot.0 += r.plcc;
        slot.1 += 1;
    }
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["variant", "resolution", "plcc_with_stats", "plcc_without_stats"])?;
    let fmt = |(s, n): (f64, usize)| if n == 0 { String::new() } else { (s / n as f64).to_string() };
    for ((variant, res), v) in acc {
        w.write_record([variant, res, fmt(v[1]), fmt(v[0])])?;
    }
    w.flush()?;
    Ok(())
}

fn load_folds(cfg: &RunConfig, variant: FeatureVariant, with_stats: bool) -> Result<(FoldPlan, Vec<FoldModel>)> {
    let pp = plan_path(cfg, variant);
    let text = std::fs::read_to_string(&pp).with_context(|| {
        format!(
            "no trained models for `{variant}` at {}; run `shotladder train --features {variant}` first",
            pp.display()
        )
    })?;
    let plan: FoldPlan = serde_json::from_str(&text)?;
    let dir = model_dir(cfg, variant, with_stats);
    let folds = (0..plan.rounds.len())
        .map(|i| {
            let path = dir.join(format!("fold{i}.json"));
            Ok(FoldModel {
                round: i,
                model: load_model(&path).with_context(|| format!("cannot load {}", path.display()))?,
                validation_plcc: None,
                test_plcc: None,
                test_plcc_by_resolution: BTreeMap::new(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((plan, folds))
}

// -------------------------------------------------------------- predict-ladder

#[derive(Debug, Clone, PartialEq)]
pub struct LadderRequest {
    pub method: Method,
    pub variant: FeatureVariant,
    pub with_stats: bool,
    /// Target codec for `hull`; every configured setting when `None`.
    pub codec: Option<Codec>,
}

pub fn fixed_table(cfg: &RunConfig) -> Result<FixedLadderTable> {
    match &cfg.paths.fixed_ladder {
        Some(p) => FixedLadderTable::load(p),
        None => Ok(FixedLadderTable::builtin()),
    }
}

pub fn hull_path(cfg: &RunConfig, setting: &EncoderSetting) -> PathBuf {
    cfg.paths.hulls().join(format!("{}.csv", setting_stem(setting)))
}

/// Writes ladder files for the requested method and returns their paths.
pub fn predict_ladder(cfg: &RunConfig, req: &LadderRequest) -> Result<Vec<PathBuf>> {
    let dir = cfg.paths.ladders();
    create_dir(&dir)?;
    let steps = &cfg.steps;
    match req.method {
        Method::Fixed => {
            let ladder = fixed_ladder(&fixed_table(cfg)?, steps)?;
            let ids: BTreeSet<String> = load_records(cfg)?.into_iter().map(|r| r.point.job.video_id).collect();
            let all = ids.into_iter().map(|id| (id, ladder.clone())).collect();
            let path = dir.join("fixed.csv");
            write_ladders(&path, "fixed", &all)?;
            Ok(vec![path])
        }
        Method::Hull => {
            let records = load_records(cfg)?;
            let mut settings: Vec<EncoderSetting> = records.iter().map(|r| r.point.job.setting()).collect::<BTreeSet<_>>().into_iter().collect();
            if let Some(c) = req.codec {
                settings.retain(|s| s.codec == c);
            }
            if settings.is_empty() {
                bail!("the RQ store has no rows for the requested codec");
            }
            let mut out = Vec::new();
            for s in settings {
                let videos = by_video(&records_for(&records, &s));
                let mut hulls = BTreeMap::new();
                let mut ladders = BTreeMap::new();
                for (id, recs) in &videos {
                    match hull_curve(recs, cfg.quality_window).and_then(|h| Ok((hull_ladder(&h, steps)?, h))) {
                        Ok((l, h)) => {
                            ladders.insert(id.clone(), l);
                            hulls.insert(id.clone(), h);
                        }
                        Err(e) => log::warn!("{id} {s}: {e}"),
                    }
                }
                write_hulls(&hull_path(cfg, &s), &hulls)?;
                let path = dir.join(format!("hull_{}.csv", setting_stem(&s)));
                write_ladders(&path, "hull", &ladders)?;
                out.push(path);
            }
            Ok(out)
        }
        Method::TwoStep => {
            let fast = cfg.fast_setting()?;
            let hp = hull_path(cfg, &fast);
            if !hp.exists() {
                bail!(
                    "two-step needs the fast-encoder hull at {}; run `shotladder predict-ladder --method hull --codec {}` first",
                    hp.display(),
                    fast.codec
                );
            }
            let hulls = read_hulls(&hp, &fast)?;
            let mut ladders = BTreeMap::new();
            for (id, h) in &hulls {
                ladders.insert(id.clone(), two_step_ladder(h, steps)?);
            }
            let path = dir.join("two-step.csv");
            write_ladders(&path, "two-step", &ladders)?;
            Ok(vec![path])
        }
        Method::Proposed => {
            let (fast, videos) = fast_records(cfg)?;
            let table = load_feature_table(cfg, req.variant)?;
            let (plan, folds) = load_folds(cfg, req.variant, req.with_stats)?;
            let crfs = cfg.encoder(fast.codec)?.inference_crfs;
            let inference: BTreeMap<String, Vec<RqRecord>> =
                videos.iter().map(|(id, v)| (id.clone(), inference_subset(v, &crfs))).collect();
            let results = pool(cfg)?.install(|| proposed_ladders(&table, &folds, &plan, &inference, req.with_stats, steps));
            let mut ladders = BTreeMap::new();
            for (id, r) in results {
                match r {
                    Ok(l) => {
                        ladders.insert(id, l);
                    }
                    Err(e) => log::warn!("{id}: {e}"),
                }
            }
            let label = proposed_label(req.variant, req.with_stats);
            let path = dir.join(format!("{label}.csv"));
            write_ladders(&path, &label, &ladders)?;
            Ok(vec![path])
        }
        Method::Crossover => {
            if req.variant == FeatureVariant::None {
                bail!("the crossover method needs source features; pass --features llf2, viff or llf2+viff");
            }
            let (_, videos) = fast_records(cfg)?;
            let table = load_feature_table(cfg, req.variant)?;
            let ladders = crossover_ladders(cfg, &table, &videos)?;
            let label = format!("crossover_{}", req.variant.stem());
            let path = dir.join(format!("{label}.csv"));
            write_ladders(&path, &label, &ladders)?;
            Ok(vec![path])
        }
    }
}

/// Fold-wise cross-over ladders: each round trains on its train ids'
/// measured cross-overs and predicts its test ids.
pub fn crossover_ladders(
    cfg: &RunConfig,
    table: &FeatureTable,
    videos: &BTreeMap<String, Vec<RqRecord>>,
) -> Result<BTreeMap<String, BitrateLadder>> {
    let data: BTreeMap<String, (Vec<f64>, Vec<f64>)> = videos
        .iter()
        .filter_map(|(id, recs)| Some((id.clone(), (table.rows.get(id)?.clone(), true_crossovers(recs)?))))
        .collect();
    let ids: Vec<String> = data.keys().cloned().collect();
    let plan = kfold_split(&ids, cfg.folds, cfg.seed)?;
    let mut out = BTreeMap::new();
    for round in &plan.rounds {
        let train: BTreeMap<String, (Vec<f64>, Vec<f64>)> = round
            .train
            .iter()
            .map(|id| (id.clone(), data[id].clone()))
            .collect();
        let model = pool(cfg)?.install(|| CrossoverModel::train(&table.names, &train, &cfg.model))?;
        for id in &round.test {
            out.insert(id.clone(), model.ladder(&data[id].0, &cfg.steps)?);
        }
    }
    Ok(out)
}

// ------------------------------------------------------------------- evaluate

/// Per-video BD values behind the report rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VideoRow {
    pub method: String,
    pub codec: String,
    pub preset: String,
    pub video_id: String,
    pub bd_rate_vs_hull: Option<f64>,
    pub bd_vmaf_vs_hull: Option<f64>,
    pub bd_rate_vs_fixed: Option<f64>,
    pub bd_vmaf_vs_fixed: Option<f64>,
    pub low_degree: bool,
}

fn method_files(cfg: &RunConfig, methods: &[Method], setting: &EncoderSetting) -> Vec<(String, PathBuf)> {
    let dir = cfg.paths.ladders();
    let mut out = Vec::new();
    for m in methods {
        match m {
            Method::Fixed => out.push(("fixed".to_string(), dir.join("fixed.csv"))),
            Method::TwoStep => out.push(("two-step".to_string(), dir.join("two-step.csv"))),
            Method::Hull => out.push(("hull".to_string(), dir.join(format!("hull_{}.csv", setting_stem(setting))))),
            Method::Proposed | Method::Crossover => {
                let prefix = format!("{m}_");
                let mut found: Vec<(String, PathBuf)> = std::fs::read_dir(&dir)
                    .into_iter()
                    .flatten()
                    .flatten()
                    .filter_map(|e| {
                        let name = e.file_name().to_string_lossy().into_owned();
                        let stem = name.strip_suffix(".csv")?;
                        stem.starts_with(&prefix).then(|| (stem.to_string(), e.path()))
                    })
                    .collect();
                found.sort();
                if found.is_empty() {
                    out.push((m.name().to_string(), dir.join(format!("{m}.csv"))));
                }
                out.extend(found);
            }
        }
    }
    out
}

/// Scores every requested method's ladders on each target setting and
/// writes `reports/evaluation.csv` plus per-video values. A missing ladder
/// file yields a flagged row.
pub fn evaluate(cfg: &RunConfig, methods: &[Method], codec: Option<Codec>) -> Result<Vec<ReportRow>> {
    let records = load_records(cfg)?;
    let mut settings: Vec<EncoderSetting> =
        records.iter().map(|r| r.point.job.setting()).collect::<BTreeSet<_>>().into_iter().collect();
    if let Some(c) = codec {
        settings.retain(|s| s.codec == c);
    }
    if settings.is_empty() {
        bail!("the RQ store has no rows for the requested codec");
    }
    let fixed = fixed_ladder(&fixed_table(cfg)?, &cfg.steps)?;
    let mut rows = Vec::new();
    let mut video_rows = Vec::new();
    for s in &settings {
        let target = by_video(&records_for(&records, s));
        for (label, path) in method_files(cfg, methods, s) {
            let codec_name = s.codec.to_string();
            if !path.exists() {
                log::warn!("{label} on {s}: missing ladder file {}", path.display());
                rows.push(ReportRow::unscored(&label, &codec_name, &s.preset, "missing_ladder_file"));
                continue;
            }
            let (_, ladders) = read_ladders(&path)?;
            let evals = pool(cfg)?.install(|| evaluate_ladders(&ladders, &target, &fixed, cfg.quality_window, &cfg.steps));
            let mut ok: Vec<VideoEvaluation> = Vec::new();
            for (id, e) in evals {
                match e {
                    Ok(v) => ok.push(v),
                    Err(e) => log::warn!("{label} on {s}, {id}: {e}"),
                }
            }
            let scored: Vec<VideoEvaluation> = ok.iter().filter(|v| ladders.contains_key(&v.video_id)).cloned().collect();
            for v in &scored {
                video_rows.push(VideoRow {
                    method: label.clone(),
                    codec: codec_name.clone(),
                    preset: s.preset.clone(),
                    video_id: v.video_id.clone(),
                    bd_rate_vs_hull: v.vs_hull.map(|g| g.bd_rate),
                    bd_vmaf_vs_hull: v.vs_hull.map(|g| g.bd_vmaf),
                    bd_rate_vs_fixed: v.vs_fixed.map(|g| g.bd_rate),
                    bd_vmaf_vs_fixed: v.vs_fixed.map(|g| g.bd_vmaf),
                    low_degree: v.low_degree,
                });
            }
            match evaluate_method(&label, &codec_name, &s.preset, &scored) {
                Ok(r) => rows.push(r),
                Err(e) => {
                    log::warn!("{label} on {s}: {e}");
                    rows.push(ReportRow::unscored(&label, &codec_name, &s.preset, "no_videos"));
                }
            }
        }
    }
    create_dir(&cfg.paths.reports())?;
    write_report_csv(&cfg.paths.reports().join("evaluation.csv"), &rows)?;
    let mut w = csv::Writer::from_path(cfg.paths.reports().join("evaluation_videos.csv"))?;
    for r in &video_rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(rows)
}

// -------------------------------------------------------------------- crf-map

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrfMapRow {
    pub codec: String,
    pub preset: String,
    pub target_crf: i32,
    pub fast_crf: i32,
    pub count: usize,
    pub is_mode: bool,
}

/// Distribution of best-matching fast-encoder CRFs for every target CRF of
/// each setting, written to `reports/crf_map.csv`.
pub fn crf_map_report(cfg: &RunConfig, codec: Option<Codec>) -> Result<Vec<CrfMapRow>> {
    let records = load_records(cfg)?;
    let fast = cfg.fast_setting()?;
    let fast_points: Vec<_> = records_for(&records, &fast).into_iter().map(|r| r.point).collect();
    if fast_points.is_empty() {
        bail!("the RQ store has no rows for the fast encoder {fast}");
    }
    let settings: BTreeSet<EncoderSetting> = records
        .iter()
        .map(|r| r.point.job.setting())
        .filter(|s| codec.is_none_or(|c| s.codec == c))
        .collect();
    let mut rows = Vec::new();
    for s in settings {
        let pts: Vec<_> = records_for(&records, &s).into_iter().map(|r| r.point).collect();
        let map = crf_map(&fast_points, &pts)?;
        let mode = map.mode();
        for (t, dist) in &map.distribution {
            for (f, n) in dist {
                rows.push(CrfMapRow {
                    codec: s.codec.to_string(),
                    preset: s.preset.clone(),
                    target_crf: *t,
                    fast_crf: *f,
                    count: *n,
                    is_mode: mode.get(t) == Some(f),
                });
            }
        }
    }
    create_dir(&cfg.paths.reports())?;
    let mut w = csv::Writer::from_path(cfg.paths.reports().join("crf_map.csv"))?;
    for r in &rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(rows)
}

/// Manifest sources keyed by id, for callers driving the grid directly.
pub fn sources(manifest: &Manifest) -> HashMap<String, crate::media::SourceRef> {
    manifest.sources()
}
