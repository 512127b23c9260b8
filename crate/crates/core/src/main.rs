use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context as _, Result};
use clap::{Args, Parser, Subcommand};

use shotladder::commands::synth::{synth_cohort, SynthOptions};
use shotladder::commands::{self, FeatureVariant, LadderRequest, Method};
use shotladder::config::RunConfig;
use shotladder::manifest::Manifest;
use shotladder::pipeline::CohortSpec;
use shotladder::types::Codec;

#[derive(Parser, Debug)]
#[command(name = "shotladder", version, about = "Per-shot bitrate ladders from predicted quality")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Run configuration (TOML). Defaults to the built-in profile.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Source manifest (TOML).
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Restrict to one codec.
    #[arg(long, global = true)]
    codec: Option<String>,
    /// Fast encoder as `codec:preset`.
    #[arg(long, global = true)]
    fast_encoder: Option<String>,
}

#[derive(Args, Debug, Clone)]
struct FeatureArgs {
    /// none, llf2, viff or llf2+viff. Every variant when omitted.
    #[arg(long)]
    features: Option<FeatureVariant>,
}

#[derive(Args, Debug, Clone, Copy)]
struct StatsArgs {
    #[arg(long, overrides_with = "no_compression_stats")]
    with_compression_stats: bool,
    #[arg(long, overrides_with = "with_compression_stats")]
    no_compression_stats: bool,
}

impl StatsArgs {
    /// Both options unless one was given.
    fn options(&self) -> Vec<bool> {
        match (self.with_compression_stats, self.no_compression_stats) {
            (true, _) => vec![true],
            (_, true) => vec![false],
            _ => vec![true, false],
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Encode and score every (video, resolution, crf) cell.
    EncodeGrid,
    /// Extract source features for every manifest video.
    ExtractFeatures {
        #[command(flatten)]
        features: FeatureArgs,
    },
    /// Train fold-wise quality models.
    Train {
        #[command(flatten)]
        features: FeatureArgs,
        #[command(flatten)]
        stats: StatsArgs,
    },
    /// Build ladders with one method.
    PredictLadder {
        #[arg(long)]
        method: Method,
        #[command(flatten)]
        features: FeatureArgs,
        #[command(flatten)]
        stats: StatsArgs,
    },
    /// Score ladders against the measured hull and the fixed ladder.
    Evaluate {
        /// Methods to score. All when omitted.
        #[arg(long, value_delimiter = ',')]
        method: Vec<Method>,
    },
    /// Map target-encoder crfs to fast-encoder crfs.
    CrfMap,
    /// Write a synthetic cohort work tree.
    SynthCohort {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 30)]
        videos: usize,
        #[arg(long, default_value_t = 192)]
        size: usize,
        #[arg(long, default_value_t = 4)]
        frames: usize,
        /// Standard deviation of the quality noise.
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
    },
}

fn load_config(g: &Global) -> Result<RunConfig> {
    let mut cfg = match &g.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::paper(),
    };
    if let Some(s) = g.seed {
        cfg.seed = s;
        cfg.model.seed = s;
    }
    if let Some(w) = g.workers {
        cfg.workers = w;
    }
    if let Some(f) = &g.fast_encoder {
        cfg.fast_encoder = f.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn load_manifest(g: &Global) -> Result<Manifest> {
    let path = g
        .manifest
        .as_ref()
        .context("this command needs --manifest")?;
    Ok(Manifest::load(path)?)
}

fn codec(g: &Global) -> Result<Option<Codec>> {
    Ok(g.codec.as_deref().map(RunConfig::parse_codec).transpose()?)
}

fn variants(f: &FeatureArgs) -> Vec<FeatureVariant> {
    f.features.map_or_else(|| FeatureVariant::ALL.to_vec(), |v| vec![v])
}

fn run(cli: Cli) -> Result<()> {
    let g = &cli.global;
    match cli.command {
        Command::SynthCohort {
            out,
            videos,
            size,
            frames,
            noise,
        } => {
            let opts = SynthOptions {
                cohort: CohortSpec {
                    n_videos: videos,
                    seed: g.seed.unwrap_or(0),
                    noise_sd: noise,
                    ..CohortSpec::default()
                },
                width: size,
                height: size,
                frames,
            };
            let layout = synth_cohort(&out, &opts)?;
            println!("config: {}", layout.config.display());
            println!("manifest: {}", layout.manifest.display());
        }
        Command::EncodeGrid => {
            let cfg = load_config(g)?;
            let settings = commands::target_settings(&cfg, codec(g)?)?;
            let manifest = load_manifest(g)?;
            let s = commands::encode_grid(&cfg, &manifest, &settings)?;
            println!(
                "{} cells: {} encoded, {} cached, {} failed",
                s.planned, s.executed, s.cached, s.failed
            );
        }
        Command::ExtractFeatures { features } => {
            let cfg = load_config(g)?;
            let manifest = load_manifest(g)?;
            let variant = features.features.unwrap_or(FeatureVariant::Llf2Viff);
            let (n, failures) = commands::extract_features(&cfg, &manifest, variant)?;
            println!("{n} videos extracted, {} failed", failures.len());
        }
        Command::Train { features, stats } => {
            let cfg = load_config(g)?;
            commands::train(&cfg, &variants(&features), &stats.options())?;
        }
        Command::PredictLadder {
            method,
            features,
            stats,
        } => {
            let cfg = load_config(g)?;
            let codec = codec(g)?;
            let stats_options = match method {
                Method::Proposed => stats.options(),
                _ => vec![true],
            };
            let variant_list = match (method, features.features) {
                (Method::Proposed, _) => variants(&features),
                (_, Some(v)) => vec![v],
                (Method::Crossover, None) => vec![FeatureVariant::Llf2Viff],
                _ => vec![FeatureVariant::None],
            };
            for variant in variant_list {
                for &with_stats in &stats_options {
                    let req = LadderRequest {
                        method,
                        variant,
                        with_stats,
                        codec,
                    };
                    for p in commands::predict_ladder(&cfg, &req)? {
                        println!("wrote {}", p.display());
                    }
                }
            }
        }
        Command::Evaluate { method } => {
            let cfg = load_config(g)?;
            let methods = if method.is_empty() { Method::ALL.to_vec() } else { method };
            let rows = commands::evaluate(&cfg, &methods, codec(g)?)?;
            for r in rows {
                println!(
                    "{} {}:{} bd-rate vs hull {:.2}%, vs fixed {:.2}%, f75 {:.2} {}",
                    r.method, r.codec, r.preset, r.mean_bd_rate_vs_hull, r.mean_bd_rate_vs_fixed, r.f75, r.flag
                );
            }
        }
        Command::CrfMap => {
            let cfg = load_config(g)?;
            let rows = commands::crf_map_report(&cfg, codec(g)?)?;
            for r in rows.iter().filter(|r| r.is_mode) {
                println!("{}:{} crf {} -> fast crf {}", r.codec, r.preset, r.target_crf, r.fast_crf);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
