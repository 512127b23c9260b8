//! Synthetic video cohort for end-to-end runs without real encoders.
//!
//! Each video gets five logistic rate-quality curves whose switching
//! bitrates come from one of a few crossover families, plus content latents
//! that drive low-level-style features and compression-statistic analogues.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::ladder::baselines::ascending_resolutions;
use crate::media::synthetic::{ResolutionModel, StatModel};
use crate::media::SyntheticCodecParams;

/// Switch bitrates (kbps) 540p->720p, 720p->1080p, 1080p->1440p,
/// 1440p->2160p. Each sits at the log-midpoint of a pair of ladder steps.
pub const CROSSOVER_FAMILIES: [[f64; 4]; 5] = [
    [141.42, 282.84, 489.90, 1224.74],
    [282.84, 692.82, 1224.74, 2683.28],
    [141.42, 489.90, 1224.74, 2683.28],
    [282.84, 692.82, 1732.05, 5477.23],
    [489.90, 1224.74, 2683.28, 5477.23],
];

/// log-kbps lost per crf step (bitrate halves every six steps).
pub const RATE_PER_CRF: f64 = std::f64::consts::LN_2 / 6.0;

const Q_MAX: [f64; 5] = [86.0, 90.0, 93.5, 96.0, 98.5];
const SPAN_FLOOR_KBPS: f64 = 100.0;
const SPAN_MARGIN: f64 = 0.15;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CohortSpec {
    pub n_videos: usize,
    pub seed: u64,
    pub noise_sd: f64,
    /// Highest crf of the inference subset; each resolution's inference span
    /// starts just below its optimal bitrate range.
    pub anchor_crf: i32,
    /// Standard deviation of the noise added to each synthetic feature.
    pub feature_noise: f64,
}

impl Default for CohortSpec {
    fn default() -> Self {
        Self {
            n_videos: 30,
            seed: 0,
            noise_sd: 0.0,
            anchor_crf: 42,
            feature_noise: 0.01,
        }
    }
}

/// Content latents, each in [0, 1] except `family`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Latents {
    pub family: usize,
    pub slope: f64,
    pub ceiling: f64,
    pub onset: f64,
}

impl Latents {
    pub fn complexity(&self) -> f64 {
        (self.family as f64 + 0.5) / CROSSOVER_FAMILIES.len() as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CohortVideo {
    pub video_id: String,
    pub latents: Latents,
    pub crossovers: [f64; 4],
    pub params: SyntheticCodecParams,
    /// Values for [`feature_names`].
    pub features: Vec<f64>,
}

pub fn feature_names() -> Vec<String> {
    [
        "si_mean", "ti_mean", "glcm_contrast", "glcm_energy", "tc_mean", "cf_mean", "ci_v_mean", "dct_e_y",
        "dct_h_y", "cti_mean", "aux_a", "aux_b",
    ]
    .iter()
    .map(|s| format!("syn_{s}"))
    .collect()
}

fn features(l: &Latents, rng: &mut ChaCha8Rng, sd: f64) -> Vec<f64> {
    let k = l.complexity();
    let clean = [
        0.2 + 0.6 * k + 0.1 * l.onset,
        0.1 + 0.5 * l.slope + 0.2 * k,
        (k + 0.1).powi(2),
        1.0 / (1.0 + 4.0 * k),
        1.0 - 0.6 * l.slope,
        0.3 + 0.4 * l.ceiling,
        2.5 + l.ceiling - 0.3 * k,
        (1.0 + 10.0 * l.onset).ln(),
        4.0 + 2.0 * l.onset + k,
        0.5 + 0.2 * (3.0 * l.slope).sin(),
        rng.random::<f64>(),
        rng.random::<f64>(),
    ];
    let noise = Normal::new(0.0, sd.max(0.0)).expect("finite sd");
    clean
        .iter()
        .map(|v| if sd > 0.0 { v + noise.sample(rng) } else { *v })
        .collect()
}

fn curves(l: &Latents, crossovers: &[f64; 4], anchor_crf: i32) -> Vec<ResolutionModel> {
    let slope = 0.8 + 0.35 * l.slope;
    let shift = -l.ceiling;
    let q_max: Vec<f64> = Q_MAX.iter().map(|q| q + shift).collect();
    let mut mids = vec![SPAN_FLOOR_KBPS.ln() - 1.5 + 0.6 * l.onset];
    for k in 0..4 {
        let (qa, qb) = (q_max[k], q_max[k + 1]);
        let x = crossovers[k].ln();
        // equal slopes: solve q_a(x) = q_b(x) for the upper midpoint
        let m = (((qb - qa) * (slope * x).exp() + qb * (slope * mids[k]).exp()) / qa).ln() / slope;
        mids.push(m);
    }
    let lower_bounds = [SPAN_FLOOR_KBPS, crossovers[0], crossovers[1], crossovers[2], crossovers[3]];
    ascending_resolutions()
        .into_iter()
        .enumerate()
        .map(|(k, resolution)| ResolutionModel {
            resolution,
            rate_a: lower_bounds[k].ln() - SPAN_MARGIN + RATE_PER_CRF * f64::from(anchor_crf),
            rate_c: RATE_PER_CRF,
            q_max: q_max[k],
            midpoint: mids[k],
            slope,
        })
        .collect()
}

fn stat_model(l: &Latents, no_b: bool) -> StatModel {
    let k = l.complexity();
    StatModel {
        qp_offset: [-3.0 + k, 0.5 * l.slope, 1.5 + 2.0 * l.onset],
        size_weight: [4.0 + 4.0 * l.slope, 1.5 + k, 1.0],
        frame_counts: if no_b { [1, 63, 0] } else { [1, 16, 47] },
    }
}

/// Videos `syn000`, `syn001`, ... cycling through the crossover families.
pub fn synthetic_cohort(spec: &CohortSpec) -> Vec<CohortVideo> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    (0..spec.n_videos)
        .map(|i| {
            let family = i % CROSSOVER_FAMILIES.len();
            let latents = Latents {
                family,
                slope: rng.random(),
                ceiling: rng.random(),
                onset: rng.random(),
            };
            let crossovers = CROSSOVER_FAMILIES[family];
            let params = SyntheticCodecParams {
                resolutions: curves(&latents, &crossovers, spec.anchor_crf),
                stats: stat_model(&latents, i % 4 == 3),
                noise_sd: spec.noise_sd,
                seed: spec.seed,
            };
            let features = features(&latents, &mut rng, spec.feature_noise);
            CohortVideo {
                video_id: format!("syn{i:03}"),
                latents,
                crossovers,
                params,
                features,
            }
        })
        .collect()
}
