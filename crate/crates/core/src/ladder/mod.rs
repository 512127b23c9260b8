//! Convex hulls and bitrate ladders.

pub mod baselines;
pub mod correction;
pub mod hull;
pub mod select;

use serde::{Deserialize, Serialize};

use crate::types::{Resolution, RqPoint};

pub use baselines::{crossover_bitrates, crossover_ladder, fixed_ladder, two_step_ladder, FixedLadderTable};
pub use correction::top_bottom_correction;
pub use hull::{convex_hull, hull_ladder};
pub use select::{ladder_from_predictions, ladder_from_predictions_raw, PredictedCurve};

/// Ladder step bitrates in kbps.
pub const STEPS_KBPS: [f64; 22] = [
    100.0, 200.0, 400.0, 600.0, 800.0, 1000.0, 1500.0, 2000.0, 2400.0, 3000.0, 3500.0, 4000.0, 4500.0, 5000.0,
    6000.0, 7000.0, 8100.0, 9000.0, 10000.0, 11600.0, 13000.0, 15000.0,
];

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum LadderError {
    #[error("no rate-quality point inside the quality window")]
    EmptyHull,
    #[error("no resolution has at least two predicted points")]
    InsufficientPredictions,
    #[error("fixed ladder table is empty")]
    EmptyTable,
    #[error("ladder has no steps")]
    EmptyLadder,
}

/// Inclusive VMAF range kept when building hulls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QualityWindow {
    pub min: f64,
    pub max: f64,
}

impl Default for QualityWindow {
    fn default() -> Self {
        Self { min: 20.0, max: 99.9 }
    }
}

impl QualityWindow {
    pub fn contains(&self, q: f64) -> bool {
        q >= self.min && q <= self.max
    }
}

/// Points sorted by bitrate ascending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RqCurve {
    pub points: Vec<RqPoint>,
}

impl RqCurve {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn bitrates(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.bitrate).collect()
    }

    pub fn qualities(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.quality).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LadderStep {
    pub bitrate_kbps: f64,
    pub resolution: Resolution,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BitrateLadder {
    pub steps: Vec<LadderStep>,
}

impl BitrateLadder {
    pub fn from_parts(steps: &[f64], resolutions: &[Resolution]) -> Self {
        assert_eq!(steps.len(), resolutions.len());
        Self {
            steps: steps
                .iter()
                .zip(resolutions)
                .map(|(&b, &r)| LadderStep {
                    bitrate_kbps: b,
                    resolution: r,
                })
                .collect(),
        }
    }

    pub fn resolutions(&self) -> Vec<Resolution> {
        self.steps.iter().map(|s| s.resolution).collect()
    }

    pub fn bitrates(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.bitrate_kbps).collect()
    }

    pub fn is_monotone(&self) -> bool {
        self.steps.windows(2).all(|w| w[0].resolution <= w[1].resolution)
    }
}
