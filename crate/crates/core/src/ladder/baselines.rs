//! Reference ladders: fixed table, two-step hull and cross-over bitrates.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::hull::hull_ladder;
use super::select::{LogRateInterp, PredictedCurve};
use super::{BitrateLadder, LadderError, RqCurve};
use crate::types::{Resolution, STANDARD_RESOLUTIONS};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rung {
    pub bitrate_kbps: f64,
    pub width: u32,
    pub height: u32,
}

/// Bitrate-to-resolution table, loaded from TOML `[[rung]]` entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedLadderTable {
    #[serde(default)]
    pub source: String,
    #[serde(rename = "rung")]
    pub rungs: Vec<Rung>,
}

impl FixedLadderTable {
    pub fn from_toml(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        Ok(Self::from_toml(&std::fs::read_to_string(path)?)?)
    }

    /// The built-in table (HLS authoring guidance for HEVC, external provenance).
    pub fn builtin() -> Self {
        Self::from_toml(include_str!("../../../../config/fixed_ladder.toml")).expect("bundled table parses")
    }
}

/// Each step takes the highest rung whose bitrate is <= the step; a step
/// exactly on a rung gets that rung. Rung resolutions below 540p, and steps
/// below the first rung, map to 960x540.
pub fn fixed_ladder(table: &FixedLadderTable, steps: &[f64]) -> Result<BitrateLadder, LadderError> {
    if table.rungs.is_empty() {
        return Err(LadderError::EmptyTable);
    }
    let mut rungs = table.rungs.clone();
    rungs.sort_by(|a, b| a.bitrate_kbps.total_cmp(&b.bitrate_kbps));
    let res: Vec<Resolution> = steps
        .iter()
        .map(|&b| {
            rungs
                .iter()
                .rev()
                .find(|r| r.bitrate_kbps <= b)
                .map_or(Resolution::P540, |r| Resolution::new(r.width, r.height).max(Resolution::P540))
        })
        .collect();
    Ok(BitrateLadder::from_parts(steps, &res))
}

/// The fast encoder's hull read off at each step; reused for every target
/// encoder.
pub fn two_step_ladder(fast_hull: &RqCurve, steps: &[f64]) -> Result<BitrateLadder, LadderError> {
    hull_ladder(fast_hull, steps)
}

/// `crossovers[i]` is the switch bitrate from the i-th to the (i+1)-th
/// resolution in ascending order. Values are clipped to be non-decreasing;
/// each step gets the resolution after every cross-over at or below it.
pub fn crossover_ladder(crossovers: &[f64], resolutions: &[Resolution], steps: &[f64]) -> BitrateLadder {
    assert_eq!(crossovers.len() + 1, resolutions.len());
    let mut clipped = crossovers.to_vec();
    for i in 1..clipped.len() {
        clipped[i] = clipped[i].max(clipped[i - 1]);
    }
    let res: Vec<Resolution> = steps
        .iter()
        .map(|&b| resolutions[clipped.iter().filter(|&&c| c <= b).count()])
        .collect();
    BitrateLadder::from_parts(steps, &res)
}

/// Ascending standard resolutions, 540p first.
pub fn ascending_resolutions() -> Vec<Resolution> {
    let mut r = STANDARD_RESOLUTIONS.to_vec();
    r.sort();
    r
}

/// Bitrate at which the higher resolution's interpolated quality first
/// exceeds the lower one's. If the higher resolution never wins inside the
/// shared span the upper end of that span is returned; if it always wins,
/// the lower end. Without a shared span the midpoint of the gap is used.
pub fn crossover_bitrate(lower: &PredictedCurve, higher: &PredictedCurve) -> Option<f64> {
    let a = LogRateInterp::new(lower)?;
    let b = LogRateInterp::new(higher)?;
    let (lo, hi) = (a.lo().max(b.lo()), a.hi().min(b.hi()));
    if lo > hi {
        return Some((0.5 * (a.hi().min(b.hi()) + a.lo().max(b.lo()))).exp());
    }
    let mut knots: Vec<f64> = a
        .knots()
        .iter()
        .chain(b.knots())
        .copied()
        .filter(|&x| x >= lo && x <= hi)
        .chain([lo, hi])
        .collect();
    knots.sort_by(f64::total_cmp);
    knots.dedup();
    let d = |x: f64| b.eval(x) - a.eval(x);
    if d(knots[0]) > 0.0 {
        return Some(knots[0].exp());
    }
    for w in knots.windows(2) {
        let (d0, d1) = (d(w[0]), d(w[1]));
        if d1 > 0.0 {
            let t = -d0 / (d1 - d0);
            return Some((w[0] + t * (w[1] - w[0])).exp());
        }
    }
    Some(hi.exp())
}

/// Cross-overs between each adjacent pair of `curves` (sorted ascending).
pub fn crossover_bitrates(curves: &[PredictedCurve]) -> Option<Vec<f64>> {
    let mut sorted = curves.to_vec();
    sorted.sort_by_key(|c| c.resolution);
    sorted.windows(2).map(|w| crossover_bitrate(&w[0], &w[1])).collect()
}
