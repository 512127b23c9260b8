//! Fraction of videos reaching 75% of the hull's gains over the fixed ladder.

use super::EvalError;

/// BD-rate (%) and BD-VMAF of one curve against the fixed ladder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainPair {
    pub bd_rate: f64,
    pub bd_vmaf: f64,
}

impl GainPair {
    pub const ZERO: GainPair = GainPair { bd_rate: 0.0, bd_vmaf: 0.0 };
}

/// Per-video comparison; `None` marks a curve with no overlap against the
/// fixed ladder, whose gains count as zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VideoGains {
    pub method: Option<GainPair>,
    pub hull: Option<GainPair>,
}

impl VideoGains {
    /// Savings `s = -bd_rate` and gain `g = bd_vmaf` must each reach
    /// `h - 0.25 |h|` of the hull's value, which is `0.75 h` for
    /// non-negative hull gains.
    pub fn passes(&self) -> bool {
        let m = self.method.unwrap_or(GainPair::ZERO);
        let h = self.hull.unwrap_or(GainPair::ZERO);
        let threshold = |x: f64| x - 0.25 * x.abs();
        -m.bd_rate >= threshold(-h.bd_rate) && m.bd_vmaf >= threshold(h.bd_vmaf)
    }
}

pub fn f75(videos: &[VideoGains]) -> Result<f64, EvalError> {
    if videos.is_empty() {
        return Err(EvalError::EmptyInput);
    }
    Ok(videos.iter().filter(|v| v.passes()).count() as f64 / videos.len() as f64)
}
