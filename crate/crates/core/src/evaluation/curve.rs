use super::EvalError;
use crate::ladder::{BitrateLadder, RqCurve};
use crate::types::RqPoint;

/// Collects, for each step `i`, the measured points at the step's resolution
/// with bitrate in `[b_i, b_{i+1})`; the last step is open-ended.
pub fn rq_curve_from_ladder(ladder: &BitrateLadder, points: &[RqPoint]) -> Result<RqCurve, EvalError> {
    let mut out: Vec<RqPoint> = Vec::new();
    for (i, step) in ladder.steps.iter().enumerate() {
        let upper = ladder.steps.get(i + 1).map_or(f64::INFINITY, |s| s.bitrate_kbps);
        out.extend(
            points
                .iter()
                .filter(|p| p.resolution() == step.resolution && p.bitrate >= step.bitrate_kbps && p.bitrate < upper)
                .cloned(),
        );
    }
    out.sort_by(|a, b| {
        a.bitrate
            .total_cmp(&b.bitrate)
            .then(a.job.width.cmp(&b.job.width))
            .then(a.job.crf.cmp(&b.job.crf))
    });
    out.dedup();
    if out.is_empty() {
        return Err(EvalError::EmptyCurve);
    }
    Ok(RqCurve { points: out })
}
