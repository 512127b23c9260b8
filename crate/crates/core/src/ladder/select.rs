//! Ladder construction from per-resolution predicted quality.

use super::{correction::top_bottom_correction, BitrateLadder, LadderError};
use crate::types::Resolution;

/// Predicted (bitrate kbps, quality) samples of one resolution.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictedCurve {
    pub resolution: Resolution,
    pub points: Vec<(f64, f64)>,
}

/// Monotone piecewise-linear quality in log-rate over the observed span.
#[derive(Debug, Clone)]
pub(crate) struct LogRateInterp {
    pub resolution: Resolution,
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl LogRateInterp {
    pub fn new(curve: &PredictedCurve) -> Option<Self> {
        let mut pts: Vec<(f64, f64)> = curve
            .points
            .iter()
            .filter(|(b, q)| *b > 0.0 && b.is_finite() && q.is_finite())
            .map(|&(b, q)| (b.ln(), q))
            .collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(b.1.total_cmp(&a.1)));
        pts.dedup_by(|later, kept| later.0 == kept.0);
        if pts.len() < 2 {
            return None;
        }
        let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
        let mut ys = Vec::with_capacity(pts.len());
        let mut run = f64::NEG_INFINITY;
        for p in &pts {
            run = run.max(p.1);
            ys.push(run);
        }
        Some(Self {
            resolution: curve.resolution,
            xs,
            ys,
        })
    }

    pub fn lo(&self) -> f64 {
        self.xs[0]
    }

    pub fn hi(&self) -> f64 {
        *self.xs.last().unwrap()
    }

    pub fn covers(&self, x: f64) -> bool {
        x >= self.lo() && x <= self.hi()
    }

    pub fn distance(&self, x: f64) -> f64 {
        if x < self.lo() {
            self.lo() - x
        } else if x > self.hi() {
            x - self.hi()
        } else {
            0.0
        }
    }

    /// Quality at log-rate `x`, clamped to the span.
    pub fn eval(&self, x: f64) -> f64 {
        if x <= self.lo() {
            return self.ys[0];
        }
        if x >= self.hi() {
            return *self.ys.last().unwrap();
        }
        let i = self.xs.partition_point(|&v| v <= x) - 1;
        let t = (x - self.xs[i]) / (self.xs[i + 1] - self.xs[i]);
        self.ys[i] + t * (self.ys[i + 1] - self.ys[i])
    }

    pub fn knots(&self) -> &[f64] {
        &self.xs
    }
}

fn resolution_at(interps: &[LogRateInterp], bitrate: f64) -> Resolution {
    let x = bitrate.ln();
    let mut best: Option<(f64, Resolution)> = None;
    for c in interps.iter().filter(|c| c.covers(x)) {
        let q = c.eval(x);
        if best.is_none_or(|(bq, _)| q > bq) {
            best = Some((q, c.resolution));
        }
    }
    if let Some((_, r)) = best {
        return r;
    }
    let mut nearest: Option<(f64, Resolution)> = None;
    for c in interps {
        let d = c.distance(x);
        if nearest.is_none_or(|(bd, _)| d < bd) {
            nearest = Some((d, c.resolution));
        }
    }
    nearest.expect("at least one curve").1
}

/// Uncorrected per-step argmax ladder.
pub fn ladder_from_predictions_raw(curves: &[PredictedCurve], steps: &[f64]) -> Result<BitrateLadder, LadderError> {
    let mut interps: Vec<LogRateInterp> = curves.iter().filter_map(LogRateInterp::new).collect();
    if interps.is_empty() {
        return Err(LadderError::InsufficientPredictions);
    }
    // ascending resolution so strict comparisons leave ties on the lower one
    interps.sort_by_key(|c| c.resolution);
    let res: Vec<Resolution> = steps.iter().map(|&b| resolution_at(&interps, b)).collect();
    Ok(BitrateLadder::from_parts(steps, &res))
}

pub fn ladder_from_predictions(curves: &[PredictedCurve], steps: &[f64]) -> Result<BitrateLadder, LadderError> {
    ladder_from_predictions_raw(curves, steps).map(|l| top_bottom_correction(&l))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn logistic(q_max: f64, mid: f64, slope: f64, b: f64) -> f64 {
        q_max / (1.0 + (-slope * (b.ln() - mid)).exp())
    }

    fn sampled(res: Resolution, f: impl Fn(f64) -> f64) -> PredictedCurve {
        let points = (0..150)
            .map(|i| {
                let b = 50.0 * 1.05f64.powi(i);
                (b, f(b))
            })
            .collect();
        PredictedCurve { resolution: res, points }
    }

    #[test]
    fn dominant_curve_wins_everywhere() {
        let lo = sampled(Resolution::P540, |b| logistic(80.0, 7.0, 1.2, b));
        let hi = sampled(Resolution::P1080, |b| logistic(95.0, 6.5, 1.2, b));
        let l = ladder_from_predictions(&[lo, hi], &super::super::STEPS_KBPS).unwrap();
        assert!(l.resolutions().iter().all(|&r| r == Resolution::P1080));
    }

    #[test]
    fn crossing_curves_switch_between_steps() {
        // same slope; choose the 1080p midpoint so the curves cross at 2500 kbps
        let (qa, qb, s, ma) = (80.0, 95.0, 1.3, 6.0);
        let x = 2500f64.ln();
        let mb = (((qb - qa) * (s * x).exp() + qb * (s * ma).exp()) / qa).ln() / s;
        assert!((logistic(qa, ma, s, 2500.0) - logistic(qb, mb, s, 2500.0)).abs() < 1e-9);
        let lo = sampled(Resolution::P720, |b| logistic(qa, ma, s, b));
        let hi = sampled(Resolution::P1080, |b| logistic(qb, mb, s, b));
        let l = ladder_from_predictions(&[hi, lo], &super::super::STEPS_KBPS).unwrap();
        for st in &l.steps {
            let want = if st.bitrate_kbps <= 2400.0 { Resolution::P720 } else { Resolution::P1080 };
            assert_eq!(st.resolution, want, "step {}", st.bitrate_kbps);
        }
    }

    #[test]
    fn uncovered_steps_use_nearest_span() {
        let a = PredictedCurve {
            resolution: Resolution::P540,
            points: vec![(300.0, 40.0), (600.0, 50.0)],
        };
        let b = PredictedCurve {
            resolution: Resolution::P1080,
            points: vec![(3000.0, 70.0), (6000.0, 80.0)],
        };
        let l = ladder_from_predictions(&[a, b], &[100.0, 1000.0, 2000.0, 20000.0]).unwrap();
        assert_eq!(
            l.resolutions(),
            vec![Resolution::P540, Resolution::P540, Resolution::P1080, Resolution::P1080]
        );
    }

    #[test]
    fn ties_prefer_lower_resolution() {
        let pts = vec![(100.0, 30.0), (10000.0, 90.0)];
        let a = PredictedCurve { resolution: Resolution::P2160, points: pts.clone() };
        let b = PredictedCurve { resolution: Resolution::P720, points: pts };
        let l = ladder_from_predictions(&[a, b], &[1000.0]).unwrap();
        assert_eq!(l.resolutions(), vec![Resolution::P720]);
    }

    #[test]
    fn needs_two_points() {
        let a = PredictedCurve {
            resolution: Resolution::P540,
            points: vec![(300.0, 40.0)],
        };
        assert_eq!(
            ladder_from_predictions(&[a], &[100.0]).unwrap_err(),
            LadderError::InsufficientPredictions
        );
    }

    #[test]
    fn interpolation_is_monotone() {
        let c = PredictedCurve {
            resolution: Resolution::P540,
            points: vec![(100.0, 30.0), (200.0, 50.0), (400.0, 45.0), (800.0, 70.0)],
        };
        let i = LogRateInterp::new(&c).unwrap();
        let mut prev = f64::NEG_INFINITY;
        for k in 0..100 {
            let q = i.eval(100f64.ln() + k as f64 * 0.03);
            assert!(q >= prev);
            prev = q;
        }
        assert_eq!(i.eval(400f64.ln()), 50.0);
    }
}
