//! Rate-quality convex hull across resolutions.

use super::{correction::top_bottom_correction, BitrateLadder, LadderError, QualityWindow, RqCurve};
use crate::types::{Resolution, RqPoint};

/// True when `b` lies on or below the segment a-p (a.x < b.x < p.x), with a
/// relative tolerance of 1e-12 on the cross product.
#[inline]
pub fn on_or_below(a: (f64, f64), b: (f64, f64), p: (f64, f64)) -> bool {
    let l = (b.0 - a.0) * (p.1 - a.1);
    let r = (b.1 - a.1) * (p.0 - a.0);
    l - r >= -1e-12 * (l.abs() + r.abs())
}

/// Upper-left frontier in (ln bitrate, quality), pruned to the vertices of
/// its concave majorant.
pub fn convex_hull(points: &[RqPoint], window: QualityWindow) -> Result<RqCurve, LadderError> {
    let mut pts: Vec<&RqPoint> = points
        .iter()
        .filter(|p| window.contains(p.quality) && p.bitrate > 0.0)
        .collect();
    if pts.is_empty() {
        return Err(LadderError::EmptyHull);
    }
    pts.sort_by(|a, b| a.bitrate.total_cmp(&b.bitrate).then(b.quality.total_cmp(&a.quality)));

    let mut frontier: Vec<&RqPoint> = Vec::new();
    for p in pts {
        if frontier.last().is_none_or(|l| p.quality > l.quality && p.bitrate > l.bitrate) {
            frontier.push(p);
        }
    }

    let xy = |p: &RqPoint| (p.bitrate.ln(), p.quality);
    let mut hull: Vec<&RqPoint> = Vec::with_capacity(frontier.len());
    for p in frontier {
        while hull.len() >= 2 && on_or_below(xy(hull[hull.len() - 2]), xy(hull[hull.len() - 1]), xy(p)) {
            hull.pop();
        }
        hull.push(p);
    }
    Ok(RqCurve {
        points: hull.into_iter().cloned().collect(),
    })
}

/// Resolution of the hull point nearest to `bitrate` in log-rate, ties to
/// the lower resolution.
pub fn hull_resolution_at(hull: &RqCurve, bitrate: f64) -> Resolution {
    let x = bitrate.ln();
    let mut best: Option<(f64, Resolution)> = None;
    for p in &hull.points {
        let d = (p.bitrate.ln() - x).abs();
        let r = p.resolution();
        best = match best {
            Some((bd, br)) if bd < d || (bd == d && br <= r) => Some((bd, br)),
            _ => Some((d, r)),
        };
    }
    best.expect("hull is non-empty").1
}

/// Ladder read off a hull at each step, then corrected.
pub fn hull_ladder(hull: &RqCurve, steps: &[f64]) -> Result<BitrateLadder, LadderError> {
    if hull.is_empty() {
        return Err(LadderError::EmptyHull);
    }
    let res: Vec<Resolution> = steps.iter().map(|&b| hull_resolution_at(hull, b)).collect();
    Ok(top_bottom_correction(&BitrateLadder::from_parts(steps, &res)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{Codec, EncodeJob};

    fn pt(res: Resolution, crf: i32, bitrate: f64, quality: f64) -> RqPoint {
        RqPoint {
            job: EncodeJob {
                video_id: "v".into(),
                codec: Codec::Synthetic,
                preset: "p".into(),
                width: res.width,
                height: res.height,
                crf,
            },
            bitrate,
            quality,
        }
    }

    #[test]
    fn singleton_hull() {
        let p = pt(Resolution::P720, 30, 1000.0, 60.0);
        let h = convex_hull(std::slice::from_ref(&p), QualityWindow::default()).unwrap();
        assert_eq!(h.points, vec![p]);
    }

    #[test]
    fn dominated_point_is_dropped() {
        let a = pt(Resolution::P720, 30, 1000.0, 70.0);
        let b = pt(Resolution::P1080, 30, 2000.0, 60.0);
        let h = convex_hull(&[b, a.clone()], QualityWindow::default()).unwrap();
        assert_eq!(h.points, vec![a]);
    }

    #[test]
    fn window_filters_and_empty_errors() {
        let lo = pt(Resolution::P540, 50, 100.0, 10.0);
        let hi = pt(Resolution::P2160, 10, 20000.0, 99.95);
        assert_eq!(
            convex_hull(&[lo, hi], QualityWindow::default()).unwrap_err(),
            LadderError::EmptyHull
        );
    }

    #[test]
    fn collinear_middle_point_is_pruned() {
        let a = pt(Resolution::P540, 40, 100.0, 30.0);
        let b = pt(Resolution::P540, 36, 1000.0, 50.0);
        let c = pt(Resolution::P720, 30, 10000.0, 70.0);
        let h = convex_hull(&[a.clone(), b, c.clone()], QualityWindow::default()).unwrap();
        assert_eq!(h.points.len(), 2);
        assert_eq!(h.points[0], a);
        assert_eq!(h.points[1], c);
    }

    #[test]
    fn nearest_point_ladder() {
        let h = RqCurve {
            points: vec![
                pt(Resolution::P540, 40, 300.0, 40.0),
                pt(Resolution::P1080, 30, 3000.0, 80.0),
            ],
        };
        let l = hull_ladder(&h, &[100.0, 900.0, 1000.0, 5000.0]).unwrap();
        assert_eq!(
            l.resolutions(),
            vec![Resolution::P540, Resolution::P540, Resolution::P1080, Resolution::P1080]
        );
    }
}
