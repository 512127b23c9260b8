//! Per-video BD comparisons and cohort report rows.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::bd::{bd_quality, bd_rate};
use super::f75::{f75, GainPair, VideoGains};
use super::EvalError;
use crate::ladder::RqCurve;

#[derive(Debug, Clone, PartialEq)]
pub struct VideoEvaluation {
    pub video_id: String,
    /// Method against the hull; `None` when the curves do not overlap.
    pub vs_hull: Option<GainPair>,
    /// Method against the fixed ladder.
    pub vs_fixed: Option<GainPair>,
    /// Hull against the fixed ladder.
    pub hull_vs_fixed: Option<GainPair>,
    /// Any fit used fewer than four points.
    pub low_degree: bool,
}

fn compare(reference: Option<&RqCurve>, test: Option<&RqCurve>, low: &mut bool) -> Option<GainPair> {
    let (r, t) = (reference?, test?);
    let rate = bd_rate(r, t).ok()?;
    let vmaf = bd_quality(r, t).ok()?;
    *low |= rate.low_degree || vmaf.low_degree;
    Some(GainPair {
        bd_rate: rate.value,
        bd_vmaf: vmaf.value,
    })
}

/// `method` is `None` when its ladder collected no points.
pub fn evaluate_video(
    video_id: &str,
    method: Option<&RqCurve>,
    hull: &RqCurve,
    fixed: Option<&RqCurve>,
) -> VideoEvaluation {
    let mut low = false;
    VideoEvaluation {
        video_id: video_id.to_string(),
        vs_hull: compare(Some(hull), method, &mut low),
        vs_fixed: compare(fixed, method, &mut low),
        hull_vs_fixed: compare(fixed, Some(hull), &mut low),
        low_degree: low,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub method: String,
    pub codec: String,
    pub preset: String,
    pub mean_bd_rate_vs_hull: f64,
    pub mean_bd_vmaf_vs_hull: f64,
    pub mean_bd_rate_vs_fixed: f64,
    pub f75: f64,
    pub n_videos: usize,
    pub n_no_overlap: usize,
    /// Empty, `low_degree` when a fit used fewer than four points, or the
    /// reason a method could not be scored.
    pub flag: String,
}

impl ReportRow {
    /// Placeholder row for a method that produced nothing to score.
    pub fn unscored(method: &str, codec: &str, preset: &str, flag: &str) -> Self {
        Self {
            method: method.to_string(),
            codec: codec.to_string(),
            preset: preset.to_string(),
            mean_bd_rate_vs_hull: f64::NAN,
            mean_bd_vmaf_vs_hull: f64::NAN,
            mean_bd_rate_vs_fixed: f64::NAN,
            f75: f64::NAN,
            n_videos: 0,
            n_no_overlap: 0,
            flag: flag.to_string(),
        }
    }
}

fn mean(v: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = v.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        f64::NAN
    } else {
        s / n as f64
    }
}

/// Hull comparisons without overlap are left out of the hull means; fixed
/// ladder comparisons without overlap count as zero gain.
pub fn evaluate_method(
    method: &str,
    codec: &str,
    preset: &str,
    videos: &[VideoEvaluation],
) -> Result<ReportRow, EvalError> {
    if videos.is_empty() {
        return Err(EvalError::EmptyInput);
    }
    let gains: Vec<VideoGains> = videos
        .iter()
        .map(|v| VideoGains {
            method: v.vs_fixed,
            hull: v.hull_vs_fixed,
        })
        .collect();
    Ok(ReportRow {
        method: method.to_string(),
        codec: codec.to_string(),
        preset: preset.to_string(),
        mean_bd_rate_vs_hull: mean(videos.iter().filter_map(|v| v.vs_hull.map(|g| g.bd_rate))),
        mean_bd_vmaf_vs_hull: mean(videos.iter().filter_map(|v| v.vs_hull.map(|g| g.bd_vmaf))),
        mean_bd_rate_vs_fixed: mean(videos.iter().map(|v| v.vs_fixed.map_or(0.0, |g| g.bd_rate))),
        f75: f75(&gains)?,
        n_videos: videos.len(),
        n_no_overlap: videos
            .iter()
            .filter(|v| v.vs_hull.is_none() || v.vs_fixed.is_none())
            .count(),
        flag: if videos.iter().any(|v| v.low_degree) {
            "low_degree".into()
        } else {
            String::new()
        },
    })
}

pub fn write_report_csv(path: &Path, rows: &[ReportRow]) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluation::bd::tests::curve;

    #[test]
    fn hull_against_itself() {
        let hull = curve(&[(300.0, 40.0), (900.0, 62.0), (2500.0, 80.0), (7000.0, 93.0)]);
        let fixed = curve(&[(300.0, 35.0), (900.0, 55.0), (2500.0, 74.0), (7000.0, 90.0)]);
        let v: Vec<VideoEvaluation> = (0..3)
            .map(|i| evaluate_video(&format!("v{i}"), Some(&hull), &hull, Some(&fixed)))
            .collect();
        let row = evaluate_method("hull", "x265", "slow", &v).unwrap();
        assert!(row.mean_bd_rate_vs_hull.abs() < 1e-9);
        assert!(row.mean_bd_vmaf_vs_hull.abs() < 1e-9);
        assert!(row.mean_bd_rate_vs_fixed < 0.0);
        assert_eq!(row.f75, 1.0);
        assert_eq!((row.n_videos, row.n_no_overlap), (3, 0));
    }

    #[test]
    fn no_overlap_counts_as_zero_gain() {
        let hull = curve(&[(300.0, 40.0), (900.0, 62.0), (2500.0, 80.0), (7000.0, 93.0)]);
        let fixed = curve(&[(300.0, 35.0), (900.0, 55.0), (2500.0, 74.0), (7000.0, 90.0)]);
        let off = curve(&[(30000.0, 99.0), (40000.0, 99.5)]);
        let a = evaluate_video("a", Some(&off), &hull, Some(&fixed));
        let b = evaluate_video("b", Some(&hull), &hull, Some(&fixed));
        assert!(a.vs_fixed.is_none());
        let row = evaluate_method("m", "x265", "slow", &[a, b.clone()]).unwrap();
        assert_eq!(row.n_no_overlap, 1);
        assert!((row.mean_bd_rate_vs_fixed - b.vs_fixed.unwrap().bd_rate / 2.0).abs() < 1e-12);
        assert_eq!(row.f75, 0.5);
    }

    #[test]
    fn csv_header() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("r.csv");
        let row = ReportRow {
            method: "fixed".into(),
            codec: "x265".into(),
            preset: "slow".into(),
            mean_bd_rate_vs_hull: 1.0,
            mean_bd_vmaf_vs_hull: -0.5,
            mean_bd_rate_vs_fixed: 0.0,
            f75: 0.0,
            n_videos: 2,
            n_no_overlap: 0,
            flag: String::new(),
        };
        write_report_csv(&p, &[row]).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert!(text.starts_with(
            "method,codec,preset,mean_bd_rate_vs_hull,mean_bd_vmaf_vs_hull,mean_bd_rate_vs_fixed,f75,n_videos,n_no_overlap,flag\n"
        ));
    }
}
