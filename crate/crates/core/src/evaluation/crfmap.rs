//! Matching target-encoder CRFs to fast-encoder CRFs by bitrate.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::types::{Resolution, RqPoint};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrfMap {
    /// (video_id, target CRF) → best fast CRF.
    pub per_video: BTreeMap<(String, i32), i32>,
    /// target CRF → (fast CRF → count).
    pub distribution: BTreeMap<i32, BTreeMap<i32, usize>>,
}

impl CrfMap {
    /// Most frequent fast CRF per target CRF, ties to the lower CRF.
    pub fn mode(&self) -> BTreeMap<i32, i32> {
        self.distribution
            .iter()
            .map(|(&t, d)| {
                let best = d
                    .iter()
                    .fold(None, |acc: Option<(i32, usize)>, (&c, &n)| match acc {
                        Some((_, bn)) if bn >= n => acc,
                        _ => Some((c, n)),
                    })
                    .expect("non-empty distribution");
                (t, best.0)
            })
            .collect()
    }
}

type Grid = HashMap<String, BTreeMap<i32, HashMap<Resolution, f64>>>;

fn index(points: &[RqPoint]) -> Grid {
    let mut g: Grid = HashMap::new();
    for p in points {
        g.entry(p.job.video_id.clone())
            .or_default()
            .entry(p.job.crf)
            .or_default()
            .insert(p.resolution(), p.bitrate.ln());
    }
    g
}

/// For every shared video and target CRF, the fast CRF minimizing the mean
/// |Δ ln bitrate| over resolutions present in both, ties to the lower CRF.
pub fn crf_map(fast: &[RqPoint], target: &[RqPoint]) -> Result<CrfMap, EvalError> {
    let fg = index(fast);
    let tg = index(target);
    let common: BTreeSet<&String> = fg.keys().filter(|k| tg.contains_key(*k)).collect();
    if common.is_empty() {
        return Err(EvalError::NoCommonVideos);
    }
    let mut per_video = BTreeMap::new();
    let mut distribution: BTreeMap<i32, BTreeMap<i32, usize>> = BTreeMap::new();
    for vid in common {
        for (&tcrf, trates) in &tg[vid] {
            let mut best: Option<(f64, i32)> = None;
            for (&fcrf, frates) in &fg[vid] {
                let diffs: Vec<f64> = trates
                    .iter()
                    .filter_map(|(r, lt)| frates.get(r).map(|lf| (lf - lt).abs()))
                    .collect();
                if diffs.is_empty() {
                    continue;
                }
                let cost = diffs.iter().sum::<f64>() / diffs.len() as f64;
                if best.is_none_or(|(bc, _)| cost < bc) {
                    best = Some((cost, fcrf));
                }
            }
            if let Some((_, fcrf)) = best {
                per_video.insert((vid.clone(), tcrf), fcrf);
                *distribution.entry(tcrf).or_default().entry(fcrf).or_default() += 1;
            }
        }
    }
    Ok(CrfMap {
        per_video,
        distribution,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{Codec, EncodeJob};

    fn grid(video: &str, codec: Codec, rate: impl Fn(Resolution, i32) -> f64) -> Vec<RqPoint> {
        let mut out = Vec::new();
        for res in [Resolution::P540, Resolution::P1080] {
            for crf in (10..=50).step_by(1) {
                out.push(RqPoint {
                    job: EncodeJob {
                        video_id: video.into(),
                        codec,
                        preset: "p".into(),
                        width: res.width,
                        height: res.height,
                        crf,
                    },
                    bitrate: rate(res, crf),
                    quality: 50.0,
                });
            }
        }
        out
    }

    fn a(res: Resolution) -> f64 {
        if res == Resolution::P540 { 9.0 } else { 10.5 }
    }

    #[test]
    fn identity_against_itself() {
        let pts = grid("x", Codec::X265, |r, c| (a(r) - 0.12 * c as f64).exp());
        let m = crf_map(&pts, &pts).unwrap();
        assert!(m.per_video.iter().all(|((_, t), f)| t == f));
    }

    #[test]
    fn constant_offset_for_doubled_rate() {
        // fast = 2 x target: exp(a - c crf_f) = 2 exp(a - c crf_t) → crf_f = crf_t + ln2 / c
        let c = 2f64.ln() / 3.0;
        let fast = grid("x", Codec::X265, |r, k| 2.0 * (a(r) - c * k as f64).exp());
        let target = grid("x", Codec::SvtAv1, |r, k| (a(r) - c * k as f64).exp());
        let m = crf_map(&fast, &target).unwrap();
        for t in 10..=47 {
            assert_eq!(m.per_video[&("x".to_string(), t)], t + 3);
        }
    }

    #[test]
    fn single_video_and_disjoint_sets() {
        let f = grid("x", Codec::X265, |r, k| (a(r) - 0.1 * k as f64).exp());
        let t = grid("y", Codec::X265, |r, k| (a(r) - 0.1 * k as f64).exp());
        assert_eq!(crf_map(&f, &t).unwrap_err(), EvalError::NoCommonVideos);
        let m = crf_map(&f, &f).unwrap();
        assert!(m.distribution.values().all(|d| d.values().sum::<usize>() == 1));
        assert_eq!(m.mode()[&20], 20);
    }
}
