//! Colorfulness and chroma intensity.

use super::pool::{pool, pool_temporal, Stat, ALL_MOMENTS, MEAN_STD};
use super::FeatureError;
use crate::video::FrameYuv;

/// Weight applied to V-plane statistics.
pub const V_WEIGHT: f64 = 5.0;

/// BT.709 conversion of normalized YUV (chroma centered on 0.5) to RGB.
#[inline]
pub fn yuv_to_rgb(y: f64, u: f64, v: f64) -> (f64, f64, f64) {
    let (cb, cr) = (u - 0.5, v - 0.5);
    let r = y + 1.5748 * cr;
    let g = y - 0.187_324_272_930_648_4 * cb - 0.468_124_272_930_648_4 * cr;
    let b = y + 1.8556 * cb;
    (r, g, b)
}

/// Colorfulness of one frame: `sqrt(var_rg + var_yb) + 0.3 sqrt(mu_rg^2 + mu_yb^2)`
/// with chroma sampled at each luma position.
pub fn frame_colorfulness(frame: &FrameYuv) -> f64 {
    let (sx, sy) = frame.format.shifts();
    let n = (frame.width() * frame.height()) as f64;
    let mut rg = Vec::with_capacity(frame.width() * frame.height());
    let mut yb = Vec::with_capacity(frame.width() * frame.height());
    for y in 0..frame.height() {
        for x in 0..frame.width() {
            let (cx, cy) = (x >> sx, y >> sy);
            let (r, g, b) = yuv_to_rgb(frame.y.at(x, y), frame.u.at(cx, cy), frame.v.at(cx, cy));
            rg.push(r - g);
            yb.push(0.5 * (r + g) - b);
        }
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / n;
    let (m_rg, m_yb) = (mean(&rg), mean(&yb));
    let var = |v: &[f64], m: f64| v.iter().map(|a| (a - m) * (a - m)).sum::<f64>() / n;
    (var(&rg, m_rg) + var(&yb, m_yb)).sqrt() + 0.3 * (m_rg * m_rg + m_yb * m_yb).sqrt()
}

/// 4 values: {mean, std, skew, kurtosis} of per-frame colorfulness.
pub fn colorfulness(video: &[FrameYuv]) -> Result<Vec<f64>, FeatureError> {
    use rayon::prelude::*;
    let per_frame: Vec<f64> = video.par_iter().map(frame_colorfulness).collect();
    pool(&per_frame, ALL_MOMENTS)
}

/// 16 values: U {mean, std} and 5 x V {mean, std} per frame, each pooled
/// with {mean, std, skew, kurtosis} over frames.
pub fn chroma_intensity(video: &[FrameYuv]) -> Result<Vec<f64>, FeatureError> {
    if video.is_empty() {
        return Err(FeatureError::NoFrames);
    }
    let rows: Vec<Vec<f64>> = video
        .iter()
        .map(|f| {
            let u = pool(&f.u.data, MEAN_STD)?;
            let v = pool(&f.v.data, MEAN_STD)?;
            Ok(vec![u[0], u[1], V_WEIGHT * v[0], V_WEIGHT * v[1]])
        })
        .collect::<Result<_, FeatureError>>()?;
    pool_temporal(&rows, 4, ALL_MOMENTS)
}

pub fn cf_names() -> Vec<String> {
    ALL_MOMENTS.iter().map(|t| format!("cf_{}", t.name())).collect()
}

pub fn ci_names() -> Vec<String> {
    let mut names = Vec::new();
    for (plane, s) in [("u", Stat::Mean), ("u", Stat::Std), ("v", Stat::Mean), ("v", Stat::Std)] {
        for t in ALL_MOMENTS {
            names.push(format!("ci_{plane}_{}_{}", s.name(), t.name()));
        }
    }
    names
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::video::{ChromaFormat, Plane};
    use rand::{Rng, SeedableRng};

    /// Exact inverse of [`yuv_to_rgb`].
    fn rgb_to_yuv(r: f64, g: f64, b: f64) -> (f64, f64, f64) {
        let y = 0.2126 * r + 0.7152 * g + 0.0722 * b;
        (y, (b - y) / 1.8556 + 0.5, (r - y) / 1.5748 + 0.5)
    }

    #[test]
    fn gray_video_is_colorless() {
        let f = FrameYuv::from_luma(Plane::from_fn(8, 8, |x, _| x as f64 / 8.0), ChromaFormat::Yuv420);
        assert!(frame_colorfulness(&f).abs() < 1e-12);
        let out = colorfulness(&[f.clone(), f]).unwrap();
        assert!(out.iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn half_red_half_green_matches_direct_formula() {
        let (w, h) = (8, 4);
        let rgb = |x: usize| if x < w / 2 { (1.0, 0.0, 0.0) } else { (0.0, 1.0, 0.0) };
        let mut y = Vec::new();
        let mut u = Vec::new();
        let mut v = Vec::new();
        for _ in 0..h {
            for x in 0..w {
                let (r, g, b) = rgb(x);
                let (yy, uu, vv) = rgb_to_yuv(r, g, b);
                y.push(yy);
                u.push(uu);
                v.push(vv);
            }
        }
        let f = FrameYuv::new(
            Plane::new(w, h, y),
            Plane::new(w, h, u),
            Plane::new(w, h, v),
            ChromaFormat::Yuv444,
            8,
        )
        .unwrap();
        // direct evaluation on the RGB pixels: rg in {1, -1}, yb = 0.5 each
        let n = (w * h) as f64;
        let rg: Vec<f64> = (0..w * h).map(|i| if i % w < w / 2 { 1.0 } else { -1.0 }).collect();
        let mu_rg = rg.iter().sum::<f64>() / n;
        let var_rg = rg.iter().map(|a| (a - mu_rg).powi(2)).sum::<f64>() / n;
        let mu_yb = 0.5;
        let expected = var_rg.sqrt() + 0.3 * (mu_rg * mu_rg + mu_yb * mu_yb).sqrt();
        assert!((frame_colorfulness(&f) - expected).abs() < 1e-9);
    }

    #[test]
    fn single_frame_has_zero_temporal_spread() {
        let f = FrameYuv::from_luma(Plane::filled(4, 4, 0.5), ChromaFormat::Yuv420);
        let out = colorfulness(&[f]).unwrap();
        assert_eq!(&out[1..], &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn neutral_chroma_intensity() {
        let f = FrameYuv::from_luma(Plane::filled(8, 8, 0.2), ChromaFormat::Yuv420);
        let out = chroma_intensity(&[f.clone(), f]).unwrap();
        assert_eq!(out.len(), 16);
        assert_eq!(out[0], 0.5);
        assert_eq!(out[8], 2.5);
    }

    #[test]
    fn v_statistics_scale_linearly() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let mut frames = Vec::new();
        for _ in 0..3 {
            let y = Plane::from_fn(8, 8, |_, _| rng.random::<f64>());
            let u = Plane::from_fn(4, 4, |_, _| rng.random::<f64>() * 0.5);
            let v = Plane::from_fn(4, 4, |_, _| rng.random::<f64>() * 0.5);
            frames.push(FrameYuv::new(y, u, v, ChromaFormat::Yuv420, 8).unwrap());
        }
        let base = chroma_intensity(&frames).unwrap();
        let doubled: Vec<FrameYuv> = frames
            .iter()
            .map(|f| {
                let mut g = f.clone();
                g.v.data.iter_mut().for_each(|s| *s *= 2.0);
                g
            })
            .collect();
        let out = chroma_intensity(&doubled).unwrap();
        // V mean/std pooled by mean and std scale by 2; skew/kurtosis are scale-free
        for (i, name) in ci_names().iter().enumerate() {
            if name.starts_with("ci_v") && (name.ends_with("_mean") || name.ends_with("_std")) {
                assert!((out[i] - 2.0 * base[i]).abs() < 1e-12, "{name}");
            } else if name.starts_with("ci_u") {
                assert_eq!(out[i], base[i]);
            }
        }
        // direct recomputation of the U mean row
        let means: Vec<f64> = frames
            .iter()
            .map(|f| f.u.data.iter().sum::<f64>() / f.u.data.len() as f64)
            .collect();
        assert!((base[0] - means.iter().sum::<f64>() / 3.0).abs() < 1e-12);
    }
}
