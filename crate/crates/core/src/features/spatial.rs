//! Spatial information (Sobel), temporal information (frame differences)
//! and raw luma statistics.

use rayon::prelude::*;

use super::pool::{nested_names, pool_nested, PoolSpec, ALL_MOMENTS, MEAN_STD};
use super::FeatureError;
use crate::video::{FrameYuv, Plane};

const SPEC: PoolSpec = PoolSpec {
    spatial: MEAN_STD,
    temporal: ALL_MOMENTS,
};

/// 3x3 Sobel gradient magnitude over interior pixels.
pub fn sobel_magnitude(p: &Plane) -> Vec<f64> {
    if p.width < 3 || p.height < 3 {
        return Vec::new();
    }
    let mut out = Vec::with_capacity((p.width - 2) * (p.height - 2));
    for y in 1..p.height - 1 {
        for x in 1..p.width - 1 {
            let a = |dx: isize, dy: isize| p.at((x as isize + dx) as usize, (y as isize + dy) as usize);
            let gx = (a(1, -1) + 2.0 * a(1, 0) + a(1, 1)) - (a(-1, -1) + 2.0 * a(-1, 0) + a(-1, 1));
            let gy = (a(-1, 1) + 2.0 * a(0, 1) + a(1, 1)) - (a(-1, -1) + 2.0 * a(0, -1) + a(1, -1));
            out.push((gx * gx + gy * gy).sqrt());
        }
    }
    out
}

pub fn si(video: &[FrameYuv]) -> Result<Vec<f64>, FeatureError> {
    if video.is_empty() {
        return Err(FeatureError::NoFrames);
    }
    let units: Vec<Vec<f64>> = video.par_iter().map(|f| sobel_magnitude(&f.y)).collect();
    pool_nested(&units, SPEC)
}

pub fn ti(video: &[FrameYuv]) -> Result<Vec<f64>, FeatureError> {
    if video.len() < 2 {
        return Err(FeatureError::NeedTwoFrames);
    }
    let units: Vec<Vec<f64>> = video
        .par_windows(2)
        .map(|w| w[1].y.diff(&w[0].y).data)
        .collect();
    pool_nested(&units, SPEC)
}

pub fn cti(video: &[FrameYuv]) -> Result<Vec<f64>, FeatureError> {
    if video.is_empty() {
        return Err(FeatureError::NoFrames);
    }
    let units: Vec<Vec<f64>> = video.iter().map(|f| f.y.data.clone()).collect();
    pool_nested(&units, SPEC)
}

pub fn si_names() -> Vec<String> {
    nested_names("si", SPEC)
}

pub fn ti_names() -> Vec<String> {
    nested_names("ti", SPEC)
}

pub fn cti_names() -> Vec<String> {
    nested_names("cti", SPEC)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::video::ChromaFormat;

    fn clip(planes: Vec<Plane>) -> Vec<FrameYuv> {
        planes
            .into_iter()
            .map(|p| FrameYuv::from_luma(p, ChromaFormat::Yuv420))
            .collect()
    }

    #[test]
    fn constant_video_has_no_gradient_or_motion() {
        let v = clip(vec![Plane::filled(16, 16, 0.3); 3]);
        assert_eq!(si(&v).unwrap(), vec![0.0; 8]);
        assert_eq!(ti(&v).unwrap(), vec![0.0; 8]);
        let c = cti(&v).unwrap();
        assert_eq!(c[0], 0.3);
        assert_eq!(&c[1..], &[0.0; 7]);
    }

    #[test]
    fn ramp_sobel_response_is_eight_slope() {
        let s = 0.01;
        let v = clip(vec![Plane::from_fn(20, 10, |x, _| x as f64 * s)]);
        let out = si(&v).unwrap();
        assert!((out[0] - 8.0 * s).abs() < 1e-12, "{}", out[0]);
        assert!(out[4].abs() < 1e-12);
    }

    #[test]
    fn static_two_frame_video_has_zero_ti() {
        let p = Plane::from_fn(8, 8, |x, y| ((x * 7 + y * 3) % 11) as f64 / 11.0);
        assert_eq!(ti(&clip(vec![p.clone(), p])).unwrap(), vec![0.0; 8]);
    }

    #[test]
    fn ti_needs_two_frames() {
        let v = clip(vec![Plane::filled(4, 4, 0.0)]);
        assert_eq!(ti(&v).unwrap_err(), FeatureError::NeedTwoFrames);
    }
}
