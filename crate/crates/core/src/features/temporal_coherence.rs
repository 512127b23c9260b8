//! Spectral magnitude coherence between adjacent frames.

use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use super::pool::{nested_names, pool_nested, PoolSpec, ALL_MOMENTS, MEAN_STD};
use super::FeatureError;
use crate::video::{FrameYuv, Plane};

pub const EPSILON: f64 = 1e-12;

const SPEC: PoolSpec = PoolSpec {
    spatial: ALL_MOMENTS,
    temporal: MEAN_STD,
};

/// Magnitudes of the 2-D DFT of a plane, row-major.
pub fn spectrum_magnitude(plane: &Plane) -> Vec<f64> {
    let (w, h) = (plane.width, plane.height);
    let mut planner = FftPlanner::<f64>::new();
    let row_fft = planner.plan_fft_forward(w);
    let col_fft = planner.plan_fft_forward(h);
    let mut buf: Vec<Complex<f64>> = plane.data.iter().map(|&v| Complex::new(v, 0.0)).collect();
    for row in buf.chunks_exact_mut(w) {
        row_fft.process(row);
    }
    let mut column = vec![Complex::new(0.0, 0.0); h];
    for x in 0..w {
        for y in 0..h {
            column[y] = buf[y * w + x];
        }
        col_fft.process(&mut column);
        for y in 0..h {
            buf[y * w + x] = column[y];
        }
    }
    buf.iter().map(|c| c.norm()).collect()
}

/// Per-bin coherence `2|A||B| / (|A|^2 + |B|^2 + eps)`, DC bin excluded.
pub fn bin_coherence(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter()
        .zip(b)
        .skip(1)
        .map(|(&x, &y)| 2.0 * x * y / (x * x + y * y + EPSILON))
        .collect()
}

/// 8 values: {mean, std, skew, kurtosis} over bins, then {mean, std} over
/// adjacent frame pairs.
pub fn temporal_coherence(video: &[FrameYuv]) -> Result<Vec<f64>, FeatureError> {
    if video.len() < 2 {
        return Err(FeatureError::NeedTwoFrames);
    }
    let spectra: Vec<Vec<f64>> = video.par_iter().map(|f| spectrum_magnitude(&f.y)).collect();
    let pairs: Vec<Vec<f64>> = spectra
        .windows(2)
        .map(|w| bin_coherence(&w[0], &w[1]))
        .collect();
    pool_nested(&pairs, SPEC)
}

pub fn names() -> Vec<String> {
    nested_names("tc", SPEC)
}
