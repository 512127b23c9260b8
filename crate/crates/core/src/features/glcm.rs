//! Block-wise gray-level co-occurrence texture statistics.

use rayon::prelude::*;

use super::pool::{pool_nested, PoolSpec, ALL_MOMENTS, MEAN_STD};
use super::FeatureError;
use crate::video::{FrameYuv, Plane};

pub const LEVELS: usize = 32;
pub const BLOCK: usize = 64;

/// Pixel offsets (dx, dy) for 0°, 45°, 90° and 135° at distance 1.
pub const OFFSETS: [(isize, isize); 4] = [(1, 0), (1, -1), (0, -1), (-1, -1)];

pub const PROPERTY_NAMES: [&str; 4] = ["correlation", "contrast", "energy", "homogeneity"];

const SPEC: PoolSpec = PoolSpec {
    spatial: MEAN_STD,
    temporal: ALL_MOMENTS,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GlcmProps {
    pub correlation: f64,
    pub contrast: f64,
    pub energy: f64,
    pub homogeneity: f64,
}

impl GlcmProps {
    pub fn to_array(&self) -> [f64; 4] {
        [self.correlation, self.contrast, self.energy, self.homogeneity]
    }
}

#[inline]
pub fn quantize(v: f64) -> usize {
    ((v.clamp(0.0, 1.0) * LEVELS as f64) as usize).min(LEVELS - 1)
}

/// Normalized symmetric co-occurrence matrix of one block, with pair counts
/// from all four angles pooled before normalization.
pub fn block_matrix(plane: &Plane, x0: usize, y0: usize, size: usize) -> Vec<f64> {
    let mut q = vec![0usize; size * size];
    for y in 0..size {
        for x in 0..size {
            q[y * size + x] = quantize(plane.at(x0 + x, y0 + y));
        }
    }
    let mut counts = vec![0u64; LEVELS * LEVELS];
    let s = size as isize;
    for &(dx, dy) in &OFFSETS {
        for y in 0..s {
            let ny = y + dy;
            if ny < 0 || ny >= s {
                continue;
            }
            for x in 0..s {
                let nx = x + dx;
                if nx < 0 || nx >= s {
                    continue;
                }
                let a = q[(y * s + x) as usize];
                let b = q[(ny * s + nx) as usize];
                counts[a * LEVELS + b] += 1;
                counts[b * LEVELS + a] += 1;
            }
        }
    }
    let total: u64 = counts.iter().sum();
    counts.iter().map(|&c| c as f64 / total as f64).collect()
}

/// Haralick-style properties of a normalized matrix. Energy is the square
/// root of the angular second moment; a zero-variance matrix has
/// correlation 1.
pub fn properties(p: &[f64]) -> GlcmProps {
    let mut contrast = 0.0;
    let mut homogeneity = 0.0;
    let mut asm = 0.0;
    let mut mu = 0.0;
    for i in 0..LEVELS {
        for j in 0..LEVELS {
            let v = p[i * LEVELS + j];
            if v == 0.0 {
                continue;
            }
            let d = i as f64 - j as f64;
            contrast += v * d * d;
            homogeneity += v / (1.0 + d * d);
            asm += v * v;
            mu += i as f64 * v;
        }
    }
    let mut var = 0.0;
    let mut cov = 0.0;
    for i in 0..LEVELS {
        for j in 0..LEVELS {
            let v = p[i * LEVELS + j];
            if v == 0.0 {
                continue;
            }
            let di = i as f64 - mu;
            let dj = j as f64 - mu;
            var += v * di * di;
            cov += v * di * dj;
        }
    }
    let correlation = if var < 1e-15 { 1.0 } else { cov / var };
    GlcmProps {
        correlation,
        contrast,
        energy: asm.sqrt(),
        homogeneity,
    }
}

/// Properties of every full 64x64 block of a luma plane, in raster order.
pub fn frame_blocks(plane: &Plane) -> Result<Vec<GlcmProps>, FeatureError> {
    if plane.width < BLOCK || plane.height < BLOCK {
        return Err(FeatureError::BlockTooLarge {
            block: BLOCK,
            width: plane.width,
            height: plane.height,
        });
    }
    let bx = plane.width / BLOCK;
    let by = plane.height / BLOCK;
    Ok((0..bx * by)
        .map(|i| {
            let (x, y) = (i % bx, i / bx);
            properties(&block_matrix(plane, x * BLOCK, y * BLOCK, BLOCK))
        })
        .collect())
}

/// 32 values: for each property, {mean, std} over blocks then
/// {mean, std, skew, kurtosis} over frames.
pub fn glcm_features(video: &[FrameYuv]) -> Result<Vec<f64>, FeatureError> {
    if video.is_empty() {
        return Err(FeatureError::NoFrames);
    }
    let per_frame: Vec<Vec<GlcmProps>> = video
        .par_iter()
        .map(|f| frame_blocks(&f.y))
        .collect::<Result<_, _>>()?;
    let mut out = Vec::with_capacity(32);
    for prop in 0..4 {
        let units: Vec<Vec<f64>> = per_frame
            .iter()
            .map(|blocks| blocks.iter().map(|b| b.to_array()[prop]).collect())
            .collect();
        out.extend(pool_nested(&units, SPEC)?);
    }
    Ok(out)
}

pub fn names() -> Vec<String> {
    PROPERTY_NAMES
        .iter()
        .flat_map(|p| super::pool::nested_names(&format!("glcm_{p}"), SPEC))
        .collect()
}
