//! Block-DCT texture energy: spatial energy E, temporal energy h and
//! luminescence L per channel, and the bitrate-coupled texture ratio.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::FeatureError;
use crate::video::{FrameYuv, Plane};

pub const BLOCK: usize = 32;

/// Returned by [`bitrate_dct_texture`] for a channel with no texture.
pub const DEGENERATE_TEXTURE: f64 = -1e9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DctTextureStats {
    pub e_y: f64,
    pub e_u: f64,
    pub e_v: f64,
    pub h_y: f64,
    pub h_u: f64,
    pub h_v: f64,
    pub l_y: f64,
    pub l_u: f64,
    pub l_v: f64,
}

impl DctTextureStats {
    /// Values in Y, U, V channel order, each as (E, h, L).
    pub fn to_feature_order(&self) -> [f64; 9] {
        [
            self.e_y, self.h_y, self.l_y, self.e_u, self.h_u, self.l_u, self.e_v, self.h_v, self.l_v,
        ]
    }
}

/// Orthonormal DCT-II basis, `basis[k * N + n]`.
fn dct_basis() -> &'static [f64] {
    static BASIS: std::sync::OnceLock<Vec<f64>> = std::sync::OnceLock::new();
    BASIS.get_or_init(|| {
        let n = BLOCK as f64;
        let mut b = vec![0.0; BLOCK * BLOCK];
        for k in 0..BLOCK {
            let alpha = if k == 0 { (1.0 / n).sqrt() } else { (2.0 / n).sqrt() };
            for i in 0..BLOCK {
                b[k * BLOCK + i] =
                    alpha * (std::f64::consts::PI * (2.0 * i as f64 + 1.0) * k as f64 / (2.0 * n)).cos();
            }
        }
        b
    })
}

/// Orthonormal 2-D DCT of the block at (x0, y0). The DC term is taken from
/// the block mean and the AC terms from the mean-removed block, so flat
/// blocks have exactly zero AC energy.
pub fn block_dct(plane: &Plane, x0: usize, y0: usize) -> Vec<f64> {
    let c = dct_basis();
    let mut x = vec![0.0; BLOCK * BLOCK];
    for r in 0..BLOCK {
        for col in 0..BLOCK {
            x[r * BLOCK + col] = plane.at(x0 + col, y0 + r);
        }
    }
    let mean = crate::features::pool::anchored_mean(&x);
    x.iter_mut().for_each(|v| *v -= mean);
    // rows: t = x * C^T
    let mut t = vec![0.0; BLOCK * BLOCK];
    for r in 0..BLOCK {
        for k in 0..BLOCK {
            let mut acc = 0.0;
            for i in 0..BLOCK {
                acc += x[r * BLOCK + i] * c[k * BLOCK + i];
            }
            t[r * BLOCK + k] = acc;
        }
    }
    // columns: out = C * t
    let mut out = vec![0.0; BLOCK * BLOCK];
    for k in 0..BLOCK {
        for col in 0..BLOCK {
            let mut acc = 0.0;
            for i in 0..BLOCK {
                acc += c[k * BLOCK + i] * t[i * BLOCK + col];
            }
            out[k * BLOCK + col] = acc;
        }
    }
    out[0] = mean * BLOCK as f64;
    out
}

fn plane_blocks(plane: &Plane) -> Result<Vec<Vec<f64>>, FeatureError> {
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
        .map(|i| block_dct(plane, (i % bx) * BLOCK, (i / bx) * BLOCK))
        .collect())
}

fn weight(weights: Option<&[f64]>, k: usize) -> f64 {
    weights.map_or(1.0, |w| w[k])
}

/// Per-frame (E, L) of one plane's blocks.
fn spatial_energy(blocks: &[Vec<f64>], weights: Option<&[f64]>) -> (f64, f64) {
    let n_ac = (BLOCK * BLOCK - 1) as f64;
    let mut e = 0.0;
    let mut l = 0.0;
    for b in blocks {
        let ac: f64 = b
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, v)| weight(weights, k) * v.abs())
            .sum();
        e += ac / n_ac;
        l += b[0].abs().sqrt();
    }
    let nb = blocks.len() as f64;
    (e / nb, l / nb)
}

fn temporal_energy(prev: &[Vec<f64>], cur: &[Vec<f64>], weights: Option<&[f64]>) -> f64 {
    let mut acc = 0.0;
    let mut count = 0usize;
    for (a, b) in prev.iter().zip(cur) {
        for (k, (x, y)) in a.iter().zip(b).enumerate() {
            acc += weight(weights, k) * (y - x).abs();
            count += 1;
        }
    }
    acc / count as f64
}

/// Temporally mean-pooled (E, h, L) for one channel.
fn channel_stats(planes: &[&Plane], weights: Option<&[f64]>) -> Result<(f64, f64, f64), FeatureError> {
    let blocks: Vec<Vec<Vec<f64>>> = planes
        .par_iter()
        .map(|p| plane_blocks(p))
        .collect::<Result<_, _>>()?;
    let n = blocks.len() as f64;
    let (mut e, mut l) = (0.0, 0.0);
    for b in &blocks {
        let (fe, fl) = spatial_energy(b, weights);
        e += fe;
        l += fl;
    }
    let hs: Vec<f64> = blocks
        .windows(2)
        .map(|w| temporal_energy(&w[0], &w[1], weights))
        .collect();
    let h = hs.iter().sum::<f64>() / hs.len() as f64;
    Ok((e / n, h, l / n))
}

/// DCT texture statistics of a clip; needs two frames for the temporal term.
pub fn dct_texture(video: &[FrameYuv], weights: Option<&[f64]>) -> Result<DctTextureStats, FeatureError> {
    if video.len() < 2 {
        return Err(FeatureError::NeedTwoFrames);
    }
    if let Some(w) = weights {
        assert_eq!(w.len(), BLOCK * BLOCK, "DCT weights must be 32x32");
    }
    let ys: Vec<&Plane> = video.iter().map(|f| &f.y).collect();
    let us: Vec<&Plane> = video.iter().map(|f| &f.u).collect();
    let vs: Vec<&Plane> = video.iter().map(|f| &f.v).collect();
    let (e_y, h_y, l_y) = channel_stats(&ys, weights)?;
    let (e_u, h_u, l_u) = channel_stats(&us, weights)?;
    let (e_v, h_v, l_v) = channel_stats(&vs, weights)?;
    Ok(DctTextureStats {
        e_y,
        e_u,
        e_v,
        h_y,
        h_u,
        h_v,
        l_y,
        l_u,
        l_v,
    })
}

/// `log2(sqrt(h / E)) + 2 log2(b)` per channel (Y, U, V); a channel with
/// zero E or h yields [`DEGENERATE_TEXTURE`].
pub fn bitrate_dct_texture(stats: &DctTextureStats, bitrate_kbps: f64) -> Result<[f64; 3], FeatureError> {
    if !(bitrate_kbps > 0.0) || !bitrate_kbps.is_finite() {
        return Err(FeatureError::InvalidBitrate(bitrate_kbps));
    }
    let term = |h: f64, e: f64| {
        if h > 0.0 && e > 0.0 {
            (h / e).sqrt().log2() + 2.0 * bitrate_kbps.log2()
        } else {
            DEGENERATE_TEXTURE
        }
    };
    Ok([
        term(stats.h_y, stats.e_y),
        term(stats.h_u, stats.e_u),
        term(stats.h_v, stats.e_v),
    ])
}

pub fn names() -> Vec<String> {
    let mut n = Vec::new();
    for c in ["y", "u", "v"] {
        for s in ["e", "h", "l"] {
            n.push(format!("dct_{s}_{c}_mean"));
        }
    }
    n
}

pub fn bitrate_names() -> Vec<String> {
    ["y", "u", "v"]
        .iter()
        .map(|c| format!("bitrate_dct_texture_{c}"))
        .collect()
}
