//! The 145-dimensional VIFF vector: 72 information values per frame, 72 per
//! frame difference and the mean absolute luminance difference, each
//! averaged over time.

use rayon::prelude::*;

use super::{gsm_fit, subband_information, wavelet_subbands, VifConfig, M, SCALES};
use crate::features::{FeatureConfig, FeatureError, FeatureSetId, FeatureVector};
use crate::video::{FrameYuv, Plane};

const PER_FIELD: usize = SCALES * 2 * M;
const SUBBAND_NAMES: [&str; 2] = ["lh", "hl"];

/// 72 values ordered scale, subband, eigen-index.
pub fn field_information(field: &Plane, cfg: &VifConfig) -> Result<Vec<f64>, FeatureError> {
    let pyr = wavelet_subbands(field);
    let mut out = Vec::with_capacity(PER_FIELD);
    for scale in &pyr.scales {
        for sub in scale {
            out.extend(subband_information(&gsm_fit(sub)?, cfg));
        }
    }
    Ok(out)
}

fn mean_rows(rows: &[Vec<f64>]) -> Vec<f64> {
    let mut acc = vec![0.0; rows[0].len()];
    for r in rows {
        for (a, v) in acc.iter_mut().zip(r) {
            *a += v;
        }
    }
    acc.iter_mut().for_each(|a| *a /= rows.len() as f64);
    acc
}

pub fn vif_features(video: &[FrameYuv], cfg: &FeatureConfig) -> Result<FeatureVector, FeatureError> {
    if video.len() < 2 {
        return Err(FeatureError::NeedTwoFrames);
    }
    let vcfg = VifConfig {
        sigma_n_sq: cfg.sigma_n_sq,
    };
    let luma: Vec<Plane> = video
        .par_iter()
        .map(|f| match cfg.target {
            Some(t) if f.width() != t.width as usize || f.height() != t.height as usize => {
                f.y.resize(t.width as usize, t.height as usize)
            }
            _ => f.y.clone(),
        })
        .collect();
    let diffs: Vec<Plane> = luma.windows(2).map(|w| w[1].diff(&w[0])).collect();

    let f_rows: Vec<Vec<f64>> = luma
        .par_iter()
        .map(|p| field_information(p, &vcfg))
        .collect::<Result<_, _>>()?;
    let d_rows: Vec<Vec<f64>> = diffs
        .par_iter()
        .map(|p| field_information(p, &vcfg))
        .collect::<Result<_, _>>()?;
    let abs_diff = diffs
        .iter()
        .map(|d| d.data.iter().map(|v| v.abs()).sum::<f64>() / d.data.len() as f64)
        .sum::<f64>()
        / diffs.len() as f64;

    let mut values = mean_rows(&f_rows);
    values.extend(mean_rows(&d_rows));
    values.push(abs_diff);
    Ok(FeatureVector::new(FeatureSetId::Viff, vif_names(), values))
}

pub fn vif_names() -> Vec<String> {
    let mut names = Vec::with_capacity(2 * PER_FIELD + 1);
    for field in ["f", "d"] {
        for k in 1..=SCALES {
            for b in SUBBAND_NAMES {
                for j in 1..=M {
                    names.push(format!("viff_{field}_s{k}_{b}_i{j}"));
                }
            }
        }
    }
    names.push("viff_abs_diff".into());
    names
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::video::ChromaFormat;
    use rand::{Rng, SeedableRng};

    fn clip(planes: Vec<Plane>) -> Vec<FrameYuv> {
        planes
            .into_iter()
            .map(|p| FrameYuv::from_luma(p, ChromaFormat::Yuv420))
            .collect()
    }

    fn noise(seed: u64) -> Plane {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        Plane::from_fn(160, 144, |x, y| 0.3 * rng.random::<f64>() + 0.002 * (x + y) as f64)
    }

    #[test]
    fn constant_video_is_all_zero() {
        let v = clip(vec![Plane::filled(144, 144, 0.4); 2]);
        let f = vif_features(&v, &FeatureConfig::native()).unwrap();
        assert_eq!(f.len(), 145);
        assert!(f.values.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn static_video_has_zero_difference_features() {
        let p = noise(1);
        let f = vif_features(&clip(vec![p.clone(), p.clone(), p]), &FeatureConfig::native()).unwrap();
        assert!(f.values[..72].iter().any(|&x| x > 0.0));
        assert!(f.values[72..].iter().all(|&x| x == 0.0));
    }

    #[test]
    fn information_is_ordered_and_nonnegative() {
        let f = vif_features(&clip(vec![noise(2), noise(3)]), &FeatureConfig::native()).unwrap();
        assert!(f.values.iter().all(|&x| x >= 0.0));
        for chunk in f.values[..144].chunks(M) {
            for w in chunk.windows(2) {
                assert!(w[0] >= w[1] - 1e-12);
            }
        }
    }

    #[test]
    fn dc_offset_leaves_frame_features_unchanged() {
        let a = noise(4);
        let b = noise(5);
        let shift = |p: &Plane| Plane::new(p.width, p.height, p.data.iter().map(|v| v + 0.25).collect());
        let cfg = FeatureConfig::native();
        let x = vif_features(&clip(vec![a.clone(), b.clone()]), &cfg).unwrap();
        let y = vif_features(&clip(vec![shift(&a), shift(&b)]), &cfg).unwrap();
        for (p, q) in x.values[..72].iter().zip(&y.values[..72]) {
            assert!((p - q).abs() < 1e-9 * p.abs().max(1.0));
        }
    }

    #[test]
    fn single_frame_is_rejected() {
        assert_eq!(
            vif_features(&clip(vec![noise(1)]), &FeatureConfig::native()).unwrap_err(),
            FeatureError::NeedTwoFrames
        );
    }

    #[test]
    fn names_are_unique() {
        let n = vif_names();
        assert_eq!(n.len(), 145);
        assert_eq!(n.iter().collect::<std::collections::HashSet<_>>().len(), 145);
    }
}
