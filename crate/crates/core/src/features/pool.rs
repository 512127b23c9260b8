//! Moment pooling used by every low-level feature.

use super::FeatureError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stat {
    Mean,
    Std,
    Skew,
    Kurtosis,
}

impl Stat {
    pub fn name(&self) -> &'static str {
        match self {
            Stat::Mean => "mean",
            Stat::Std => "std",
            Stat::Skew => "skew",
            Stat::Kurtosis => "kurtosis",
        }
    }
}

pub const MEAN: &[Stat] = &[Stat::Mean];
pub const MEAN_STD: &[Stat] = &[Stat::Mean, Stat::Std];
pub const ALL_MOMENTS: &[Stat] = &[Stat::Mean, Stat::Std, Stat::Skew, Stat::Kurtosis];

/// Spatial (F1) and temporal (F2) pooling applied to one feature row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PoolSpec {
    pub spatial: &'static [Stat],
    pub temporal: &'static [Stat],
}

/// Population moments of `values`.
///
/// Returns the requested statistics in the order given. Std divides by N,
/// kurtosis is excess kurtosis. A spread below 1e-12 of the largest
/// magnitude is treated as zero variance: std, skew and kurtosis become 0.
pub fn pool(values: &[f64], stats: &[Stat]) -> Result<Vec<f64>, FeatureError> {
    if values.is_empty() {
        return Err(FeatureError::EmptyPool);
    }
    let n = values.len() as f64;
    let mean = anchored_mean(values);
    let needs_higher = stats.iter().any(|s| *s != Stat::Mean);
    let (mut std, mut skew, mut kurt) = (0.0, 0.0, 0.0);
    if needs_higher {
        let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
        for &v in values {
            let d = v - mean;
            let d2 = d * d;
            m2 += d2;
            m3 += d2 * d;
            m4 += d2 * d2;
        }
        m2 /= n;
        m3 /= n;
        m4 /= n;
        let scale = values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let s = m2.sqrt();
        if s > 1e-12 * scale {
            std = s;
            skew = m3 / (s * s * s);
            kurt = m4 / (m2 * m2) - 3.0;
        }
    }
    Ok(stats
        .iter()
        .map(|s| match s {
            Stat::Mean => mean,
            Stat::Std => std,
            Stat::Skew => skew,
            Stat::Kurtosis => kurt,
        })
        .collect())
}

/// Mean computed relative to the first sample, exact for constant input.
pub fn anchored_mean(values: &[f64]) -> f64 {
    let a = values[0];
    a + values.iter().map(|v| v - a).sum::<f64>() / values.len() as f64
}

/// Two-level pooling: `per_unit` holds one vector of spatial samples per
/// frame (or frame pair). Output is ordered spatial-stat major.
pub fn pool_nested(per_unit: &[Vec<f64>], spec: PoolSpec) -> Result<Vec<f64>, FeatureError> {
    let spatial: Vec<Vec<f64>> = per_unit
        .iter()
        .map(|v| pool(v, spec.spatial))
        .collect::<Result<_, _>>()?;
    pool_temporal(&spatial, spec.spatial.len(), spec.temporal)
}

/// Temporal pooling of per-unit rows with `width` columns each.
pub fn pool_temporal(rows: &[Vec<f64>], width: usize, temporal: &[Stat]) -> Result<Vec<f64>, FeatureError> {
    if rows.is_empty() {
        return Err(FeatureError::EmptyPool);
    }
    let mut out = Vec::with_capacity(width * temporal.len());
    for col in 0..width {
        let series: Vec<f64> = rows.iter().map(|r| r[col]).collect();
        out.extend(pool(&series, temporal)?);
    }
    Ok(out)
}

/// Names for a nested pooling row, matching [`pool_nested`] order.
pub fn nested_names(prefix: &str, spec: PoolSpec) -> Vec<String> {
    let mut names = Vec::new();
    for s in spec.spatial {
        for t in spec.temporal {
            names.push(format!("{prefix}_{}_{}", s.name(), t.name()));
        }
    }
    names
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn constant_input_has_zero_higher_moments() {
        assert_eq!(pool(&[2.0, 2.0, 2.0], ALL_MOMENTS).unwrap(), vec![2.0, 0.0, 0.0, 0.0]);
        let v = pool(&[0.1, 0.1, 0.1], ALL_MOMENTS).unwrap();
        assert_eq!(&v[1..], &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn two_point_mean_std() {
        assert_eq!(pool(&[0.0, 1.0], MEAN_STD).unwrap(), vec![0.5, 0.5]);
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(matches!(pool(&[], MEAN), Err(FeatureError::EmptyPool)));
    }

    #[test]
    fn known_skew_and_excess_kurtosis() {
        // {0,0,0,1}: mean .25, m2 = .1875, m3 = .140625, m4 = .1992...
        let v = pool(&[0.0, 0.0, 0.0, 1.0], ALL_MOMENTS).unwrap();
        let m2: f64 = 0.1875;
        let m3 = 3.0 * (-0.25f64).powi(3) / 4.0 + 0.75f64.powi(3) / 4.0;
        let m4 = 3.0 * 0.25f64.powi(4) / 4.0 + 0.75f64.powi(4) / 4.0;
        assert!((v[2] - m3 / m2.powf(1.5)).abs() < 1e-12);
        assert!((v[3] - (m4 / (m2 * m2) - 3.0)).abs() < 1e-12);
    }

    #[test]
    fn nested_order_is_spatial_major() {
        let spec = PoolSpec {
            spatial: MEAN_STD,
            temporal: ALL_MOMENTS,
        };
        let names = nested_names("si", spec);
        assert_eq!(names[0], "si_mean_mean");
        assert_eq!(names[4], "si_std_mean");
        let out = pool_nested(&[vec![1.0, 3.0], vec![1.0, 3.0]], spec).unwrap();
        assert_eq!(out, vec![2.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0]);
    }

    proptest! {
        #[test]
        fn pooling_is_permutation_invariant(mut v in proptest::collection::vec(-100.0f64..100.0, 1..40), seed in any::<u64>()) {
            let a = pool(&v, ALL_MOMENTS).unwrap();
            use rand::{seq::SliceRandom, SeedableRng};
            v.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            let b = pool(&v, ALL_MOMENTS).unwrap();
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((x - y).abs() <= 1e-9 * (1.0 + x.abs()));
            }
        }
    }
}
