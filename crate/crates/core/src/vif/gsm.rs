//! Gaussian scale mixture fit over 3x3 neighborhoods of a subband.

use super::{VifConfig, M};
use crate::features::FeatureError;
use crate::video::Plane;

const JACOBI_TOL: f64 = 1e-10;
const JACOBI_MAX_SWEEPS: usize = 100;
const PINV_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct GsmModel {
    /// Row-major M x M covariance of the mean-removed neighborhood vectors.
    pub cov: Vec<f64>,
    /// Eigenvalues, descending, clamped at 0.
    pub eigvals: Vec<f64>,
    /// Eigenvectors as columns, row-major M x M, matching `eigvals`.
    pub eigvecs: Vec<f64>,
    pub s_sq: Vec<f64>,
    pub block_count: usize,
}

/// Cyclic Jacobi eigendecomposition of a symmetric `n x n` matrix.
///
/// Returns eigenvalues (unsorted) and eigenvectors as columns.
pub fn jacobi_eigen(a: &[f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut a = a.to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let scale = a.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    for _ in 0..JACOBI_MAX_SWEEPS {
        let off = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .fold(0.0f64, |m, (i, j)| m.max(a[i * n + j].abs()));
        if off <= JACOBI_TOL * scale.max(f64::MIN_POSITIVE) || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    ((0..n).map(|i| a[i * n + i]).collect(), v)
}

/// Non-overlapping 3x3 neighborhoods, row-major within each block.
fn neighborhoods(sub: &Plane) -> Vec<[f64; M]> {
    let (bx, by) = (sub.width / 3, sub.height / 3);
    let mut out = Vec::with_capacity(bx * by);
    for j in 0..by {
        for i in 0..bx {
            let mut v = [0.0; M];
            for dy in 0..3 {
                for dx in 0..3 {
                    v[dy * 3 + dx] = sub.at(3 * i + dx, 3 * j + dy);
                }
            }
            out.push(v);
        }
    }
    out
}

pub fn gsm_fit(sub: &Plane) -> Result<GsmModel, FeatureError> {
    let mut blocks = neighborhoods(sub);
    let n = blocks.len();
    if n < M {
        return Err(FeatureError::TooFewBlocks { blocks: n, needed: M });
    }
    let mut mean = [0.0; M];
    for b in &blocks {
        for k in 0..M {
            mean[k] += b[k];
        }
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);
    for b in blocks.iter_mut() {
        for k in 0..M {
            b[k] -= mean[k];
        }
    }
    let mut cov = vec![0.0; M * M];
    for b in &blocks {
        for r in 0..M {
            for c in r..M {
                cov[r * M + c] += b[r] * b[c];
            }
        }
    }
    for r in 0..M {
        for c in r..M {
            cov[r * M + c] /= n as f64;
            cov[c * M + r] = cov[r * M + c];
        }
    }
    let (vals, vecs) = jacobi_eigen(&cov, M);
    let mut order: Vec<usize> = (0..M).collect();
    order.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]));
    let eigvals: Vec<f64> = order.iter().map(|&i| vals[i].max(0.0)).collect();
    let mut eigvecs = vec![0.0; M * M];
    for (new, &old) in order.iter().enumerate() {
        for r in 0..M {
            eigvecs[r * M + new] = vecs[r * M + old];
        }
    }
    let tol = PINV_RTOL * eigvals[0];
    let s_sq = blocks
        .iter()
        .map(|b| {
            let mut q = 0.0;
            for j in 0..M {
                if eigvals[j] > tol && eigvals[j] > 0.0 {
                    let proj: f64 = (0..M).map(|r| eigvecs[r * M + j] * b[r]).sum();
                    q += proj * proj / eigvals[j];
                }
            }
            (q / M as f64).max(0.0)
        })
        .collect();
    Ok(GsmModel {
        cov,
        eigvals,
        eigvecs,
        s_sq,
        block_count: n,
    })
}

/// `I_j = (1/N) sum_i log2(1 + s_i^2 lambda_j / sigma_n^2)` for each eigenvalue.
pub fn subband_information(model: &GsmModel, cfg: &VifConfig) -> [f64; M] {
    let mut out = [0.0; M];
    let n = model.s_sq.len() as f64;
    for (j, &lambda) in model.eigvals.iter().enumerate() {
        let sum: f64 = model
            .s_sq
            .iter()
            .map(|&s| (1.0 + s * lambda / cfg.sigma_n_sq).log2())
            .sum();
        out[j] = sum / n;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_distr::{Distribution, StandardNormal};

    fn model(eigvals: Vec<f64>, s_sq: Vec<f64>) -> GsmModel {
        GsmModel {
            cov: vec![0.0; M * M],
            eigvals,
            eigvecs: vec![0.0; M * M],
            block_count: s_sq.len(),
            s_sq,
        }
    }

    #[test]
    fn zero_subband_is_degenerate() {
        let m = gsm_fit(&Plane::filled(30, 30, 0.0)).unwrap();
        assert!(m.cov.iter().all(|&v| v == 0.0));
        assert!(m.eigvals.iter().all(|&v| v == 0.0));
        assert!(m.s_sq.iter().all(|&v| v == 0.0));
        assert_eq!(subband_information(&m, &VifConfig::default()), [0.0; M]);
    }

    #[test]
    fn too_few_blocks() {
        assert_eq!(
            gsm_fit(&Plane::filled(9, 6, 1.0)).unwrap_err(),
            FeatureError::TooFewBlocks { blocks: 6, needed: 9 }
        );
    }

    #[test]
    fn information_closed_form() {
        let cfg = VifConfig { sigma_n_sq: 2.0 };
        let i = subband_information(&model(vec![2.0; M], vec![1.0]), &cfg);
        assert!(i.iter().all(|&v| (v - 1.0).abs() < 1e-15));
        let a = subband_information(&model(vec![3.0, 1.0, 0.5, 0.2, 0.1, 0.0, 0.0, 0.0, 0.0], vec![0.4, 2.0]), &cfg);
        let b = subband_information(
            &model(vec![21.0, 7.0, 3.5, 1.4, 0.7, 0.0, 0.0, 0.0, 0.0], vec![0.4, 2.0]),
            &VifConfig { sigma_n_sq: 14.0 },
        );
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn recovers_generating_covariance() {
        // covariance L L^T with a fixed lower-triangular L
        let mut l = [0.0; M * M];
        for r in 0..M {
            for c in 0..=r {
                l[r * M + c] = if r == c { 1.0 + r as f64 * 0.3 } else { 0.2 * ((r + 2 * c) % 3) as f64 };
            }
        }
        let mut truth = vec![0.0; M * M];
        for r in 0..M {
            for c in 0..M {
                truth[r * M + c] = (0..M).map(|k| l[r * M + k] * l[c * M + k]).sum();
            }
        }
        let (mut tv, _) = jacobi_eigen(&truth, M);
        tv.sort_by(|a, b| b.total_cmp(a));

        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        let side = 100;
        let mut data = vec![0.0; (3 * side) * (3 * side)];
        for j in 0..side {
            for i in 0..side {
                let z: Vec<f64> = (0..M).map(|_| StandardNormal.sample(&mut rng)).collect();
                for r in 0..M {
                    let x: f64 = (0..M).map(|k| l[r * M + k] * z[k]).sum();
                    let (dx, dy) = (r % 3, r / 3);
                    data[(3 * j + dy) * 3 * side + 3 * i + dx] = x;
                }
            }
        }
        let m = gsm_fit(&Plane::new(3 * side, 3 * side, data)).unwrap();
        assert_eq!(m.block_count, 10_000);
        for (got, want) in m.eigvals.iter().zip(&tv) {
            assert!(((got - want) / want).abs() < 0.1, "{got} vs {want}");
        }
        // eigen residual
        for j in 0..M {
            for r in 0..M {
                let cv: f64 = (0..M).map(|k| m.cov[r * M + k] * m.eigvecs[k * M + j]).sum();
                assert!((cv - m.eigvals[j] * m.eigvecs[r * M + j]).abs() < 1e-8);
            }
        }
    }
}
