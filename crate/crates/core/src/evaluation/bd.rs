//! Bjøntegaard delta rate and quality.
//!
//! The default fit is least-squares cubic (lower degree for short curves)
//! of the dependent axis on the shifted independent axis, integrated in
//! closed form over the overlap. The swapped direction fits the other axis
//! and inverts the fit numerically.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::ladder::RqCurve;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum BdDirection {
    /// BD-rate fits log10 rate on quality; BD-quality fits quality on log10 rate.
    #[default]
    Standard,
    /// Each metric fits the opposite axis and inverts it.
    Swapped,
}

/// Polynomial in `(x - shift)`, coefficients ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    pub coeffs: Vec<f64>,
    pub shift: f64,
}

impl Poly {
    pub fn eval(&self, x: f64) -> f64 {
        let t = x - self.shift;
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c)
    }

    /// Exact integral over [a, b].
    pub fn integrate(&self, a: f64, b: f64) -> f64 {
        let prim = |x: f64| {
            let t = x - self.shift;
            self.coeffs
                .iter()
                .enumerate()
                .rev()
                .fold(0.0, |acc, (k, c)| acc * t + c / (k + 1) as f64)
                * t
        };
        prim(b) - prim(a)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }
}

/// Least-squares polynomial of degree `min(3, distinct(x) - 1)` via QR.
pub fn fit_poly(x: &[f64], y: &[f64]) -> Poly {
    assert_eq!(x.len(), y.len());
    assert!(!x.is_empty());
    let mut distinct = x.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    let degree = (distinct.len() - 1).min(3);
    let shift = x.iter().sum::<f64>() / x.len() as f64;
    let a = DMatrix::from_fn(x.len(), degree + 1, |r, c| (x[r] - shift).powi(c as i32));
    let b = DVector::from_column_slice(y);
    let qr = a.qr();
    let rhs = qr.q().transpose() * b;
    let coeffs = qr
        .r()
        .solve_upper_triangular(&rhs)
        .expect("distinct abscissae give a full-rank system");
    Poly {
        coeffs: coeffs.iter().copied().collect(),
        shift,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BdReport {
    pub value: f64,
    /// Set when either curve had fewer than four points.
    pub low_degree: bool,
}

fn range(v: &[f64]) -> (f64, f64) {
    v.iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)))
}

/// Inverse of `p` on `[lo, hi]` at level `y`: the first root found by a
/// dense scan plus bisection, or the nearer end when `y` is not attained.
fn invert(p: &Poly, y: f64, lo: f64, hi: f64) -> f64 {
    const SCAN: usize = 256;
    let f = |x: f64| p.eval(x) - y;
    let mut prev_x = lo;
    let mut prev = f(lo);
    if prev == 0.0 {
        return lo;
    }
    for i in 1..=SCAN {
        let x = lo + (hi - lo) * i as f64 / SCAN as f64;
        let cur = f(x);
        if cur == 0.0 {
            return x;
        }
        if (cur > 0.0) != (prev > 0.0) {
            let (mut a, mut b, mut fa) = (prev_x, x, prev);
            for _ in 0..80 {
                let m = 0.5 * (a + b);
                let fm = f(m);
                if (fm > 0.0) == (fa > 0.0) {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                }
            }
            return 0.5 * (a + b);
        }
        prev_x = x;
        prev = cur;
    }
    if f(lo).abs() < f(hi).abs() {
        lo
    } else {
        hi
    }
}

/// Mean of `v_test(u) - v_ref(u)` over the overlap of the `u` ranges.
fn mean_gap(
    ref_u: &[f64],
    ref_v: &[f64],
    test_u: &[f64],
    test_v: &[f64],
    direction: BdDirection,
) -> Result<f64, EvalError> {
    let (ra, rb) = range(ref_u);
    let (ta, tb) = range(test_u);
    let (lo, hi) = (ra.max(ta), rb.min(tb));
    if !(hi > lo) {
        return Err(EvalError::NoOverlap);
    }
    match direction {
        BdDirection::Standard => {
            let pr = fit_poly(ref_u, ref_v);
            let pt = fit_poly(test_u, test_v);
            Ok((pt.integrate(lo, hi) - pr.integrate(lo, hi)) / (hi - lo))
        }
        BdDirection::Swapped => {
            const N: usize = 2000;
            let pr = fit_poly(ref_v, ref_u);
            let pt = fit_poly(test_v, test_u);
            let (rva, rvb) = range(ref_v);
            let (tva, tvb) = range(test_v);
            let h = (hi - lo) / N as f64;
            let mut acc = 0.0;
            for i in 0..N {
                let u = lo + (i as f64 + 0.5) * h;
                acc += invert(&pt, u, tva, tvb) - invert(&pr, u, rva, rvb);
            }
            Ok(acc / N as f64)
        }
    }
}

fn low_degree(a: &RqCurve, b: &RqCurve) -> bool {
    a.len() < 4 || b.len() < 4
}

fn log_rates(c: &RqCurve) -> Vec<f64> {
    c.points.iter().map(|p| p.bitrate.log10()).collect()
}

fn check(c: &RqCurve) -> Result<(), EvalError> {
    if c.is_empty() {
        Err(EvalError::EmptyCurve)
    } else {
        Ok(())
    }
}

/// Percent bitrate difference of `test` relative to `reference` at equal
/// quality; negative means savings.
pub fn bd_rate_with(reference: &RqCurve, test: &RqCurve, direction: BdDirection) -> Result<BdReport, EvalError> {
    check(reference)?;
    check(test)?;
    let avg = mean_gap(
        &reference.qualities(),
        &log_rates(reference),
        &test.qualities(),
        &log_rates(test),
        direction,
    )?;
    Ok(BdReport {
        value: (10f64.powf(avg) - 1.0) * 100.0,
        low_degree: low_degree(reference, test),
    })
}

/// Mean quality difference of `test` over `reference` at equal log-rate.
pub fn bd_quality_with(reference: &RqCurve, test: &RqCurve, direction: BdDirection) -> Result<BdReport, EvalError> {
    check(reference)?;
    check(test)?;
    let avg = mean_gap(
        &log_rates(reference),
        &reference.qualities(),
        &log_rates(test),
        &test.qualities(),
        direction,
    )?;
    Ok(BdReport {
        value: avg,
        low_degree: low_degree(reference, test),
    })
}

pub fn bd_rate(reference: &RqCurve, test: &RqCurve) -> Result<BdReport, EvalError> {
    bd_rate_with(reference, test, BdDirection::Standard)
}

pub fn bd_quality(reference: &RqCurve, test: &RqCurve) -> Result<BdReport, EvalError> {
    bd_quality_with(reference, test, BdDirection::Standard)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::types::{Codec, EncodeJob, RqPoint};

    pub(crate) fn curve(pts: &[(f64, f64)]) -> RqCurve {
        RqCurve {
            points: pts
                .iter()
                .enumerate()
                .map(|(i, &(b, q))| RqPoint {
                    job: EncodeJob {
                        video_id: "v".into(),
                        codec: Codec::Synthetic,
                        preset: "p".into(),
                        width: 1920,
                        height: 1080,
                        crf: i as i32,
                    },
                    bitrate: b,
                    quality: q,
                })
                .collect(),
        }
    }

    /// Lagrange interpolation through exactly four points.
    fn lagrange(xs: &[f64], ys: &[f64], x: f64) -> f64 {
        let mut s = 0.0;
        for i in 0..xs.len() {
            let mut l = 1.0;
            for j in 0..xs.len() {
                if i != j {
                    l *= (x - xs[j]) / (xs[i] - xs[j]);
                }
            }
            s += ys[i] * l;
        }
        s
    }

    fn trapezoid(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        let mut s = 0.5 * (f(a) + f(b));
        for i in 1..n {
            s += f(a + i as f64 * h);
        }
        s * h
    }

    const REF: [(f64, f64); 4] = [(500.0, 40.0), (1200.0, 60.0), (3000.0, 78.0), (8000.0, 92.0)];

    #[test]
    fn identical_curves_are_zero() {
        let c = curve(&REF);
        assert!(bd_rate(&c, &c).unwrap().value.abs() < 1e-9);
        assert!(bd_quality(&c, &c).unwrap().value.abs() < 1e-9);
    }

    #[test]
    fn uniform_rate_shift_is_ten_percent() {
        let a = curve(&REF);
        let shifted: Vec<(f64, f64)> = REF.iter().map(|&(b, q)| (b * 1.1, q)).collect();
        let r = bd_rate(&a, &curve(&shifted)).unwrap().value;
        assert!((r - 10.0).abs() < 1e-6, "{r}");
    }

    #[test]
    fn constant_quality_offset() {
        let a = curve(&REF);
        let up: Vec<(f64, f64)> = REF.iter().map(|&(b, q)| (b, q + 2.0)).collect();
        let d = bd_quality(&a, &curve(&up)).unwrap().value;
        assert!((d - 2.0).abs() < 1e-6);
    }

    #[test]
    fn four_point_pair_matches_quadrature() {
        let test: [(f64, f64); 4] = [(450.0, 42.0), (1000.0, 58.0), (2800.0, 80.0), (9000.0, 93.0)];
        let (rq, rr): (Vec<f64>, Vec<f64>) = REF.iter().map(|&(b, q)| (q, b.log10())).unzip();
        let (tq, tr): (Vec<f64>, Vec<f64>) = test.iter().map(|&(b, q)| (q, b.log10())).unzip();
        let (lo, hi) = (42.0, 92.0);
        let area = trapezoid(|q| lagrange(&tq, &tr, q) - lagrange(&rq, &rr, q), lo, hi, 200_000);
        let want = (10f64.powf(area / (hi - lo)) - 1.0) * 100.0;
        let got = bd_rate(&curve(&REF), &curve(&test)).unwrap().value;
        assert!((got - want).abs() < 0.01, "{got} vs {want}");

        let (lo, hi) = (500f64.log10(), 8000f64.log10());
        let area = trapezoid(|x| lagrange(&tr, &tq, x) - lagrange(&rr, &rq, x), lo, hi, 200_000);
        let got = bd_quality(&curve(&REF), &curve(&test)).unwrap().value;
        assert!((got - area / (hi - lo)).abs() < 0.001);
    }

    #[test]
    fn swapped_direction_agrees_on_shifts() {
        let a = curve(&REF);
        let shifted: Vec<(f64, f64)> = REF.iter().map(|&(b, q)| (b * 1.1, q)).collect();
        let r = bd_rate_with(&a, &curve(&shifted), BdDirection::Swapped).unwrap().value;
        assert!((r - 10.0).abs() < 1e-3, "{r}");
        let up: Vec<(f64, f64)> = REF.iter().map(|&(b, q)| (b, q + 2.0)).collect();
        let d = bd_quality_with(&a, &curve(&up), BdDirection::Swapped).unwrap().value;
        assert!((d - 2.0).abs() < 1e-3, "{d}");
    }

    #[test]
    fn disjoint_ranges_do_not_overlap() {
        let a = curve(&[(100.0, 20.0), (200.0, 30.0)]);
        let b = curve(&[(5000.0, 80.0), (9000.0, 90.0)]);
        assert_eq!(bd_rate(&a, &b).unwrap_err(), EvalError::NoOverlap);
        assert_eq!(bd_quality(&a, &b).unwrap_err(), EvalError::NoOverlap);
    }

    #[test]
    fn short_curves_are_flagged() {
        let a = curve(&[(100.0, 30.0), (1000.0, 60.0), (4000.0, 80.0)]);
        let r = bd_rate(&a, &a).unwrap();
        assert!(r.low_degree);
        assert!(r.value.abs() < 1e-9);
    }

    #[test]
    fn polynomial_integral_matches_closed_form() {
        let p = Poly {
            coeffs: vec![1.0, -2.0, 0.5, 3.0],
            shift: 1.5,
        };
        // antiderivative by hand in t = x - 1.5
        let prim = |x: f64| {
            let t = x - 1.5;
            t - t * t + 0.5 * t.powi(3) / 3.0 + 0.75 * t.powi(4)
        };
        assert!((p.integrate(0.2, 4.0) - (prim(4.0) - prim(0.2))).abs() < 1e-12);
    }
}
