use super::RegressionError;

fn check(a: &[f64], b: &[f64]) -> Result<(), RegressionError> {
    if a.len() != b.len() {
        return Err(RegressionError::LengthMismatch(a.len(), b.len()));
    }
    if a.len() < 2 {
        return Err(RegressionError::DegenerateInput);
    }
    Ok(())
}

/// Pearson linear correlation coefficient.
pub fn plcc(a: &[f64], b: &[f64]) -> Result<f64, RegressionError> {
    check(a, b)?;
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa <= 0.0 || sbb <= 0.0 {
        return Err(RegressionError::DegenerateInput);
    }
    Ok((sab / (saa.sqrt() * sbb.sqrt())).clamp(-1.0, 1.0))
}

/// Coefficient of determination of `pred` against `truth`.
pub fn r_squared(truth: &[f64], pred: &[f64]) -> Result<f64, RegressionError> {
    check(truth, pred)?;
    let n = truth.len() as f64;
    let m = truth.iter().sum::<f64>() / n;
    let ss_tot: f64 = truth.iter().map(|t| (t - m) * (t - m)).sum();
    if ss_tot <= 0.0 {
        return Err(RegressionError::DegenerateInput);
    }
    let ss_res: f64 = truth.iter().zip(pred).map(|(t, p)| (t - p) * (t - p)).sum();
    Ok(1.0 - ss_res / ss_tot)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn known_values() {
        let a = [1.0, 2.0, 3.0];
        assert!((plcc(&a, &a).unwrap() - 1.0).abs() < 1e-15);
        assert!((plcc(&a, &[-1.0, -2.0, -3.0]).unwrap() + 1.0).abs() < 1e-15);
        // cov = 1.5, sd_a = sqrt(2/3)... direct: sab = 3, saa = 2, sbb = 14/3
        let want = 3.0 / (2f64.sqrt() * (14.0f64 / 3.0).sqrt());
        assert!((plcc(&a, &[1.0, 2.0, 4.0]).unwrap() - want).abs() < 1e-15);
        assert!((want - 0.98198).abs() < 1e-5);
        assert_eq!(plcc(&a, &[2.0; 3]).unwrap_err(), RegressionError::DegenerateInput);
    }

    proptest! {
        #[test]
        fn affine_invariance(
            v in prop::collection::vec((-100.0..100.0f64, -100.0..100.0f64), 3..40),
            s in 0.1..10.0f64,
            o in -50.0..50.0f64,
        ) {
            let (a, b): (Vec<f64>, Vec<f64>) = v.into_iter().unzip();
            if let Ok(r) = plcc(&a, &b) {
                let a2: Vec<f64> = a.iter().map(|x| s * x + o).collect();
                prop_assert!((plcc(&a2, &b).unwrap() - r).abs() < 1e-9);
            }
        }
    }
}
