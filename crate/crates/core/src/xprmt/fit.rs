//! Least-squares fits used by the experiments.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CubicQuarticFit {
    pub b: f64,
    pub c: f64,
    pub r_squared: f64,
}

impl CubicQuarticFit {
    pub fn eval(&self, x: f64) -> f64 {
        self.b * x.powi(3) + self.c * x.powi(4)
    }
}

/// Fit `y = b x³ + c x⁴` (no intercept) by least squares, via SVD.
pub fn fit_cubic_quartic(points: &[(f64, f64)]) -> Result<CubicQuarticFit> {
    if points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(Error::NonFinite);
    }
    let mut xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    if xs.len() < 2 {
        return Err(Error::RankDeficient);
    }
    let a =DMatrix::from_fn(points.len(), 2, |i, j| points[i].0.powi(3 + j as i32));
    let y = DVector::from_iterator(points.len(), points.iter().map(|p| p.1));
    // Column scaling keeps the rank test meaningful for tiny x.
    let scale: Vec<f64> = (0..2).map(|j| a.column(j).norm()).collect();
    if scale.contains(&0.0) {
        return Err(Error::RankDeficient);
    }
    let scaled = DMatrix::from_fn(points.len(), 2, |i, j| a[(i, j)] / scale[j]);
    let svd = scaled.svd(true, true);
    let sv = &svd.singular_values;
    if sv.min() <= 1e-10 * sv.max() {
        return Err(Error::RankDeficient);
    }
    let coef = svd.solve(&y, 0.0).map_err(|_| Error::RankDeficient)?;
    let (b, c) = (coef[0] / scale[0], coef[1] / scale[1]);
    let mean = y.mean();
    let ss_tot: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    let ss_res: f64 = points.iter().map(|&(x, v)| (v - b * x.powi(3) - c * x.powi(4)).powi(2)).sum();
    let r_squared = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else if ss_res == 0.0 { 1.0 } else { 0.0 };
    Ok(CubicQuarticFit { b, c, r_squared })
}

/// Least-squares slope of `ln y` against `ln x`. `None` with fewer than two
/// distinct `x` or any non-positive value.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.iter().any(|&(x, y)| !(x > 0.0 && y > 0.0) || !x.is_finite() || !y.is_finite()) {
        return None;
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let m = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / m;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if !(sxx > 1e-24) {
        return None;
    }
    Some(logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Normal equations solved by Cramer's rule.
    fn normal_equations(points: &[(f64, f64)]) -> (f64, f64) {
        let (mut s66, mut s77, mut s88, mut s3y, mut s4y) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for &(x, y) in points {
            s66 += x.powi(6);
            s77 += x.powi(7);
            s88 += x.powi(8);
            s3y += x.powi(3) * y;
            s4y += x.powi(4) * y;
        }
        let det = s66 * s88 - s77 * s77;
        ((s3y * s88 - s4y * s77) / det, (s66 * s4y - s77 * s3y) / det)
    }

    #[test]
    fn exact_recovery() {
        let pts: Vec<(f64, f64)> = (1..=20).map(|i| i as f64 * 0.05).map(|x| (x, 2.0 * x.powi(3) + 3.0 * x.powi(4))).collect();
        let fit = fit_cubic_quartic(&pts).unwrap();
        assert!((fit.b - 2.0).abs() < 1e-9 && (fit.c - 3.0).abs() < 1e-9);
        assert!((fit.r_squared - 1.0).abs() < 1e-9);
    }

    #[test]
    fn degenerate_inputs_rejected() {
        assert_eq!(fit_cubic_quartic(&[(0.3, 1.0)]).unwrap_err(), Error::RankDeficient);
        assert_eq!(fit_cubic_quartic(&[(0.3, 1.0), (0.3, 1.1)]).unwrap_err(), Error::RankDeficient);
        assert_eq!(fit_cubic_quartic(&[]).unwrap_err(), Error::RankDeficient);
        assert!(fit_cubic_quartic(&[(0.1, 1.0), (0.2, f64::NAN)]).is_err());
    }

    #[test]
    fn small_scale_data() {
        // Realistic small coefficients on a log grid down to 1e-2.
        let pts: Vec<(f64, f64)> = (0..20)
            .map(|i| 1e-2 * 50f64.powf(i as f64 / 19.0))
            .map(|x| (x, 9.78e-4 * x.powi(3) + 6.56e-3 * x.powi(4)))
            .collect();
        let fit = fit_cubic_quartic(&pts).unwrap();
        assert!((fit.b / 9.78e-4 - 1.0).abs() < 1e-8 && (fit.c / 6.56e-3 - 1.0).abs() < 1e-8);
    }

    #[test]
    fn slopes() {
        let pts: Vec<(f64, f64)> = [2.0, 4.0, 8.0, 16.0].iter().map(|&n: &f64| (n, 3.0 * n * n)).collect();
        assert!((loglog_slope(&pts).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(loglog_slope(&[(1.0, 2.0)]), None);
        assert_eq!(loglog_slope(&[(2.0, 1.0), (2.0, 3.0)]), None);
        assert_eq!(loglog_slope(&[(2.0, 0.0), (4.0, 1.0)]), None);
    }

    proptest! {
        #[test]
        fn agrees_with_normal_equations(
            ys in proptest::collection::vec(-1.0f64..1.0, 6..20),
        ) {
            let pts: Vec<(f64, f64)> = ys.iter().enumerate().map(|(i, &y)| (0.1 + 0.07 * i as f64, y)).collect();
            let fit = fit_cubic_quartic(&pts).unwrap();
            let (b, c) = normal_equations(&pts);
            prop_assert!((fit.b - b).abs() <= 1e-6 * b.abs().max(1.0));
            prop_assert!((fit.c - c).abs() <= 1e-6 * c.abs().max(1.0));
            prop_assert!(fit.r_squared <= 1.0 + 1e-12);
        }
    }
}
