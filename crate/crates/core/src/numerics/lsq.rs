//! Dense linear least squares by QR with column equilibration.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone)]
pub struct LeastSquares<T> {
    pub coefficients: Vec<T>,
    /// Root-mean-square residual of the fit.
    pub rms_residual: T,
    /// Ratio of the largest to smallest diagonal of R after column scaling.
    pub condition: T,
}

/// Minimise `|A c - y|` for a row-major design matrix `rows`.
///
/// The factorisation runs in double precision whatever `T` is.
pub fn solve<T: Real>(rows: &[Vec<T>], y: &[T]) -> Result<LeastSquares<T>> {
    let m = rows.len();
    let n = rows.first().map_or(0, Vec::len);
    if m < n || n == 0 || y.len() != m || rows.iter().any(|r| r.len() != n) {
        return Err(Error::Analysis(format!("least squares needs m >= n > 0, got {m}x{n}")));
    }
    let mut a = DMatrix::from_fn(m, n, |i, j| rows[i][j].as_f64());
    let scale: Vec<f64> = a.column_iter().map(|c| if c.norm() > 0.0 { c.norm() } else { 1.0 }).collect();
    for (j, s) in scale.iter().enumerate() {
        a.column_mut(j).unscale_mut(*s);
    }
    let b = DVector::from_iterator(m, y.iter().map(|v| v.as_f64()));
    let qr = a.clone().qr();
    let r = qr.r();
    let diag: Vec<f64> = r.diagonal().iter().map(|d| d.abs()).collect();
    let dmax = diag.iter().fold(0.0f64, |x, d| x.max(*d));
    let dmin = diag.iter().fold(f64::INFINITY, |x, d| x.min(*d));
    if !(dmin > 0.0) {
        return Err(Error::Analysis("rank-deficient design matrix".into()));
    }
    let qtb = qr.q().transpose() * &b;
    let c = r.solve_upper_triangular(&qtb).ok_or_else(|| Error::Analysis("rank-deficient design matrix".into()))?;
    let rss = (&a * &c - &b).norm_squared();
    Ok(LeastSquares {
        coefficients: c.iter().zip(&scale).map(|(cj, sj)| T::lit(cj / sj)).collect(),
        rms_residual: T::lit((rss / m as f64).sqrt()),
        condition: T::lit(dmax / dmin),
    })
}

/// Fit `y ≈ sum_k c_k x^k` for `k = 0..=degree`, with `x` rescaled by
/// `x_scale` internally for conditioning.
pub fn polyfit<T: Real>(x: &[T], y: &[T], degree: usize, x_scale: T) -> Result<LeastSquares<T>> {
    let rows: Vec<Vec<T>> = x
        .iter()
        .map(|xi| {
            let t = *xi / x_scale;
            (0..=degree).map(|k| t.powi(k as i32)).collect()
        })
        .collect();
    let mut fit = solve(&rows, y)?;
    for (k, c) in fit.coefficients.iter_mut().enumerate() {
        *c = *c / x_scale.powi(k as i32);
    }
    Ok(fit)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_polynomial() {
        let x: Vec<f64> = (0..30).map(|i| 1e-5 + 1e-3 * i as f64 / 29.0).collect();
        let y: Vec<f64> = x.iter().map(|t| 2.0 - 3.0 * t + 7.0 * t * t + 11.0 * t * t * t).collect();
        let fit = polyfit(&x, &y, 3, 1e-3).unwrap();
        assert!((fit.coefficients[0] - 2.0).abs() < 1e-12);
        assert!((fit.coefficients[1] + 3.0).abs() < 1e-8);
        assert!((fit.coefficients[2] - 7.0).abs() < 1e-4);
        assert!(fit.rms_residual < 1e-14);
    }

    #[test]
    fn rejects_underdetermined() {
        assert!(solve(&[vec![1.0f64, 2.0]], &[1.0]).is_err());
    }
}
