//! Small numerical kernels used by the analyses: bracketing root finders,
//! Gauss-Legendre quadrature, finite-difference stencils and linear least
//! squares.

pub mod diff;
pub mod lsq;
pub mod quadrature;
pub mod roots;

use crate::scalar::Real;

/// `n` logarithmically spaced points covering `[lo, hi]` inclusive.
pub fn log_grid<T: Real>(lo: T, hi: T, n: usize) -> Vec<T> {
    assert!(n >= 2 && lo > T::zero() && hi > lo);
    let (a, b) = (lo.ln(), hi.ln());
    let last = T::from_usize_lossy(n - 1);
    (0..n).map(|i| if i == n - 1 { hi } else { (a + (b - a) * T::from_usize_lossy(i) / last).exp() }).collect()
}

/// `n` points strictly inside `(lo, hi)` at cell midpoints.
pub fn interior_grid<T: Real>(lo: T, hi: T, n: usize) -> Vec<T> {
    let nn = T::from_usize_lossy(n);
    (0..n).map(|i| lo + (hi - lo) * (T::from_usize_lossy(i) + T::lit(0.5)) / nn).collect()
}
