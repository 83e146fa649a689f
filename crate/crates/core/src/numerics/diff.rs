//! Finite-difference stencils.

use crate::scalar::Real;

/// Fourth-order central difference `f'(x)` from `f(x±h)` and `f(x±2h)`.
pub fn central4<T: Real>(fm2: T, fm1: T, fp1: T, fp2: T, h: T) -> T {
    (fm2 - T::lit(8.0) * fm1 + T::lit(8.0) * fp1 - fp2) / (T::lit(12.0) * h)
}

/// Second-order one-sided difference `f'(x)` from `f(x)`, `f(x+s h)`,
/// `f(x+2 s h)` with `s = ±1` encoded in the sign of `h`.
pub fn one_sided3<T: Real>(f0: T, f1: T, f2: T, h: T) -> T {
    (T::lit(-3.0) * f0 + T::lit(4.0) * f1 - f2) / (T::lit(2.0) * h)
}

/// Derivative of `f` at `x`: fourth-order central when `x ± 2h` stays inside
/// `[lo, hi]`, otherwise one-sided second order. The flag reports the
/// fallback.
pub fn derivative<T, V, F>(mut f: F, x: T, h: T, lo: T, hi: T) -> (V, bool)
where
    T: Real,
    V: Stencil<T>,
    F: FnMut(T) -> V,
{
    let two = T::lit(2.0);
    if x - two * h > lo && x + two * h < hi {
        let (a, b, c, d) = (f(x - two * h), f(x - h), f(x + h), f(x + two * h));
        (V::central4(&a, &b, &c, &d, h), false)
    } else if x + two * h < hi {
        let (a, b, c) = (f(x), f(x + h), f(x + two * h));
        (V::one_sided3(&a, &b, &c, h), true)
    } else {
        let (a, b, c) = (f(x), f(x - h), f(x - two * h));
        (V::one_sided3(&a, &b, &c, -h), true)
    }
}

/// Values a finite-difference stencil can be applied to componentwise.
pub trait Stencil<T: Real>: Sized {
    fn central4(a: &Self, b: &Self, c: &Self, d: &Self, h: T) -> Self;
    fn one_sided3(a: &Self, b: &Self, c: &Self, h: T) -> Self;
}

impl<T: Real> Stencil<T> for T {
    fn central4(a: &T, b: &T, c: &T, d: &T, h: T) -> T {
        central4(*a, *b, *c, *d, h)
    }
    fn one_sided3(a: &T, b: &T, c: &T, h: T) -> T {
        one_sided3(*a, *b, *c, h)
    }
}

impl<T: Real, const N: usize> Stencil<T> for [T; N] {
    fn central4(a: &Self, b: &Self, c: &Self, d: &Self, h: T) -> Self {
        std::array::from_fn(|k| central4(a[k], b[k], c[k], d[k], h))
    }
    fn one_sided3(a: &Self, b: &Self, c: &Self, h: T) -> Self {
        std::array::from_fn(|k| one_sided3(a[k], b[k], c[k], h))
    }
}
