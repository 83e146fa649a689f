use crate::error::{Error, Result};
use crate::scalar::Real;

/// Brent's method on a bracket `[a, b]` with `f(a)` and `f(b)` of opposite
/// sign (or one of them zero).
///
/// Stops when the bracket is narrower than `xtol` (floored at a few ulps of
/// the iterate) or an exact zero is hit.
pub fn brent<T, F>(mut f: F, a: T, b: T, xtol: T) -> Result<T>
where
    T: Real,
    F: FnMut(T) -> T,
{
    let (mut a, mut b) = (a, b);
    let mut fa = f(a);
    let mut fb = f(b);
    brent_with_values(&mut f, &mut a, &mut b, &mut fa, &mut fb, xtol)
}

pub(crate) fn brent_with_values<T, F>(f: &mut F, a: &mut T, b: &mut T, fa: &mut T, fb: &mut T, xtol: T) -> Result<T>
where
    T: Real,
    F: FnMut(T) -> T,
{
    if fa.is_nan() || fb.is_nan() {
        return Err(Error::Domain("NaN at bracket endpoint".into()));
    }
    if *fa == T::zero() {
        return Ok(*a);
    }
    if *fb == T::zero() {
        return Ok(*b);
    }
    if (*fa > T::zero()) == (*fb > T::zero()) {
        return Err(Error::Domain(format!("root not bracketed on [{}, {}]", a.as_f64(), b.as_f64())));
    }
    let two = T::lit(2.0);
    let half = T::lit(0.5);
    let eps = T::epsilon();
    let mut c = *b;
    let mut fc = *fb;
    let mut d = *b - *a;
    let mut e = d;
    for _ in 0..200 {
        if (*fb > T::zero()) == (fc > T::zero()) {
            c = *a;
            fc = *fa;
            d = *b - *a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            *a = *b;
            *b = c;
            c = *a;
            *fa = *fb;
            *fb = fc;
            fc = *fa;
        }
        let tol1 = two * eps * b.abs() + half * xtol;
        let xm = half * (c - *b);
        if xm.abs() <= tol1 || *fb == T::zero() {
            return Ok(*b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = *fb / *fa;
            let (mut p, mut q);
            if *a == c {
                p = two * xm * s;
                q = T::one() - s;
            } else {
                let qq = *fa / fc;
                let r = *fb / fc;
                p = s * (two * xm * qq * (qq - r) - (*b - *a) * (r - T::one()));
                q = (qq - T::one()) * (r - T::one()) * (s - T::one());
            }
            if p > T::zero() {
                q = -q;
            }
            p = p.abs();
            let min1 = T::lit(3.0) * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if two * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        *a = *b;
        *fa = *fb;
        if d.abs() > tol1 {
            *b = *b + d;
        } else {
            *b = *b + if xm > T::zero() { tol1 } else { -tol1 };
        }
        *fb = f(*b);
        if fb.is_nan() {
            return Err(Error::Domain("NaN inside bracket".into()));
        }
    }
    Ok(*b)
}

/// Indices `i` with a sign change between `values[i]` and `values[i + 1]`.
/// A sample that is exactly zero is reported once, as the left end of the
/// following cell.
pub fn sign_changes<T: Real>(values: &[T]) -> Vec<usize> {
    let mut out = Vec::new();
    for i in 0..values.len().saturating_sub(1) {
        let (u, v) = (values[i], values[i + 1]);
        if u == T::zero() {
            if i == 0 || values[i - 1] != T::zero() {
                out.push(i);
            }
            continue;
        }
        if v != T::zero() && (u > T::zero()) != (v > T::zero()) {
            out.push(i);
        }
    }
    out
}

/// Golden-section/parabolic maximisation of `f` on `[a, b]`.
pub fn maximize<T, F>(mut f: F, a: T, b: T, xtol: T) -> (T, T)
where
    T: Real,
    F: FnMut(T) -> T,
{
    let gr = T::lit(0.381_966_011_250_105_1);
    let (mut lo, mut hi) = (a, b);
    let mut x1 = lo + gr * (hi - lo);
    let mut x2 = hi - gr * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..300 {
        if (hi - lo).abs() <= xtol + T::epsilon() * (lo.abs() + hi.abs()) {
            break;
        }
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = hi - gr * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = lo + gr * (hi - lo);
            f1 = f(x1);
        }
    }
    if f1 > f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}
