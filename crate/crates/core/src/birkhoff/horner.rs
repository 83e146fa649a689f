//! Second evaluation of `ν₁`, `ν₂`, written as polynomials in `g` with
//! coefficients in the scale-free derivatives `a = r₀g'`, `b = r₀²g''`,
//! `c = r₀³g'''`, `d = r₀⁴g''''` and evaluated by Horner's rule.

use super::CircularOrbitData;
use crate::scalar::Real;

fn horner<T: Real>(coeffs: &[T], x: T) -> T {
    coeffs.iter().fold(T::zero(), |acc, &c| acc * x + c)
}

fn scaled<T: Real>(o: &CircularOrbitData<T>) -> (T, T, T, T, T) {
    let r = o.r0;
    (o.g[0], r * o.g[1], r * r * o.g[2], r.powi(3) * o.g[3], r.powi(4) * o.g[4])
}

/// Numerator of `ν₁`, highest power of `g` first.
pub fn nu1_numerator<T: Real>(o: &CircularOrbitData<T>) -> T {
    let (g, a, b, _, _) = scaled(o);
    let l = T::lit;
    horner(
        &[
            l(-2.0),
            l(-14.0),
            -a - l(26.0),
            l(7.0) * a + l(3.0) * b + l(6.0),
            (l(-5.0) * a + l(30.0)) * a + l(9.0) * b + l(36.0),
        ],
        g,
    )
}

pub fn nu2_numerator<T: Real>(o: &CircularOrbitData<T>) -> T {
    let (g, a, b, c, d) = scaled(o);
    let l = T::lit;
    let a2 = a * a;
    let a3 = a2 * a;
    let coeffs = [
        l(20.0),
        l(376.0),
        l(68.0) * a + l(3036.0),
        l(600.0) * a - l(84.0) * b + l(13408.0),
        l(129.0) * a2 + l(624.0) * a - l(1344.0) * b - l(48.0) * c + l(33500.0),
        l(1398.0) * a2 + l(162.0) * a * b - l(9464.0) * a - l(7104.0) * b - l(144.0) * c + l(24.0) * d + l(40920.0),
        l(-94.0) * a3 + l(4053.0) * a2
            - l(240.0) * a * b
            - l(168.0) * a * c
            - l(39492.0) * a
            - l(51.0) * b * b
            - l(14040.0) * b
            + l(1296.0) * c
            + l(216.0) * d
            + l(1188.0),
        l(586.0) * a3 + l(450.0) * a2 * b + l(504.0) * a2
            - l(5814.0) * a * b
            - l(1008.0) * a * c
            - l(57888.0) * a
            - l(306.0) * b * b
            - l(3564.0) * b
            + l(6480.0) * c
            + l(648.0) * d
            - l(52272.0),
        l(-235.0) * a2 * a2 + l(2604.0) * a3 + l(1350.0) * a2 * b
            - l(7668.0) * a2
            - l(10908.0) * a * b
            - l(1512.0) * a * c
            - l(28080.0) * a
            - l(459.0) * b * b
            + l(12312.0) * b
            + l(7776.0) * c
            + l(648.0) * d
            - l(40176.0),
    ];
    horner(&coeffs, g)
}

pub fn nu1<T: Real>(o: &CircularOrbitData<T>) -> T {
    let s = o.g[0] + T::lit(3.0);
    nu1_numerator(o) / (T::lit(24.0) * o.r0.powf(T::lit(1.5)) * s * s * o.vp.sqrt())
}

pub fn nu2<T: Real>(o: &CircularOrbitData<T>) -> T {
    let s = o.g[0] + T::lit(3.0);
    nu2_numerator(o) / (T::lit(2304.0) * o.r0.powi(3) * s.powi(4) * s.sqrt() * o.vp)
}
