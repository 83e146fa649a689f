//! Gauss-Legendre rules and a globally adaptive panel integrator for
//! vector-valued integrands.

use std::sync::OnceLock;

use gauss_quad::GaussLegendre;

use crate::scalar::Real;

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`,
/// nodes ascending. Needs `n >= 2`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut pairs =
        GaussLegendre::new(n).expect("Gauss-Legendre rule needs two or more points").into_node_weight_pairs();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

/// Panel order of the adaptive integrator.
pub const PANEL_ORDER: usize = 20;

fn panel_rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(PANEL_ORDER))
}

/// Fixed-order rule applied to `f` on `[a, b]`.
pub fn fixed<T, F, const N: usize>(f: &mut F, a: T, b: T, n: usize) -> [T; N]
where
    T: Real,
    F: FnMut(T) -> [T; N],
{
    let (x, w) = gauss_legendre(n);
    apply(f, a, b, &x, &w)
}

fn apply<T, F, const N: usize>(f: &mut F, a: T, b: T, x: &[f64], w: &[f64]) -> [T; N]
where
    T: Real,
    F: FnMut(T) -> [T; N],
{
    let half = (b - a) * T::lit(0.5);
    let mid = a + half;
    let mut acc = [T::zero(); N];
    for (xi, wi) in x.iter().zip(w) {
        let v = f(mid + half * T::lit(*xi));
        let wi = T::lit(*wi);
        for k in 0..N {
            acc[k] = acc[k] + wi * v[k];
        }
    }
    for a in acc.iter_mut() {
        *a = *a * half;
    }
    acc
}

#[derive(Debug, Clone, Copy)]
pub struct AdaptiveOptions {
    pub rel_tol: f64,
    pub max_panels: usize,
}

impl Default for AdaptiveOptions {
    fn default() -> Self {
        Self { rel_tol: 1e-12, max_panels: 4000 }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Quadrature<T, const N: usize> {
    pub values: [T; N],
    pub error: [T; N],
    pub panels: usize,
    pub converged: bool,
}

struct Panel<T, const N: usize> {
    a: T,
    b: T,
    value: [T; N],
    err: [T; N],
}

fn panel<T, F, const N: usize>(f: &mut F, a: T, b: T) -> Panel<T, N>
where
    T: Real,
    F: FnMut(T) -> [T; N],
{
    let (x, w) = panel_rule();
    let whole = apply(f, a, b, x, w);
    let m = a + (b - a) * T::lit(0.5);
    let l = apply(f, a, m, x, w);
    let r = apply(f, m, b, x, w);
    let mut value = [T::zero(); N];
    let mut err = [T::zero(); N];
    for k in 0..N {
        value[k] = l[k] + r[k];
        err[k] = (value[k] - whole[k]).abs();
    }
    Panel { a, b, value, err }
}

/// Globally adaptive integration of a vector integrand over consecutive
/// intervals `[p0, p1], [p1, p2], ...` given by `breakpoints`.
///
/// The worst panel is bisected until every component satisfies
/// `sum(err) <= rel_tol * |value|` (with a floor relative to the largest
/// component) or the panel budget runs out.
pub fn adaptive<T, F, const N: usize>(mut f: F, breakpoints: &[T], opts: AdaptiveOptions) -> Quadrature<T, N>
where
    T: Real,
    F: FnMut(T) -> [T; N],
{
    assert!(breakpoints.len() >= 2);
    let tol = T::floor_tol(opts.rel_tol);
    let mut panels: Vec<Panel<T, N>> =
        breakpoints.windows(2).filter(|w| w[1] > w[0]).map(|w| panel(&mut f, w[0], w[1])).collect();
    let totals = |panels: &[Panel<T, N>]| {
        let mut v = [T::zero(); N];
        let mut e = [T::zero(); N];
        for p in panels {
            for k in 0..N {
                v[k] = v[k] + p.value[k];
                e[k] = e[k] + p.err[k];
            }
        }
        (v, e)
    };
    let mut converged = false;
    loop {
        let (v, e) = totals(&panels);
        let scale = v.iter().fold(T::zero(), |m, x| m.max(x.abs()));
        let floor = scale * tol * T::lit(1e-3);
        let ok = (0..N).all(|k| e[k] <= tol * v[k].abs() + floor);
        if ok {
            converged = true;
            break;
        }
        if panels.len() >= opts.max_panels {
            break;
        }
        // bisect the panel with the largest normalised error
        let weight = |p: &Panel<T, N>| {
            (0..N).fold(T::zero(), |m, k| m.max(p.err[k] / (v[k].abs() + floor + T::min_positive_value())))
        };
        let (worst, _) = panels.iter().enumerate().fold((0, T::neg_infinity()), |(bi, bw), (i, p)| {
            let w = weight(p);
            if w > bw {
                (i, w)
            } else {
                (bi, bw)
            }
        });
        let p = panels.swap_remove(worst);
        let m = p.a + (p.b - p.a) * T::lit(0.5);
        if !(m > p.a && m < p.b) {
            // panel cannot be split further in this precision
            panels.push(p);
            break;
        }
        panels.push(panel(&mut f, p.a, m));
        panels.push(panel(&mut f, m, p.b));
    }
    let (values, error) = totals(&panels);
    Quadrature { values, error, panels: panels.len(), converged }
}
