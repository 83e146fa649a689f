//! Arnold determinant of `h(I₁, I₂)`, quasiconvexity maps, the growth of
//! the determinant above a maximum of `V_eff`, and the Bertrand test on the
//! frequency ratio.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::actions::{ActionChart, ActionPoint, ChartLevels};
use crate::effective::PointKind;
use crate::error::{Error, Result};
use crate::numerics::diff::central4;
use crate::scalar::Real;

/// Threshold on the dimensionless determinant `D (I₁ + I₂) / |ω|³`.
pub const TOL_D: f64 = 1e-7;
/// Momentum step of the Hessian stencil, relative to the distance to the
/// interval ends.
pub const FD_I2_STEP: f64 = 1e-3;

#[derive(Debug, Clone, Copy, Serialize)]
#[serde(bound = "T: Real")]
pub struct ArnoldSample<T> {
    pub point: ActionPoint<T>,
    /// `[h₁₁, h₁₂, h₂₂]`.
    pub hessian: [T; 3],
    pub d: T,
    /// `D (I₁ + I₂) / |ω|³`.
    pub d_normalized: T,
    pub quasiconvex: bool,
    /// `∂ν/∂I₁ - ν ∂ν/∂I₂` from differences of `ν` itself.
    pub burgers_residual: Option<T>,
    /// `∂ω₂/∂I₁ - h₁₂`, a symmetry check on the differenced Hessian.
    pub asymmetry: T,
    pub degraded: bool,
}

pub fn determinant<T: Real>(h: [T; 3], w1: T, w2: T) -> T {
    -h[0] * w2 * w2 + T::lit(2.0) * h[1] * w1 * w2 - h[2] * w1 * w1
}

/// How `∂/∂I₂` is differenced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Along {
    /// At fixed `Ē = E - V₀(I₂)`.
    FixedEbar,
    /// Along the line `dE = ω₂ dI₂` tangent to `I₁ = const`, which gives the
    /// action derivatives directly and avoids cancelling `∂/∂I₂|_Ē` against
    /// `(ω₂ - V₀') ∂/∂Ē` when `V₀'` dwarfs `ω₂`.
    FixedI1,
}

/// Frequency derivatives at one point of a chart.
#[derive(Debug, Clone, Copy)]
struct Local<T> {
    point: ActionPoint<T>,
    /// `dV₀/dI₂`.
    v0p: T,
    /// `∂(ω₁, ω₂, ν, G_I)/∂Ē`.
    d_e: [T; 4],
    /// `∂(ω₁, ω₂, ν, G_I)/∂I₂`, at fixed `Ē` or fixed `I₁`.
    d_i: [T; 4],
    along: Along,
    degraded: bool,
}

fn observables<T: Real>(chart: &ActionChart<T>, lv: &ChartLevels<T>, e: T) -> Result<(ActionPoint<T>, [T; 4])> {
    let p = chart.point_at(lv, e)?;
    let a = chart.integrals_at(lv, e)?;
    let g_i = a.g_i2 + a.g_e * lv.bottom_slope();
    Ok((p, [p.omega1, p.omega2, p.nu, g_i]))
}

fn local<T: Real>(chart: &ActionChart<T>, lv: &ChartLevels<T>, e: T, along: Along) -> Result<Local<T>> {
    let (point, _) = observables(chart, lv, e)?;
    let ebar = e - lv.bottom.level;
    let gap = ebar.min(lv.top - e);
    if !(gap > T::zero()) {
        return Err(Error::Domain(format!("E = {e} not inside the chart")));
    }
    let mut degraded = point.degraded;
    let h = T::lit(1e-2) * gap;
    let mut at_e = |x: T| -> Result<[T; 4]> {
        let (p, v) = observables(chart, lv, e + x)?;
        degraded |= p.degraded;
        Ok(v)
    };
    let (a, b, c, d) = (at_e(-h - h)?, at_e(-h)?, at_e(h)?, at_e(h + h)?);
    let d_e = std::array::from_fn(|k| central4(a[k], b[k], c[k], d[k], h));

    let iv = chart.interval();
    let i2 = lv.i2;
    let v0p = lv.bottom_slope();
    // energy slope of the stencil line
    let slope = match along {
        Along::FixedEbar => v0p,
        Along::FixedI1 => point.omega2,
    };
    let mut k = T::lit(FD_I2_STEP) * (i2 - iv.lo).min(iv.hi - i2).min(i2);
    // keep the displaced energies as far from both chart edges, relative to
    // the step, as the Ē stencil does
    if let (Ok(up), Ok(down)) = (chart.levels(i2 + k), chart.levels(i2 - k)) {
        let rate = |u: T, d: T| ((u - d) / (k + k) - slope).abs();
        let to_bottom = rate(up.bottom.level, down.bottom.level);
        let to_top = rate(up.top, down.top);
        if to_bottom > T::zero() {
            k = k.min(T::lit(1e-2) * ebar / to_bottom);
        }
        if to_top > T::zero() {
            k = k.min(T::lit(1e-2) * (lv.top - e) / to_top);
        }
    }
    let mut d_i = None;
    for _ in 0..6 {
        let mut at_i = |x: T| -> Result<[T; 4]> {
            let lv2 = chart.levels(i2 + x)?;
            let (p, v) = observables(chart, &lv2, e + slope * x)?;
            degraded |= p.degraded;
            Ok(v)
        };
        match (at_i(-k - k), at_i(-k), at_i(k), at_i(k + k)) {
            (Ok(a), Ok(b), Ok(c), Ok(d)) => {
                d_i = Some(std::array::from_fn(|j| central4(a[j], b[j], c[j], d[j], k)));
                break;
            }
            // the energy left the chart at a displaced momentum
            _ => k = k * T::lit(0.25),
        }
    }
    let d_i = d_i.ok_or_else(|| Error::Analysis(format!("no admissible I₂ step at I₂ = {i2}, Ē = {ebar}")))?;
    Ok(Local { point, v0p, d_e, d_i, along, degraded })
}

fn sample_from_local<T: Real>(l: &Local<T>) -> ArnoldSample<T> {
    let p = l.point;
    let (w1, w2) = (p.omega1, p.omega2);
    // ∂/∂I₁ = ω₁ ∂/∂Ē,  ∂/∂I₂|_{I₁} = ∂/∂I₂|_Ē + (ω₂ - V₀') ∂/∂Ē
    let shift = match l.along {
        Along::FixedEbar => w2 - l.v0p,
        Along::FixedI1 => T::zero(),
    };
    let h11 = w1 * l.d_e[0];
    let h12 = l.d_i[0] + shift * l.d_e[0];
    let h22 = l.d_i[1] + shift * l.d_e[1];
    let hessian = [h11, h12, h22];
    let d = determinant(hessian, w1, w2);
    let wnorm = (w1 * w1 + w2 * w2).sqrt();
    let d_normalized = d * (p.i1 + p.i2) / wnorm.powi(3);
    let burgers_residual = (w2.abs() > T::lit(1e-12) * wnorm).then(|| {
        let nu_1 = w1 * l.d_e[2];
        let nu_2 = l.d_i[2] + shift * l.d_e[2];
        nu_1 - p.nu * nu_2
    });
    ArnoldSample {
        point: p,
        hessian,
        d,
        d_normalized,
        quasiconvex: d_normalized.abs() > T::lit(TOL_D),
        burgers_residual,
        asymmetry: w1 * l.d_e[1] - h12,
        degraded: l.degraded,
    }
}

/// Arnold determinant at energy `E` on the chart, `I₂` fixed.
pub fn arnold_at_energy<T: Real>(chart: &ActionChart<T>, e: T, i2: T) -> Result<ArnoldSample<T>> {
    let lv = chart.levels(i2)?;
    Ok(sample_from_local(&local(chart, &lv, e, Along::FixedI1)?))
}

/// Arnold determinant at the action point `(I₁, I₂)`.
///
/// The Hessian of `h` is formed from fourth-order differences of the
/// frequencies in `(Ē, I₂)`, converted to action derivatives with
/// `∂Ē/∂I₁ = ω₁` and `∂Ē/∂I₂ = ω₂ - V₀'`.
pub fn arnold_determinant<T: Real>(chart: &ActionChart<T>, i1: T, i2: T) -> Result<ArnoldSample<T>> {
    let e = chart.invert_h(i1, i2)?;
    arnold_at_energy(chart, e, i2)
}

#[derive(Debug, Clone, Serialize)]
#[serde(bound = "T: Real")]
pub struct QuasiconvexityMap<T> {
    pub n1: usize,
    pub n2: usize,
    /// Row-major over `I₂`, then `I₁`; `None` where evaluation failed.
    pub samples: Vec<Option<ArnoldSample<T>>>,
    /// Points where `D` changes sign along a grid edge.
    pub zero_set: Vec<(T, T)>,
    pub near_zero_fraction: T,
    pub failed_cells: usize,
}

impl<T: Real> QuasiconvexityMap<T> {
    pub fn get(&self, i: usize, j: usize) -> Option<&ArnoldSample<T>> {
        self.samples[j * self.n1 + i].as_ref()
    }
}

/// Arnold samples on an `n1 × n2` grid: `I₂` at cell midpoints of
/// `i2_range`, and `I₁` at cell midpoints of the chart's action range at
/// each `I₂`.
pub fn quasiconvexity_map<T: Real>(
    chart: &ActionChart<T>,
    i2_range: (T, T),
    n1: usize,
    n2: usize,
) -> Result<QuasiconvexityMap<T>> {
    if n1 < 2 || n2 < 2 {
        return Err(Error::config("grid", "need at least 2 × 2 cells"));
    }
    let (a, b) = i2_range;
    let iv = chart.interval();
    if !(a < b && iv.contains(a) && iv.contains(b)) {
        return Err(Error::Domain(format!("I₂ range [{a}, {b}] not inside ({}, {})", iv.lo, iv.hi)));
    }
    let mid = |lo: T, hi: T, i: usize, n: usize| {
        lo + (hi - lo) * (T::from_usize_lossy(i) + T::lit(0.5)) / T::from_usize_lossy(n)
    };
    let rows: Vec<(T, T, T)> = (0..n2)
        .into_par_iter()
        .map(|j| {
            let i2 = mid(a, b, j, n2);
            let (lo, hi) = chart.action_range(i2)?;
            Ok((i2, lo, hi))
        })
        .collect::<Result<_>>()?;
    let coords: Vec<(T, T)> = (0..n2)
        .flat_map(|j| {
            let (i2, lo, hi) = rows[j];
            (0..n1).map(move |i| (mid(lo, hi, i, n1), i2))
        })
        .collect();
    let samples: Vec<Option<ArnoldSample<T>>> =
        coords.par_iter().map(|&(i1, i2)| arnold_determinant(chart, i1, i2).ok()).collect();

    let mut edges = Vec::new();
    for j in 0..n2 {
        for i in 0..n1 {
            let here = j * n1 + i;
            if i + 1 < n1 {
                edges.push((here, here + 1));
            }
            if j + 1 < n2 {
                edges.push((here, here + n1));
            }
        }
    }
    let zero_set: Vec<(T, T)> = edges
        .par_iter()
        .filter_map(|&(u, v)| {
            let (su, sv) = (samples[u].as_ref()?, samples[v].as_ref()?);
            let (du, dv) = (su.d_normalized, sv.d_normalized);
            if (du > T::zero()) == (dv > T::zero()) {
                return None;
            }
            let (pu, pv) = (coords[u], coords[v]);
            // one bisection step, then linear interpolation on the half that
            // still changes sign
            let pm = ((pu.0 + pv.0) * T::lit(0.5), (pu.1 + pv.1) * T::lit(0.5));
            let (lo, hi, dl, dh) = match arnold_determinant(chart, pm.0, pm.1) {
                Ok(m) if (m.d_normalized > T::zero()) == (du > T::zero()) => (pm, pv, m.d_normalized, dv),
                Ok(m) => (pu, pm, du, m.d_normalized),
                Err(_) => (pu, pv, du, dv),
            };
            let t = dl / (dl - dh);
            Some((lo.0 + t * (hi.0 - lo.0), lo.1 + t * (hi.1 - lo.1)))
        })
        .collect();
    let failed_cells = samples.iter().filter(|s| s.is_none()).count();
    let near = samples.iter().flatten().filter(|s| !s.quasiconvex).count();
    let ok = samples.len() - failed_cells;
    Ok(QuasiconvexityMap {
        n1,
        n2,
        near_zero_fraction: T::from_usize_lossy(near) / T::from_usize_lossy(ok.max(1)),
        samples,
        zero_set,
        failed_cells,
    })
}

#[derive(Debug, Clone, Serialize)]
#[serde(bound = "T: Real")]
pub struct MapRow<T> {
    pub i1: T,
    pub i2: T,
    pub e: T,
    pub d: T,
    pub d_normalized: T,
    pub quasiconvex: bool,
    pub burgers_residual: Option<T>,
    pub degraded: bool,
}

pub fn write_map_csv<T: Real, W: Write>(map: &QuasiconvexityMap<T>, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for s in map.samples.iter().flatten() {
        let row = MapRow {
            i1: s.point.i1,
            i2: s.point.i2,
            e: s.point.e,
            d: s.d,
            d_normalized: s.d_normalized,
            quasiconvex: s.quasiconvex,
            burgers_residual: s.burgers_residual,
            degraded: s.degraded,
        };
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
#[serde(bound = "T: Real")]
pub struct DivergenceSample<T> {
    pub ebar: T,
    pub d: T,
    /// The same determinant assembled from `ω₁`, `∂ω₁/∂Ē`, `∂ω₁/∂I₂` and
    /// `∂²G/∂I₂²` at fixed `Ē`.
    pub d_alternative: T,
    /// `π²λ² V₀'² / (Ē ln³Ē)`.
    pub model: T,
    pub omega1: T,
    /// `-πλ / ln Ē`.
    pub omega1_model: T,
    /// `∂ω₁/∂I₂` at fixed `Ē`.
    pub domega1_di2: T,
}

#[derive(Debug, Clone, Serialize)]
#[serde(bound = "T: Real")]
pub struct DivergenceReport<T> {
    pub i2: T,
    pub lambda: T,
    pub bottom_slope: T,
    pub samples: Vec<DivergenceSample<T>>,
    /// `|D|` grows as `Ē` decreases along the samples.
    pub monotone: bool,
    /// `D / model` at every sample.
    pub prefactors: Vec<T>,
    /// `sign(D) = sign(model)` at every sample.
    pub sign_consistent: bool,
    /// `V₀'` too small for the leading term to dominate.
    pub inconclusive: bool,
}

impl<T: Real> DivergenceReport<T> {
    /// `(observed, predicted)` for `|D(Ē/2)| / |D(Ē)|`, given samples
    /// arranged in pairs `(Ē, Ē/2)`.
    pub fn halving_ratios(&self) -> Vec<(T, T)> {
        self.samples
            .chunks(2)
            .filter(|c| c.len() == 2)
            .map(|c| {
                let (a, b) = (&c[0], &c[1]);
                let observed = (b.d / a.d).abs();
                let predicted = (a.ebar / b.ebar) * (a.ebar.ln() / b.ebar.ln()).powi(3);
                (observed, predicted)
            })
            .collect()
    }
}

/// Arnold determinant along `Ē ↓ 0` above the bottom maximum of the chart,
/// compared with the leading behaviour `π²λ²V₀'²/(Ē ln³Ē)`.
pub fn max_bottom_divergence<T: Real>(chart: &ActionChart<T>, i2: T, ebar: &[T]) -> Result<DivergenceReport<T>> {
    if chart.bottom_kind() != PointKind::Maximum {
        return Err(Error::Domain("divergence analysis needs a chart whose bottom is a maximum".into()));
    }
    let lv = chart.levels(i2)?;
    let lambda = lv.bottom.lambda().unwrap_or(T::nan());
    let v0p = lv.bottom_slope();
    let r0 = lv.bottom.r0;
    let dv = chart.potential().dv(r0);
    let g = chart.potential().g(r0)?;
    // V₀'' = 1/r₀² - 2 I₂ r₀'/r₀³ with r₀' = 2/((3+g)√(r₀V'))
    let r0p = T::lit(2.0) / ((T::lit(3.0) + g) * (r0 * dv).sqrt());
    let v0pp = T::one() / (r0 * r0) - T::lit(2.0) * i2 * r0p / r0.powi(3);
    let pi = T::PI();
    let samples: Vec<DivergenceSample<T>> = ebar
        .par_iter()
        .map(|&x| {
            let l = local(chart, &lv, lv.bottom.level + x, Along::FixedEbar)?;
            let s = sample_from_local(&l);
            let w1 = l.point.omega1;
            let d_alternative =
                -w1 * l.d_e[0] * v0p * v0p + T::lit(2.0) * w1 * l.d_i[0] * v0p + w1.powi(3) * l.d_i[3] - w1 * w1 * v0pp;
            let ln = x.ln();
            Ok(DivergenceSample {
                ebar: x,
                d: s.d,
                d_alternative,
                model: pi * pi * lambda * lambda * v0p * v0p / (x * ln.powi(3)),
                omega1: w1,
                omega1_model: -pi * lambda / ln,
                domega1_di2: l.d_i[0],
            })
        })
        .collect::<Result<_>>()?;
    let mut order: Vec<usize> = (0..samples.len()).collect();
    order.sort_by(|&a, &b| samples[b].ebar.partial_cmp(&samples[a].ebar).unwrap_or(std::cmp::Ordering::Equal));
    let monotone = order.windows(2).all(|w| samples[w[1]].d.abs() > samples[w[0]].d.abs());
    let prefactors: Vec<T> = samples.iter().map(|s| s.d / s.model).collect();
    let sign_consistent = prefactors.iter().all(|p| *p > T::zero());
    Ok(DivergenceReport {
        i2,
        lambda,
        bottom_slope: v0p,
        inconclusive: v0p.abs() < T::lit(1e-8) * lambda,
        samples,
        monotone,
        prefactors,
        sign_consistent,
    })
}

#[derive(Debug, Clone, Serialize)]
#[serde(bound = "T: Real")]
pub struct BertrandVerdict<T> {
    pub i2: T,
    pub nu_min: T,
    pub nu_max: T,
    pub spread: T,
    pub degenerate: bool,
    pub nu: Vec<(T, T)>,
}

/// Spread of `ν = ω₁/ω₂` over a sweep of `I₁` at fixed `I₂`; zero spread
/// means every bounded orbit in the sweep closes with the same rotation
/// number.
pub fn bertrand_nonconstancy<T: Real>(chart: &ActionChart<T>, i2: T, n: usize) -> Result<BertrandVerdict<T>> {
    if chart.bottom_kind() != PointKind::Minimum {
        return Err(Error::Domain("the Bertrand test needs a chart whose bottom is a minimum".into()));
    }
    let lv = chart.levels(i2)?;
    let n = n.max(3);
    let nu: Vec<(T, T)> = (0..n)
        .into_par_iter()
        .map(|k| {
            let u = T::lit(0.02) + T::lit(0.88) * T::from_usize_lossy(k) / T::from_usize_lossy(n - 1);
            let p = chart.point_at(&lv, lv.denormalize(u))?;
            Ok((p.i1, p.nu))
        })
        .collect::<Result<_>>()?;
    let nu_min = nu.iter().map(|v| v.1).fold(T::infinity(), T::min);
    let nu_max = nu.iter().map(|v| v.1).fold(T::neg_infinity(), T::max);
    let spread = nu_max - nu_min;
    Ok(BertrandVerdict { i2, nu_min, nu_max, spread, degenerate: spread < T::lit(1e-6), nu })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::effective::decompose_momentum_intervals;
    use crate::potentials::Potential;

    #[test]
    fn determinant_formula() {
        // h = f(I₁ + I₂) has a rank-one Hessian along (1, 1)
        let d = determinant([2.0, 2.0, 2.0], 3.0, 3.0);
        assert_eq!(d, 0.0);
        let d = determinant([1.0, 0.0, 1.0], 1.0, 0.0);
        assert_eq!(d, -1.0);
    }

    #[test]
    fn kepler_sample_is_degenerate() {
        let p = Potential::<f64>::kepler(1.0).unwrap();
        let iv = decompose_momentum_intervals(&p, 64, 10.0).unwrap();
        let chart = ActionChart::new(&p, &iv[0], 0).unwrap();
        let s = arnold_determinant(&chart, 0.7, 1.3).unwrap();
        assert!(s.d_normalized.abs() < 1e-7, "{}", s.d_normalized);
        assert!(!s.quasiconvex);
        assert!(s.burgers_residual.unwrap().abs() < 1e-6);
    }
}
