//! Expansion `ν = ν₀(I₂) + ν₁(I₂) I₁ + ν₂(I₂) I₁² + …` of the frequency
//! ratio near a stable circular orbit, the consistency right-hand sides
//! `G₁`, `G₂` of the degeneracy equations, and the scan over homogeneous
//! potentials that singles out the Bertrand exponents.

pub mod horner;

use rayon::prelude::*;
use serde::Serialize;

use crate::actions::ActionChart;
use crate::effective::PointKind;
use crate::error::{Error, Result};
use crate::numerics::diff::derivative;
use crate::numerics::lsq::polyfit;
use crate::numerics::roots::brent;
use crate::potentials::Potential;
use crate::scalar::Real;

/// Local data of a circular orbit of radius `r0`.
#[derive(Debug, Clone, Copy, Serialize)]
#[serde(bound = "T: Real")]
pub struct CircularOrbitData<T> {
    pub r0: T,
    /// `V'(r0)`.
    pub vp: T,
    /// `[g, g', g'', g''', g'''']` at `r0`.
    pub g: [T; 5],
    /// `dr0/dI₂ = 2 / ((3 + g) √(r0 V'))`.
    pub r_factor: T,
}

impl<T: Real> CircularOrbitData<T> {
    pub fn new(r0: T, vp: T, g: [T; 5]) -> Result<Self> {
        if !(r0 > T::zero()) || !(vp > T::zero()) {
            return Err(Error::Domain(format!("need r0 > 0 and V'(r0) > 0, got r0 = {r0}, V' = {vp}")));
        }
        let r_factor = T::lit(2.0) / ((T::lit(3.0) + g[0]) * (r0 * vp).sqrt());
        Ok(CircularOrbitData { r0, vp, g, r_factor })
    }

    pub fn at(p: &Potential<T>, r0: T) -> Result<Self> {
        Self::new(r0, p.dv(r0), p.g_derivatives(r0)?)
    }
}

/// `(ν₀, ν₁, ν₂)` at a circular orbit with `3 + g > 0`.
pub fn nu_coefficients<T: Real>(o: &CircularOrbitData<T>) -> Result<(T, T, T)> {
    let s = o.g[0] + T::lit(3.0);
    if !(s > T::zero()) {
        return Err(Error::Domain(format!("3 + g = {s} is not positive; r0 = {} is not a stable orbit", o.r0)));
    }
    Ok((s.sqrt(), nu1(o), nu2(o)))
}

pub fn nu0<T: Real>(o: &CircularOrbitData<T>) -> T {
    (o.g[0] + T::lit(3.0)).sqrt()
}

pub fn nu1<T: Real>(o: &CircularOrbitData<T>) -> T {
    nu1_numerator(o) / nu1_denominator(o)
}

pub fn nu2<T: Real>(o: &CircularOrbitData<T>) -> T {
    nu2_numerator(o) / nu2_denominator(o)
}

fn nu1_denominator<T: Real>(o: &CircularOrbitData<T>) -> T {
    T::lit(24.0) * o.r0.powf(T::lit(1.5)) * (o.g[0] + T::lit(3.0)).powi(2) * o.vp.sqrt()
}

fn nu2_denominator<T: Real>(o: &CircularOrbitData<T>) -> T {
    T::lit(2304.0) * o.r0.powi(3) * (o.g[0] + T::lit(3.0)).powf(T::lit(4.5)) * o.vp
}

pub fn nu1_numerator<T: Real>(o: &CircularOrbitData<T>) -> T {
    let r = o.r0;
    let [g, g1, g2, _, _] = o.g;
    let n = T::lit;
    n(36.0) + n(9.0) * r.powi(2) * g2 - g.powi(2) * (r * g1 + n(26.0))
        + g * (n(3.0) * r.powi(2) * g2 + n(7.0) * r * g1 + n(6.0))
        + n(30.0) * r * g1
        - n(5.0) * r.powi(2) * g1.powi(2)
        - n(2.0) * g.powi(4)
        - n(14.0) * g.powi(3)
}

pub fn nu2_numerator<T: Real>(o: &CircularOrbitData<T>) -> T {
    let r = o.r0;
    let [g, g1, g2, g3, g4] = o.g;
    let n = T::lit;
    n(-235.0) * r.powi(4) * g1.powi(4)
        + n(2604.0) * r.powi(3) * g1.powi(3)
        + n(4.0) * g.powi(6) * (n(17.0) * r * g1 + n(759.0))
        + g.powi(5) * (n(-84.0) * r.powi(2) * g2 + n(600.0) * r * g1 + n(13408.0))
        + n(54.0) * r.powi(2) * g1.powi(2) * (n(25.0) * r.powi(2) * g2 - n(142.0))
        - n(27.0)
            * (n(17.0) * r.powi(4) * g2.powi(2)
                - n(456.0) * r.powi(2) * g2
                - n(24.0) * (r.powi(4) * g4 + n(12.0) * r.powi(3) * g3 - n(62.0)))
        + g.powi(4)
            * (n(-48.0) * r.powi(3) * g3 - n(1344.0) * r.powi(2) * g2
                + n(129.0) * r.powi(2) * g1.powi(2)
                + n(624.0) * r * g1
                + n(33500.0))
        - n(108.0) * r * g1 * (n(14.0) * r.powi(3) * g3 + n(101.0) * r.powi(2) * g2 + n(260.0))
        + n(2.0)
            * g.powi(3)
            * (n(699.0) * r.powi(2) * g1.powi(2)
                + r * g1 * (n(81.0) * r.powi(2) * g2 - n(4732.0))
                + n(12.0) * (r.powi(4) * g4 - n(6.0) * r.powi(3) * g3 - n(296.0) * r.powi(2) * g2 + n(1705.0)))
        - g.powi(2)
            * (n(94.0) * r.powi(3) * g1.powi(3) - n(4053.0) * r.powi(2) * g1.powi(2)
                + n(3.0)
                    * (n(17.0) * r.powi(4) * g2.powi(2) + n(4680.0) * r.powi(2) * g2
                        - n(36.0) * (n(2.0) * r.powi(4) * g4 + n(12.0) * r.powi(3) * g3 + n(11.0)))
                + n(12.0) * r * g1 * (n(14.0) * r.powi(3) * g3 + n(20.0) * r.powi(2) * g2 + n(3291.0)))
        + n(2.0)
            * g
            * (n(293.0) * r.powi(3) * g1.powi(3)
                + n(9.0) * r.powi(2) * g1.powi(2) * (n(25.0) * r.powi(2) * g2 + n(28.0))
                - n(9.0)
                    * (n(-36.0) * r.powi(4) * g4 - n(360.0) * r.powi(3) * g3
                        + n(17.0) * r.powi(4) * g2.powi(2)
                        + n(198.0) * r.powi(2) * g2
                        + n(2904.0))
                - n(9.0) * r * g1 * (n(56.0) * r.powi(3) * g3 + n(323.0) * r.powi(2) * g2 + n(3216.0)))
        + n(20.0) * g.powi(8)
        + n(376.0) * g.powi(7)
}

/// Coefficients, right-hand sides and residuals at one circular orbit.
#[derive(Debug, Clone, Copy, Serialize)]
#[serde(bound = "T: Real")]
pub struct RhsReport<T> {
    pub r0: T,
    pub nu0: T,
    pub nu1: T,
    pub nu2: T,
    /// `R ν₀ ∂ν₀/∂r₀`.
    pub g1: T,
    /// `(R/2) (ν₁ ∂ν₀/∂r₀ + ν₀ ∂ν₁/∂r₀)`.
    pub g2: T,
    pub res1: T,
    pub res2: T,
    /// `ν₁`'s denominator times `res1`: independent of `r0` for
    /// homogeneous potentials.
    pub res1_normalized: T,
    pub res2_normalized: T,
    /// The difference stencil fell back to one side at the range edge.
    pub degraded: bool,
}

/// Relative radial step of the `∂/∂r₀` stencil.
pub const R0_STEP: f64 = 1e-4;

/// `G₁`, `G₂` at `r0`, differentiating `ν₀` and `ν₁` along the branch of
/// circular orbits with a fourth-order stencil of step `1e-4 r0`.
pub fn rhs_g1_g2<T: Real>(p: &Potential<T>, r0: T) -> Result<RhsReport<T>> {
    let o = CircularOrbitData::at(p, r0)?;
    let (n0, n1, n2) = nu_coefficients(&o)?;
    let (lo, hi) = p.range();
    let mut failure = None;
    let (dnu, degraded) = derivative(
        |r: T| match CircularOrbitData::at(p, r) {
            Ok(d) => [nu0(&d), nu1(&d)],
            Err(e) => {
                failure = Some(e);
                [T::nan(); 2]
            }
        },
        r0,
        T::lit(R0_STEP) * r0,
        lo,
        hi,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let rf = o.r_factor;
    let g1 = rf * n0 * dnu[0];
    let g2 = rf * T::lit(0.5) * (n1 * dnu[0] + n0 * dnu[1]);
    Ok(RhsReport {
        r0,
        nu0: n0,
        nu1: n1,
        nu2: n2,
        g1,
        g2,
        res1: n1 - g1,
        res2: n2 - g2,
        res1_normalized: (n1 - g1) * nu1_denominator(&o),
        res2_normalized: (n2 - g2) * nu2_denominator(&o),
        degraded,
    })
}

#[derive(Debug, Clone, Serialize)]
#[serde(bound = "T: Real")]
pub struct CoefficientComparison<T> {
    pub closed_form: T,
    pub fitted: T,
    /// `|fitted - closed_form| / max(|closed_form|, natural scale)`.
    pub relative_error: T,
    pub tolerance: T,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
#[serde(bound = "T: Real")]
pub struct ExpansionReport<T> {
    pub i2: T,
    pub r0: T,
    /// `I₁` window actually used.
    pub window: (T, T),
    pub condition: T,
    pub nu0: CoefficientComparison<T>,
    pub nu1: CoefficientComparison<T>,
    pub nu2: CoefficientComparison<T>,
    /// Change of the fitted coefficients when the window is halved.
    pub window_sensitivity: [T; 3],
    pub inconclusive: bool,
    pub samples: Vec<(T, T)>,
}

impl<T: Real> ExpansionReport<T> {
    pub fn passed(&self) -> bool {
        !self.inconclusive && self.nu0.passed && self.nu1.passed && self.nu2.passed
    }
}

const EXPANSION_TOL: [f64; 3] = [1e-3, 1e-2, 5e-2];
const MAX_CONDITION: f64 = 1e10;

/// Fit `ν(I₁)` at fixed `I₂` by a cubic on `I₁ ∈ [1e-5, 1e-3]·I₂` and
/// compare with the closed-form coefficients.
///
/// Errors are measured against `max(|ν_k|, ν₀/I₂^k)`, so that vanishing
/// closed-form coefficients are judged on their natural scale.
pub fn numeric_expansion_check<T: Real>(chart: &ActionChart<T>, i2: T) -> Result<ExpansionReport<T>> {
    if chart.bottom_kind() != PointKind::Minimum {
        return Err(Error::Domain("the expansion is about a stable circular orbit".into()));
    }
    let lv = chart.levels(i2)?;
    let o = CircularOrbitData::at(chart.potential(), lv.bottom.r0)?;
    let closed = nu_coefficients(&o)?;
    let omega = lv.bottom.curvature.sqrt();

    // (coefficients, samples, condition)
    type Window<T> = (Vec<T>, Vec<(T, T)>, T);
    let fit_window = |hi: T| -> Result<Window<T>> {
        let lo = T::lit(1e-5) * i2;
        let n = 24;
        // Ē ≈ ω I₁ places the samples roughly evenly in I₁
        let samples: Vec<(T, T)> = (0..n)
            .into_par_iter()
            .map(|k| {
                let i1 = lo + (hi - lo) * T::from_usize_lossy(k) / T::from_usize_lossy(n - 1);
                let p = chart.point_at(&lv, lv.bottom.level + omega * i1)?;
                Ok((p.i1, p.nu))
            })
            .collect::<Result<_>>()?;
        let x: Vec<T> = samples.iter().map(|s| s.0).collect();
        let y: Vec<T> = samples.iter().map(|s| s.1).collect();
        let fit = polyfit(&x, &y, 3, hi)?;
        Ok((fit.coefficients, samples, fit.condition))
    };

    let mut hi = T::lit(1e-3) * i2;
    let mut attempt = None;
    for _ in 0..4 {
        let (c, s, cond) = fit_window(hi)?;
        if cond < T::lit(MAX_CONDITION) {
            attempt = Some((c, s, cond));
            break;
        }
        hi = hi * T::lit(0.5);
    }
    let inconclusive = attempt.is_none();
    let (coeffs, samples, condition) = match attempt {
        Some(a) => a,
        None => fit_window(hi)?,
    };
    let (half, _, _) = fit_window(hi * T::lit(0.5))?;
    let compare = |k: usize, closed: T| {
        let fitted = coeffs[k];
        let natural = closed.abs().max((o.g[0] + T::lit(3.0)).sqrt() / i2.powi(k as i32));
        let relative_error = (fitted - closed).abs() / natural;
        let tolerance = T::lit(EXPANSION_TOL[k]);
        CoefficientComparison {
            closed_form: closed,
            fitted,
            relative_error,
            tolerance,
            passed: relative_error < tolerance,
        }
    };
    Ok(ExpansionReport {
        i2,
        r0: o.r0,
        window: (T::lit(1e-5) * i2, hi),
        condition,
        nu0: compare(0, closed.0),
        nu1: compare(1, closed.1),
        nu2: compare(2, closed.2),
        window_sensitivity: std::array::from_fn(|k| (coeffs[k] - half[k]).abs()),
        inconclusive,
        samples,
    })
}

#[derive(Debug, Clone, Serialize)]
#[serde(bound = "T: Real")]
pub struct ExponentRoot<T> {
    pub exponent: T,
    /// Root where the residual touches zero without changing sign.
    pub tangential: bool,
    /// Normalized second residual at the root, when defined.
    pub res2_normalized: Option<T>,
    /// Hypotheses that fail for every homogeneous potential with this
    /// exponent; non-empty means the exponent is excluded.
    pub excluded_by: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(bound = "T: Real")]
pub struct ExponentScan<T> {
    pub interval: (T, T),
    pub step: T,
    pub radii: [T; 3],
    pub roots: Vec<ExponentRoot<T>>,
    /// Largest spread of the normalized residual across the radii.
    pub max_radius_spread: T,
}

impl<T: Real> ExponentScan<T> {
    pub fn admissible(&self) -> Vec<T> {
        self.roots.iter().filter(|r| r.excluded_by.is_empty()).map(|r| r.exponent).collect()
    }
}

const SCAN_RADII: [f64; 3] = [0.5, 1.0, 2.0];

/// `ν₁`'s denominator times `ν₁ - G₁`, written with `ν₀ ∂ν₀/∂r₀ = ½ ∂ν₀²/∂r₀`
/// so that it stays finite for `g ≤ -3`.
fn normalized_res1<T: Real>(c: T, r0: T) -> Result<T> {
    let p = Potential::<T>::homogeneous(c.as_f64())?;
    let o = CircularOrbitData::at(&p, r0)?;
    let (lo, hi) = p.range();
    let (dg, _) = derivative(|r: T| p.g(r).unwrap_or(T::nan()), r0, T::lit(R0_STEP) * r0, lo, hi);
    Ok(nu1_numerator(&o) - T::lit(24.0) * r0 * (o.g[0] + T::lit(3.0)) * dg)
}

fn residual_at<T: Real>(c: T) -> Result<(T, T)> {
    let vals: Vec<T> = SCAN_RADII.iter().map(|&r| normalized_res1(c, T::lit(r))).collect::<Result<_>>()?;
    let lo = vals.iter().copied().fold(T::infinity(), T::min);
    let hi = vals.iter().copied().fold(T::neg_infinity(), T::max);
    Ok((vals[1], hi - lo))
}

/// Exponents `c` for which the homogeneous potential with `g ≡ c` solves
/// `ν₁ = G₁`, found as roots of the normalized residual on a scan of `c`.
///
/// Sign changes are refined by Brent's method; tangential roots are found
/// as local minima of `|res₁|` that reach zero within `1e-10`. The second
/// residual is evaluated only at the roots.
pub fn find_degenerate_exponents<T: Real>(interval: (T, T), step: T) -> Result<ExponentScan<T>> {
    let (a, b) = interval;
    if !(step > T::zero() && b > a) {
        return Err(Error::config("step", "need a positive step and a non-empty interval"));
    }
    let n = ((b - a) / step).ceil().to_usize().unwrap_or(0) + 1;
    let cs: Vec<T> = (0..n).map(|k| (a + step * T::from_usize_lossy(k)).min(b)).collect();
    // c = -1 is the logarithm, also homogeneous; the scan includes it
    let evals: Vec<(T, T)> = cs.par_iter().map(|&c| residual_at(c)).collect::<Result<_>>()?;
    let f: Vec<T> = evals.iter().map(|e| e.0).collect();
    let scale = f.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    let max_radius_spread = evals.iter().map(|e| e.1).fold(T::zero(), T::max);
    let alarm = T::lit(1e-8) * scale.max(T::one());
    if let Some(k) = (0..n).find(|&k| evals[k].1 > alarm) {
        return Err(Error::TranscriptionAlarm { exponent: cs[k].as_f64(), spread: evals[k].1.as_f64() });
    }

    let xtol = T::lit(1e-12);
    let res = |c: T| residual_at(c).map(|e| e.0).unwrap_or(T::nan());
    let mut found: Vec<(T, bool)> = Vec::new();
    for k in 0..n - 1 {
        let (u, v) = (f[k], f[k + 1]);
        if u == T::zero() {
            found.push((cs[k], false));
        } else if v != T::zero() && (u > T::zero()) != (v > T::zero()) {
            found.push((brent(res, cs[k], cs[k + 1], xtol)?, false));
        }
    }
    if f[n - 1] == T::zero() {
        found.push((cs[n - 1], false));
    }
    let tangent_tol = T::lit(1e-10) * scale.max(T::one());
    for k in 1..n - 1 {
        let (u, m, v) = (f[k - 1].abs(), f[k].abs(), f[k + 1].abs());
        let same_sign = (f[k - 1] > T::zero()) == (f[k] > T::zero()) && (f[k + 1] > T::zero()) == (f[k] > T::zero());
        if !(m < u && m <= v && same_sign && m > T::zero()) {
            continue;
        }
        // the extremum of res is a zero of its derivative
        let h = step * T::lit(1e-3);
        let slope = |c: T| (res(c + h) - res(c - h)) / (h + h);
        let c = match brent(slope, cs[k - 1], cs[k + 1], xtol) {
            Ok(c) => c,
            Err(_) => continue,
        };
        if res(c).abs() < tangent_tol {
            found.push((c, true));
        }
    }
    found.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap_or(std::cmp::Ordering::Equal));
    found.dedup_by(|x, y| (x.0 - y.0).abs() < step);

    let roots = found
        .into_iter()
        .map(|(c, tangential)| {
            let r0 = T::one();
            let res2 = Potential::<T>::homogeneous(c.as_f64())
                .ok()
                .and_then(|p| rhs_g1_g2(&p, r0).ok())
                .map(|r| r.res2_normalized)
                .filter(|v| v.is_finite());
            ExponentRoot { exponent: c, tangential, res2_normalized: res2, excluded_by: exclusions(c) }
        })
        .collect();
    Ok(ExponentScan { interval, step, radii: SCAN_RADII.map(T::lit), roots, max_radius_spread })
}

/// Hypotheses failing for both signs of the amplitude of the homogeneous
/// potential with exponent `c`.
fn exclusions<T: Real>(c: T) -> Vec<String> {
    let grid = crate::numerics::log_grid(T::lit(1e-3), T::lit(1e3), 512);
    let mut failed: Vec<Vec<&'static str>> = Vec::new();
    for k in [1.0, -1.0] {
        let p = if c == -T::one() { Potential::<T>::log(k) } else { Potential::<T>::power_law(k, c.as_f64()) };
        let Ok(p) = p else { continue };
        let rep = p.check_hypotheses(&grid);
        let mut f = Vec::new();
        if !rep.h1_holds {
            f.push("H1");
        }
        if !rep.h2_holds {
            f.push("H2");
        }
        if !rep.h3_holds {
            f.push("H3");
        }
        failed.push(f);
    }
    if failed.iter().any(|f| f.is_empty()) {
        return Vec::new();
    }
    let mut all: Vec<String> = failed.concat().into_iter().map(String::from).collect();
    all.sort();
    all.dedup();
    all
}
