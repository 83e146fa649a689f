//! Action-angle charts of the planar (equivalently, spatial with `ℓ = L²`)
//! central motion: turning points, the radial action `I₁ = G(E, I₂)`, its
//! energy and momentum derivatives, frequencies, inversion `E = h(I₁, I₂)`
//! and the logarithmic behaviour of `I₁` above a circular orbit that is a
//! maximum of `V_eff`.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::effective::{veff_raw, CriticalPoint, MomentumInterval, PointKind};
use crate::error::{Error, Result};
use crate::numerics::lsq;
use crate::numerics::quadrature::{adaptive, AdaptiveOptions};
use crate::numerics::roots::brent;
use crate::potentials::{Potential, MAX_ORDER};
use crate::scalar::Real;

/// One connected family of radial oscillations: the component of
/// `{V_eff(·, I₂²) < E}` containing the bottom circular orbit, for `I₂` in a
/// momentum interval and `E` between the bottom and top levels.
#[derive(Debug, Clone)]
pub struct ActionChart<T> {
    potential: Potential<T>,
    interval: MomentumInterval<T>,
    branch: usize,
    quad: AdaptiveOptions,
}

/// Geometry of a chart at one value of `I₂`.
#[derive(Debug, Clone)]
pub struct ChartLevels<T> {
    pub i2: T,
    pub bottom: CriticalPoint<T>,
    pub top: T,
    /// Bracket `(outer, inner)` for the inner turning point.
    pub left: (T, T),
    /// Bracket `(inner, outer)` for the outer turning point.
    pub right: (T, T),
    /// Critical radii strictly between the brackets' outer ends.
    pub interior: Vec<T>,
}

impl<T: Real> ChartLevels<T> {
    /// `dV₀/dI₂ = I₂ / r₀²` along the bottom branch.
    pub fn bottom_slope(&self) -> T {
        self.i2 / (self.bottom.r0 * self.bottom.r0)
    }

    /// The affine map sending `(bottom, top)` to `(0, 1)`.
    pub fn normalize(&self, e: T) -> T {
        (e - self.bottom.level) / (self.top - self.bottom.level)
    }

    pub fn denormalize(&self, u: T) -> T {
        self.bottom.level + u * (self.top - self.bottom.level)
    }
}

/// `I₁` and its partial derivatives at fixed `(E, I₂)`.
#[derive(Debug, Clone, Copy, Serialize)]
#[serde(bound = "T: Real")]
pub struct ActionIntegrals<T> {
    pub i1: T,
    /// `∂G/∂E`, the radial period over `2π`.
    pub g_e: T,
    /// `∂G/∂I₂` at fixed `E`.
    pub g_i2: T,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, Serialize)]
#[serde(bound = "T: Real")]
pub struct ActionPoint<T> {
    pub i1: T,
    pub i2: T,
    pub e: T,
    pub omega1: T,
    pub omega2: T,
    /// `ω₁ / ω₂`.
    pub nu: T,
    pub degraded: bool,
}

impl<T: Real> ActionChart<T> {
    /// Chart whose bottom is critical point number `branch` of `interval`.
    pub fn new(potential: &Potential<T>, interval: &MomentumInterval<T>, branch: usize) -> Result<Self> {
        if branch >= interval.kinds.len() {
            return Err(Error::Domain(format!("branch {branch} out of range, interval has {}", interval.kinds.len())));
        }
        let chart = ActionChart {
            potential: potential.clone(),
            interval: interval.clone(),
            branch,
            quad: AdaptiveOptions::default(),
        };
        chart.levels(interval.midpoint())?;
        Ok(chart)
    }

    /// Every non-empty chart over the given intervals.
    pub fn enumerate(potential: &Potential<T>, intervals: &[MomentumInterval<T>]) -> Vec<Self> {
        intervals
            .iter()
            .flat_map(|iv| (0..iv.kinds.len()).filter_map(move |b| Self::new(potential, iv, b).ok()))
            .collect()
    }

    /// The chart around a minimum branch, for potentials with one well.
    pub fn first_minimum(potential: &Potential<T>, intervals: &[MomentumInterval<T>], i2: T) -> Result<Self> {
        let iv = intervals
            .iter()
            .find(|iv| iv.contains(i2))
            .ok_or_else(|| Error::Domain(format!("I₂ = {i2} is in no momentum interval")))?;
        let b = iv
            .kinds
            .iter()
            .position(|k| *k == PointKind::Minimum)
            .ok_or_else(|| Error::Analysis("no minimum branch".into()))?;
        Self::new(potential, iv, b)
    }

    pub fn with_quadrature(mut self, opts: AdaptiveOptions) -> Self {
        self.quad = opts;
        self
    }

    pub fn potential(&self) -> &Potential<T> {
        &self.potential
    }

    pub fn interval(&self) -> &MomentumInterval<T> {
        &self.interval
    }

    pub fn branch(&self) -> usize {
        self.branch
    }

    pub fn bottom_kind(&self) -> PointKind {
        self.interval.kinds[self.branch]
    }

    /// Bottom, top and turning-point brackets at `I₂`.
    pub fn levels(&self, i2: T) -> Result<ChartLevels<T>> {
        let cps = self.interval.branches_at(&self.potential, i2)?;
        let ell = i2 * i2;
        let i = self.branch;
        let bottom = cps[i];
        let barrier = |j: &usize| match bottom.kind {
            PointKind::Minimum => true,
            PointKind::Maximum => cps[*j].kind == PointKind::Maximum && cps[*j].level > bottom.level,
        };
        let bl = (0..i).rev().find(barrier);
        let br = (i + 1..cps.len()).find(barrier);
        let (lo, hi) = self.potential.range();
        let (left, left_top) = match bl {
            Some(j) => ((cps[j].r0, cps[j + 1].r0), cps[j].level),
            None => ((lo, cps[0].r0), veff_raw(&self.potential, lo, ell)),
        };
        let (right, right_top) = match br {
            Some(j) => ((cps[j - 1].r0, cps[j].r0), cps[j].level),
            None => {
                let cap = veff_raw(&self.potential, hi, ell).min(self.potential.v_infinity());
                ((cps[cps.len() - 1].r0, hi), cap)
            }
        };
        let top = left_top.min(right_top);
        if !(top > bottom.level) {
            return Err(Error::Domain(format!(
                "empty chart at I₂ = {i2}: bottom level {} not below top {top}",
                bottom.level
            )));
        }
        let interior = cps.iter().map(|c| c.r0).filter(|r| *r > left.0 && *r < right.1).collect();
        Ok(ChartLevels { i2, bottom, top, left, right, interior })
    }

    fn check_energy(&self, lv: &ChartLevels<T>, e: T) -> Result<()> {
        if !(e > lv.bottom.level && e < lv.top) {
            return Err(Error::Domain(format!("E = {e} outside ({}, {}) at I₂ = {}", lv.bottom.level, lv.top, lv.i2)));
        }
        Ok(())
    }

    fn turning_points_at(&self, lv: &ChartLevels<T>, e: T) -> Result<(T, T)> {
        self.check_energy(lv, e)?;
        let ell = lv.i2 * lv.i2;
        let f = |r: T| veff_raw(&self.potential, r, ell) - e;
        let corrupt = |side: &str, err: Error| {
            Error::ChartCorruption(format!("{side} turning point at E = {e}, I₂ = {}: {err}", lv.i2))
        };
        let r_min = brent(f, lv.left.0, lv.left.1, T::zero()).map_err(|err| corrupt("inner", err))?;
        let r_max = brent(f, lv.right.0, lv.right.1, T::zero()).map_err(|err| corrupt("outer", err))?;
        Ok((r_min, r_max))
    }

    /// Radii where the radial velocity vanishes.
    pub fn turning_points(&self, e: T, i2: T) -> Result<(T, T)> {
        let lv = self.levels(i2)?;
        self.turning_points_at(&lv, e)
    }

    /// `I₁`, `∂G/∂E` and `∂G/∂I₂` by quadrature after `r = r_min + Δ sin²φ`,
    /// which makes all three integrands smooth at the turning points.
    pub fn integrals_at(&self, lv: &ChartLevels<T>, e: T) -> Result<ActionIntegrals<T>> {
        if e == lv.bottom.level && lv.bottom.kind == PointKind::Minimum {
            return Ok(ActionIntegrals { i1: T::zero(), g_e: T::nan(), g_i2: T::nan(), converged: true });
        }
        let (r_min, r_max) = self.turning_points_at(lv, e)?;
        let ell = lv.i2 * lv.i2;
        let delta = r_max - r_min;
        let two = T::lit(2.0);
        let half_pi = T::FRAC_PI_2();
        let inside: Vec<T> = lv.interior.iter().copied().filter(|r| *r > r_min && *r < r_max).collect();
        let mut breaks = vec![T::zero()];
        breaks.extend(inside.iter().map(|&r| ((r - r_min) / delta).sqrt().asin()));
        breaks.push(half_pi);
        let scale = e.abs().max(lv.top - lv.bottom.level).max(T::min_positive_value());
        let tol = T::lit(1e-9) * scale;
        let kinetic = RadialKinetic::new(&self.potential, ell, e, r_min, r_max, &inside);
        let mut worst = T::zero();
        let q = adaptive(
            |phi: T| {
                let (s, c) = phi.sin_cos();
                let (x, y) = (delta * s * s, delta * c * c);
                let r = if x <= y { r_min + x } else { r_max - y };
                let jac = delta * (two * phi).sin();
                let k = two * kinetic.eval(r, x, y);
                if k <= T::zero() {
                    worst = worst.min(k);
                    return [T::zero(); 3];
                }
                let root = k.sqrt();
                let inv = jac / root;
                [root * jac, inv, -inv * lv.i2 / (r * r)]
            },
            &breaks,
            self.quad,
        );
        if worst < -tol {
            return Err(Error::ChartCorruption(format!(
                "negative radial kinetic energy {worst} between turning points at E = {e}, I₂ = {}",
                lv.i2
            )));
        }
        let pi = T::PI();
        Ok(ActionIntegrals {
            i1: q.values[0] / pi,
            g_e: q.values[1] / pi,
            g_i2: q.values[2] / pi,
            converged: q.converged,
        })
    }

    pub fn integrals(&self, e: T, i2: T) -> Result<ActionIntegrals<T>> {
        let lv = self.levels(i2)?;
        self.integrals_at(&lv, e)
    }

    /// `I₁ = G(E, I₂)`.
    pub fn action_g(&self, e: T, i2: T) -> Result<T> {
        Ok(self.integrals(e, i2)?.i1)
    }

    /// `(ω₁, ω₂)` with `ω₁ = 1/∂_E G` and `ω₂ = -∂_{I₂}G · ω₁`.
    pub fn frequencies(&self, e: T, i2: T) -> Result<(T, T)> {
        let p = self.point(e, i2)?;
        Ok((p.omega1, p.omega2))
    }

    pub fn point_at(&self, lv: &ChartLevels<T>, e: T) -> Result<ActionPoint<T>> {
        if e == lv.bottom.level {
            return Err(Error::Domain("frequencies are not defined at the chart bottom".into()));
        }
        let a = self.integrals_at(lv, e)?;
        let omega1 = T::one() / a.g_e;
        let omega2 = -a.g_i2 * omega1;
        Ok(ActionPoint { i1: a.i1, i2: lv.i2, e, omega1, omega2, nu: omega1 / omega2, degraded: !a.converged })
    }

    pub fn point(&self, e: T, i2: T) -> Result<ActionPoint<T>> {
        let lv = self.levels(i2)?;
        self.point_at(&lv, e)
    }

    /// Range of `I₁` at `I₂` over energies from the bottom (a fraction
    /// `1e-9` above it when the bottom is a maximum) up to a fraction
    /// `1 - 1e-9` of the way to the top level.
    pub fn action_range(&self, i2: T) -> Result<(T, T)> {
        let lv = self.levels(i2)?;
        let (e_lo, e_hi) = self.energy_window(&lv);
        let lo = if lv.bottom.kind == PointKind::Minimum { T::zero() } else { self.integrals_at(&lv, e_lo)?.i1 };
        Ok((lo, self.integrals_at(&lv, e_hi)?.i1))
    }

    fn energy_window(&self, lv: &ChartLevels<T>) -> (T, T) {
        let span = lv.top - lv.bottom.level;
        let lo = match lv.bottom.kind {
            PointKind::Minimum => lv.bottom.level,
            PointKind::Maximum => lv.bottom.level + span * T::lit(1e-9),
        };
        (lo, lv.top - span * T::lit(1e-9))
    }

    /// Energy `E = h(I₁, I₂)`, by Brent's method on the increasing map
    /// `E ↦ G(E, I₂)`.
    pub fn invert_h(&self, i1: T, i2: T) -> Result<T> {
        let lv = self.levels(i2)?;
        let (e_lo, e_hi) = self.energy_window(&lv);
        let g_lo = if lv.bottom.kind == PointKind::Minimum { T::zero() } else { self.integrals_at(&lv, e_lo)?.i1 };
        let g_hi = self.integrals_at(&lv, e_hi)?.i1;
        if !(i1 >= g_lo && i1 <= g_hi) {
            return Err(Error::Domain(format!("I₁ = {i1} outside [{g_lo}, {g_hi}] at I₂ = {i2}")));
        }
        if i1 == g_lo {
            return Ok(e_lo);
        }
        let mut failure = None;
        let e = brent(
            |e| match self.integrals_at(&lv, e) {
                Ok(a) => a.i1 - i1,
                Err(err) => {
                    failure = Some(err);
                    T::nan()
                }
            },
            e_lo,
            e_hi,
            T::zero(),
        );
        match (e, failure) {
            (Ok(e), None) => Ok(e),
            (_, Some(err)) | (Err(err), None) => Err(err),
        }
    }

    /// Samples on an `n_e × n_i2` grid of normalized energies and momenta
    /// strictly inside the chart.
    pub fn grid(&self, i2_range: (T, T), n_e: usize, n_i2: usize) -> Vec<Result<ActionPoint<T>>> {
        let cells: Vec<(usize, usize)> = (0..n_i2).flat_map(|j| (0..n_e).map(move |i| (i, j))).collect();
        cells
            .par_iter()
            .map(|&(i, j)| {
                let i2 = interior(i2_range.0, i2_range.1, j, n_i2);
                let lv = self.levels(i2)?;
                let e = lv.denormalize(interior(T::zero(), T::one(), i, n_e));
                self.point_at(&lv, e)
            })
            .collect()
    }
}

/// `E - V_eff(r)` between two turning points.
///
/// Within `1e-3 r*` of a turning point `r*` the difference is summed from the
/// Taylor series of `V_eff` there, with the value at the turning point taken
/// as exactly zero. Direct subtraction in that zone has a rounding error
/// comparable to the difference itself, and the action integrals inherit
/// it through the square root.
struct RadialKinetic<'a, T> {
    potential: &'a Potential<T>,
    ell: T,
    e: T,
    near_min: [T; MAX_ORDER],
    near_max: [T; MAX_ORDER],
    zone_min: T,
    zone_max: T,
    /// Interior critical points: radius, `E - V_eff` there, series.
    crossings: Vec<(T, T, [T; MAX_ORDER])>,
}

impl<'a, T: Real> RadialKinetic<'a, T> {
    fn new(potential: &'a Potential<T>, ell: T, e: T, r_min: T, r_max: T, interior: &[T]) -> Self {
        // -V_eff^(n)(r*) / n!, n = 1..6
        let coeffs = |r: T| -> [T; MAX_ORDER] {
            let d = potential.derivatives(r);
            let mut out = [T::zero(); MAX_ORDER];
            let mut fact = T::one();
            // (d/dr)^n r^-2 = (-1)^n (n+1)! r^-(n+2)
            let mut cent = T::one();
            for n in 1..=MAX_ORDER {
                let nn = T::from_usize_lossy(n);
                fact = fact * nn;
                cent = -cent * (nn + T::one());
                let veff_n = d[n] + ell * T::lit(0.5) * cent / r.powi(n as i32 + 2);
                out[n - 1] = -veff_n / fact;
            }
            out
        };
        RadialKinetic {
            potential,
            ell,
            e,
            near_min: coeffs(r_min),
            near_max: coeffs(r_max),
            zone_min: T::lit(1e-3) * r_min,
            zone_max: T::lit(1e-3) * r_max,
            crossings: interior.iter().map(|&r| (r, e - veff_raw(potential, r, ell), coeffs(r))).collect(),
        }
    }

    fn series(c: &[T; MAX_ORDER], x: T) -> T {
        c.iter().rev().fold(T::zero(), |acc, &cn| (acc + cn) * x)
    }

    /// `x = r - r_min` and `y = r_max - r` are passed separately so neither
    /// is recovered by cancellation.
    fn eval(&self, r: T, x: T, y: T) -> T {
        if x <= y && x < self.zone_min {
            return Self::series(&self.near_min, x);
        }
        if y < x && y < self.zone_max {
            return Self::series(&self.near_max, -y);
        }
        // just above a barrier E - V_eff is small next to either term
        for (rc, above, c) in &self.crossings {
            let d = r - *rc;
            if d.abs() < T::lit(1e-3) * *rc {
                return *above + Self::series(c, d);
            }
        }
        self.e - veff_raw(self.potential, r, self.ell)
    }
}

fn interior<T: Real>(lo: T, hi: T, i: usize, n: usize) -> T {
    lo + (hi - lo) * (T::from_usize_lossy(i) + T::lit(0.5)) / T::from_usize_lossy(n)
}

/// Fit of `I₁` against `Ē = E - V₀(I₂)` above a maximum.
#[derive(Debug, Clone, Serialize)]
#[serde(bound = "T: Real")]
pub struct LogAsymptotics<T> {
    pub i2: T,
    /// Coefficient of `-Ē ln Ē`, expected `1/(πλ)`.
    pub lambda_coefficient: T,
    /// Coefficient of `-Ē² ln Ē`.
    pub quadratic_coefficient: T,
    /// `λ` implied by the fit.
    pub lambda_fit: T,
    /// `√(-V_eff'')` at the maximum.
    pub lambda_curvature: T,
    /// Extrapolated `I₁` at `Ē = 0`.
    pub i1_limit: T,
    /// `I₁` evaluated directly on the separatrix level.
    pub i1_separatrix: T,
    pub rms_residual: T,
    pub samples: Vec<(T, T)>,
}

impl<T: Real> LogAsymptotics<T> {
    pub fn lambda_relative_error(&self) -> T {
        ((self.lambda_fit - self.lambda_curvature) / self.lambda_curvature).abs()
    }
}

impl<T: Real> ActionChart<T> {
    /// Least-squares fit of `I₁(Ē)` to
    /// `a (-Ē ln Ē) + b (-Ē² ln Ē) + c₀ + c₁ Ē + c₂ Ē²`
    /// for a chart whose bottom is a maximum; `λ = 1/(π a)`.
    pub fn fit_log_asymptotics(&self, i2: T, ebar: &[T]) -> Result<LogAsymptotics<T>> {
        if self.bottom_kind() != PointKind::Maximum {
            return Err(Error::Domain("log asymptotics need a chart whose bottom is a maximum".into()));
        }
        if ebar.len() < 7 {
            return Err(Error::config("ebar_samples", "at least 7 samples are needed"));
        }
        let lv = self.levels(i2)?;
        let lambda = lv.bottom.lambda().unwrap_or(T::nan());
        let span = lv.top - lv.bottom.level;
        let floor = T::lit(1e-9) * span;
        if ebar.iter().any(|&x| !(x >= floor && x < span)) {
            return Err(Error::Domain(format!("Ē samples must lie in [{floor}, {span})")));
        }
        let i1: Vec<T> =
            ebar.par_iter().map(|&x| Ok(self.integrals_at(&lv, lv.bottom.level + x)?.i1)).collect::<Result<_>>()?;
        // work in Ē / Ē_max to keep the design matrix balanced
        let s = ebar.iter().copied().fold(T::zero(), T::max);
        let rows: Vec<Vec<T>> = ebar
            .iter()
            .map(|&x| {
                let t = x / s;
                let l = -x.ln();
                vec![t * l, t * t * l, T::one(), t, t * t]
            })
            .collect();
        let fit = lsq::solve(&rows, &i1)?;
        let c = &fit.coefficients;
        let a = c[0] / s;
        let separatrix = self.separatrix_action(&lv)?;
        let scale = i1.iter().fold(T::zero(), |m, v| m.max(v.abs())).max(T::min_positive_value());
        let out = LogAsymptotics {
            i2,
            lambda_coefficient: a,
            quadratic_coefficient: c[1] / (s * s),
            lambda_fit: T::one() / (T::PI() * a),
            lambda_curvature: lambda,
            i1_limit: c[2],
            i1_separatrix: separatrix,
            rms_residual: fit.rms_residual,
            samples: ebar.iter().copied().zip(i1).collect(),
        };
        if !(fit.rms_residual <= T::lit(1e-6) * scale) || !out.i1_limit.is_finite() {
            return Err(Error::AsymptoticsMismatch(format!(
                "log model residual {} at I₂ = {i2} (scale {scale})",
                fit.rms_residual
            )));
        }
        Ok(out)
    }

    /// `I₁` on the level of the bottom maximum itself, where the integrand
    /// has a corner but no singularity.
    fn separatrix_action(&self, lv: &ChartLevels<T>) -> Result<T> {
        let e = lv.bottom.level;
        let ell = lv.i2 * lv.i2;
        let f = |r: T| veff_raw(&self.potential, r, ell) - e;
        let r_min = brent(f, lv.left.0, lv.left.1, T::zero())?;
        let r_max = brent(f, lv.right.0, lv.right.1, T::zero())?;
        let mut breaks = vec![r_min];
        breaks.extend(lv.interior.iter().copied().filter(|r| *r > r_min && *r < r_max));
        breaks.push(r_max);
        // substitution only near the ends; the interior corner is a breakpoint
        let delta = r_max - r_min;
        let phis: Vec<T> =
            breaks.iter().map(|r| ((*r - r_min) / delta).max(T::zero()).min(T::one()).sqrt().asin()).collect();
        let two = T::lit(2.0);
        let q = adaptive(
            |phi: T| {
                let s = phi.sin();
                let r = r_min + delta * s * s;
                let k = two * (e - veff_raw(&self.potential, r, ell));
                [k.max(T::zero()).sqrt() * delta * (two * phi).sin()]
            },
            &phis,
            self.quad,
        );
        Ok(q.values[0] / T::PI())
    }
}

pub fn write_points_csv<T: Real, W: Write>(points: &[ActionPoint<T>], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for p in points {
        w.serialize(p)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_asymptotics_csv<T: Real, W: Write>(fit: &LogAsymptotics<T>, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["ebar", "i1"])?;
    for (x, y) in &fit.samples {
        w.write_record([x.to_string(), y.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::effective::decompose_momentum_intervals;

    fn kepler_chart() -> ActionChart<f64> {
        let p = Potential::kepler(1.0).unwrap();
        let iv = decompose_momentum_intervals(&p, 64, 10.0).unwrap();
        ActionChart::new(&p, &iv[0], 0).unwrap()
    }

    #[test]
    fn kepler_turning_points_solve_the_quadratic() {
        let c = kepler_chart();
        let (a, b) = c.turning_points(-0.375, 1.0).unwrap();
        // 1/r = 1 ± √(1 + 2E)
        let s = (1.0f64 - 0.75).sqrt();
        assert!((a - 1.0 / (1.0 + s)).abs() < 1e-12);
        assert!((b - 1.0 / (1.0 - s)).abs() < 1e-12);
    }

    #[test]
    fn kepler_action_and_frequencies() {
        let c = kepler_chart();
        let (e, i2) = (-0.3, 1.2);
        let a = c.integrals(e, i2).unwrap();
        assert!((a.i1 - (1.0 / (-2.0 * e).sqrt() - i2)).abs() < 1e-10);
        let p = c.point(e, i2).unwrap();
        let w = (-2.0 * e).powf(1.5);
        assert!((p.omega1 - w).abs() < 1e-9 * w);
        assert!((p.nu - 1.0).abs() < 1e-9);
    }

    #[test]
    fn kepler_round_trip() {
        let c = kepler_chart();
        let e = c.invert_h(0.8, 1.1).unwrap();
        assert!((c.action_g(e, 1.1).unwrap() - 0.8).abs() < 1e-10);
        assert!(c.invert_h(-0.1, 1.1).is_err());
    }

    #[test]
    fn energy_outside_chart_is_rejected() {
        let c = kepler_chart();
        assert!(matches!(c.turning_points(-0.6, 1.0), Err(Error::Domain(_))));
        assert!(matches!(c.turning_points(0.5, 1.0), Err(Error::Domain(_))));
        assert_eq!(c.action_g(-0.5, 1.0).unwrap(), 0.0);
    }
}
