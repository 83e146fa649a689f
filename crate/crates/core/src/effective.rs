//! Effective potential `V_eff(r, ℓ) = V(r) + ℓ / (2 r²)`, its circular
//! orbits, and the split of the angular-momentum range into pieces on
//! which the critical-point structure does not change.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::log_grid;
use crate::numerics::roots::{brent, maximize, sign_changes};
use crate::potentials::Potential;
use crate::scalar::Real;

/// Radial grid size used to bracket circular orbits.
pub const ROOT_GRID: usize = 4096;
/// Threshold on the dimensionless curvature `|3 + g|`.
pub const TOL_NONDEG: f64 = 1e-8;
/// Residual bound on `r³V' - ℓ`, relative to `max(1, ℓ)`.
pub const TOL_GRAD: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PointKind {
    Minimum,
    Maximum,
}

impl PointKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PointKind::Minimum => "minimum",
            PointKind::Maximum => "maximum",
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
#[serde(bound = "T: Real")]
pub struct CriticalPoint<T> {
    pub r0: T,
    pub ell: T,
    pub kind: PointKind,
    pub level: T,
    /// `∂²V_eff/∂r²` at `r0`.
    pub curvature: T,
    /// `r0 V_eff'' / |V'|`, equal to `±(3 + g(r0))`.
    pub scaled_curvature: T,
    pub degenerate: bool,
}

impl<T: Real> CriticalPoint<T> {
    /// `λ = √(-V_eff'')` at a maximum.
    pub fn lambda(&self) -> Option<T> {
        (self.kind == PointKind::Maximum).then(|| (-self.curvature).sqrt())
    }
}

fn check_args<T: Real>(p: &Potential<T>, r: T, ell: T) -> Result<()> {
    if !p.in_range(r) {
        let (lo, hi) = p.range();
        return Err(Error::Domain(format!("r = {r} outside working range [{lo}, {hi}]")));
    }
    if !(ell >= T::zero()) {
        return Err(Error::Domain(format!("ℓ = {ell} must be non-negative")));
    }
    Ok(())
}

pub fn veff<T: Real>(p: &Potential<T>, r: T, ell: T) -> Result<T> {
    check_args(p, r, ell)?;
    Ok(veff_raw(p, r, ell))
}

pub fn veff_dr<T: Real>(p: &Potential<T>, r: T, ell: T) -> Result<T> {
    check_args(p, r, ell)?;
    Ok(p.dv(r) - ell / (r * r * r))
}

pub fn veff_dr2<T: Real>(p: &Potential<T>, r: T, ell: T) -> Result<T> {
    check_args(p, r, ell)?;
    Ok(p.derivatives(r)[2] + T::lit(3.0) * ell / r.powi(4))
}

pub(crate) fn veff_raw<T: Real>(p: &Potential<T>, r: T, ell: T) -> T {
    p.value(r) + ell / (T::lit(2.0) * r * r)
}

#[derive(Debug, Clone, Copy, Serialize)]
#[serde(bound = "T: Real")]
pub struct MomentumRange<T> {
    pub l_min: T,
    pub l_max: T,
    /// `L_M` came from the cap because `r³V'` grows up to the range edge.
    pub capped: bool,
}

/// `(L_m, L_M)`: the admissible range of `|p_θ|`.
///
/// `L_m² = max(0, ℓ*)`, raised to the interior minimum of `r³V'` when that
/// is larger. `L_M² = sup r³V'` when the supremum is attained inside the
/// working range; otherwise `L_M = cap`, clipped so that `L_M²` stays
/// within the values `r³V'` takes on the range.
pub fn momentum_range<T: Real>(p: &Potential<T>, cap: T) -> Result<MomentumRange<T>> {
    if !(cap > T::zero()) {
        return Err(Error::config("momentum_cap", "must be positive"));
    }
    let (lo, hi) = p.range();
    let grid = log_grid(lo, hi, ROOT_GRID);
    let f: Vec<T> = grid.iter().map(|&r| p.r3_dv(r)).collect();
    let n = f.len();
    let imax = (0..n).fold(0, |b, i| if f[i] > f[b] { i } else { b });
    let imin = (0..n).fold(0, |b, i| if f[i] < f[b] { i } else { b });
    let xtol = T::lit(1e-12);
    let mut floor = p.ell_star().max(T::zero());
    if imin > 0 && imin < n - 1 {
        let (_, neg) = maximize(|r| -p.r3_dv(r), grid[imin - 1], grid[imin + 1], xtol);
        floor = floor.max(-neg);
    }
    let (sup, capped) = if imax > 0 && imax < n - 1 {
        let (_, v) = maximize(|r| p.r3_dv(r), grid[imax - 1], grid[imax + 1], xtol);
        (v, false)
    } else {
        (f[imax].min(cap * cap), true)
    };
    if !(sup > floor) || !p.ell_star().is_finite() && p.ell_star() > T::zero() {
        return Err(Error::HypothesisViolation(format!(
            "{}: no angular momentum admits circular orbits (sup r³V' = {sup}, floor = {floor})",
            p.name()
        )));
    }
    Ok(MomentumRange { l_min: floor.sqrt(), l_max: sup.sqrt(), capped })
}

fn classify<T: Real>(p: &Potential<T>, r0: T, ell: T) -> CriticalPoint<T> {
    let d = p.derivatives(r0);
    let curvature = d[2] + T::lit(3.0) * ell / r0.powi(4);
    let scaled = curvature * r0 / d[1].abs().max(T::min_positive_value());
    let kind = if curvature > T::zero() { PointKind::Minimum } else { PointKind::Maximum };
    CriticalPoint {
        r0,
        ell,
        kind,
        level: d[0] + ell / (T::lit(2.0) * r0 * r0),
        curvature,
        scaled_curvature: scaled,
        degenerate: scaled.abs() <= T::lit(TOL_NONDEG),
    }
}

/// All circular orbits at `ℓ` inside the working range, sorted by radius.
///
/// Roots of `r³V'(r) = ℓ` are bracketed on a log grid and refined by Brent's
/// method. Tangential (even-multiplicity) roots produce no sign change and
/// are not reported; they occur only at isolated `ℓ`.
pub fn find_critical_points<T: Real>(p: &Potential<T>, ell: T) -> Result<Vec<CriticalPoint<T>>> {
    if !(ell >= T::zero()) || !ell.is_finite() {
        return Err(Error::Domain(format!("ℓ = {ell} must be finite and non-negative")));
    }
    let (lo, hi) = p.range();
    let grid = log_grid(lo, hi, ROOT_GRID);
    let h = |r: T| p.r3_dv(r) - ell;
    let vals: Vec<T> = grid.iter().map(|&r| h(r)).collect();
    let mut out = Vec::new();
    for i in sign_changes(&vals) {
        let r0 = if vals[i] == T::zero() { grid[i] } else { brent(h, grid[i], grid[i + 1], T::zero())? };
        out.push(classify(p, r0, ell));
    }
    Ok(out)
}

/// `d/dℓ V_eff(r0(ℓ), ℓ) = 1 / (2 r0²)`.
pub fn critical_level_slope<T: Real>(cp: &CriticalPoint<T>) -> T {
    T::one() / (T::lit(2.0) * cp.r0 * cp.r0)
}

/// Critical point of the same branch at a nearby `ℓ`: the root closest to
/// `cp.r0` with the same kind.
pub fn track_branch<T: Real>(p: &Potential<T>, cp: &CriticalPoint<T>, ell: T) -> Result<CriticalPoint<T>> {
    find_critical_points(p, ell)?
        .into_iter()
        .filter(|c| c.kind == cp.kind)
        .min_by(|a, b| {
            let da = (a.r0 / cp.r0).ln().abs();
            let db = (b.r0 / cp.r0).ln().abs();
            da.partial_cmp(&db).unwrap_or(std::cmp::Ordering::Equal)
        })
        .ok_or_else(|| Error::Analysis(format!("branch through r0 = {} lost at ℓ = {ell}", cp.r0)))
}

#[derive(Debug, Clone, Serialize)]
#[serde(bound = "T: Real")]
pub struct MomentumInterval<T> {
    pub lo: T,
    pub hi: T,
    /// Branch kinds ordered by radius.
    pub kinds: Vec<PointKind>,
    /// Critical points at the midpoint of the interval.
    pub critical_points: Vec<CriticalPoint<T>>,
    pub levels_distinct: bool,
}

impl<T: Real> MomentumInterval<T> {
    pub fn contains(&self, p_theta: T) -> bool {
        p_theta > self.lo && p_theta < self.hi
    }

    pub fn midpoint(&self) -> T {
        (self.lo + self.hi) * T::lit(0.5)
    }

    /// Critical points at `p_theta`, checked against the interval's
    /// branch structure.
    pub fn branches_at(&self, p: &Potential<T>, p_theta: T) -> Result<Vec<CriticalPoint<T>>> {
        if !self.contains(p_theta) {
            return Err(Error::Domain(format!("p_θ = {p_theta} outside ({}, {})", self.lo, self.hi)));
        }
        let cps = find_critical_points(p, p_theta * p_theta)?;
        let kinds: Vec<PointKind> = cps.iter().map(|c| c.kind).collect();
        if kinds != self.kinds {
            return Err(Error::ChartCorruption(format!(
                "branch structure at p_θ = {p_theta} is {kinds:?}, expected {:?}",
                self.kinds
            )));
        }
        Ok(cps)
    }
}

/// What must stay constant inside a momentum interval.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Signature {
    kinds: Vec<PointKind>,
    degenerate: bool,
    /// Rank of every critical level, with `V^∞` appended when finite.
    level_order: Vec<usize>,
}

fn signature<T: Real>(p: &Potential<T>, p_theta: T) -> Signature {
    match find_critical_points(p, p_theta * p_theta) {
        Ok(cps) => {
            let mut levels: Vec<T> = cps.iter().map(|c| c.level).collect();
            if p.v_infinity().is_finite() {
                levels.push(p.v_infinity());
            }
            let mut order: Vec<usize> = (0..levels.len()).collect();
            order.sort_by(|&a, &b| levels[a].partial_cmp(&levels[b]).unwrap_or(std::cmp::Ordering::Equal));
            let ties = order.windows(2).any(|w| levels[w[0]] == levels[w[1]]);
            Signature {
                kinds: cps.iter().map(|c| c.kind).collect(),
                degenerate: ties || cps.iter().any(|c| c.degenerate),
                level_order: order,
            }
        }
        Err(_) => Signature { kinds: Vec::new(), degenerate: true, level_order: Vec::new() },
    }
}

/// Split `(L_m, L_M)` into open intervals of `p_θ` on which the number,
/// order and kind of critical points and the ordering of the critical
/// levels (including `V^∞`) stay fixed.
///
/// Cuts between differing samples are located by bisection and each
/// resulting interval is pulled back by `δ_cut = 1e-4 (L_M - L_m)` from
/// every cut. The ends `L_m` and `L_M` are kept as they are.
pub fn decompose_momentum_intervals<T: Real>(
    p: &Potential<T>,
    n_samples: usize,
    cap: T,
) -> Result<Vec<MomentumInterval<T>>> {
    if n_samples < 64 {
        return Err(Error::config("n_samples", "must be at least 64"));
    }
    let range = momentum_range(p, cap)?;
    let (a, b) = (range.l_min, range.l_max);
    let width = b - a;
    let delta = T::lit(1e-4) * width;
    let n = T::from_usize_lossy(n_samples);
    let samples: Vec<T> = (0..n_samples).map(|k| a + width * (T::from_usize_lossy(k) + T::lit(0.5)) / n).collect();
    let sigs: Vec<Signature> = samples.par_iter().map(|&s| signature(p, s)).collect();

    // runs of equal signatures, with the boundaries between runs refined
    let mut runs: Vec<(T, T, usize)> = Vec::new();
    let mut start = a;
    let mut first = 0;
    for k in 0..n_samples {
        if k + 1 == n_samples || sigs[k + 1] != sigs[first] {
            let end = if k + 1 == n_samples {
                b
            } else {
                let (mut l, mut r) = (samples[k], samples[k + 1]);
                while r - l > delta * T::lit(0.01) {
                    let m = (l + r) * T::lit(0.5);
                    if !(m > l && m < r) {
                        break;
                    }
                    if signature(p, m) == sigs[first] {
                        l = m;
                    } else {
                        r = m;
                    }
                }
                (l + r) * T::lit(0.5)
            };
            runs.push((start, end, first));
            start = end;
            first = k + 1;
        }
    }

    let last = runs.len() - 1;
    let mut out = Vec::new();
    for (i, (lo, hi, k)) in runs.into_iter().enumerate() {
        let sig = &sigs[k];
        if sig.degenerate || sig.kinds.is_empty() {
            continue;
        }
        let lo = if i == 0 { lo } else { lo + delta };
        let hi = if i == last { hi } else { hi - delta };
        if !(hi > lo) {
            continue;
        }
        let mid = (lo + hi) * T::lit(0.5);
        let critical_points = find_critical_points(p, mid * mid)?;
        out.push(MomentumInterval { lo, hi, kinds: sig.kinds.clone(), critical_points, levels_distinct: true });
    }
    if out.is_empty() {
        return Err(Error::Analysis(format!("{}: no admissible momentum interval", p.name())));
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
#[serde(bound = "T: Real")]
pub struct BranchRow<T> {
    pub ell: T,
    pub p_theta: T,
    pub branch: usize,
    pub r0: T,
    pub kind: PointKind,
    pub level: T,
    pub curvature: T,
    pub degenerate: bool,
}

/// One row per `(ℓ, branch)` over the given `ℓ` samples.
pub fn branch_table<T: Real>(p: &Potential<T>, ells: &[T]) -> Result<Vec<BranchRow<T>>> {
    let per: Vec<Result<Vec<BranchRow<T>>>> = ells
        .par_iter()
        .map(|&ell| {
            Ok(find_critical_points(p, ell)?
                .into_iter()
                .enumerate()
                .map(|(branch, c)| BranchRow {
                    ell,
                    p_theta: ell.sqrt(),
                    branch,
                    r0: c.r0,
                    kind: c.kind,
                    level: c.level,
                    curvature: c.curvature,
                    degenerate: c.degenerate,
                })
                .collect())
        })
        .collect();
    let mut rows = Vec::new();
    for r in per {
        rows.extend(r?);
    }
    Ok(rows)
}

pub fn write_branch_csv<T: Real, W: Write>(rows: &[BranchRow<T>], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
