//! Leapfrog integration of `H_ε = |p|²/2 + V(|x|) + ε P(x)` in three
//! dimensions, and of a central system driven on the fast time scale while
//! coupled to slow harmonic oscillators. Each run reports how far `|L|` and
//! the unperturbed energy wander.

use rayon::prelude::*;
use serde::Serialize;

use crate::actions::ActionChart;
use crate::effective::veff_raw;
use crate::error::{Error, Result};
use crate::numerics::roots::brent;
use crate::potentials::Potential;
use crate::scalar::Real;

pub type Vec3<T> = [T; 3];

fn dot<T: Real>(a: &Vec3<T>, b: &Vec3<T>) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross<T: Real>(a: &Vec3<T>, b: &Vec3<T>) -> Vec3<T> {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn norm<T: Real>(a: &Vec3<T>) -> T {
    dot(a, a).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PerturbationKind {
    AnisotropicQuadratic,
    FixedDipole,
    UserGrid,
    Central,
}

impl PerturbationKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PerturbationKind::AnisotropicQuadratic => "anisotropic_quadratic",
            PerturbationKind::FixedDipole => "fixed_dipole",
            PerturbationKind::UserGrid => "user_grid",
            PerturbationKind::Central => "central",
        }
    }
}

/// Scalar field sampled on a regular box and interpolated trilinearly.
///
/// `values[i + nx (j + ny k)]` is the sample at
/// `origin + (i, j, k) * spacing`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid3<T> {
    origin: Vec3<T>,
    spacing: Vec3<T>,
    shape: [usize; 3],
    values: Vec<T>,
}

impl<T: Real> Grid3<T> {
    pub fn new(origin: Vec3<T>, spacing: Vec3<T>, shape: [usize; 3], values: Vec<T>) -> Result<Self> {
        if shape.iter().any(|&n| n < 2) {
            return Err(Error::config("grid.shape", "needs at least two nodes per axis"));
        }
        if spacing.iter().any(|h| !(*h > T::zero()) || !h.is_finite()) {
            return Err(Error::config("grid.spacing", "must be positive and finite"));
        }
        if values.len() != shape[0] * shape[1] * shape[2] {
            return Err(Error::config(
                "grid.values",
                format!("expected {} values, got {}", shape[0] * shape[1] * shape[2], values.len()),
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::config("grid.values", "must be finite"));
        }
        Ok(Grid3 { origin, spacing, shape, values })
    }

    /// Samples `f` at every node.
    pub fn sample(origin: Vec3<T>, spacing: Vec3<T>, shape: [usize; 3], f: impl Fn(Vec3<T>) -> T) -> Result<Self> {
        let mut values = Vec::with_capacity(shape[0] * shape[1] * shape[2]);
        for k in 0..shape[2] {
            for j in 0..shape[1] {
                for i in 0..shape[0] {
                    let node = [i, j, k];
                    values.push(f(std::array::from_fn(|a| origin[a] + spacing[a] * T::from_usize_lossy(node[a]))));
                }
            }
        }
        Self::new(origin, spacing, shape, values)
    }

    /// Interpolated value and gradient, `None` outside the box.
    pub fn value_and_gradient(&self, x: &Vec3<T>) -> Option<(T, Vec3<T>)> {
        let mut cell = [0usize; 3];
        let mut frac = [T::zero(); 3];
        for a in 0..3 {
            let s = (x[a] - self.origin[a]) / self.spacing[a];
            let last = T::from_usize_lossy(self.shape[a] - 1);
            if !(s >= T::zero() && s <= last) {
                return None;
            }
            let i = s.floor().to_usize()?.min(self.shape[a] - 2);
            cell[a] = i;
            frac[a] = s - T::from_usize_lossy(i);
        }
        let at = |di: usize, dj: usize, dk: usize| {
            self.values[cell[0] + di + self.shape[0] * (cell[1] + dj + self.shape[1] * (cell[2] + dk))]
        };
        let one = T::one();
        let mut value = T::zero();
        let mut grad = [T::zero(); 3];
        for corner in 0..8 {
            let d = [corner & 1, (corner >> 1) & 1, (corner >> 2) & 1];
            let w: [T; 3] = std::array::from_fn(|a| if d[a] == 1 { frac[a] } else { one - frac[a] });
            let dw: [T; 3] = std::array::from_fn(|a| if d[a] == 1 { one } else { -one });
            let v = at(d[0], d[1], d[2]);
            value = value + v * w[0] * w[1] * w[2];
            grad[0] = grad[0] + v * dw[0] * w[1] * w[2] / self.spacing[0];
            grad[1] = grad[1] + v * w[0] * dw[1] * w[2] / self.spacing[1];
            grad[2] = grad[2] + v * w[0] * w[1] * dw[2] / self.spacing[2];
        }
        Some((value, grad))
    }
}

/// Position-dependent perturbation `P(x)`.
#[derive(Debug, Clone)]
pub enum Perturbation<T> {
    /// `x² - y²`.
    AnisotropicQuadratic,
    /// `x / (|x|² + a²)^(3/2)`: a dipole at the origin, softened at radius `a`.
    FixedDipole {
        softening: T,
    },
    UserGrid(Grid3<T>),
    /// `W(|x|)`; leaves the angular momentum invariant.
    Central(Potential<T>),
}

impl<T: Real> Perturbation<T> {
    pub fn kind(&self) -> PerturbationKind {
        match self {
            Perturbation::AnisotropicQuadratic => PerturbationKind::AnisotropicQuadratic,
            Perturbation::FixedDipole { .. } => PerturbationKind::FixedDipole,
            Perturbation::UserGrid(_) => PerturbationKind::UserGrid,
            Perturbation::Central(_) => PerturbationKind::Central,
        }
    }

    /// `(P, ∇P)`, `None` where the perturbation is undefined.
    pub fn value_and_gradient(&self, x: &Vec3<T>) -> Option<(T, Vec3<T>)> {
        let two = T::lit(2.0);
        match self {
            Perturbation::AnisotropicQuadratic => {
                Some((x[0] * x[0] - x[1] * x[1], [two * x[0], -two * x[1], T::zero()]))
            }
            Perturbation::FixedDipole { softening } => {
                let s = dot(x, x) + *softening * *softening;
                let s32 = s * s.sqrt();
                let c = T::lit(3.0) * x[0] / (s32 * s);
                Some((x[0] / s32, [T::one() / s32 - c * x[0], -c * x[1], -c * x[2]]))
            }
            Perturbation::UserGrid(grid) => grid.value_and_gradient(x),
            Perturbation::Central(w) => {
                let r = norm(x);
                let (v, dv) = w.value_and_slope(r);
                let f = dv / r;
                Some((v, [f * x[0], f * x[1], f * x[2]]))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(bound = "T: Real")]
pub struct PhaseState<T> {
    pub x: Vec3<T>,
    pub p: Vec3<T>,
}

impl<T: Real> PhaseState<T> {
    pub fn angular_momentum(&self) -> Vec3<T> {
        cross(&self.x, &self.p)
    }

    /// Unperturbed energy `|p|²/2 + V(|x|)`.
    pub fn energy(&self, potential: &Potential<T>) -> T {
        dot(&self.p, &self.p) * T::lit(0.5) + potential.value(norm(&self.x))
    }

    pub fn reversed(&self) -> Self {
        PhaseState { x: self.x, p: self.p.map(|v| -v) }
    }

    /// Largest coordinate difference.
    pub fn distance(&self, other: &Self) -> T {
        (0..3).fold(T::zero(), |m, a| m.max((self.x[a] - other.x[a]).abs()).max((self.p[a] - other.p[a]).abs()))
    }
}

/// State on a chart: inner turning point on the x axis, orbital plane tilted
/// by `inclination` about that axis.
pub fn initial_state<T: Real>(chart: &ActionChart<T>, i1: T, i2: T, inclination: T) -> Result<PhaseState<T>> {
    let e = chart.invert_h(i1, i2)?;
    let (r_min, _) = chart.turning_points(e, i2)?;
    let pt = i2 / r_min;
    Ok(PhaseState { x: [r_min, T::zero(), T::zero()], p: [T::zero(), pt * inclination.cos(), pt * inclination.sin()] })
}

/// Time step, horizon, sampling and the radial shell a run must stay in.
#[derive(Debug, Clone, Copy, Serialize)]
#[serde(bound = "T: Real")]
pub struct Schedule<T> {
    pub t_end: T,
    pub dt: T,
    /// Approximate number of recorded samples after the initial one.
    pub samples: usize,
    pub shell: (T, T),
}

impl<T: Real> Schedule<T> {
    pub fn new(t_end: T, dt: T) -> Result<Self> {
        if !(dt > T::zero()) || !dt.is_finite() {
            return Err(Error::config("dt", "must be positive and finite"));
        }
        if !(t_end >= T::zero()) || !t_end.is_finite() {
            return Err(Error::config("t_end", "must be non-negative and finite"));
        }
        Ok(Schedule { t_end, dt, samples: 1000, shell: (T::zero(), T::infinity()) })
    }

    /// Step of `courant / ω_max`, with `ω_max` the largest of the radial
    /// and angular frequencies at the inner turning point and at `|x|`.
    pub fn resolving(potential: &Potential<T>, state: &PhaseState<T>, t_end: T, courant: T) -> Result<Self> {
        let omega = fastest_frequency(potential, state)?;
        Self::new(t_end, courant / omega)
    }

    pub fn with_samples(mut self, samples: usize) -> Self {
        self.samples = samples.max(1);
        self
    }

    pub fn with_shell(mut self, lo: T, hi: T) -> Self {
        self.shell = (lo, hi);
        self
    }

    pub fn steps(&self) -> usize {
        (self.t_end / self.dt).ceil().to_usize().unwrap_or(0)
    }
}

/// Largest unperturbed local frequency along the orbit through `state`.
pub fn fastest_frequency<T: Real>(potential: &Potential<T>, state: &PhaseState<T>) -> Result<T> {
    let r = norm(&state.x);
    let l = norm(&state.angular_momentum());
    let ell = l * l;
    let e = state.energy(potential);
    let lo = potential.range().0;
    let f = |s: T| veff_raw(potential, s, ell) - e;
    let r_min = if f(lo) > T::zero() && f(r) < T::zero() { brent(f, lo, r, T::zero())? } else { r };
    let local = |s: T| {
        let d = potential.derivatives(s);
        let radial = (d[2] + T::lit(3.0) * ell / s.powi(4)).abs().sqrt();
        radial.max(l / (s * s)).max((d[1] / s).abs().sqrt())
    };
    let omega = local(r_min).max(local(r));
    if !(omega > T::zero()) || !omega.is_finite() {
        return Err(Error::Domain(format!("no finite frequency at r = {r}")));
    }
    Ok(omega)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EscapeReason {
    LeftShell,
    Undefined,
}

#[derive(Debug, Clone, Copy, Serialize)]
#[serde(bound = "T: Real")]
pub struct Escape<T> {
    pub time: T,
    pub radius: T,
    pub reason: EscapeReason,
}

/// Time series and drift statistics of one run.
#[derive(Debug, Clone, Serialize)]
#[serde(bound = "T: Real")]
pub struct DriftRecord<T> {
    pub eps: T,
    pub times: Vec<T>,
    pub l_abs: Vec<T>,
    /// Energy of the unperturbed (fast) system.
    pub h_vals: Vec<T>,
    /// Over every step, not only the recorded ones.
    pub max_drift_l: T,
    pub max_drift_h: T,
    /// Largest deviation of the full Hamiltonian from its initial value.
    pub energy_error: T,
    pub steps: usize,
    pub escape: Option<Escape<T>>,
    pub final_state: PhaseState<T>,
}

impl<T: Real> DriftRecord<T> {
    /// Writes `t, |L|, H` for the recorded samples.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "l_abs", "h"])?;
        for i in 0..self.times.len() {
            w.write_record([self.times[i].to_string(), self.l_abs[i].to_string(), self.h_vals[i].to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Separable Hamiltonian `Σ p_i² m_i⁻¹ / 2 + U(q)` integrated by
/// kick-drift-kick leapfrog.
struct Leapfrog<'a, T> {
    inv_mass: &'a [T],
    dt: T,
}

impl<T: Real> Leapfrog<'_, T> {
    /// Runs `steps` steps; `force` writes `∇U` and reports whether it is
    /// defined, `observe` sees the state after each completed step and can
    /// stop the run. Returns the number of completed steps.
    fn run(
        &self,
        q: &mut [T],
        p: &mut [T],
        steps: usize,
        mut force: impl FnMut(&[T], &mut [T]) -> bool,
        mut observe: impl FnMut(usize, &[T], &[T]) -> bool,
    ) -> std::result::Result<usize, usize> {
        let n = q.len();
        let half = self.dt * T::lit(0.5);
        let mut g = vec![T::zero(); n];
        if !force(q, &mut g) {
            return Err(0);
        }
        for step in 0..steps {
            for i in 0..n {
                p[i] = p[i] - half * g[i];
                q[i] = q[i] + self.dt * self.inv_mass[i] * p[i];
            }
            if !force(q, &mut g) {
                return Err(step + 1);
            }
            for i in 0..n {
                p[i] = p[i] - half * g[i];
            }
            if !observe(step + 1, q, p) {
                return Err(step + 1);
            }
        }
        Ok(steps)
    }
}

/// Accumulates the drift statistics shared by both integrators.
struct Recorder<T> {
    dt: T,
    stride: usize,
    l0: T,
    h0: T,
    full0: T,
    record: DriftRecord<T>,
}

impl<T: Real> Recorder<T> {
    fn new(eps: T, schedule: &Schedule<T>, steps: usize, l0: T, h0: T, full0: T, state: PhaseState<T>) -> Self {
        Recorder {
            dt: schedule.dt,
            stride: (steps / schedule.samples).max(1),
            l0,
            h0,
            full0,
            record: DriftRecord {
                eps,
                times: vec![T::zero()],
                l_abs: vec![l0],
                h_vals: vec![h0],
                max_drift_l: T::zero(),
                max_drift_h: T::zero(),
                energy_error: T::zero(),
                steps: 0,
                escape: None,
                final_state: state,
            },
        }
    }

    fn observe(&mut self, step: usize, l: T, h: T, full: T, last: bool) {
        let r = &mut self.record;
        r.max_drift_l = r.max_drift_l.max((l - self.l0).abs());
        r.max_drift_h = r.max_drift_h.max((h - self.h0).abs());
        r.energy_error = r.energy_error.max((full - self.full0).abs());
        if step.is_multiple_of(self.stride) || last {
            r.times.push(self.dt * T::from_usize_lossy(step));
            r.l_abs.push(l);
            r.h_vals.push(h);
        }
    }

    fn finish(
        mut self,
        steps: std::result::Result<usize, usize>,
        state: PhaseState<T>,
        reason: EscapeReason,
    ) -> DriftRecord<T> {
        let r = &mut self.record;
        r.final_state = state;
        match steps {
            Ok(n) => r.steps = n,
            Err(n) => {
                r.steps = n;
                r.escape = Some(Escape { time: self.dt * T::from_usize_lossy(n), radius: norm(&state.x), reason });
            }
        }
        self.record
    }
}

fn shell_force<T: Real>(
    potential: &Potential<T>,
    pert: &Perturbation<T>,
    eps: T,
    shell: (T, T),
    x: &Vec3<T>,
    g: &mut [T],
    reason: &mut EscapeReason,
) -> bool {
    let r = norm(x);
    if !(r > shell.0 && r < shell.1) {
        *reason = EscapeReason::LeftShell;
        return false;
    }
    let (_, dv) = potential.value_and_slope(r);
    let f = dv / r;
    let Some((_, dp)) = pert.value_and_gradient(x) else {
        *reason = EscapeReason::Undefined;
        return false;
    };
    for a in 0..3 {
        g[a] = f * x[a] + eps * dp[a];
    }
    if g[..3].iter().all(|v| v.is_finite()) {
        true
    } else {
        *reason = EscapeReason::Undefined;
        false
    }
}

/// Integrates `H + ε P` from `state` over the schedule.
///
/// Leaving the shell, or reaching a point where `P` is undefined, ends the
/// run early with an escape entry rather than an error.
pub fn integrate_perturbed<T: Real>(
    potential: &Potential<T>,
    pert: &Perturbation<T>,
    eps: T,
    state: &PhaseState<T>,
    schedule: &Schedule<T>,
) -> Result<DriftRecord<T>> {
    integrate_signed(potential, pert, eps, state, schedule, T::one())
}

fn integrate_signed<T: Real>(
    potential: &Potential<T>,
    pert: &Perturbation<T>,
    eps: T,
    state: &PhaseState<T>,
    schedule: &Schedule<T>,
    direction: T,
) -> Result<DriftRecord<T>> {
    if !eps.is_finite() {
        return Err(Error::config("eps", "must be finite"));
    }
    let steps = schedule.steps();
    let full = |s: &PhaseState<T>| -> Option<T> {
        let (p, _) = pert.value_and_gradient(&s.x)?;
        Some(s.energy(potential) + eps * p)
    };
    let full0 = full(state).ok_or_else(|| Error::Domain("perturbation undefined at the initial state".into()))?;
    let mut rec =
        Recorder::new(eps, schedule, steps, norm(&state.angular_momentum()), state.energy(potential), full0, *state);
    let mut q = state.x.to_vec();
    let mut p = state.p.map(|v| v * direction).to_vec();
    let lf = Leapfrog { inv_mass: &[T::one(); 3], dt: schedule.dt };
    let mut reason = EscapeReason::LeftShell;
    let shell = schedule.shell;
    let result = lf.run(
        &mut q,
        &mut p,
        steps,
        |q, g| shell_force(potential, pert, eps, shell, &[q[0], q[1], q[2]], g, &mut reason),
        |step, q, p| {
            let s = PhaseState { x: [q[0], q[1], q[2]], p: [p[0], p[1], p[2]].map(|v| v * direction) };
            let l = norm(&s.angular_momentum());
            let h = s.energy(potential);
            let f = full(&s).unwrap_or(T::nan());
            rec.observe(step, l, h, f, step == steps);
            true
        },
    );
    let end = PhaseState { x: [q[0], q[1], q[2]], p: [p[0], p[1], p[2]].map(|v| v * direction) };
    Ok(rec.finish(result, end, reason))
}

/// Integrates forward over the schedule, then backward for the same number
/// of steps, and returns the largest coordinate error divided by
/// `max(|x₀|, |p₀|)`.
pub fn reversibility_error<T: Real>(
    potential: &Potential<T>,
    pert: &Perturbation<T>,
    eps: T,
    state: &PhaseState<T>,
    schedule: &Schedule<T>,
) -> Result<T> {
    let quiet = Schedule { samples: 1, ..*schedule };
    let forward = integrate_signed(potential, pert, eps, state, &quiet, T::one())?;
    if let Some(esc) = forward.escape {
        return Err(Error::Analysis(format!("escape at t = {} before reversal", esc.time)));
    }
    let back = integrate_signed(potential, pert, eps, &forward.final_state, &quiet, -T::one())?;
    if let Some(esc) = back.escape {
        return Err(Error::Analysis(format!("escape at t = {} on the way back", esc.time)));
    }
    let scale = norm(&state.x).max(norm(&state.p));
    Ok(back.final_state.distance(state) / scale)
}

#[derive(Debug, Clone, Serialize)]
#[serde(bound = "T: Real")]
pub struct ExcludedRun<T> {
    pub eps: T,
    pub note: String,
}

/// Drift against `ε` at a fixed horizon, with log-log slopes.
#[derive(Debug, Clone, Serialize)]
#[serde(bound = "T: Real")]
pub struct ScalingReport<T> {
    pub eps: Vec<T>,
    pub drift_l: Vec<T>,
    pub drift_h: Vec<T>,
    /// Least-squares slope of `ln max_drift_L` against `ln ε`.
    pub slope_l: Option<T>,
    pub slope_h: Option<T>,
    pub excluded: Vec<ExcludedRun<T>>,
    #[serde(skip)]
    pub records: Vec<DriftRecord<T>>,
}

fn log_slope<T: Real>(x: &[T], y: &[T]) -> Option<T> {
    let pts: Vec<(T, T)> =
        x.iter().zip(y).filter(|(a, b)| **a > T::zero() && **b > T::zero()).map(|(a, b)| (a.ln(), b.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let n = T::from_usize_lossy(pts.len());
    let mx = pts.iter().map(|p| p.0).sum::<T>() / n;
    let my = pts.iter().map(|p| p.1).sum::<T>() / n;
    let sxy = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<T>();
    let sxx = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum::<T>();
    (sxx > T::zero()).then(|| sxy / sxx)
}

/// Runs [`integrate_perturbed`] for every `ε` in parallel with the same
/// schedule. Runs that escape are excluded from the fit with a note.
pub fn eps_scaling_sweep<T: Real>(
    potential: &Potential<T>,
    pert: &Perturbation<T>,
    state: &PhaseState<T>,
    eps_list: &[T],
    schedule: &Schedule<T>,
) -> Result<ScalingReport<T>> {
    let records: Vec<DriftRecord<T>> = eps_list
        .par_iter()
        .map(|&eps| integrate_perturbed(potential, pert, eps, state, schedule))
        .collect::<Result<_>>()?;
    let mut report = ScalingReport {
        eps: vec![],
        drift_l: vec![],
        drift_h: vec![],
        slope_l: None,
        slope_h: None,
        excluded: vec![],
        records: vec![],
    };
    for r in &records {
        match r.escape {
            Some(esc) => report.excluded.push(ExcludedRun {
                eps: r.eps,
                note: format!("{:?} at t = {}, r = {}", esc.reason, esc.time, esc.radius),
            }),
            None => {
                report.eps.push(r.eps);
                report.drift_l.push(r.max_drift_l);
                report.drift_h.push(r.max_drift_h);
            }
        }
    }
    report.slope_l = log_slope(&report.eps, &report.drift_l);
    report.slope_h = log_slope(&report.eps, &report.drift_h);
    report.records = records;
    Ok(report)
}

/// `n` slow oscillators `|p̂|²/2 + ω²|x̂|²/2` coupled to the fast system
/// through `κ |x|² Σ x̂_i`.
#[derive(Debug, Clone, Copy, Serialize)]
#[serde(bound = "T: Real")]
pub struct SlowCoupling<T> {
    pub dim: usize,
    pub omega: T,
    pub strength: T,
}

impl<T: Real> SlowCoupling<T> {
    /// `(P, ∂P/∂x, ∂P/∂x̂)` without the slow kinetic part.
    fn potential(&self, x: &Vec3<T>, slow: &[T], grad_x: &mut Vec3<T>, grad_slow: &mut [T]) -> T {
        let r2 = dot(x, x);
        let sum: T = slow.iter().copied().sum();
        let w2 = self.omega * self.omega;
        let mut u = self.strength * r2 * sum;
        for (g, &s) in grad_slow.iter_mut().zip(slow) {
            u = u + T::lit(0.5) * w2 * s * s;
            *g = w2 * s + self.strength * r2;
        }
        let c = T::lit(2.0) * self.strength * sum;
        *grad_x = x.map(|v| c * v);
        u
    }
}

/// State of the fast-slow system: central coordinates and `dim` slow pairs.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "T: Real")]
pub struct FastSlowState<T> {
    pub fast: PhaseState<T>,
    pub slow_q: Vec<T>,
    pub slow_p: Vec<T>,
}

/// Integrates `H/ε + P(x, x̂, p̂)` with the fast momentum conjugate to `x`.
/// `|L|` and `H` in the record refer to the fast system alone; the energy
/// error is that of the full Hamiltonian.
pub fn integrate_fast_slow<T: Real>(
    potential: &Potential<T>,
    coupling: &SlowCoupling<T>,
    eps: T,
    state: &FastSlowState<T>,
    schedule: &Schedule<T>,
) -> Result<DriftRecord<T>> {
    if !(eps > T::zero()) {
        return Err(Error::config("eps", "must be positive"));
    }
    let n = coupling.dim;
    if state.slow_q.len() != n || state.slow_p.len() != n {
        return Err(Error::config("slow", format!("expected {n} slow coordinates and momenta")));
    }
    let inv_eps = T::one() / eps;
    let full = |x: &Vec3<T>, p: &Vec3<T>, sq: &[T], sp: &[T]| {
        let mut gx = [T::zero(); 3];
        let mut gs = vec![T::zero(); n];
        let fast = PhaseState { x: *x, p: *p }.energy(potential);
        let slow_kin = sp.iter().map(|v| *v * *v).sum::<T>() * T::lit(0.5);
        (fast, fast * inv_eps + slow_kin + coupling.potential(x, sq, &mut gx, &mut gs))
    };
    let (h0, full0) = full(&state.fast.x, &state.fast.p, &state.slow_q, &state.slow_p);
    let steps = schedule.steps();
    let mut rec = Recorder::new(eps, schedule, steps, norm(&state.fast.angular_momentum()), h0, full0, state.fast);
    let mut q: Vec<T> = state.fast.x.iter().chain(&state.slow_q).copied().collect();
    let mut p: Vec<T> = state.fast.p.iter().chain(&state.slow_p).copied().collect();
    let inv_mass: Vec<T> = (0..3 + n).map(|i| if i < 3 { inv_eps } else { T::one() }).collect();
    let lf = Leapfrog { inv_mass: &inv_mass, dt: schedule.dt };
    let shell = schedule.shell;
    let mut reason = EscapeReason::LeftShell;
    let mut gs = vec![T::zero(); n];
    let result = lf.run(
        &mut q,
        &mut p,
        steps,
        |q, g| {
            let x = [q[0], q[1], q[2]];
            let r = norm(&x);
            if !(r > shell.0 && r < shell.1) {
                reason = EscapeReason::LeftShell;
                return false;
            }
            let f = potential.dv(r) / r * inv_eps;
            let mut gx = [T::zero(); 3];
            coupling.potential(&x, &q[3..], &mut gx, &mut gs);
            for a in 0..3 {
                g[a] = f * x[a] + gx[a];
            }
            g[3..].copy_from_slice(&gs);
            g.iter().all(|v| v.is_finite())
        },
        |step, q, p| {
            let x = [q[0], q[1], q[2]];
            let pf = [p[0], p[1], p[2]];
            let (h, f) = full(&x, &pf, &q[3..], &p[3..]);
            rec.observe(step, norm(&cross(&x, &pf)), h, f, step == steps);
            true
        },
    );
    let end = PhaseState { x: [q[0], q[1], q[2]], p: [p[0], p[1], p[2]] };
    if result.is_err() && reason == EscapeReason::LeftShell && q.iter().chain(&p).any(|v| !v.is_finite()) {
        reason = EscapeReason::Undefined;
    }
    Ok(rec.finish(result, end, reason))
}
