//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

use std::time::{Duration, Instant};

use centralforce::actions::ActionChart;
use centralforce::birkhoff::{self, horner, numeric_expansion_check, CircularOrbitData};
use centralforce::dynamics::{
    eps_scaling_sweep, initial_state, integrate_perturbed, reversibility_error, Perturbation, PhaseState, Schedule,
};
use centralforce::effective::{critical_level_slope, decompose_momentum_intervals, find_critical_points, track_branch};
use centralforce::numerics::diff::central4;
use centralforce::quasiconvexity::{max_bottom_divergence, quasiconvexity_map};
use centralforce::{Potential64 as Potential, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const MOMENTUM_CAP: f64 = 10.0;
const INTERVAL_SAMPLES: usize = 256;

// criterion 1
const DEGENERATE_D: f64 = 1e-6;
// criterion 2
const EXPANSION_TOL: [f64; 3] = [1e-3, 1e-2, 5e-2];
// criterion 3
const EXPONENT_TOL: f64 = 1e-9;
// criterion 4
const LAMBDA_TOL: f64 = 1e-2;
const LIMIT_TOL: f64 = 1e-6;
// criterion 5
const RATIO_TOL: f64 = 0.1;
// criterion 6
const SLOPE_TOL: f64 = 1e-6;
// criterion 7
const KEPLER_G_TOL: f64 = 1e-8;
const ROUND_TRIP_TOL: f64 = 1e-9;
// criterion 8
const MIN_DRIFT_SLOPE: f64 = 0.25;
const REVERSIBILITY_TOL: f64 = 1e-8;
const ROUNDOFF_FACTOR: f64 = 4.0;
// criterion 9
const FUZZ_TOL: f64 = 1e-12;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome { passed, detail: detail.into() })
}

fn charts(p: &Potential) -> Result<Vec<ActionChart<f64>>> {
    let intervals = decompose_momentum_intervals(p, INTERVAL_SAMPLES, MOMENTUM_CAP)?;
    Ok(ActionChart::enumerate(p, &intervals))
}

fn first_minimum(p: &Potential, i2: f64) -> Result<ActionChart<f64>> {
    let intervals = decompose_momentum_intervals(p, INTERVAL_SAMPLES, MOMENTUM_CAP)?;
    ActionChart::first_minimum(p, &intervals, i2)
}

fn lennard_jones_gauss_max_chart() -> Result<ActionChart<f64>> {
    let p = Potential::lennard_jones_gauss(1.5, 1.5, 0.02)?;
    let intervals = decompose_momentum_intervals(&p, INTERVAL_SAMPLES, MOMENTUM_CAP)?;
    ActionChart::new(&p, &intervals[0], 1)
}

fn degeneracy() -> Result<Outcome> {
    let mut worst = Vec::new();
    let mut ok = true;
    for p in [Potential::kepler(1.0)?, Potential::harmonic(1.0)?.with_range(0.01, 10.0)?] {
        let start = Instant::now();
        let chart = first_minimum(&p, 1.0)?;
        let iv = chart.interval();
        let (lo, hi) = (iv.lo.max(0.0), iv.hi);
        let shrink = 0.05 * (hi - lo);
        let map = quasiconvexity_map(&chart, (lo + shrink, hi - shrink), 20, 20)?;
        let max = map.samples.iter().flatten().map(|s| s.d_normalized.abs()).fold(0.0, f64::max);
        let elapsed = start.elapsed();
        ok &= map.failed_cells == 0 && max < DEGENERATE_D && elapsed < Duration::from_secs(60);
        worst.push(format!("{} max |D| {max:.2e} in {:.1?}", p.name(), elapsed));
    }
    outcome(ok, worst.join(", "))
}

fn expansion() -> Result<Outcome> {
    let mut ok = true;
    let mut worst = [0.0f64; 3];
    for p in [Potential::kepler(1.0)?, Potential::harmonic(1.0)?, Potential::lennard_jones(1.0, 1.0)?] {
        for i2 in [0.5, 1.0, 1.5] {
            let chart = first_minimum(&p, i2)?;
            let r = numeric_expansion_check(&chart, i2)?;
            for (k, c) in [&r.nu0, &r.nu1, &r.nu2].into_iter().enumerate() {
                worst[k] = worst[k].max(c.relative_error);
                ok &= c.relative_error <= EXPANSION_TOL[k];
            }
        }
    }
    outcome(ok, format!("worst relative errors ν₀ {:.1e}, ν₁ {:.1e}, ν₂ {:.1e}", worst[0], worst[1], worst[2]))
}

fn bertrand_exponents() -> Result<Outcome> {
    let scan = birkhoff::find_degenerate_exponents((-3.5, 2.0), 1e-3)?;
    let found: Vec<f64> = scan.roots.iter().map(|r| r.exponent).collect();
    let expected = [-3.0, -2.0, 1.0];
    let matches =
        found.len() == expected.len() && found.iter().zip(expected).all(|(c, e)| (c - e).abs() <= EXPONENT_TOL);
    let minus_three_excluded = scan
        .roots
        .iter()
        .find(|r| (r.exponent + 3.0).abs() <= EXPONENT_TOL)
        .is_some_and(|r| r.excluded_by.iter().any(|h| h == "H2"));
    let admissible = scan.admissible();
    outcome(
        matches && minus_three_excluded && admissible.len() == 2,
        format!("roots {found:?}, admissible {admissible:?}"),
    )
}

fn log_asymptotics() -> Result<Outcome> {
    let chart = lennard_jones_gauss_max_chart()?;
    let ebar = [1e-3, 5e-4, 2e-4, 1e-4, 5e-5, 2e-5, 1e-5, 5e-6, 2e-6, 1e-6];
    let fit = chart.fit_log_asymptotics(0.5, &ebar)?;
    let limit_err = ((fit.i1_limit - fit.i1_separatrix) / fit.i1_separatrix).abs();
    outcome(
        fit.lambda_relative_error() <= LAMBDA_TOL && fit.i1_limit.is_finite() && limit_err <= LIMIT_TOL,
        format!(
            "λ fit {:.6} vs curvature {:.6}, I₁(0) = {:.8} (separatrix {:.8})",
            fit.lambda_fit, fit.lambda_curvature, fit.i1_limit, fit.i1_separatrix
        ),
    )
}

fn divergence() -> Result<Outcome> {
    let chart = lennard_jones_gauss_max_chart()?;
    let ebar: Vec<f64> = [1e-3, 1e-4, 1e-5, 1e-6].iter().flat_map(|&x| [x, x / 2.0]).collect();
    let report = max_bottom_divergence(&chart, 0.5, &ebar)?;
    let ratios = report.halving_ratios();
    let errors: Vec<f64> = ratios.iter().map(|(obs, pred)| (obs / pred - 1.0).abs()).collect();
    let tail = &errors[errors.len() - 2..];
    outcome(
        report.monotone && !report.inconclusive && tail.iter().all(|e| *e <= RATIO_TOL),
        format!(
            "monotone {}, ratio errors {:?}",
            report.monotone,
            errors.iter().map(|e| format!("{e:.3}")).collect::<Vec<_>>()
        ),
    )
}

fn random_potential(rng: &mut ChaCha8Rng) -> Result<Potential> {
    match rng.gen_range(0..5) {
        0 => Potential::kepler(rng.gen_range(0.5..2.0)),
        1 => Potential::harmonic(rng.gen_range(0.5..2.0)),
        2 => Potential::power_law(rng.gen_range(0.5..2.0), rng.gen_range(-1.8..3.0)),
        3 => Potential::lennard_jones(rng.gen_range(0.5..2.0), rng.gen_range(0.8..1.2)),
        _ => Potential::lennard_jones_gauss(rng.gen_range(1.2..1.8), 1.5, 0.02),
    }
}

fn level_slope() -> Result<Outcome> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let p = random_potential(&mut rng)?;
        let intervals = decompose_momentum_intervals(&p, INTERVAL_SAMPLES, MOMENTUM_CAP)?;
        let iv = &intervals[rng.gen_range(0..intervals.len())];
        let lo = iv.lo.max(1e-2 * iv.hi);
        let p_theta = lo + rng.gen_range(0.1..0.9) * (iv.hi - lo);
        let ell = p_theta * p_theta;
        let cps = find_critical_points(&p, ell)?;
        let cp = &cps[rng.gen_range(0..cps.len())];
        let h = 1e-4 * ell;
        let level = |x: f64| track_branch(&p, cp, ell + x).map(|c| c.level);
        let fd = central4(level(-2.0 * h)?, level(-h)?, level(h)?, level(2.0 * h)?, h);
        let exact = critical_level_slope(cp);
        worst = worst.max(((fd - exact) / exact).abs());
    }
    let elapsed = start.elapsed();
    outcome(
        worst <= SLOPE_TOL && elapsed < Duration::from_secs(30),
        format!("20 cases, worst relative error {worst:.1e} in {elapsed:.1?}"),
    )
}

fn round_trip() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let kepler = Potential::kepler(1.0)?;
    let mut worst_g = 0.0f64;
    for _ in 0..50 {
        let i2 = rng.gen_range(0.5..5.0);
        let chart = first_minimum(&kepler, i2)?;
        let lv = chart.levels(i2)?;
        let e = lv.denormalize(rng.gen_range(0.01..0.95));
        let exact = 1.0 / (-2.0 * e).sqrt() - i2;
        let g = chart.action_g(e, i2)?;
        worst_g = worst_g.max((g - exact).abs() / (exact + i2));
    }
    let mut worst_e = 0.0f64;
    let mut n_charts = 0;
    let potentials = [
        Potential::kepler(1.0)?,
        Potential::harmonic(1.0)?,
        Potential::lennard_jones(1.0, 1.0)?,
        Potential::lennard_jones_gauss(1.5, 1.5, 0.02)?,
    ];
    for p in &potentials {
        for chart in charts(p)? {
            n_charts += 1;
            let iv = chart.interval();
            for f in [0.25, 0.5, 0.75] {
                let i2 = iv.lo + f * (iv.hi - iv.lo);
                let lv = chart.levels(i2)?;
                let span = lv.top - lv.bottom.level;
                for u in [0.1, 0.5, 0.9] {
                    let e = lv.denormalize(u);
                    let i1 = chart.action_g(e, i2)?;
                    let back = chart.invert_h(i1, i2)?;
                    worst_e = worst_e.max((back - e).abs() / span);
                }
            }
        }
    }
    outcome(
        worst_g <= KEPLER_G_TOL && worst_e <= ROUND_TRIP_TOL,
        format!("Kepler G worst {worst_g:.1e}; invert_h worst {worst_e:.1e} over {n_charts} charts"),
    )
}

/// Round-off accumulation bound `√N ε_mach` relative to the initial value.
fn roundoff(steps: usize) -> f64 {
    ROUNDOFF_FACTOR * (steps as f64).sqrt() * f64::EPSILON
}

fn no_secular_growth(h: &[f64]) -> bool {
    let h0 = h[0];
    let half = h.len() / 2;
    let dev = |s: &[f64]| s.iter().map(|v| (v - h0).abs()).fold(0.0, f64::max);
    dev(&h[half..]) <= 2.0 * dev(&h[..half]) + roundoff(h.len()) * h0.abs()
}

fn nekhoroshev() -> Result<Outcome> {
    let start = Instant::now();
    let p = Potential::lennard_jones(1.0, 1.0)?;
    let i2 = 1.0;
    let chart = first_minimum(&p, i2)?;
    let lv = chart.levels(i2)?;
    let omega0 = lv.bottom.curvature.sqrt();
    let (a_lo, a_hi) = chart.action_range(i2)?;
    let state: PhaseState<f64> = initial_state(&chart, a_lo + 0.3 * (a_hi - a_lo), i2, 0.3)?;
    let shell = (0.5, 5.0);
    let schedule =
        |horizon: f64| Schedule::resolving(&p, &state, horizon / omega0, 0.05).map(|s| s.with_shell(shell.0, shell.1));
    let l0 = state.angular_momentum();
    let l0 = (l0[0] * l0[0] + l0[1] * l0[1] + l0[2] * l0[2]).sqrt();

    let short = schedule(1e4)?;
    let free = integrate_perturbed(&p, &Perturbation::AnisotropicQuadratic, 0.0, &state, &short)?;
    let a = free.escape.is_none() && free.max_drift_l <= roundoff(free.steps) * l0 && no_secular_growth(&free.h_vals);

    let central = Perturbation::Central(Potential::kepler(1.0)?);
    let mut b = true;
    let mut central_drift = 0.0f64;
    for eps in [1e-2, 1e-1] {
        let rec = integrate_perturbed(&p, &central, eps, &state, &short)?;
        central_drift = central_drift.max(rec.max_drift_l / l0);
        b &= rec.escape.is_none() && rec.max_drift_l <= roundoff(rec.steps) * l0;
    }

    let sweep =
        eps_scaling_sweep(&p, &Perturbation::AnisotropicQuadratic, &state, &[1e-2, 1e-3, 1e-4], &schedule(1e6)?)?;
    let slope = sweep.slope_l.unwrap_or(f64::NAN);
    let c = sweep.excluded.is_empty() && slope >= MIN_DRIFT_SLOPE;

    let back = schedule(1e3)?;
    let rev = reversibility_error(&p, &Perturbation::AnisotropicQuadratic, 1e-2, &state, &back)?;
    let d = rev < REVERSIBILITY_TOL;

    let elapsed = start.elapsed();
    outcome(
        a && b && c && d && elapsed < Duration::from_secs(900),
        format!(
            "(a) {} |ΔL|/L {:.1e}, (b) {} |ΔL|/L {central_drift:.1e}, (c) {} slope {slope:.3}, (d) {} return {rev:.1e}; {elapsed:.1?}",
            verdict(a),
            free.max_drift_l / l0,
            verdict(b),
            verdict(c),
            verdict(d)
        ),
    )
}

fn fuzz() -> Result<Outcome> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let r0: f64 = rng.gen_range(0.1..=10.0);
        // g in (-3, 2]
        let mut g = [2.0 - 5.0 * rng.gen::<f64>(), 0.0, 0.0, 0.0, 0.0];
        for d in &mut g[1..] {
            *d = rng.gen_range(-10.0..=10.0);
        }
        let o = CircularOrbitData::new(r0, rng.gen_range(0.1..10.0), g)?;
        for (a, b) in [(birkhoff::nu1(&o), horner::nu1(&o)), (birkhoff::nu2(&o), horner::nu2(&o))] {
            worst = worst.max(((a - b) / a).abs());
        }
    }
    let elapsed = start.elapsed();
    outcome(
        worst <= FUZZ_TOL && elapsed < Duration::from_secs(10),
        format!("100 points, worst relative difference {worst:.1e}"),
    )
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

type Criterion = (&'static str, fn() -> Result<Outcome>);

fn main() {
    let criteria: [Criterion; 9] = [
        ("Kepler/harmonic degeneracy", degeneracy),
        ("circular-orbit expansion", expansion),
        ("Bertrand exponent set", bertrand_exponents),
        ("log asymptotics at maxima", log_asymptotics),
        ("determinant divergence", divergence),
        ("critical-level slope", level_slope),
        ("round-trip and oracle actions", round_trip),
        ("Nekhoroshev property suite", nekhoroshev),
        ("dual-transcription fuzz", fuzz),
    ];
    let mut failures = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (ok, detail) = match run() {
            Ok(o) => (o.passed, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        failures += usize::from(!ok);
        println!("criterion {} {name}: {} ({detail}) [{:.1?}]", k + 1, verdict(ok), start.elapsed());
    }
    if failures > 0 {
        println!("{failures} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
    println!("all {} criteria passed", criteria.len());
}
