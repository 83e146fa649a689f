use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use centralforce::actions::{write_asymptotics_csv, write_points_csv, ActionPoint};
use centralforce::birkhoff::{find_degenerate_exponents, numeric_expansion_check, rhs_g1_g2};
use centralforce::dynamics::{
    eps_scaling_sweep, initial_state, integrate_fast_slow, FastSlowState, PhaseState, Schedule,
};
use centralforce::effective::{branch_table, momentum_range, write_branch_csv, MomentumInterval, PointKind};
use centralforce::numerics::{interior_grid, log_grid};
use centralforce::quasiconvexity::{bertrand_nonconstancy, max_bottom_divergence, quasiconvexity_map, write_map_csv};

use crate::config::{build_coupling, build_perturbation, RunConfig, Setup};
use crate::output::*;
use crate::CliError;

#[derive(Serialize)]
struct PotentialSummary<'a> {
    name: &'a str,
    kind: &'a str,
    params: &'a std::collections::BTreeMap<String, f64>,
    range: (f64, f64),
}

fn potential_summary(setup: &Setup) -> PotentialSummary<'_> {
    let p = &setup.potential;
    PotentialSummary { name: p.name(), kind: p.kind().as_str(), params: p.params(), range: p.range() }
}

/// Three momenta at the quartiles of the chart's interval.
fn default_momenta(iv: &MomentumInterval<f64>) -> Vec<f64> {
    (1..=3).map(|k| iv.lo + (iv.hi - iv.lo) * k as f64 / 4.0).collect()
}

fn default_i2_range(iv: &MomentumInterval<f64>) -> (f64, f64) {
    let w = iv.hi - iv.lo;
    (iv.lo + 0.05 * w, iv.hi - 0.05 * w)
}

pub fn profile(cfg: &RunConfig, out: &mut OutDir) -> Result<(), CliError> {
    let potential = crate::config::build_potential(&cfg.potential)?;
    let (lo, hi) = potential.range();
    let hypotheses = potential.check_hypotheses(&log_grid(lo, hi, 4096));
    if !hypotheses.all_hold() {
        out.json("hypotheses.json", &hypotheses)?;
        return Err(CliError::Analysis(format!(
            "{} violates the admissibility hypotheses (H1 {}, H2 {}, H3 {}); see hypotheses.json",
            potential.name(),
            hypotheses.h1_holds,
            hypotheses.h2_holds,
            hypotheses.h3_holds
        )));
    }
    let setup = Setup::new(cfg)?;
    let range = momentum_range(&setup.potential, cfg.momentum.cap)?;
    let (a, b) = (setup.intervals[0].lo, setup.intervals[setup.intervals.len() - 1].hi);
    let ells: Vec<f64> = interior_grid(a, b, cfg.profile.samples).iter().map(|l| l * l).collect();
    let rows = branch_table(&setup.potential, &ells)?;
    out.csv(
        "branches.csv",
        &[
            col("ell", ELL, "squared angular momentum"),
            col("p_theta", ACTION, "angular momentum"),
            col("branch", NONE, "critical point index by increasing radius"),
            col("r0", LENGTH, "circular orbit radius"),
            col("kind", NONE, "minimum or maximum of the effective potential"),
            col("level", ENERGY, "effective potential at r0"),
            col("curvature", CURVATURE, "second derivative of the effective potential at r0"),
            col("degenerate", NONE, "scaled curvature below the nondegeneracy tolerance"),
        ],
        |w| write_branch_csv(&rows, w),
    )?;
    #[derive(Serialize)]
    struct Profile<'a> {
        potential: PotentialSummary<'a>,
        hypotheses: &'a centralforce::potentials::HypothesisReport<f64>,
        momentum_range: &'a centralforce::effective::MomentumRange<f64>,
        intervals: &'a [MomentumInterval<f64>],
    }
    out.json(
        "intervals.json",
        &Profile {
            potential: potential_summary(&setup),
            hypotheses: &hypotheses,
            momentum_range: &range,
            intervals: &setup.intervals,
        },
    )
}

pub fn actions(cfg: &RunConfig, out: &mut OutDir) -> Result<(), CliError> {
    let setup = Setup::new(cfg)?;
    let spec = &cfg.actions;
    let chart = setup.chart(cfg.chart, spec.asymptotics.as_ref().map(|a| a.i2))?;
    let i2_range = spec.i2_range.map(|[a, b]| (a, b)).unwrap_or_else(|| default_i2_range(chart.interval()));
    let results = chart.grid(i2_range, spec.n_e, spec.n_i2);
    let failed = results.iter().filter(|r| r.is_err()).count();
    let points: Vec<ActionPoint<f64>> = results.into_iter().flatten().collect();
    out.csv(
        "actions.csv",
        &[
            col("i1", ACTION, "radial action"),
            col("i2", ACTION, "angular action |L|"),
            col("e", ENERGY, "energy"),
            col("omega1", FREQUENCY, "radial frequency"),
            col("omega2", FREQUENCY, "angular frequency"),
            col("nu", NONE, "omega1 / omega2"),
            col("degraded", NONE, "quadrature did not reach its tolerance"),
        ],
        |w| write_points_csv(&points, w),
    )?;
    let asymptotics = match &spec.asymptotics {
        Some(a) => {
            let fit = chart.fit_log_asymptotics(a.i2, &a.ebar)?;
            out.csv(
                "asymptotics.csv",
                &[col("ebar", ENERGY, "energy above the bottom maximum"), col("i1", ACTION, "radial action")],
                |w| write_asymptotics_csv(&fit, w),
            )?;
            Some(fit)
        }
        None => None,
    };
    #[derive(Serialize)]
    struct Summary<'a> {
        potential: PotentialSummary<'a>,
        interval: (f64, f64),
        branch: usize,
        bottom: &'a str,
        i2_range: (f64, f64),
        points: usize,
        failed_points: usize,
        asymptotics: Option<centralforce::actions::LogAsymptotics<f64>>,
    }
    out.json(
        "actions.json",
        &Summary {
            potential: potential_summary(&setup),
            interval: (chart.interval().lo, chart.interval().hi),
            branch: chart.branch(),
            bottom: chart.bottom_kind().as_str(),
            i2_range,
            points: points.len(),
            failed_points: failed,
            asymptotics,
        },
    )
}

pub fn arnold(cfg: &RunConfig, out: &mut OutDir) -> Result<(), CliError> {
    let setup = Setup::new(cfg)?;
    let spec = &cfg.arnold;
    let chart = setup.chart(cfg.chart, spec.divergence.as_ref().map(|d| d.i2))?;
    let i2_range = spec.i2_range.map(|[a, b]| (a, b)).unwrap_or_else(|| default_i2_range(chart.interval()));
    let map = quasiconvexity_map(&chart, i2_range, spec.n1, spec.n2)?;
    out.csv(
        "arnold.csv",
        &[
            col("i1", ACTION, "radial action"),
            col("i2", ACTION, "angular action"),
            col("e", ENERGY, "energy"),
            col("d", DETERMINANT, "Arnold determinant"),
            col("d_normalized", NONE, "D (I1 + I2) / |omega|^3"),
            col("quasiconvex", NONE, "|d_normalized| above tolerance"),
            col("burgers_residual", NONE, "nu_I1 - nu nu_I2 scaled, where defined"),
            col("degraded", NONE, "a difference stencil fell back or quadrature missed its tolerance"),
        ],
        |w| write_map_csv(&map, w),
    )?;
    let divergence = match &spec.divergence {
        Some(d) => Some(max_bottom_divergence(&chart, d.i2, &d.ebar)?),
        None => None,
    };
    #[derive(Serialize)]
    struct Summary<'a> {
        potential: PotentialSummary<'a>,
        interval: (f64, f64),
        branch: usize,
        i2_range: (f64, f64),
        n1: usize,
        n2: usize,
        zero_set: &'a [(f64, f64)],
        near_zero_fraction: f64,
        failed_cells: usize,
        degraded_cells: usize,
        divergence: Option<centralforce::quasiconvexity::DivergenceReport<f64>>,
        halving_ratios: Option<Vec<(f64, f64)>>,
    }
    out.json(
        "arnold.json",
        &Summary {
            potential: potential_summary(&setup),
            interval: (chart.interval().lo, chart.interval().hi),
            branch: chart.branch(),
            i2_range,
            n1: map.n1,
            n2: map.n2,
            zero_set: &map.zero_set,
            near_zero_fraction: map.near_zero_fraction,
            failed_cells: map.failed_cells,
            degraded_cells: map.samples.iter().flatten().filter(|s| s.degraded).count(),
            halving_ratios: divergence.as_ref().map(|d| d.halving_ratios()),
            divergence,
        },
    )
}

pub fn birkhoff(cfg: &RunConfig, out: &mut OutDir) -> Result<(), CliError> {
    let setup = Setup::new(cfg)?;
    let spec = &cfg.birkhoff;
    let chart = setup.chart(cfg.chart, spec.i2.first().copied())?;
    let momenta = if spec.i2.is_empty() { default_momenta(chart.interval()) } else { spec.i2.clone() };
    let checks = momenta.iter().map(|&i2| numeric_expansion_check(&chart, i2)).collect::<Result<Vec<_>, _>>()?;
    let radii: Vec<f64> = if spec.r0.is_empty() { checks.iter().map(|c| c.r0).collect() } else { spec.r0.clone() };
    let coefficients = radii.iter().map(|&r| rhs_g1_g2(&setup.potential, r)).collect::<Result<Vec<_>, _>>()?;
    let scan = match &spec.scan {
        Some(s) => Some(find_degenerate_exponents((s.interval[0], s.interval[1]), s.step)?),
        None => None,
    };
    #[derive(Serialize)]
    struct Summary<'a> {
        potential: PotentialSummary<'a>,
        coefficients: Vec<centralforce::birkhoff::RhsReport<f64>>,
        expansion_checks: Vec<centralforce::birkhoff::ExpansionReport<f64>>,
        all_checks_passed: bool,
        exponent_scan: Option<centralforce::birkhoff::ExponentScan<f64>>,
        admissible_exponents: Option<Vec<f64>>,
    }
    out.json(
        "birkhoff.json",
        &Summary {
            potential: potential_summary(&setup),
            coefficients,
            all_checks_passed: checks.iter().all(|c| c.passed()),
            expansion_checks: checks,
            admissible_exponents: scan.as_ref().map(|s| s.admissible()),
            exponent_scan: scan,
        },
    )
}

pub fn bertrand(cfg: &RunConfig, out: &mut OutDir) -> Result<(), CliError> {
    let setup = Setup::new(cfg)?;
    let spec = &cfg.bertrand;
    let chart = setup.chart(cfg.chart, spec.i2.first().copied())?;
    if chart.bottom_kind() != PointKind::Minimum {
        return Err(CliError::Analysis("the Bertrand test needs a chart around a minimum".into()));
    }
    let momenta = if spec.i2.is_empty() { default_momenta(chart.interval()) } else { spec.i2.clone() };
    let verdicts =
        momenta.iter().map(|&i2| bertrand_nonconstancy(&chart, i2, spec.samples)).collect::<Result<Vec<_>, _>>()?;
    let degenerate = verdicts.iter().all(|v| v.degenerate);
    #[derive(Serialize)]
    struct Summary<'a> {
        potential: PotentialSummary<'a>,
        verdict: &'static str,
        checks: Vec<centralforce::quasiconvexity::BertrandVerdict<f64>>,
    }
    out.json(
        "bertrand.json",
        &Summary {
            potential: potential_summary(&setup),
            verdict: if degenerate { "degenerate" } else { "non-degenerate" },
            checks: verdicts,
        },
    )
}

#[derive(Serialize)]
struct RunSummary {
    potential: String,
    perturbation: &'static str,
    eps: f64,
    seed: u64,
    state: usize,
    max_drift_l: f64,
    max_drift_h: f64,
    energy_error: f64,
    steps: usize,
    escape: Option<centralforce::dynamics::Escape<f64>>,
}

pub fn nekhoroshev(cfg: &RunConfig, out: &mut OutDir, seed: u64) -> Result<(), CliError> {
    let setup = Setup::new(cfg)?;
    let spec = &cfg.nekhoroshev;
    let chart = setup.chart(cfg.chart, spec.i2)?;
    let i2 = spec.i2.unwrap_or_else(|| chart.interval().midpoint());
    let lv = chart.levels(i2)?;
    let omega0 = lv.bottom.curvature.abs().sqrt();
    let (a_lo, a_hi) = chart.action_range(i2)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut choices = vec![(spec.i1_fraction, spec.inclination)];
    for _ in 0..spec.random_states {
        choices.push((rng.gen_range(0.1..0.6), rng.gen_range(0.0..std::f64::consts::FRAC_PI_2)));
    }
    let states: Vec<PhaseState<f64>> = choices
        .iter()
        .map(|&(f, inc)| initial_state(&chart, a_lo + f * (a_hi - a_lo), i2, inc))
        .collect::<Result<_, _>>()?;
    let pert = build_perturbation(&spec.perturbation)?;
    let (shell_lo, shell_hi) = match spec.shell {
        Some([a, b]) => (a, b),
        None => {
            let (lo, hi) = setup.potential.range();
            (lo, hi)
        }
    };
    let mut runs = Vec::new();
    let mut sweeps = Vec::new();
    for (k, state) in states.iter().enumerate() {
        let schedule = Schedule::resolving(&setup.potential, state, spec.horizon / omega0, spec.courant)?
            .with_samples(spec.samples)
            .with_shell(shell_lo, shell_hi);
        let report = eps_scaling_sweep(&setup.potential, &pert, state, &spec.eps, &schedule)?;
        for (j, rec) in report.records.iter().enumerate() {
            out.csv(
                &format!("trajectory_s{k}_e{j}.csv"),
                &[col("t", TIME, "time"), col("l_abs", ACTION, "|L|"), col("h", ENERGY, "unperturbed energy")],
                |w| rec.write_csv(w),
            )?;
            runs.push(RunSummary {
                potential: setup.potential.name().to_string(),
                perturbation: pert.kind().as_str(),
                eps: rec.eps,
                seed,
                state: k,
                max_drift_l: rec.max_drift_l,
                max_drift_h: rec.max_drift_h,
                energy_error: rec.energy_error,
                steps: rec.steps,
                escape: rec.escape,
            });
        }
        sweeps.push((state, schedule, report));
    }
    #[derive(Serialize)]
    struct Sweep<'a> {
        state: &'a PhaseState<f64>,
        dt: f64,
        t_end: f64,
        slope_l: Option<f64>,
        slope_h: Option<f64>,
        excluded: &'a [centralforce::dynamics::ExcludedRun<f64>],
    }
    let fast_slow = match &spec.fast_slow {
        Some(fs) => {
            let coupling = build_coupling(fs);
            let state = FastSlowState { fast: states[0], slow_q: vec![0.5; fs.dim], slow_p: vec![0.0; fs.dim] };
            let omega = centralforce::dynamics::fastest_frequency(&setup.potential, &states[0])?;
            let mut rows = Vec::new();
            for &eps in &fs.eps {
                let schedule = Schedule::new(fs.t_end, fs.courant * eps / omega)?
                    .with_samples(spec.samples)
                    .with_shell(shell_lo, shell_hi);
                let rec = integrate_fast_slow(&setup.potential, &coupling, eps, &state, &schedule)?;
                rows.push(RunSummary {
                    potential: setup.potential.name().to_string(),
                    perturbation: "slow_oscillator",
                    eps,
                    seed,
                    state: 0,
                    max_drift_l: rec.max_drift_l,
                    max_drift_h: rec.max_drift_h,
                    energy_error: rec.energy_error,
                    steps: rec.steps,
                    escape: rec.escape,
                });
            }
            Some(rows)
        }
        None => None,
    };
    #[derive(Serialize)]
    struct Summary<'a> {
        potential: PotentialSummary<'a>,
        perturbation: &'static str,
        seed: u64,
        i2: f64,
        omega0: f64,
        sweeps: Vec<Sweep<'a>>,
        runs: Vec<RunSummary>,
        fast_slow: Option<Vec<RunSummary>>,
    }
    let summary = Summary {
        potential: potential_summary(&setup),
        perturbation: pert.kind().as_str(),
        seed,
        i2,
        omega0,
        sweeps: sweeps
            .iter()
            .map(|(state, schedule, r)| Sweep {
                state,
                dt: schedule.dt,
                t_end: schedule.t_end,
                slope_l: r.slope_l,
                slope_h: r.slope_h,
                excluded: &r.excluded,
            })
            .collect(),
        runs,
        fast_slow,
    };
    out.json("nekhoroshev.json", &summary)
}
