use centralforce::actions::ActionChart;
use centralforce::birkhoff::{nu0, CircularOrbitData};
use centralforce::effective::{decompose_momentum_intervals, PointKind};
use centralforce::potentials::Potential;
use centralforce::Error;
use rayon::prelude::*;

fn chart(p: &Potential<f64>, i2: f64) -> ActionChart<f64> {
    let ivs = decompose_momentum_intervals(p, 256, 10.0).unwrap();
    ActionChart::first_minimum(p, &ivs, i2).unwrap()
}

fn all_charts(p: &Potential<f64>) -> Vec<ActionChart<f64>> {
    let ivs = decompose_momentum_intervals(p, 256, 10.0).unwrap();
    ActionChart::enumerate(p, &ivs)
}

#[test]
fn kepler_turning_points() {
    let c = chart(&Potential::kepler(1.0).unwrap(), 1.0);
    // u = 1/r solves u²/2 - u - E = 0
    for e in [-0.375, -0.25, -0.1] {
        let d = (1.0f64 + 2.0 * e).sqrt();
        let (r_min, r_max) = c.turning_points(e, 1.0).unwrap();
        assert!((r_min - 1.0 / (1.0 + d)).abs() < 1e-12);
        assert!((r_max - 1.0 / (1.0 - d)).abs() < 1e-12);
    }
    let bottom = c.levels(1.0).unwrap().bottom.level;
    let (a, b) = c.turning_points(bottom + 1e-10, 1.0).unwrap();
    assert!(b - a < 1e-4 && a <= 1.0 && b >= 1.0);
}

#[test]
fn harmonic_turning_points() {
    let c = chart(&Potential::harmonic(1.0).unwrap(), 1.0);
    // u = r² solves u² - E u + I₂²/2 = 0
    for (e, i2) in [(1.5f64, 1.0f64), (3.0, 1.0), (4.0, 0.5), (10.0, 2.0)] {
        let d = (e * e - 2.0 * i2 * i2).sqrt();
        let (r_min, r_max) = c.turning_points(e, i2).unwrap();
        assert!((r_min - ((e - d) / 2.0).sqrt()).abs() < 1e-12, "E = {e}, I₂ = {i2}");
        assert!((r_max - ((e + d) / 2.0).sqrt()).abs() < 1e-12, "E = {e}, I₂ = {i2}");
    }
}

#[test]
fn closed_form_actions() {
    let k = chart(&Potential::kepler(1.0).unwrap(), 1.0);
    let h = chart(&Potential::harmonic(1.0).unwrap(), 1.0);
    for i2 in [0.4, 1.0, 3.0] {
        for e in [-0.9 / (2.0 * i2 * i2), -0.5 / (2.0 * i2 * i2), -0.1 / (2.0 * i2 * i2)] {
            let g = k.action_g(e, i2).unwrap();
            let exact = 1.0 / (-2.0 * e).sqrt() - i2;
            assert!((g - exact).abs() < 1e-10 * exact.max(i2), "Kepler I₂ = {i2}, E = {e}");
            let (w1, w2) = k.frequencies(e, i2).unwrap();
            assert!((w1 / (-2.0 * e).powf(1.5) - 1.0).abs() < 1e-8);
            assert!((w2 / w1 - 1.0).abs() < 1e-8);
        }
        // V = r²: bottom at 2^(1/2) I₂
        for e in [1.5 * i2, 3.0 * i2, 10.0 * i2] {
            let g = h.action_g(e, i2).unwrap();
            let exact = e / (2.0 * 2f64.sqrt()) - i2 / 2.0;
            assert!((g - exact).abs() < 1e-10 * exact.max(i2), "harmonic I₂ = {i2}, E = {e}");
            let p = h.point(e, i2).unwrap();
            assert!((p.nu - 2.0).abs() < 1e-8);
        }
    }
}

#[test]
fn bottom_has_zero_action() {
    let c = chart(&Potential::lennard_jones(1.0, 1.0).unwrap(), 1.0);
    let lv = c.levels(1.0).unwrap();
    assert_eq!(c.action_g(lv.bottom.level, 1.0).unwrap(), 0.0);
    assert_eq!(c.action_range(1.0).unwrap().0, 0.0);
}

#[test]
fn action_increases_with_energy() {
    let p = Potential::lennard_jones_gauss(1.5, 1.5, 0.02).unwrap();
    for c in all_charts(&p) {
        let iv = c.interval();
        let i2 = iv.lo + 0.5 * (iv.hi - iv.lo);
        let lv = c.levels(i2).unwrap();
        let mut prev = f64::NEG_INFINITY;
        for k in 1..20 {
            let e = lv.denormalize(k as f64 / 20.0);
            let a = c.integrals(e, i2).unwrap();
            assert!(a.g_e > 0.0);
            assert!(a.i1 > prev);
            prev = a.i1;
        }
    }
}

#[test]
fn round_trip_grid() {
    for p in [Potential::lennard_jones(1.0, 1.0).unwrap(), Potential::lennard_jones_gauss(1.5, 1.5, 0.02).unwrap()] {
        for c in all_charts(&p) {
            let iv = c.interval();
            let cells: Vec<(usize, usize)> = (0..20).flat_map(|j| (0..20).map(move |i| (i, j))).collect();
            cells.par_iter().for_each(|&(i, j)| {
                let i2 = iv.lo + (iv.hi - iv.lo) * (j as f64 + 0.5) / 20.0;
                let (lo, hi) = c.action_range(i2).unwrap();
                let i1 = lo + (hi - lo) * (i as f64 + 0.5) / 20.0;
                let e = c.invert_h(i1, i2).unwrap();
                let back = c.action_g(e, i2).unwrap();
                assert!((back - i1).abs() < 1e-9 * hi.max(i2), "{} I = ({i1}, {i2})", p.name());
            });
        }
    }
}

#[test]
fn out_of_range_action_is_domain_error() {
    let c = chart(&Potential::lennard_jones(1.0, 1.0).unwrap(), 1.0);
    let (_, hi) = c.action_range(1.0).unwrap();
    assert!(matches!(c.invert_h(2.0 * hi, 1.0), Err(Error::Domain(_))));
    assert!(matches!(c.invert_h(-1.0, 1.0), Err(Error::Domain(_))));
}

#[test]
fn circular_limit_rotation_number() {
    let p = Potential::lennard_jones(1.0, 1.0).unwrap();
    let c = chart(&p, 1.0);
    for i2 in [0.6, 1.0, 1.6] {
        let lv = c.levels(i2).unwrap();
        let o = CircularOrbitData::at(&p, lv.bottom.r0).unwrap();
        let e = lv.bottom.level + 1e-6 * (lv.top - lv.bottom.level);
        let nu = c.point(e, i2).unwrap().nu;
        assert!((nu - nu0(&o)).abs() < 1e-3, "I₂ = {i2}: {nu} vs {}", nu0(&o));
    }
}

#[test]
fn bertrand_charts_have_constant_rotation_number() {
    for (p, nu) in [
        (Potential::kepler(1.0).unwrap(), 1.0),
        (Potential::harmonic(1.0).unwrap().with_range(0.01, 10.0).unwrap(), 2.0),
    ] {
        let c = chart(&p, 1.0);
        let iv = c.interval();
        let pts = c.grid((iv.lo.max(0.0) + 0.05 * iv.hi, 0.95 * iv.hi), 20, 20);
        for pt in pts {
            let pt = pt.unwrap();
            assert!((pt.nu - nu).abs() < 1e-6, "{} at {pt:?}", p.name());
        }
    }
}

#[test]
fn log_asymptotics_need_a_maximum() {
    let c = chart(&Potential::lennard_jones(1.0, 1.0).unwrap(), 1.0);
    assert_eq!(c.bottom_kind(), PointKind::Minimum);
    let ebar = [1e-3, 5e-4, 2e-4, 1e-4, 5e-5, 2e-5, 1e-5];
    assert!(matches!(c.fit_log_asymptotics(1.0, &ebar), Err(Error::Domain(_))));
}

#[test]
fn max_bottomed_chart_fit() {
    let p = Potential::lennard_jones_gauss(1.5, 1.5, 0.02).unwrap();
    let ivs = decompose_momentum_intervals(&p, 256, 10.0).unwrap();
    let c = ActionChart::new(&p, &ivs[0], 1).unwrap();
    assert_eq!(c.bottom_kind(), PointKind::Maximum);
    let ebar: Vec<f64> = (0..10).map(|k| 1e-3 * 0.5f64.powi(k)).collect();
    for i2 in [0.3, 0.5, 0.8] {
        let fit = c.fit_log_asymptotics(i2, &ebar).unwrap();
        assert!(fit.lambda_relative_error() < 1e-2, "I₂ = {i2}: {}", fit.lambda_relative_error());
        assert!(((fit.i1_limit - fit.i1_separatrix) / fit.i1_separatrix).abs() < 1e-6);
    }
}

#[test]
fn single_precision_chart() {
    let p = Potential::<f32>::kepler(1.0).unwrap();
    let ivs = decompose_momentum_intervals(&p, 256, 10.0).unwrap();
    let c = ActionChart::first_minimum(&p, &ivs, 1.0).unwrap();
    let g = c.action_g(-0.3, 1.0).unwrap();
    let exact = 1.0 / 0.6f32.sqrt() - 1.0;
    assert!((g - exact).abs() < 1e-4, "{g} vs {exact}");
}
