use centralforce::actions::ActionChart;
use centralforce::birkhoff::rhs_g1_g2;
use centralforce::effective::decompose_momentum_intervals;
use centralforce::potentials::Potential;
use centralforce::quasiconvexity::{
    arnold_determinant, bertrand_nonconstancy, determinant, max_bottom_divergence, quasiconvexity_map,
    QuasiconvexityMap, TOL_D,
};

fn lj() -> Potential<f64> {
    Potential::lennard_jones(1.0, 1.0).unwrap()
}

fn min_chart(p: &Potential<f64>) -> ActionChart<f64> {
    let ivs = decompose_momentum_intervals(p, 256, 10.0).unwrap();
    ActionChart::first_minimum(p, &ivs, ivs[0].midpoint()).unwrap()
}

fn max_chart() -> ActionChart<f64> {
    let p = Potential::lennard_jones_gauss(1.5, 1.5, 0.02).unwrap();
    let ivs = decompose_momentum_intervals(&p, 256, 10.0).unwrap();
    ActionChart::new(&p, &ivs[0], 1).unwrap()
}

fn inner_range(c: &ActionChart<f64>) -> (f64, f64) {
    let iv = c.interval();
    let w = iv.hi - iv.lo.max(0.0);
    (iv.lo.max(0.0) + 0.05 * w, iv.hi - 0.05 * w)
}

/// Apsidal angle from `r_min` to `r_max` by RK4 on the planar equations,
/// with the last step solved for `ṙ = 0` by Newton's method.
fn apsidal_angle(p: &Potential<f64>, l: f64, r_min: f64) -> f64 {
    // state (r, ṙ, θ)
    let rhs = |s: [f64; 3]| [s[1], -p.dv(s[0]) + l * l / s[0].powi(3), l / (s[0] * s[0])];
    let step = |s: [f64; 3], h: f64| {
        let add = |a: [f64; 3], b: [f64; 3], k: f64| [a[0] + k * b[0], a[1] + k * b[1], a[2] + k * b[2]];
        let k1 = rhs(s);
        let k2 = rhs(add(s, k1, h / 2.0));
        let k3 = rhs(add(s, k2, h / 2.0));
        let k4 = rhs(add(s, k3, h));
        std::array::from_fn(|i| s[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
    };
    let h = 2e-5;
    let mut s = [r_min, 0.0, 0.0];
    // leave the turning point first
    for _ in 0..10 {
        s = step(s, h);
    }
    loop {
        let next = step(s, h);
        if next[1] <= 0.0 {
            let mut tau = h * s[1] / (s[1] - next[1]);
            for _ in 0..20 {
                let t = step(s, tau);
                let acc = rhs(t)[1];
                let dtau = -t[1] / acc;
                tau += dtau;
                if dtau.abs() < 1e-16 {
                    break;
                }
            }
            return step(s, tau)[2];
        }
        s = next;
    }
}

#[test]
fn kepler_point_is_degenerate() {
    let c = min_chart(&Potential::kepler(1.0).unwrap());
    let (lo, hi) = c.action_range(1.0).unwrap();
    for f in [0.1, 0.5, 0.9] {
        let s = arnold_determinant(&c, lo + f * (hi - lo), 1.0).unwrap();
        assert!(s.d_normalized.abs() < 1e-6, "{}", s.d_normalized);
        assert!(!s.quasiconvex);
    }
}

#[test]
fn determinant_recomputed_from_fields() {
    let c = min_chart(&lj());
    let (lo, hi) = c.action_range(1.0).unwrap();
    let s = arnold_determinant(&c, lo + 0.4 * (hi - lo), 1.0).unwrap();
    let d = determinant(s.hessian, s.point.omega1, s.point.omega2);
    assert!((d - s.d).abs() <= 1e-12 * d.abs());
    let w = s.point.omega1.hypot(s.point.omega2);
    assert!((s.d_normalized - s.d * (s.point.i1 + s.point.i2) / w.powi(3)).abs() <= 1e-12 * s.d_normalized.abs());
    assert!(s.asymmetry.abs() < 1e-6 * s.hessian.iter().fold(0.0f64, |m, h| m.max(h.abs())));
}

#[test]
fn lennard_jones_is_quasiconvex_near_the_circular_orbit() {
    let p = lj();
    let c = min_chart(&p);
    for i2 in [0.5, 1.0, 1.5] {
        let (lo, hi) = c.action_range(i2).unwrap();
        let s = arnold_determinant(&c, lo + 1e-4 * (hi - lo), i2).unwrap();
        assert!(s.d_normalized.abs() > 10.0 * TOL_D);
        // D = -ω₂³ (∂ν/∂I₁ - ν ∂ν/∂I₂), and at I₁ → 0 the bracket is ν₁ - G₁
        let r0 = c.levels(i2).unwrap().bottom.r0;
        let rhs = rhs_g1_g2(&p, r0).unwrap();
        let predicted = -s.point.omega2.powi(3) * rhs.res1;
        assert!((s.d / predicted - 1.0).abs() < 1e-2, "I₂ = {i2}: {} vs {predicted}", s.d);
    }
}

#[test]
fn burgers_residual_tracks_determinant() {
    let c = min_chart(&lj());
    let map = quasiconvexity_map(&c, inner_range(&c), 8, 8).unwrap();
    for s in map.samples.iter().flatten() {
        let b = s.burgers_residual.unwrap();
        let from_d = -s.d / s.point.omega2.powi(3);
        assert!((b - from_d).abs() < 1e-5 * from_d.abs().max(1e-3), "{b} vs {from_d}");
    }
    let k = min_chart(&Potential::kepler(1.0).unwrap());
    let map = quasiconvexity_map(&k, inner_range(&k), 8, 8).unwrap();
    for s in map.samples.iter().flatten() {
        assert!((s.burgers_residual.unwrap() * (s.point.i1 + s.point.i2)).abs() < 1e-6);
    }
}

fn zero_curve_distance(coarse: &QuasiconvexityMap<f64>, fine: &QuasiconvexityMap<f64>, spans: (f64, f64)) -> f64 {
    fine.zero_set
        .iter()
        .map(|&(a, b)| {
            coarse
                .zero_set
                .iter()
                .map(|&(x, y)| ((a - x) / spans.0).hypot((b - y) / spans.1))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

#[test]
fn lennard_jones_zero_set_is_thin() {
    let c = min_chart(&lj());
    let range = inner_range(&c);
    let coarse = quasiconvexity_map(&c, range, 40, 40).unwrap();
    assert_eq!(coarse.failed_cells, 0);
    assert!(coarse.near_zero_fraction < 0.05);
    assert!(!coarse.zero_set.is_empty());
    let fine = quasiconvexity_map(&c, range, 80, 80).unwrap();
    assert!(fine.near_zero_fraction <= coarse.near_zero_fraction);
    // the refined sign changes lie on the coarse curve, within a few coarse cells
    let i1_span = c.action_range(range.1).unwrap().1;
    let dist = zero_curve_distance(&coarse, &fine, (i1_span, range.1 - range.0));
    assert!(dist < 3.0 / 40.0, "{dist}");
}

#[test]
fn verdict_is_scale_invariant() {
    let p = lj();
    let s = 4.0;
    let (a, b) = (min_chart(&p), min_chart(&p.scaled(s).unwrap()));
    let (ra, rb) = (inner_range(&a), inner_range(&b));
    assert!((rb.0 / ra.0 - s.sqrt()).abs() < 1e-9 && (rb.1 / ra.1 - s.sqrt()).abs() < 1e-9);
    let (ma, mb) = (quasiconvexity_map(&a, ra, 8, 8).unwrap(), quasiconvexity_map(&b, rb, 8, 8).unwrap());
    for (x, y) in ma.samples.iter().zip(&mb.samples) {
        let (x, y) = (x.as_ref().unwrap(), y.as_ref().unwrap());
        assert_eq!(x.quasiconvex, y.quasiconvex);
        assert!((x.d_normalized - y.d_normalized).abs() < 1e-6 * x.d_normalized.abs().max(1e-6));
        assert!((y.d / x.d - s).abs() < 1e-5 * s);
    }
}

#[test]
fn divergence_code_paths_agree() {
    let c = max_chart();
    let ebar = [1e-3, 1e-4, 1e-5, 1e-6];
    let rep = max_bottom_divergence(&c, 0.5, &ebar).unwrap();
    assert!(rep.monotone && rep.sign_consistent && !rep.inconclusive);
    for s in &rep.samples {
        assert!((s.d_alternative / s.d - 1.0).abs() < 1e-6, "Ē = {}", s.ebar);
    }
    // ∂ω₁/∂I₂ decays towards the separatrix, if only logarithmically
    for w in rep.samples.windows(2) {
        assert!(w[1].domega1_di2.abs() < w[0].domega1_di2.abs());
    }
}

#[test]
fn frequency_vanishes_logarithmically() {
    let c = max_chart();
    let rep = max_bottom_divergence(&c, 0.5, &[1e-6, 5e-7]).unwrap();
    // 1/ω₁ = -ln Ē / (πλ) + O(1): the slope in ln Ē is fixed even though the
    // constant term keeps ω₁ itself far from -πλ/ln Ē at any reachable Ē
    let (a, b) = (&rep.samples[0], &rep.samples[1]);
    let slope = (1.0 / b.omega1 - 1.0 / a.omega1) / (b.ebar.ln() - a.ebar.ln());
    let expected = -1.0 / (std::f64::consts::PI * rep.lambda);
    assert!((slope / expected - 1.0).abs() < 5e-2, "{slope} vs {expected}");
}

#[test]
fn divergence_needs_a_maximum() {
    assert!(max_bottom_divergence(&min_chart(&lj()), 1.0, &[1e-3, 1e-4]).is_err());
}

#[test]
fn bertrand_verdicts() {
    let k = min_chart(&Potential::kepler(1.0).unwrap());
    let v = bertrand_nonconstancy(&k, 1.0, 24).unwrap();
    assert!(v.degenerate && (v.nu_min - 1.0).abs() < 1e-6);
    let h = min_chart(&Potential::harmonic(1.0).unwrap());
    let v = bertrand_nonconstancy(&h, 1.0, 24).unwrap();
    assert!(v.degenerate && (v.nu_min - 2.0).abs() < 1e-6);
    let v = bertrand_nonconstancy(&min_chart(&lj()), 1.0, 24).unwrap();
    assert!(!v.degenerate && v.spread > 1e-3);
}

#[test]
fn rotation_number_matches_apsidal_angle() {
    let p = lj();
    let c = min_chart(&p);
    let i2 = 1.0;
    let lv = c.levels(i2).unwrap();
    let mut angles = Vec::new();
    for u in [0.05, 0.3, 0.6] {
        let e = lv.denormalize(u);
        let pt = c.point(e, i2).unwrap();
        let (r_min, _) = c.turning_points(e, i2).unwrap();
        let oracle = apsidal_angle(&p, i2, r_min);
        let from_chart = std::f64::consts::PI / pt.nu;
        assert!((oracle - from_chart).abs() < 1e-7, "u = {u}: {oracle} vs {from_chart}");
        angles.push(oracle);
    }
    assert!((angles[2] - angles[0]).abs() > 1e-3);
}
