//! Analytic radial potentials `V(r)` with closed-form derivatives, the
//! logarithmic-derivative ratio `g(r) = r V''(r) / V'(r)`, and the
//! admissibility checks on `r^3 V'(r)`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::roots::sign_changes;
use crate::scalar::Real;

/// Highest derivative order supplied by every potential.
pub const MAX_ORDER: usize = 6;

pub const DEFAULT_RANGE: (f64, f64) = (1e-3, 1e3);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PotentialKind {
    Kepler,
    Harmonic,
    PowerLaw,
    Log,
    LennardJones,
    LennardJonesGauss,
}

impl PotentialKind {
    pub const ALL: [PotentialKind; 6] = [
        PotentialKind::Kepler,
        PotentialKind::Harmonic,
        PotentialKind::PowerLaw,
        PotentialKind::Log,
        PotentialKind::LennardJones,
        PotentialKind::LennardJonesGauss,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PotentialKind::Kepler => "kepler",
            PotentialKind::Harmonic => "harmonic",
            PotentialKind::PowerLaw => "power_law",
            PotentialKind::Log => "log",
            PotentialKind::LennardJones => "lennard_jones",
            PotentialKind::LennardJonesGauss => "lennard_jones_gauss",
        }
    }

    /// Accepted parameter names and their defaults (`None` = required).
    fn parameters(self) -> &'static [(&'static str, Option<f64>)] {
        match self {
            PotentialKind::Kepler | PotentialKind::Harmonic | PotentialKind::Log => &[("k", Some(1.0))],
            PotentialKind::PowerLaw => &[("k", Some(1.0)), ("c", None)],
            PotentialKind::LennardJones => &[("eps", Some(1.0)), ("sigma", Some(1.0))],
            PotentialKind::LennardJonesGauss => &[("eps", Some(1.5)), ("r0", Some(1.5)), ("sigma2", Some(0.02))],
        }
    }
}

impl fmt::Display for PotentialKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PotentialKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PotentialKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::config("kind", format!("unknown potential kind `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Form<T> {
    /// `-k / r`
    Kepler { k: T },
    /// `k r^2`
    Harmonic { k: T },
    /// `k r^(c+1) / (c+1)`
    PowerLaw { k: T, c: T },
    /// `k ln r`
    Log { k: T },
    /// `4 eps ((sigma/r)^12 - (sigma/r)^6)`
    LennardJones { eps: T, sigma: T },
    /// `r^-12 - 2 r^-6 - eps exp(-(r - r0)^2 / (2 sigma2))`
    LennardJonesGauss { eps: T, r0: T, sigma2: T },
}

/// Immutable analytic radial potential.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential<T> {
    kind: PotentialKind,
    form: Form<T>,
    name: String,
    params: BTreeMap<String, f64>,
    /// Overall multiplier `s` in `s V(r)`.
    amplitude: T,
    ell_star: T,
    v_infinity: T,
    range: (T, T),
}

/// `m (m-1) ... (m-n+1)`
fn falling<T: Real>(m: T, n: usize) -> T {
    (0..n).fold(T::one(), |acc, j| acc * (m - T::from_usize_lossy(j)))
}

/// Derivatives of `a r^m` up to [`MAX_ORDER`].
fn power_term<T: Real>(a: T, m: T, r: T, out: &mut [T; MAX_ORDER + 1]) {
    for (n, o) in out.iter_mut().enumerate() {
        let f = falling(m, n);
        if f != T::zero() {
            *o = *o + a * f * r.powf(m - T::from_usize_lossy(n));
        }
    }
}

fn int_power_term<T: Real>(a: T, m: i32, r: T, out: &mut [T; MAX_ORDER + 1]) {
    for (n, o) in out.iter_mut().enumerate() {
        let f = falling(T::lit(m as f64), n);
        if f != T::zero() {
            *o = *o + a * f * r.powi(m - n as i32);
        }
    }
}

impl<T: Real> Potential<T> {
    fn from_form(kind: PotentialKind, form: Form<T>, params: BTreeMap<String, f64>) -> Self {
        let zero = T::zero();
        let (ell_star, v_infinity) = match form {
            Form::Kepler { .. } => (zero, zero),
            Form::Harmonic { .. } => (zero, T::infinity()),
            Form::PowerLaw { k, c } => {
                let three = T::lit(3.0);
                let ell_star = if c > -three {
                    zero
                } else if c == -three {
                    k / T::lit(4.0)
                } else if k > zero {
                    T::infinity()
                } else {
                    T::neg_infinity()
                };
                let v_inf = if c + T::one() < zero {
                    zero
                } else if k > zero {
                    T::infinity()
                } else {
                    T::neg_infinity()
                };
                (ell_star, v_inf)
            }
            Form::Log { k } => (zero, if k > zero { T::infinity() } else { T::neg_infinity() }),
            // r^2 V / 2 -> +inf at the origin, so the lower limit is unbounded
            Form::LennardJones { .. } | Form::LennardJonesGauss { .. } => (T::neg_infinity(), zero),
        };
        let name = match kind {
            PotentialKind::PowerLaw => format!("power_law(c={})", params["c"]),
            _ => kind.as_str().to_string(),
        };
        Potential {
            kind,
            form,
            name,
            params,
            amplitude: T::one(),
            ell_star,
            v_infinity,
            range: (T::lit(DEFAULT_RANGE.0), T::lit(DEFAULT_RANGE.1)),
        }
    }

    /// Build one of the built-in potentials from named parameters.
    ///
    /// Missing optional parameters take their documented defaults; unknown
    /// names and invalid values are configuration errors naming the
    /// parameter.
    pub fn builtin(kind: PotentialKind, params: &BTreeMap<String, f64>) -> Result<Self> {
        let spec = kind.parameters();
        if let Some(unknown) = params.keys().find(|k| !spec.iter().any(|(n, _)| n == k)) {
            return Err(Error::config(unknown.clone(), format!("not a parameter of `{kind}`")));
        }
        let mut resolved = BTreeMap::new();
        for (name, default) in spec {
            let v = match (params.get(*name), default) {
                (Some(v), _) => *v,
                (None, Some(d)) => *d,
                (None, None) => return Err(Error::config(*name, format!("required by `{kind}`"))),
            };
            if !v.is_finite() {
                return Err(Error::config(*name, "must be finite"));
            }
            resolved.insert(name.to_string(), v);
        }
        let p = |n: &str| resolved[n];
        let positive = |n: &str| {
            if p(n) > 0.0 {
                Ok(T::lit(p(n)))
            } else {
                Err(Error::config(n, "must be positive"))
            }
        };
        let nonzero = |n: &str| {
            if p(n) != 0.0 {
                Ok(T::lit(p(n)))
            } else {
                Err(Error::config(n, "must be nonzero"))
            }
        };
        let form = match kind {
            PotentialKind::Kepler => Form::Kepler { k: positive("k")? },
            PotentialKind::Harmonic => Form::Harmonic { k: positive("k")? },
            PotentialKind::PowerLaw => {
                if p("c") == -1.0 {
                    return Err(Error::config("c", "exponent c = -1 is the logarithmic potential; use kind `log`"));
                }
                Form::PowerLaw { k: nonzero("k")?, c: T::lit(p("c")) }
            }
            PotentialKind::Log => Form::Log { k: nonzero("k")? },
            PotentialKind::LennardJones => Form::LennardJones { eps: positive("eps")?, sigma: positive("sigma")? },
            PotentialKind::LennardJonesGauss => {
                if p("eps") < 0.0 {
                    return Err(Error::config("eps", "must be non-negative"));
                }
                Form::LennardJonesGauss { eps: T::lit(p("eps")), r0: positive("r0")?, sigma2: positive("sigma2")? }
            }
        };
        Ok(Self::from_form(kind, form, resolved))
    }

    fn with_params(kind: PotentialKind, pairs: &[(&str, f64)]) -> Result<Self> {
        let params = pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        Self::builtin(kind, &params)
    }

    pub fn kepler(k: f64) -> Result<Self> {
        Self::with_params(PotentialKind::Kepler, &[("k", k)])
    }

    pub fn harmonic(k: f64) -> Result<Self> {
        Self::with_params(PotentialKind::Harmonic, &[("k", k)])
    }

    /// `k r^(c+1) / (c+1)`, for which `g` is identically `c`.
    pub fn power_law(k: f64, c: f64) -> Result<Self> {
        Self::with_params(PotentialKind::PowerLaw, &[("k", k), ("c", c)])
    }

    pub fn log(k: f64) -> Result<Self> {
        Self::with_params(PotentialKind::Log, &[("k", k)])
    }

    /// Homogeneous potential with `g ≡ c`, including the logarithmic case.
    pub fn homogeneous(c: f64) -> Result<Self> {
        if c == -1.0 {
            Self::log(1.0)
        } else {
            Self::power_law(1.0, c)
        }
    }

    pub fn lennard_jones(eps: f64, sigma: f64) -> Result<Self> {
        Self::with_params(PotentialKind::LennardJones, &[("eps", eps), ("sigma", sigma)])
    }

    pub fn lennard_jones_gauss(eps: f64, r0: f64, sigma2: f64) -> Result<Self> {
        Self::with_params(PotentialKind::LennardJonesGauss, &[("eps", eps), ("r0", r0), ("sigma2", sigma2)])
    }

    pub fn with_range(mut self, lo: f64, hi: f64) -> Result<Self> {
        if !(lo > 0.0 && hi > lo && hi.is_finite()) {
            return Err(Error::config("range", format!("need 0 < r_lo < r_hi, got [{lo}, {hi}]")));
        }
        self.range = (T::lit(lo), T::lit(hi));
        Ok(self)
    }

    /// The same potential multiplied by `s > 0`.
    pub fn scaled(&self, s: f64) -> Result<Self> {
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::config("scale", "must be positive"));
        }
        let mut out = self.clone();
        let s = T::lit(s);
        out.amplitude = out.amplitude * s;
        out.ell_star = out.ell_star * s;
        out.v_infinity = out.v_infinity * s;
        Ok(out)
    }

    pub fn kind(&self) -> PotentialKind {
        self.kind
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn params(&self) -> &BTreeMap<String, f64> {
        &self.params
    }

    /// `ℓ*` with `-ℓ* = lim_{r→0+} r² V(r) / 2`; `+∞` means the limit is
    /// `-∞` and the potential is inadmissible.
    pub fn ell_star(&self) -> T {
        self.ell_star
    }

    /// `lim_{r→∞} V(r)`, possibly infinite.
    pub fn v_infinity(&self) -> T {
        self.v_infinity
    }

    pub fn range(&self) -> (T, T) {
        self.range
    }

    pub fn in_range(&self, r: T) -> bool {
        r >= self.range.0 && r <= self.range.1
    }

    /// `[V, V', ..., V^(6)]` at `r > 0`.
    pub fn derivatives(&self, r: T) -> [T; MAX_ORDER + 1] {
        let mut d = [T::zero(); MAX_ORDER + 1];
        match self.form {
            Form::Kepler { k } => int_power_term(-k, -1, r, &mut d),
            Form::Harmonic { k } => int_power_term(k, 2, r, &mut d),
            Form::PowerLaw { k, c } => power_term(k / (c + T::one()), c + T::one(), r, &mut d),
            Form::Log { k } => {
                d[0] = k * r.ln();
                for (n, dn) in d.iter_mut().enumerate().skip(1) {
                    *dn = k * falling(-T::one(), n - 1) * r.powi(-(n as i32));
                }
            }
            Form::LennardJones { eps, sigma } => {
                let four = T::lit(4.0) * eps;
                int_power_term(four * sigma.powi(12), -12, r, &mut d);
                int_power_term(-four * sigma.powi(6), -6, r, &mut d);
            }
            Form::LennardJonesGauss { eps, r0, sigma2 } => {
                int_power_term(T::one(), -12, r, &mut d);
                int_power_term(-T::lit(2.0), -6, r, &mut d);
                // d^n/du^n exp(-u²/2s) = (-1)^n s^(-n/2) He_n(u/√s) exp(-u²/2s)
                let s = sigma2.sqrt();
                let x = (r - r0) / s;
                let gauss = (-x * x / T::lit(2.0)).exp();
                let (mut he_prev, mut he) = (T::zero(), T::one());
                for (n, dn) in d.iter_mut().enumerate() {
                    if n > 0 {
                        let next = x * he - T::from_usize_lossy(n - 1) * he_prev;
                        he_prev = he;
                        he = next;
                    }
                    let sign = if n % 2 == 0 { T::one() } else { -T::one() };
                    *dn = *dn - eps * sign * he * gauss / s.powi(n as i32);
                }
            }
        }
        d.map(|v| v * self.amplitude)
    }

    /// `(V, V')` without the higher derivatives.
    pub fn value_and_slope(&self, r: T) -> (T, T) {
        let (v, dv) = match self.form {
            Form::Kepler { k } => (-k / r, k / (r * r)),
            Form::Harmonic { k } => (k * r * r, T::lit(2.0) * k * r),
            Form::PowerLaw { k, c } => {
                let rc = r.powf(c);
                (k * rc * r / (c + T::one()), k * rc)
            }
            Form::Log { k } => (k * r.ln(), k / r),
            Form::LennardJones { eps, sigma } => {
                let s6 = (sigma / r).powi(6);
                let four = T::lit(4.0) * eps;
                (four * (s6 * s6 - s6), four * (T::lit(6.0) * s6 - T::lit(12.0) * s6 * s6) / r)
            }
            Form::LennardJonesGauss { eps, r0, sigma2 } => {
                let i6 = r.powi(-6);
                let u = r - r0;
                let gauss = eps * (-u * u / (T::lit(2.0) * sigma2)).exp();
                (i6 * i6 - T::lit(2.0) * i6 - gauss, T::lit(12.0) * (i6 - i6 * i6) / r + gauss * u / sigma2)
            }
        };
        (v * self.amplitude, dv * self.amplitude)
    }

    pub fn value(&self, r: T) -> T {
        self.value_and_slope(r).0
    }

    pub fn dv(&self, r: T) -> T {
        self.value_and_slope(r).1
    }

    /// `g(r) = r V''(r) / V'(r)`.
    pub fn g(&self, r: T) -> Result<T> {
        Ok(self.g_derivatives(r)?[0])
    }

    /// `[g, g', g'', g''', g'''']` at `r`, from the quotient rule applied to
    /// `N = r V''` over `D = V'`.
    pub fn g_derivatives(&self, r: T) -> Result<[T; 5]> {
        let v = self.derivatives(r);
        let scale = v[0].abs().max(v[1].abs() * r).max(T::min_positive_value());
        if v[1] == T::zero() || (v[1] * r).abs() <= T::epsilon() * scale {
            return Err(Error::SingularPoint { r: r.as_f64() });
        }
        // N^(n) = r V^(n+2) + n V^(n+1),  D^(j) = V^(j+1)
        let num: [T; 5] = std::array::from_fn(|n| r * v[n + 2] + T::from_usize_lossy(n) * v[n + 1]);
        let mut g = [T::zero(); 5];
        for n in 0..5 {
            let mut s = num[n];
            let mut binom = T::one();
            for k in 0..n {
                s = s - binom * g[k] * v[n - k + 1];
                binom = binom * T::from_usize_lossy(n - k) / T::from_usize_lossy(k + 1);
            }
            g[n] = s / v[1];
        }
        Ok(g)
    }

    /// `r³ V'(r)`, whose level sets are the circular-orbit radii.
    pub fn r3_dv(&self, r: T) -> T {
        r * r * r * self.dv(r)
    }

    /// Tail estimate of `V^∞`: `V(r_hi)` when the tail is flat
    /// (`|r_hi V'(r_hi)| < 1e-6 |V(r_hi)| + 1e-9`), `+∞` otherwise.
    pub fn tail_v_infinity(&self) -> T {
        let r = self.range.1;
        let d = self.derivatives(r);
        if (r * d[1]).abs() < T::lit(1e-6) * d[0].abs() + T::lit(1e-9) {
            d[0]
        } else {
            T::infinity()
        }
    }

    /// Evidence for the admissibility hypotheses on a sorted probe grid.
    pub fn check_hypotheses(&self, probe: &[T]) -> HypothesisReport<T> {
        let floor = self.ell_star.max(T::zero());
        let f: Vec<T> = probe.iter().map(|&r| self.r3_dv(r)).collect();
        let h1 = self.ell_star < T::infinity();
        let best =
            f.iter().enumerate().filter(|(_, v)| v.is_finite()).fold(
                None,
                |acc: Option<(usize, T)>, (i, v)| match acc {
                    Some((_, bv)) if bv >= *v => acc,
                    _ => Some((i, *v)),
                },
            );
        let (h2, witness) = match best {
            Some((i, v)) if v > floor => (true, Some(probe[i])),
            _ => (false, None),
        };
        let fmin = f.iter().copied().fold(T::infinity(), T::min);
        let fmax = f.iter().copied().fold(T::neg_infinity(), T::max);
        let spread = fmax - fmin;
        let identically = spread <= T::lit(1e-12) * fmax.abs().max(fmin.abs()).max(T::one());
        let mut h3_samples = Vec::new();
        if h2 {
            let lo = floor.max(fmin);
            for j in 1..=8 {
                let ell = lo + (fmax - lo) * T::from_usize_lossy(j) / T::lit(9.0);
                let solutions = if identically {
                    None
                } else {
                    let shifted: Vec<T> = f.iter().map(|v| *v - ell).collect();
                    Some(sign_changes(&shifted).len())
                };
                h3_samples.push(H3Sample { ell, solutions });
            }
        }
        let h3 = h2 && !identically;
        HypothesisReport {
            h1_holds: h1,
            ell_star: self.ell_star,
            h2_holds: h2,
            h2_witness: witness,
            h3_holds: h3,
            h3_samples,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(bound = "T: Real")]
pub struct H3Sample<T> {
    pub ell: T,
    /// Number of solutions of `r³V' = ℓ` seen on the grid; `None` when
    /// `r³V'` is constant and the equation holds identically.
    pub solutions: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(bound = "T: Real")]
pub struct HypothesisReport<T> {
    pub h1_holds: bool,
    #[serde(serialize_with = "crate::report::extended")]
    pub ell_star: T,
    pub h2_holds: bool,
    pub h2_witness: Option<T>,
    pub h3_holds: bool,
    pub h3_samples: Vec<H3Sample<T>>,
}

impl<T> HypothesisReport<T> {
    pub fn all_hold(&self) -> bool {
        self.h1_holds && self.h2_holds && self.h3_holds
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::log_grid;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn kepler_values() {
        let p = Potential::<f64>::kepler(1.0).unwrap();
        let d = p.derivatives(2.0);
        assert_eq!(d[0], -0.5);
        assert_eq!(d[1], 0.25);
        assert!(close(p.g(5.0).unwrap(), -2.0, 1e-14));
    }

    #[test]
    fn harmonic_values() {
        let p = Potential::<f64>::harmonic(1.0).unwrap();
        assert_eq!(p.value(3.0), 9.0);
        assert_eq!(p.dv(3.0), 6.0);
        assert!(close(p.g(0.7).unwrap(), 1.0, 1e-14));
    }

    #[test]
    fn power_law_has_constant_g() {
        let p = Potential::<f64>::power_law(2.0, 1.0).unwrap();
        for r in log_grid(0.01, 100.0, 10) {
            assert!((p.g(r).unwrap() - 1.0).abs() < 1e-12);
        }
        for c in [-2.5, -0.3, 0.5, 3.0] {
            let p = Potential::<f64>::power_law(1.0, c).unwrap();
            for r in log_grid(0.05, 20.0, 10) {
                assert!((p.g(r).unwrap() - c).abs() < 1e-12, "c={c} r={r}");
            }
        }
    }

    #[test]
    #[allow(clippy::excessive_precision)]
    fn lennard_jones_g_matches_symbolic_value() {
        // sympy: r V''/V' for 4(r^-12 - r^-6) at r = 6/5
        let p = Potential::<f64>::lennard_jones(1.0, 1.0).unwrap();
        assert!(close(p.g(1.2).unwrap(), 5.170_582_889_783_201_4, 1e-13));
    }

    #[test]
    #[allow(clippy::excessive_precision, clippy::inconsistent_digit_grouping)]
    fn lennard_jones_gauss_derivatives_match_symbolic_values() {
        let expected = [
            -0.923_249_601_405_178_687_14,
            -4.001_998_738_048_448_727_1,
            -33.926_444_756_240_187_048,
            296.610_902_778_119_621_75,
            6951.351_937_386_202_002_9,
            11_110.815_163_667_836_026,
            -1_535_797.418_022_434_032_2,
        ];
        let p = Potential::<f64>::lennard_jones_gauss(1.5, 1.5, 0.02).unwrap();
        let d = p.derivatives(1.3);
        for (k, (got, want)) in d.iter().zip(expected).enumerate() {
            assert!(close(*got, want, 1e-12), "order {k}: {got} vs {want}");
        }
    }

    #[test]
    fn g_on_zero_force_is_singular() {
        let p = Potential::<f64>::lennard_jones(1.0, 1.0).unwrap();
        let r_min = 2f64.powf(1.0 / 6.0);
        assert!(matches!(p.g(r_min), Err(Error::SingularPoint { .. })));
    }

    #[test]
    fn builtin_validates_parameters() {
        let mut params = BTreeMap::new();
        params.insert("k".to_string(), -1.0);
        let err = Potential::<f64>::builtin(PotentialKind::Kepler, &params).unwrap_err();
        assert!(matches!(err, Error::Config { ref param, .. } if param == "k"));
        let err = Potential::<f64>::builtin(PotentialKind::PowerLaw, &BTreeMap::new()).unwrap_err();
        assert!(matches!(err, Error::Config { ref param, .. } if param == "c"));
        params.clear();
        params.insert("q".to_string(), 1.0);
        let err = Potential::<f64>::builtin(PotentialKind::Harmonic, &params).unwrap_err();
        assert!(matches!(err, Error::Config { ref param, .. } if param == "q"));
        assert!(Potential::<f64>::power_law(1.0, -1.0).is_err());
        assert!("nope".parse::<PotentialKind>().is_err());
        assert_eq!("lennard_jones_gauss".parse::<PotentialKind>().unwrap(), PotentialKind::LennardJonesGauss);
    }

    #[test]
    fn hypotheses_for_reference_potentials() {
        let grid = log_grid(1e-3, 1e3, 512);
        let kep = Potential::<f64>::kepler(1.0).unwrap().check_hypotheses(&grid);
        assert!(kep.all_hold());
        assert_eq!(kep.ell_star, 0.0);
        assert!(kep.h3_samples.iter().all(|s| s.solutions == Some(1)));
        let harm = Potential::<f64>::harmonic(1.0).unwrap().check_hypotheses(&grid);
        assert!(harm.all_hold());
        // V = 1/(2 r²): r³V' = -1 everywhere
        let inv_sq = Potential::<f64>::power_law(-1.0, -3.0).unwrap();
        assert!((inv_sq.value(2.0) - 0.125).abs() < 1e-15);
        let rep = inv_sq.check_hypotheses(&grid);
        assert!(rep.h1_holds);
        assert!(!rep.h2_holds);
        assert!(rep.h2_witness.is_none());
        // attractive member: r³V' constant, so the level equation is degenerate
        let att = Potential::<f64>::power_law(1.0, -3.0).unwrap().check_hypotheses(&grid);
        assert!(!att.h3_holds);
        let lj = Potential::<f64>::lennard_jones(1.0, 1.0).unwrap().check_hypotheses(&grid);
        assert!(lj.all_hold());
        assert_eq!(lj.ell_star, f64::NEG_INFINITY);
        assert!(lj.h3_samples.iter().all(|s| s.solutions == Some(2)));
        // too singular at the origin
        let bad = Potential::<f64>::power_law(1.0, -4.0).unwrap().check_hypotheses(&grid);
        assert!(!bad.h1_holds);
    }

    #[test]
    fn tail_estimate_of_v_infinity() {
        let lj = Potential::<f64>::lennard_jones(1.0, 1.0).unwrap();
        assert!(lj.tail_v_infinity().abs() < 1e-15);
        assert_eq!(Potential::<f64>::harmonic(1.0).unwrap().tail_v_infinity(), f64::INFINITY);
    }

    #[test]
    fn scaling_multiplies_every_derivative() {
        let p = Potential::<f64>::lennard_jones_gauss(1.5, 1.5, 0.02).unwrap();
        let q = p.scaled(3.0).unwrap();
        for (a, b) in p.derivatives(1.4).iter().zip(q.derivatives(1.4)) {
            assert!(close(3.0 * a, b, 1e-14));
        }
        assert!(close(p.g(1.4).unwrap(), q.g(1.4).unwrap(), 1e-13));
    }

    #[test]
    fn single_precision_evaluation() {
        let p = Potential::<f32>::kepler(1.0).unwrap();
        assert!((p.g(3.0).unwrap() + 2.0).abs() < 1e-5);
    }
}
