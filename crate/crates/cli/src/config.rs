//! Run configuration: strict JSON, unknown keys rejected, every section
//! optional with defaults.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use centralforce::actions::ActionChart;
use centralforce::dynamics::{Grid3, Perturbation, SlowCoupling};
use centralforce::effective::{decompose_momentum_intervals, MomentumInterval};
use centralforce::potentials::{Potential, PotentialKind};

use crate::CliError;

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub potential: PotentialSpec,
    /// When present, must name the subcommand being run.
    #[serde(default)]
    pub analysis: Option<String>,
    #[serde(default)]
    pub momentum: MomentumSpec,
    #[serde(default)]
    pub chart: Option<ChartSpec>,
    #[serde(default)]
    pub profile: ProfileSpec,
    #[serde(default)]
    pub actions: ActionsSpec,
    #[serde(default)]
    pub arnold: ArnoldSpec,
    #[serde(default)]
    pub birkhoff: BirkhoffSpec,
    #[serde(default)]
    pub bertrand: BertrandSpec,
    #[serde(default)]
    pub nekhoroshev: NekhoroshevSpec,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSpec {
    pub kind: PotentialKind,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    #[serde(default)]
    pub range: Option<[f64; 2]>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct MomentumSpec {
    /// Upper momentum used when `r³V'` is unbounded.
    pub cap: f64,
    pub samples: usize,
}

impl Default for MomentumSpec {
    fn default() -> Self {
        MomentumSpec { cap: 10.0, samples: 256 }
    }
}

/// A chart by interval index and branch; the default is the first minimum
/// branch of the interval containing the requested `I₂`.
#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ChartSpec {
    pub interval: usize,
    pub branch: usize,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProfileSpec {
    /// Number of `ℓ` samples for the branch table, evenly spaced in `p_θ`.
    pub samples: usize,
}

impl Default for ProfileSpec {
    fn default() -> Self {
        ProfileSpec { samples: 200 }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct ActionsSpec {
    /// `I₂` range of the grid; defaults to the chart's momentum interval
    /// shrunk by 5% at each end.
    pub i2_range: Option<[f64; 2]>,
    pub n_e: usize,
    pub n_i2: usize,
    pub asymptotics: Option<AsymptoticsSpec>,
}

impl Default for ActionsSpec {
    fn default() -> Self {
        ActionsSpec { i2_range: None, n_e: 20, n_i2: 20, asymptotics: None }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct AsymptoticsSpec {
    pub i2: f64,
    pub ebar: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct ArnoldSpec {
    pub i2_range: Option<[f64; 2]>,
    pub n1: usize,
    pub n2: usize,
    pub divergence: Option<AsymptoticsSpec>,
}

impl Default for ArnoldSpec {
    fn default() -> Self {
        ArnoldSpec { i2_range: None, n1: 20, n2: 20, divergence: None }
    }
}

#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct BirkhoffSpec {
    /// Momenta at which the expansion is checked against quadrature.
    pub i2: Vec<f64>,
    /// Radii of circular orbits at which the closed-form coefficients are
    /// tabulated.
    pub r0: Vec<f64>,
    pub scan: Option<ScanSpec>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScanSpec {
    pub interval: [f64; 2],
    pub step: f64,
}

impl Default for ScanSpec {
    fn default() -> Self {
        ScanSpec { interval: [-3.5, 2.0], step: 1e-3 }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct BertrandSpec {
    pub i2: Vec<f64>,
    pub samples: usize,
}

impl Default for BertrandSpec {
    fn default() -> Self {
        BertrandSpec { i2: vec![], samples: 24 }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields, tag = "kind", rename_all = "snake_case")]
pub enum PerturbationSpec {
    AnisotropicQuadratic,
    FixedDipole { softening: f64 },
    UserGrid { origin: [f64; 3], spacing: [f64; 3], shape: [usize; 3], values: Vec<f64> },
    Central { potential: PotentialSpec },
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct NekhoroshevSpec {
    pub perturbation: PerturbationSpec,
    pub eps: Vec<f64>,
    /// `I₂` of the initial orbit; defaults to the chart interval midpoint.
    pub i2: Option<f64>,
    /// `I₁` as a fraction of the chart's action range at `I₂`.
    pub i1_fraction: f64,
    pub inclination: f64,
    /// Extra initial states with `I₁` fraction and inclination drawn from
    /// the seeded generator.
    pub random_states: usize,
    /// Horizon in units of `1/ω₀`, the radial frequency of the circular
    /// orbit at `I₂`.
    pub horizon: f64,
    /// `dt · ω_max`.
    pub courant: f64,
    pub samples: usize,
    pub shell: Option<[f64; 2]>,
    pub fast_slow: Option<FastSlowSpec>,
}

impl Default for NekhoroshevSpec {
    fn default() -> Self {
        NekhoroshevSpec {
            perturbation: PerturbationSpec::AnisotropicQuadratic,
            eps: vec![1e-2, 1e-3, 1e-4],
            i2: None,
            i1_fraction: 0.3,
            inclination: 0.3,
            random_states: 0,
            horizon: 1e6,
            courant: 0.05,
            samples: 1000,
            shell: None,
            fast_slow: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct FastSlowSpec {
    pub dim: usize,
    pub omega: f64,
    pub strength: f64,
    pub eps: Vec<f64>,
    /// Horizon in slow time units.
    pub t_end: f64,
    pub courant: f64,
}

impl Default for FastSlowSpec {
    fn default() -> Self {
        FastSlowSpec { dim: 1, omega: 1.0, strength: 0.1, eps: vec![1e-2, 1e-3], t_end: 10.0, courant: 0.05 }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Parses and validates; syntax errors carry line and column.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        let bad = |field: &str, why: &str| Err(CliError::Config(format!("`{field}` {why}")));
        if !(self.momentum.cap > 0.0) {
            return bad("momentum.cap", "must be positive");
        }
        if self.momentum.samples < 64 {
            return bad("momentum.samples", "must be at least 64");
        }
        if self.profile.samples < 2 {
            return bad("profile.samples", "must be at least 2");
        }
        if self.actions.n_e == 0 || self.actions.n_i2 == 0 {
            return bad("actions", "grid sizes must be positive");
        }
        if self.arnold.n1 < 2 || self.arnold.n2 < 2 {
            return bad("arnold", "grid sizes must be at least 2");
        }
        if let Some(s) = &self.birkhoff.scan {
            if !(s.step > 0.0) || !(s.interval[0] < s.interval[1]) {
                return bad("birkhoff.scan", "needs a positive step and an increasing interval");
            }
        }
        let n = &self.nekhoroshev;
        if n.eps.is_empty() || n.eps.iter().any(|e| !e.is_finite() || *e < 0.0) {
            return bad("nekhoroshev.eps", "must be a non-empty list of non-negative numbers");
        }
        if !(n.i1_fraction > 0.0 && n.i1_fraction < 1.0) {
            return bad("nekhoroshev.i1_fraction", "must lie in (0, 1)");
        }
        if !(n.horizon > 0.0) || !(n.courant > 0.0) || n.samples == 0 {
            return bad("nekhoroshev", "horizon, courant and samples must be positive");
        }
        if let Some(fs) = &n.fast_slow {
            if fs.dim == 0 || fs.eps.iter().any(|e| !(*e > 0.0)) || !(fs.t_end > 0.0) || !(fs.courant > 0.0) {
                return bad("nekhoroshev.fast_slow", "needs dim ≥ 1 and positive eps, t_end and courant");
            }
        }
        Ok(())
    }

    pub fn check_analysis(&self, command: &str) -> Result<(), CliError> {
        match &self.analysis {
            Some(a) if a != command => {
                Err(CliError::Config(format!("config is for `{a}` but the subcommand is `{command}`")))
            }
            _ => Ok(()),
        }
    }
}

pub fn build_potential(spec: &PotentialSpec) -> Result<Potential<f64>, CliError> {
    let p = Potential::builtin(spec.kind, &spec.params).map_err(|e| CliError::Config(e.to_string()))?;
    match spec.range {
        Some([lo, hi]) => p.with_range(lo, hi).map_err(|e| CliError::Config(e.to_string())),
        None => Ok(p),
    }
}

pub fn build_perturbation(spec: &PerturbationSpec) -> Result<Perturbation<f64>, CliError> {
    Ok(match spec {
        PerturbationSpec::AnisotropicQuadratic => Perturbation::AnisotropicQuadratic,
        PerturbationSpec::FixedDipole { softening } => {
            if !(*softening > 0.0) {
                return Err(CliError::Config("`perturbation.softening` must be positive".into()));
            }
            Perturbation::FixedDipole { softening: *softening }
        }
        PerturbationSpec::UserGrid { origin, spacing, shape, values } => Perturbation::UserGrid(
            Grid3::new(*origin, *spacing, *shape, values.clone()).map_err(|e| CliError::Config(e.to_string()))?,
        ),
        PerturbationSpec::Central { potential } => Perturbation::Central(build_potential(potential)?),
    })
}

pub fn build_coupling(spec: &FastSlowSpec) -> SlowCoupling<f64> {
    SlowCoupling { dim: spec.dim, omega: spec.omega, strength: spec.strength }
}

/// The potential with its momentum intervals, shared by every command.
pub struct Setup {
    pub potential: Potential<f64>,
    pub intervals: Vec<MomentumInterval<f64>>,
}

impl Setup {
    pub fn new(cfg: &RunConfig) -> Result<Self, CliError> {
        let potential = build_potential(&cfg.potential)?;
        let intervals = decompose_momentum_intervals(&potential, cfg.momentum.samples, cfg.momentum.cap)?;
        Ok(Setup { potential, intervals })
    }

    /// The configured chart, or the first minimum chart containing `i2`.
    pub fn chart(&self, spec: Option<ChartSpec>, i2: Option<f64>) -> Result<ActionChart<f64>, CliError> {
        match spec {
            Some(c) => {
                let iv = self.intervals.get(c.interval).ok_or_else(|| {
                    CliError::Config(format!(
                        "chart.interval {} out of range ({} intervals)",
                        c.interval,
                        self.intervals.len()
                    ))
                })?;
                Ok(ActionChart::new(&self.potential, iv, c.branch)?)
            }
            None => {
                let i2 = i2.unwrap_or_else(|| {
                    self.intervals
                        .iter()
                        .find(|iv| iv.kinds.contains(&centralforce::effective::PointKind::Minimum))
                        .map(|iv| iv.midpoint())
                        .unwrap_or(f64::NAN)
                });
                Ok(ActionChart::first_minimum(&self.potential, &self.intervals, i2)?)
            }
        }
    }
}
