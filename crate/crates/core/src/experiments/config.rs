//! TOML scenario descriptions and their resolution into runnable pieces.
//!
//! A scenario file has `[grid]`, `[model]`, `[initial]`, and `[time]`
//! tables, plus optional `[reference]`, `[diagnostics]`, and `[sweep]`.
//! `resolve` validates everything, fills in the step size if absent, adjusts
//! it so a whole number of steps lands exactly on the horizon, and fixes the
//! canonical form of the configuration (serialized TOML plus its SHA-256),
//! which reruns reproduce byte for byte.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::initial_data::{
    closed_form_h2, gkdv_soliton, rescaled_soliton, two_soliton_sum, AnalyticProfile,
};
use crate::integrator::cfl_dt;
use crate::models::{ModelSpec, PolynomialNonlinearity};
use crate::spectral::{Grid, RealField};

fn default_nu() -> f64 {
    1.0
}

fn default_stride() -> usize {
    20
}

fn default_sweep_steps() -> usize {
    21
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    /// Half width `L` of the box `[-L, L)`.
    pub half_width: f64,
    /// Number of collocation points (even, at least 16).
    pub points: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    /// Coefficients `a_1..a_k` of `F(U) = sum a_j U^j`.
    pub a: Vec<f64>,
    /// Dispersion scale; 1 for the standard family.
    #[serde(default = "default_nu")]
    pub nu: f64,
}

/// The initial datum. `kind` selects the variant.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialConfig {
    /// Pure-power family soliton with exponent `k` and speed `c`.
    Soliton {
        k: u32,
        c: f64,
        #[serde(default)]
        x0: f64,
    },
    /// Slow-scale soliton `3c sech^2(sqrt(c)/2 (x - x0))`.
    RescaledSoliton {
        nu: f64,
        c: f64,
        #[serde(default)]
        x0: f64,
    },
    /// Sum of two same-family solitons at `t = 0`.
    TwoSoliton { k: u32, c: [f64; 2], x0: [f64; 2] },
}

impl InitialConfig {
    pub fn build(&self, grid: &Grid) -> Result<RealField> {
        match *self {
            InitialConfig::Soliton { k, c, x0 } => gkdv_soliton(k, c, x0, grid, 0.0),
            InitialConfig::RescaledSoliton { nu, c, x0 } => rescaled_soliton(nu, c, x0, grid, 0.0),
            InitialConfig::TwoSoliton { k, c, x0 } => two_soliton_sum(k, c, x0, grid),
        }
    }

    /// The exact trajectory of this datum, when one exists.
    pub fn analytic_profile(&self) -> Option<AnalyticProfile> {
        match *self {
            InitialConfig::Soliton { k, c, x0 } => Some(AnalyticProfile::Soliton { k, c, x0 }),
            InitialConfig::RescaledSoliton { nu, c, x0 } => {
                Some(AnalyticProfile::RescaledSoliton { nu, c, x0 })
            }
            InitialConfig::TwoSoliton { .. } => None,
        }
    }

    /// Closed-form `H^2` norm of the datum, when one exists.
    pub fn closed_form_h2(&self) -> Option<f64> {
        match *self {
            InitialConfig::Soliton { k, c, .. } => closed_form_h2(k, c),
            // Same profile family as the quadratic soliton.
            InitialConfig::RescaledSoliton { c, .. } => closed_form_h2(1, c),
            InitialConfig::TwoSoliton { .. } => None,
        }
    }

    /// Speed and offset of a single-soliton datum (used by sweeps).
    pub fn speed_and_offset(&self) -> Option<(f64, f64)> {
        match *self {
            InitialConfig::Soliton { c, x0, .. } => Some((c, x0)),
            InitialConfig::RescaledSoliton { c, x0, .. } => Some((c, x0)),
            InitialConfig::TwoSoliton { .. } => None,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    pub t_end: f64,
    /// Step size; chosen from the advective stability heuristic if absent,
    /// then adjusted to divide `t_end` exactly.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    /// Requested snapshot times (they snap to step boundaries). Empty means
    /// "final state only".
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub snapshots: Vec<f64>,
}

/// What the solution is compared against, if anything.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ReferenceConfig {
    #[default]
    None,
    /// An exactly known traveling wave, sampled at each output time.
    Analytic { profile: InitialConfig },
    /// A second simulated model started from the same datum on the same grid.
    Simulated {
        a: Vec<f64>,
        #[serde(default = "default_nu")]
        nu: f64,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnosticsConfig {
    /// Record diagnostics every this many steps.
    #[serde(default = "default_stride")]
    pub stride: usize,
    /// Window for the linear growth fit; defaults to `[0, t_end / 2]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit_window: Option<[f64; 2]>,
}

impl Default for DiagnosticsConfig {
    fn default() -> Self {
        DiagnosticsConfig {
            stride: default_stride(),
            fit_window: None,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub nu_min: f64,
    pub nu_max: f64,
    /// Number of grid points in `[nu_min, nu_max]`, endpoints included.
    #[serde(default = "default_sweep_steps")]
    pub steps: usize,
    /// Golden-section refinement tolerance on `nu`; no refinement if absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refine_tol: Option<f64>,
    /// Time window the objective averages over; defaults to the full run.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<[f64; 2]>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub grid: GridConfig,
    pub model: ModelConfig,
    pub initial: InitialConfig,
    pub time: TimeConfig,
    #[serde(default)]
    pub reference: ReferenceConfig,
    #[serde(default)]
    pub diagnostics: DiagnosticsConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
}

/// A validated scenario with every numerical choice pinned down.
pub struct ResolvedScenario {
    /// The configuration with defaults and the resolved `dt` materialized.
    pub config: ScenarioConfig,
    pub grid: Grid,
    pub model: ModelSpec,
    pub initial: RealField,
    pub reference: ResolvedReference,
    pub dt: f64,
    /// Canonical serialized form of `config`.
    pub canonical_toml: String,
    /// SHA-256 (hex) of `canonical_toml`.
    pub sha256: String,
}

pub enum ResolvedReference {
    None,
    Analytic(AnalyticProfile),
    Simulated(ModelSpec),
}

/// Largest `n` with `t_end / n >= dt_hint`, nudged so that near-integer
/// ratios stay integer; returns the adjusted `dt = t_end / n`.
fn exact_divide(t_end: f64, dt_hint: f64) -> f64 {
    if t_end == 0.0 {
        return dt_hint;
    }
    let ratio = t_end / dt_hint;
    let rounded = ratio.round();
    let n = if (ratio - rounded).abs() <= 1e-9 * ratio.max(1.0) && rounded >= 1.0 {
        rounded
    } else {
        ratio.ceil().max(1.0)
    };
    t_end / n
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(format!("config parse error: {e}")))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        toml::from_str(&text).map_err(|source| Error::TomlParse {
            path: path.to_path_buf(),
            source: Box::new(source),
        })
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Serialize(e.to_string()))
    }

    pub fn resolve(&self) -> Result<ResolvedScenario> {
        let grid = Grid::new(self.grid.half_width, self.grid.points)?;
        let nl = PolynomialNonlinearity::new(self.model.a.clone())?;
        let model = ModelSpec::new(nl, self.model.nu)?;
        let initial = self.initial.build(&grid)?;

        if !(self.time.t_end.is_finite() && self.time.t_end >= 0.0) {
            return Err(Error::Config(format!(
                "t_end must be finite and nonnegative, got {}",
                self.time.t_end
            )));
        }
        let dt_hint = match self.time.dt {
            Some(dt) => {
                if !(dt.is_finite() && dt > 0.0) {
                    return Err(Error::Config(format!("dt must be positive, got {dt}")));
                }
                dt
            }
            None => {
                let stable = cfl_dt(&model, &initial);
                let mut dt = 0.05f64.min(0.5 * stable);
                if !(dt.is_finite() && dt > 0.0) {
                    dt = 0.05;
                }
                dt
            }
        };
        let dt = exact_divide(self.time.t_end, dt_hint);

        if self.diagnostics.stride == 0 {
            return Err(Error::Config(
                "diagnostics stride must be at least 1".into(),
            ));
        }
        if let Some(w) = self.diagnostics.fit_window {
            if !(w[0].is_finite() && w[1].is_finite() && w[0] < w[1]) {
                return Err(Error::Config(format!(
                    "fit window must be an increasing pair, got [{}, {}]",
                    w[0], w[1]
                )));
            }
        }

        let reference = match &self.reference {
            ReferenceConfig::None => ResolvedReference::None,
            ReferenceConfig::Analytic { profile } => {
                let p = profile.analytic_profile().ok_or_else(|| {
                    Error::Config(
                        "analytic references need a single-soliton profile; \
                         a two-soliton state has no closed-form evolution"
                            .into(),
                    )
                })?;
                // Validate the parameters now rather than mid-run.
                p.sample(&grid, 0.0)?;
                ResolvedReference::Analytic(p)
            }
            ReferenceConfig::Simulated { a, nu } => {
                let nl = PolynomialNonlinearity::new(a.clone())?;
                ResolvedReference::Simulated(ModelSpec::new(nl, *nu)?)
            }
        };

        if let Some(sweep) = &self.sweep {
            if !(sweep.nu_min.is_finite() && sweep.nu_max.is_finite())
                || sweep.nu_min <= 0.0
                || sweep.nu_min >= sweep.nu_max
                || sweep.nu_max > 1.0
            {
                return Err(Error::Config(format!(
                    "sweep range must satisfy 0 < nu_min < nu_max <= 1, got [{}, {}]",
                    sweep.nu_min, sweep.nu_max
                )));
            }
            if sweep.steps < 2 {
                return Err(Error::Config("sweep needs at least 2 grid points".into()));
            }
            if let Some(tol) = sweep.refine_tol {
                if !(tol.is_finite() && tol > 0.0) {
                    return Err(Error::Config(format!(
                        "sweep refinement tolerance must be positive, got {tol}"
                    )));
                }
            }
            if let Some(w) = sweep.window {
                if !(w[0].is_finite() && w[1].is_finite() && 0.0 <= w[0] && w[0] < w[1]) {
                    return Err(Error::Config(format!(
                        "sweep window must be an increasing pair of nonnegative times, \
                         got [{}, {}]",
                        w[0], w[1]
                    )));
                }
            }
            if self.initial.speed_and_offset().is_none() {
                return Err(Error::Config(
                    "sweeps compare against a slow-scale soliton, so the datum \
                     must be a single soliton"
                        .into(),
                ));
            }
        }

        let mut config = self.clone();
        config.time.dt = Some(dt);
        let canonical_toml = config.to_toml_string()?;
        let mut hasher = Sha256::new();
        hasher.update(canonical_toml.as_bytes());
        let sha256 = hex::encode(hasher.finalize());

        Ok(ResolvedScenario {
            config,
            grid,
            model,
            initial,
            reference,
            dt,
            canonical_toml,
            sha256,
        })
    }
}
