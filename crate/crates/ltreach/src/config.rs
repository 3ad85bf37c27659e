// Copyright 2026 The ltreach Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Scenario files.
//!
//! Scenarios are TOML documents. Key names are fixed; every table except
//! `model`, `initial_state`, `spacecraft` and `horizon` is optional. A parsed
//! [`ScenarioConfig`] is checked and converted to model units by
//! [`ScenarioConfig::resolve`].
//!
//! ```toml
//! name = "earth_mars_200d"
//!
//! [model]
//! kind = "two_body"            # or "cr3bp" (mu, l_star, t_star, m_star optional)
//!
//! [initial_state]
//! units = "dimensional"        # km and km/s; "nondimensional" for cr3bp only
//! r = [-140699693.0, -51614428.0, 980.0]
//! v = [9.774596, -28.07828, 4.337725e-4]
//!
//! [spacecraft]
//! t_max = 0.5                  # N
//! isp = 3000.0                 # s
//! m0 = 1000.0                  # kg
//!
//! [horizon]
//! total = 200.0                # or an array, one run per entry
//! unit = "days"                # seconds | hours | days | nondimensional
//! dt = 1.0                     # exactly one of dt / stages, same unit as total
//!
//! [sampling]
//! samples = 5000
//! seed = 2007
//! ```

use std::path::{Path, PathBuf};

use ltreach_core::boundary::{EllipsoidSpec, ImpulseSpec};
use ltreach_core::dynamics::MU_SUN;
use ltreach_core::integrator::{IntegratorConfig, Method};
use ltreach_core::{
    BoundarySpec, Cr3bpModel, Model, Propulsion, ReachConfig, SpacecraftParams, StateVec, TwoBodyModel, Vec3,
};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub name: Option<String>,
    pub model: ModelConfig,
    pub initial_state: InitialStateConfig,
    pub spacecraft: SpacecraftConfig,
    pub horizon: HorizonConfig,
    #[serde(default)]
    pub sampling: SamplingConfig,
    #[serde(default)]
    pub boundary: BoundaryConfig,
    #[serde(default)]
    pub integrator: IntegratorSection,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub manifolds: Option<ManifoldConfig>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    TwoBody,
    Cr3bp,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub kind: ModelKind,
    /// km³/s² for two-body, mass ratio for cr3bp.
    #[serde(default)]
    pub mu: Option<f64>,
    #[serde(default)]
    pub l_star: Option<f64>,
    #[serde(default)]
    pub t_star: Option<f64>,
    #[serde(default)]
    pub m_star: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateUnits {
    Dimensional,
    Nondimensional,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialStateConfig {
    pub units: StateUnits,
    pub r: [f64; 3],
    pub v: [f64; 3],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpacecraftConfig {
    /// Newtons.
    pub t_max: f64,
    /// Seconds.
    pub isp: f64,
    /// Kilograms.
    pub m0: f64,
    /// m/s²; standard gravity when absent.
    #[serde(default)]
    pub g0: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeUnit {
    Seconds,
    Hours,
    Days,
    Nondimensional,
}

impl TimeUnit {
    fn seconds_per_unit(self) -> Option<f64> {
        match self {
            TimeUnit::Seconds => Some(1.0),
            TimeUnit::Hours => Some(3600.0),
            TimeUnit::Days => Some(86400.0),
            TimeUnit::Nondimensional => None,
        }
    }

    fn suffix(self) -> &'static str {
        match self {
            TimeUnit::Seconds => "s",
            TimeUnit::Hours => "h",
            TimeUnit::Days => "d",
            TimeUnit::Nondimensional => "tu",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany {
    One(f64),
    Many(Vec<f64>),
}

impl OneOrMany {
    pub fn values(&self) -> Vec<f64> {
        match self {
            OneOrMany::One(x) => vec![*x],
            OneOrMany::Many(v) => v.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HorizonConfig {
    pub total: OneOrMany,
    pub unit: TimeUnit,
    #[serde(default)]
    pub stages: Option<usize>,
    #[serde(default)]
    pub dt: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SamplingConfig {
    pub samples: usize,
    pub seed: u64,
    pub max_failure_fraction: f64,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        let d = ReachConfig::default();
        SamplingConfig {
            samples: d.samples,
            seed: d.seed,
            max_failure_fraction: d.max_failure_fraction,
        }
    }
}

/// Shape matrices are given by their upper triangles
/// `[e11, e12, e13, e22, e23, e33]`; radii and `dv_max` use the units of
/// `initial_state`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundaryConfig {
    #[serde(default)]
    pub ellipsoid: Option<EllipsoidConfig>,
    #[serde(default)]
    pub impulse: Option<ImpulseConfig>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EllipsoidConfig {
    pub e_r: [f64; 6],
    pub e_v: [f64; 6],
    pub r_ref: f64,
    pub v_ref: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImpulseConfig {
    pub dv_max: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodName {
    Dp54,
    Rk4,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IntegratorSection {
    pub method: MethodName,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub substeps: usize,
    pub max_steps: usize,
}

impl Default for IntegratorSection {
    fn default() -> Self {
        let d = IntegratorConfig::default();
        IntegratorSection {
            method: MethodName::Dp54,
            rel_tol: d.rel_tol,
            abs_tol: d.abs_tol,
            substeps: d.substeps,
            max_steps: d.max_steps,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: PathBuf,
    /// Write every stage boundary instead of only the endpoints.
    pub history: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: PathBuf::from("out"),
            history: false,
        }
    }
}

/// Periodic-orbit manifold settings; the orbit's initial state is
/// `initial_state`. `period` and `horizon` use `unit`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifoldConfig {
    pub period: f64,
    pub horizon: f64,
    pub unit: TimeUnit,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "default_fixed_points")]
    pub n_fixed_points: usize,
    #[serde(default = "default_segments")]
    pub segments: usize,
    /// Re-converge the orbit by symmetric single shooting before use.
    #[serde(default)]
    pub correct: bool,
}

fn default_epsilon() -> f64 {
    ltreach_core::manifolds::DEFAULT_EPSILON
}

fn default_fixed_points() -> usize {
    ltreach_core::manifolds::DEFAULT_FIXED_POINTS
}

fn default_segments() -> usize {
    200
}

/// Command-line values that replace config entries before validation.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub output_dir: Option<PathBuf>,
    pub epsilon: Option<f64>,
}

/// One horizon of a scenario, in model time units.
#[derive(Clone, Debug, PartialEq)]
pub struct Horizon {
    /// Subdirectory name when a scenario has several horizons.
    pub label: String,
    pub total: f64,
    pub stages: usize,
    pub dt: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ManifoldSettings {
    pub period: f64,
    pub horizon: f64,
    pub epsilon: f64,
    pub n_fixed_points: usize,
    pub segments: usize,
    pub correct: bool,
}

/// A validated scenario expressed in the units of its model.
#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub model: Model,
    pub x0: StateVec,
    pub spacecraft: SpacecraftParams,
    pub propulsion: Propulsion,
    pub horizons: Vec<Horizon>,
    /// `horizon.total` was an array.
    pub multi_horizon: bool,
    pub reach: ReachConfig,
    pub output_dir: PathBuf,
    pub manifolds: Option<ManifoldSettings>,
    /// SHA-256 of the effective configuration.
    pub config_hash: String,
}

fn positive(key: &str, x: f64) -> CliResult<f64> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(CliError::config(key, format!("must be positive and finite, got {x}")))
    }
}

fn finite3(key: &str, x: [f64; 3]) -> CliResult<Vec3> {
    if x.iter().all(|c| c.is_finite()) {
        Ok(Vec3::from(x))
    } else {
        Err(CliError::config(key, "components must be finite"))
    }
}

fn format_number(x: f64) -> String {
    format!("{x}")
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str, path: &Path) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    }

    pub fn from_path(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml_str(&text, path)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(seed) = o.seed {
            self.sampling.seed = seed;
        }
        if let Some(n) = o.samples {
            self.sampling.samples = n;
        }
        if let Some(dir) = &o.output_dir {
            self.output.dir = dir.clone();
        }
        if let (Some(eps), Some(m)) = (o.epsilon, self.manifolds.as_mut()) {
            m.epsilon = eps;
        }
    }

    /// Hex SHA-256 of the canonical JSON rendering of this config.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("config is always serializable");
        format!("{:x}", Sha256::digest(json))
    }

    fn build_model(&self) -> CliResult<Model> {
        let m = &self.model;
        match m.kind {
            ModelKind::TwoBody => {
                for (key, v) in [("model.l_star", m.l_star), ("model.t_star", m.t_star), ("model.m_star", m.m_star)] {
                    if v.is_some() {
                        return Err(CliError::config(key, "only meaningful for the cr3bp model"));
                    }
                }
                let mu = positive("model.mu", m.mu.unwrap_or(MU_SUN))?;
                Ok(Model::TwoBody(TwoBodyModel::new(mu)?))
            }
            ModelKind::Cr3bp => {
                let d = Cr3bpModel::earth_moon();
                let mu = m.mu.unwrap_or(d.mu);
                if !(mu > 0.0 && mu <= 0.5) {
                    return Err(CliError::config("model.mu", format!("mass ratio must lie in (0, 0.5], got {mu}")));
                }
                let l = positive("model.l_star", m.l_star.unwrap_or(d.l_star))?;
                let t = positive("model.t_star", m.t_star.unwrap_or(d.t_star))?;
                let ms = positive("model.m_star", m.m_star.unwrap_or(d.m_star))?;
                Ok(Model::Cr3bp(Cr3bpModel::new(mu, l, t, ms)?))
            }
        }
    }

    /// Seconds, hours or days to model time.
    fn model_time(&self, model: &Model, key: &str, value: f64, unit: TimeUnit) -> CliResult<f64> {
        let value = positive(key, value)?;
        match (model, unit.seconds_per_unit()) {
            (Model::TwoBody(_), Some(s)) => Ok(value * s),
            (Model::TwoBody(_), None) => Err(CliError::config(
                key.rsplit_once('.').map_or(key.to_string(), |(t, _)| format!("{t}.unit")),
                "nondimensional time requires the cr3bp model",
            )),
            (Model::Cr3bp(m), Some(s)) => Ok(m.seconds_to_time(value * s)),
            (Model::Cr3bp(_), None) => Ok(value),
        }
    }

    fn horizons(&self, model: &Model) -> CliResult<Vec<Horizon>> {
        let h = &self.horizon;
        let totals = h.total.values();
        if totals.is_empty() {
            return Err(CliError::config("horizon.total", "needs at least one value"));
        }
        match (h.stages, h.dt) {
            (Some(_), Some(_)) | (None, None) => {
                return Err(CliError::config("horizon", "specify exactly one of `stages` and `dt`"));
            }
            (Some(0), None) => return Err(CliError::config("horizon.stages", "must be at least 1")),
            _ => {}
        }
        totals
            .iter()
            .map(|&raw| {
                let total = self.model_time(model, "horizon.total", raw, h.unit)?;
                let (stages, dt) = match (h.stages, h.dt) {
                    (Some(n), None) => (n, total / n as f64),
                    (None, Some(raw_dt)) => {
                        let dt = self.model_time(model, "horizon.dt", raw_dt, h.unit)?;
                        let n = (total / dt).round();
                        if n < 1.0 || (n * dt - total).abs() > 1e-9 * total {
                            return Err(CliError::config(
                                "horizon.dt",
                                format!("{raw_dt} does not divide the horizon {raw} into whole stages"),
                            ));
                        }
                        (n as usize, dt)
                    }
                    _ => unreachable!("checked above"),
                };
                Ok(Horizon {
                    label: format!("{}{}", format_number(raw), h.unit.suffix()),
                    total,
                    stages,
                    dt,
                })
            })
            .collect()
    }

    fn initial_state(&self, model: &Model) -> CliResult<StateVec> {
        let s = &self.initial_state;
        let r = finite3("initial_state.r", s.r)?;
        let v = finite3("initial_state.v", s.v)?;
        let x = StateVec::new(r, v, model.frame())?;
        let x = match (model, s.units) {
            (Model::TwoBody(_), StateUnits::Dimensional) => x,
            (Model::TwoBody(_), StateUnits::Nondimensional) => {
                return Err(CliError::config(
                    "initial_state.units",
                    "the two-body model takes km and km/s (`dimensional`)",
                ))
            }
            (Model::Cr3bp(m), StateUnits::Dimensional) => m.nondimensionalize_state(&x),
            (Model::Cr3bp(_), StateUnits::Nondimensional) => x,
        };
        model
            .check_state(&x)
            .map_err(|e| CliError::config("initial_state.r", e.to_string()))?;
        Ok(x)
    }

    /// Length and speed scale factors from config units to model units.
    fn boundary_scales(&self, model: &Model) -> (f64, f64) {
        match (model, self.initial_state.units) {
            (Model::Cr3bp(m), StateUnits::Dimensional) => (1.0 / m.l_star, 1.0 / m.velocity_unit()),
            _ => (1.0, 1.0),
        }
    }

    fn boundary(&self, model: &Model) -> CliResult<BoundarySpec> {
        let (len, speed) = self.boundary_scales(model);
        let ellipsoid = match &self.boundary.ellipsoid {
            None => None,
            Some(e) => {
                positive("boundary.ellipsoid.r_ref", e.r_ref)?;
                positive("boundary.ellipsoid.v_ref", e.v_ref)?;
                Some(
                    EllipsoidSpec::from_upper(e.e_r, e.e_v, e.r_ref * len, e.v_ref * speed)
                        .map_err(|err| CliError::config("boundary.ellipsoid", err.to_string()))?,
                )
            }
        };
        let impulse = match &self.boundary.impulse {
            None => None,
            Some(i) => Some(
                ImpulseSpec::new(i.dv_max * speed)
                    .map_err(|err| CliError::config("boundary.impulse.dv_max", err.to_string()))?,
            ),
        };
        Ok(BoundarySpec { ellipsoid, impulse })
    }

    fn integrator(&self) -> CliResult<IntegratorConfig> {
        let i = &self.integrator;
        let cfg = IntegratorConfig {
            method: match i.method {
                MethodName::Dp54 => Method::Dp54,
                MethodName::Rk4 => Method::Rk4,
            },
            rel_tol: i.rel_tol,
            abs_tol: i.abs_tol,
            substeps: i.substeps,
            max_steps: i.max_steps,
        };
        cfg.validate().map_err(|e| CliError::config("integrator", e.to_string()))?;
        Ok(cfg)
    }

    fn manifold_settings(&self, model: &Model) -> CliResult<Option<ManifoldSettings>> {
        let Some(m) = &self.manifolds else {
            return Ok(None);
        };
        if !model.is_cr3bp() {
            return Err(CliError::config("manifolds", "manifolds require the cr3bp model"));
        }
        if !(m.epsilon >= 0.0 && m.epsilon.is_finite()) {
            return Err(CliError::config("manifolds.epsilon", "must be nonnegative"));
        }
        if m.n_fixed_points == 0 {
            return Err(CliError::config("manifolds.n_fixed_points", "must be at least 1"));
        }
        if m.segments == 0 {
            return Err(CliError::config("manifolds.segments", "must be at least 1"));
        }
        let horizon = if m.horizon == 0.0 {
            0.0
        } else {
            self.model_time(model, "manifolds.horizon", m.horizon, m.unit)?
        };
        Ok(Some(ManifoldSettings {
            period: self.model_time(model, "manifolds.period", m.period, m.unit)?,
            horizon,
            epsilon: m.epsilon,
            n_fixed_points: m.n_fixed_points,
            segments: m.segments,
            correct: m.correct,
        }))
    }

    /// Validates every field and converts the scenario to model units.
    pub fn resolve(&self) -> CliResult<Scenario> {
        let model = self.build_model()?;
        let sc = &self.spacecraft;
        positive("spacecraft.t_max", sc.t_max)?;
        positive("spacecraft.isp", sc.isp)?;
        positive("spacecraft.m0", sc.m0)?;
        let g0 = positive("spacecraft.g0", sc.g0.unwrap_or(ltreach_core::dynamics::STANDARD_GRAVITY))?;
        let spacecraft = SpacecraftParams::with_g0(sc.t_max, sc.isp, sc.m0, g0)?;
        let propulsion = model.propulsion(&spacecraft);
        let x0 = self.initial_state(&model)?;
        let horizons = self.horizons(&model)?;
        for h in &horizons {
            propulsion
                .mass_profile(0.0)
                .check_horizon(h.total)
                .map_err(|_| CliError::config("horizon.total", "propellant runs out before the horizon"))?;
        }
        let sampling = &self.sampling;
        if sampling.samples == 0 {
            return Err(CliError::config("sampling.samples", "must be at least 1"));
        }
        if !(0.0..=1.0).contains(&sampling.max_failure_fraction) {
            return Err(CliError::config("sampling.max_failure_fraction", "must lie in [0, 1]"));
        }
        let reach = ReachConfig {
            samples: sampling.samples,
            seed: sampling.seed,
            boundary: self.boundary(&model)?,
            integrator: self.integrator()?,
            keep_history: self.output.history,
            max_failure_fraction: sampling.max_failure_fraction,
        };
        let manifolds = self.manifold_settings(&model)?;
        Ok(Scenario {
            name: self.name.clone().unwrap_or_else(|| "scenario".to_string()),
            model,
            x0,
            spacecraft,
            propulsion,
            multi_horizon: matches!(self.horizon.total, OneOrMany::Many(_)),
            horizons,
            reach,
            output_dir: self.output.dir.clone(),
            manifolds,
            config_hash: self.hash(),
        })
    }
}

/// Reads, overrides and resolves a scenario file.
pub fn load_scenario(path: &Path, overrides: &Overrides) -> CliResult<(ScenarioConfig, Scenario)> {
    let mut cfg = ScenarioConfig::from_path(path)?;
    cfg.apply(overrides);
    let scenario = cfg.resolve()?;
    Ok((cfg, scenario))
}
