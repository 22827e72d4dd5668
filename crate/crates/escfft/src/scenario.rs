//! Scenario files: the strict JSON schema the CLI consumes and its
//! resolution into a runnable [`sim::Scenario`].
//!
//! Unknown keys are rejected everywhere. Defaults exist only where the
//! toolkit declares them (dither phase, gradient method, exchanger-network
//! parameters, spectrogram stride, cost scale, the gain-bound slack `d`),
//! and every default actually applied is reported so run metadata can
//! record it.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::controller::Sense;
use crate::design::{MapBounds, DesignError};
use crate::dither::{DitherSet, DitherSpec};
use crate::freq::DitherFreq;
use crate::gradient::GradientMethod;
use crate::plant::{
    Disturbance, ExchangerBranch, FlowType, HeatExchangerNetwork, PlantModel, QuadraticMap,
    Turbine, WindFarm,
};
use crate::sim::{NoiseSpec, Scenario, WindowChoice};

/// Toolkit defaults for exchanger-network parameters that scenarios may
/// omit. These are toolkit choices, not reference values.
pub mod defaults {
    pub const COLD_INLET_C: f64 = 60.0;
    pub const COLD_FLOW_KG_S: f64 = 100.0;
    pub const HEAT_CAPACITY_KJ_KG_C: f64 = 4.2;
    pub const BRANCH_UA_W_C: f64 = 5.0e4;
    pub const BRANCH_HOT_FLOW_KG_S: f64 = 15.0;
}

#[derive(Debug)]
pub enum ScenarioError {
    Io(std::io::Error),
    /// JSON syntax or schema violation; includes line/column context.
    Parse(String),
    /// Structurally valid but semantically inconsistent.
    Invalid(String),
}

impl fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScenarioError::Io(e) => write!(f, "cannot read scenario: {e}"),
            ScenarioError::Parse(msg) => write!(f, "scenario parse error: {msg}"),
            ScenarioError::Invalid(msg) => write!(f, "invalid scenario: {msg}"),
        }
    }
}

impl std::error::Error for ScenarioError {}

impl From<DesignError> for ScenarioError {
    fn from(e: DesignError) -> Self {
        ScenarioError::Invalid(e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub plant: PlantConfig,
    pub dithers: Vec<DitherConfig>,
    pub controller: ControllerSection,
    pub run: RunSection,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub map_bounds: Option<MapBoundsConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "params", rename_all = "snake_case", deny_unknown_fields)]
pub enum PlantConfig {
    Quadratic(QuadraticConfig),
    WindFarm(WindFarmConfig),
    HeatExchanger(HeatExchangerConfig),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadraticConfig {
    pub curvature: f64,
    pub optimum: f64,
    pub offset: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindFarmConfig {
    pub turbines: Vec<TurbineConfig>,
    pub roughness: f64,
    pub free_stream: f64,
    pub air_density: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TurbineConfig {
    pub x: f64,
    pub y: f64,
    pub diameter: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeatExchangerConfig {
    pub branches: Vec<BranchConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cold_inlet: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cold_flow: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub heat_capacity: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub flow_type: Option<FlowTypeConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BranchConfig {
    pub hot_inlet_temp: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ua: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hot_flow: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowTypeConfig {
    CounterCurrent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DitherConfig {
    pub amplitude: f64,
    /// Exact rational in cycles per sample, written `p/q`.
    pub frequency: DitherFreq,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phase: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControllerSection {
    pub u0: Vec<f64>,
    pub gains: Vec<f64>,
    pub sense: Sense,
    #[serde(rename = "box", skip_serializing_if = "Option::is_none")]
    pub input_box: Option<Vec<[f64; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<GradientMethod>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub steps: u64,
    /// Window length: a positive integer or the string `"auto"` for the
    /// smallest leakage-free length.
    #[serde(rename = "N")]
    pub window: WindowField,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub noise: Option<NoiseConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub disturbances: Option<Vec<DisturbanceConfig>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectrogram_stride: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cost_scale: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WindowField {
    Fixed(u64),
    Keyword(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    pub std: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DisturbanceConfig {
    pub step: u64,
    pub path: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapBoundsConfig {
    pub alpha1: f64,
    pub alpha2: f64,
    /// Scalar (applied to every channel) or one bound per channel.
    pub hessian_bound: HessianField,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum HessianField {
    Uniform(f64),
    PerChannel(Vec<f64>),
}

/// A scenario ready to run, plus the bookkeeping the CLI records.
#[derive(Debug, Clone)]
pub struct ResolvedScenario {
    pub scenario: Scenario,
    pub map_bounds: Option<MapBounds>,
    /// Resolved window length.
    pub n_points: u64,
    /// Resolved frame stride.
    pub spectrogram_stride: u64,
    pub defaults_applied: Vec<String>,
}

impl ScenarioFile {
    pub fn from_json(text: &str) -> Result<Self, ScenarioError> {
        serde_json::from_str(text).map_err(|e| ScenarioError::Parse(e.to_string()))
    }

    pub fn from_path(path: &Path) -> Result<Self, ScenarioError> {
        let text = std::fs::read_to_string(path).map_err(ScenarioError::Io)?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serialization cannot fail")
    }

    /// Cross-check every section and build the runnable scenario.
    pub fn resolve(&self) -> Result<ResolvedScenario, ScenarioError> {
        let mut defaults = Vec::new();

        if self.dithers.is_empty() {
            return Err(ScenarioError::Invalid(
                "at least one dither channel is required".into(),
            ));
        }
        let mut channels = Vec::with_capacity(self.dithers.len());
        for (i, d) in self.dithers.iter().enumerate() {
            let phase = match d.phase {
                Some(p) => p,
                None => {
                    defaults.push(format!("dithers[{i}].phase = 0"));
                    0.0
                }
            };
            let spec = DitherSpec::with_phase(d.amplitude, d.frequency, phase)
                .map_err(|e| ScenarioError::Invalid(format!("dithers[{i}]: {e}")))?;
            channels.push(spec);
        }
        let dithers = DitherSet::new(channels)
            .map_err(|e| ScenarioError::Invalid(e.to_string()))?;

        let plant = self.resolve_plant(&mut defaults)?;
        if plant.input_dim() != dithers.len() {
            return Err(ScenarioError::Invalid(format!(
                "plant expects {} inputs but {} dither channels are configured",
                plant.input_dim(),
                dithers.len()
            )));
        }

        let n_channels = dithers.len();
        if self.controller.u0.len() != n_channels {
            return Err(ScenarioError::Invalid(format!(
                "controller.u0 has {} entries for {} dither channels",
                self.controller.u0.len(),
                n_channels
            )));
        }
        if self.controller.gains.len() != n_channels {
            return Err(ScenarioError::Invalid(format!(
                "controller.gains has {} entries for {} dither channels",
                self.controller.gains.len(),
                n_channels
            )));
        }
        let input_box = match &self.controller.input_box {
            None => None,
            Some(b) => {
                if b.len() != n_channels {
                    return Err(ScenarioError::Invalid(format!(
                        "controller.box has {} entries for {} dither channels",
                        b.len(),
                        n_channels
                    )));
                }
                Some(b.iter().map(|&[lo, hi]| (lo, hi)).collect())
            }
        };
        let method = match self.controller.method {
            Some(m) => m,
            None => {
                defaults.push("controller.method = amplitude_phase_sign".into());
                GradientMethod::AmplitudePhaseSign
            }
        };

        let window = match &self.run.window {
            WindowField::Fixed(n) => {
                if *n < 2 {
                    return Err(ScenarioError::Invalid(format!(
                        "run.N must be at least 2, got {n}"
                    )));
                }
                for (i, d) in dithers.channels().iter().enumerate() {
                    if d.frequency().bin_index(*n as usize).is_none() {
                        return Err(ScenarioError::Invalid(format!(
                            "dithers[{i}] frequency {} is off-bin for N = {n}; \
                             use \"auto\" or a multiple of its denominator",
                            d.frequency()
                        )));
                    }
                }
                WindowChoice::Fixed(*n)
            }
            WindowField::Keyword(k) if k == "auto" => WindowChoice::Auto,
            WindowField::Keyword(k) => {
                return Err(ScenarioError::Invalid(format!(
                    "run.N must be an integer or \"auto\", got \"{k}\""
                )));
            }
        };

        let disturbances: Vec<Disturbance> = match &self.run.disturbances {
            Some(list) => list
                .iter()
                .map(|d| Disturbance {
                    step: d.step,
                    path: d.path.clone(),
                    value: d.value,
                })
                .collect(),
            None => {
                defaults.push("run.disturbances = []".into());
                Vec::new()
            }
        };
        let cost_scale = match self.run.cost_scale {
            Some(s) => s,
            None => {
                defaults.push("run.cost_scale = 1".into());
                1.0
            }
        };

        let scenario = Scenario {
            plant,
            dithers,
            initial_inputs: self.controller.u0.clone(),
            gains: self.controller.gains.clone(),
            sense: self.controller.sense,
            input_box,
            method,
            window,
            total_steps: self.run.steps,
            noise: self.run.noise.as_ref().map(|n| NoiseSpec {
                std: n.std,
                seed: n.seed,
            }),
            disturbances,
            spectrogram_stride: self.run.spectrogram_stride,
            cost_scale,
        };

        let n_points = scenario.resolve_window()?;
        let spectrogram_stride = scenario.resolve_stride(n_points);
        if self.run.spectrogram_stride.is_none() {
            defaults.push(format!(
                "run.spectrogram_stride = N/4 ({spectrogram_stride})"
            ));
        }

        let map_bounds = match &self.map_bounds {
            None => None,
            Some(mb) => {
                let hessian = match &mb.hessian_bound {
                    HessianField::Uniform(h) => vec![*h; n_channels],
                    HessianField::PerChannel(v) => {
                        if v.len() != n_channels {
                            return Err(ScenarioError::Invalid(format!(
                                "map_bounds.hessian_bound has {} entries for {} channels",
                                v.len(),
                                n_channels
                            )));
                        }
                        v.clone()
                    }
                };
                let d = match mb.d {
                    Some(d) => d,
                    None => {
                        defaults.push(format!("map_bounds.d = {}", MapBounds::DEFAULT_D));
                        MapBounds::DEFAULT_D
                    }
                };
                Some(
                    MapBounds::new(mb.alpha1, mb.alpha2, hessian, d)
                        .map_err(|e| ScenarioError::Invalid(e.to_string()))?,
                )
            }
        };

        Ok(ResolvedScenario {
            scenario,
            map_bounds,
            n_points,
            spectrogram_stride,
            defaults_applied: defaults,
        })
    }

    fn resolve_plant(&self, defaults: &mut Vec<String>) -> Result<PlantModel, ScenarioError> {
        match &self.plant {
            PlantConfig::Quadratic(q) => Ok(PlantModel::Quadratic(QuadraticMap {
                curvature: q.curvature,
                optimum: q.optimum,
                offset: q.offset,
            })),
            PlantConfig::WindFarm(w) => {
                let turbines = w
                    .turbines
                    .iter()
                    .map(|t| Turbine {
                        x: t.x,
                        y: t.y,
                        diameter: t.diameter,
                    })
                    .collect();
                let farm = WindFarm::new(turbines, w.roughness, w.free_stream, w.air_density)
                    .map_err(|e| ScenarioError::Invalid(e.to_string()))?;
                Ok(PlantModel::WindFarm(farm))
            }
            PlantConfig::HeatExchanger(h) => {
                let mut branches = Vec::with_capacity(h.branches.len());
                for (i, b) in h.branches.iter().enumerate() {
                    let ua = match b.ua {
                        Some(v) => v,
                        None => {
                            defaults.push(format!(
                                "plant.branches[{i}].ua = {}",
                                defaults::BRANCH_UA_W_C
                            ));
                            defaults::BRANCH_UA_W_C
                        }
                    };
                    let hot_flow = match b.hot_flow {
                        Some(v) => v,
                        None => {
                            defaults.push(format!(
                                "plant.branches[{i}].hot_flow = {}",
                                defaults::BRANCH_HOT_FLOW_KG_S
                            ));
                            defaults::BRANCH_HOT_FLOW_KG_S
                        }
                    };
                    branches.push(ExchangerBranch {
                        ua,
                        hot_inlet_temp: b.hot_inlet_temp,
                        hot_flow,
                    });
                }
                let cold_inlet = h.cold_inlet.unwrap_or_else(|| {
                    defaults.push(format!("plant.cold_inlet = {}", defaults::COLD_INLET_C));
                    defaults::COLD_INLET_C
                });
                let cold_flow = h.cold_flow.unwrap_or_else(|| {
                    defaults.push(format!("plant.cold_flow = {}", defaults::COLD_FLOW_KG_S));
                    defaults::COLD_FLOW_KG_S
                });
                let heat_capacity = h.heat_capacity.unwrap_or_else(|| {
                    defaults.push(format!(
                        "plant.heat_capacity = {}",
                        defaults::HEAT_CAPACITY_KJ_KG_C
                    ));
                    defaults::HEAT_CAPACITY_KJ_KG_C
                });
                if h.flow_type.is_none() {
                    defaults.push("plant.flow_type = counter_current".into());
                }
                let net = HeatExchangerNetwork::new(
                    branches,
                    cold_inlet,
                    cold_flow,
                    heat_capacity,
                    FlowType::CounterCurrent,
                )
                .map_err(|e| ScenarioError::Invalid(e.to_string()))?;
                Ok(PlantModel::HeatExchanger(net))
            }
        }
    }
}
