//! Simulated plants behind a single cost-per-step interface.

use std::fmt;

mod heat_exchanger;
mod quadratic;
mod wind_farm;

pub use heat_exchanger::{
    ExchangerBranch, ExchangerOutlets, FlowType, HeatExchangerNetwork, SPLIT_FLOOR,
};
pub use quadratic::QuadraticMap;
pub use wind_farm::{circle_overlap_area, power_coefficient, Turbine, WindFarm};

#[derive(Debug, Clone, PartialEq)]
pub enum PlantError {
    DimensionMismatch { expected: usize, got: usize },
    NonFiniteInput { index: usize, value: f64 },
    InputOutOfRange { index: usize, value: f64, min: f64, max: f64 },
    /// A split ratio (including the closure split) fell below the floor.
    SplitBelowFloor { index: usize, value: f64, floor: f64 },
    /// Hot inlet not hotter than the cold inlet.
    TemperatureOrder { branch: usize },
    SolverNoConverge { branch: usize, residual: f64 },
    BranchIndex { index: usize, len: usize },
    UnknownParamPath { path: String },
    InvalidParam(String),
}

impl fmt::Display for PlantError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlantError::DimensionMismatch { expected, got } => {
                write!(f, "plant expects {expected} inputs, got {got}")
            }
            PlantError::NonFiniteInput { index, value } => {
                write!(f, "input {} is not finite: {value}", index + 1)
            }
            PlantError::InputOutOfRange {
                index,
                value,
                min,
                max,
            } => write!(
                f,
                "input {} = {value} outside the admissible range [{min}, {max}]",
                index + 1
            ),
            PlantError::SplitBelowFloor {
                index,
                value,
                floor,
            } => write!(
                f,
                "split ratio {} = {value} below the floor {floor}; split closure violated",
                index + 1
            ),
            PlantError::TemperatureOrder { branch } => write!(
                f,
                "branch {}: hot inlet must be hotter than the cold inlet",
                branch + 1
            ),
            PlantError::SolverNoConverge { branch, residual } => write!(
                f,
                "branch {}: duty solver did not converge (residual {residual:e})",
                branch + 1
            ),
            PlantError::BranchIndex { index, len } => {
                write!(f, "branch index {index} out of range for {len} branches")
            }
            PlantError::UnknownParamPath { path } => {
                write!(f, "unknown plant parameter path `{path}`")
            }
            PlantError::InvalidParam(msg) => write!(f, "invalid plant parameter: {msg}"),
        }
    }
}

impl std::error::Error for PlantError {}

/// A step-indexed plant parameter change, applied between controller steps.
#[derive(Debug, Clone, PartialEq)]
pub struct Disturbance {
    pub step: u64,
    /// Field path such as `curvature`, `free_stream`, or
    /// `branches[0].hot_inlet_temp`.
    pub path: String,
    pub value: f64,
}

/// The three simulated plants. Evaluation is a pure function of the
/// parameters and the input vector; disturbances mutate parameters between
/// steps.
#[derive(Debug, Clone, PartialEq)]
pub enum PlantModel {
    Quadratic(QuadraticMap),
    WindFarm(WindFarm),
    HeatExchanger(HeatExchangerNetwork),
}

impl PlantModel {
    /// Number of controller inputs this plant expects. The exchanger
    /// network exposes one fewer input than it has branches because the
    /// last split ratio is fixed by closure.
    pub fn input_dim(&self) -> usize {
        match self {
            PlantModel::Quadratic(_) => 1,
            PlantModel::WindFarm(w) => w.turbines().len(),
            PlantModel::HeatExchanger(h) => h.branches().len() - 1,
        }
    }

    /// One scalar cost sample for the given input vector. Units: cost units
    /// of the map for the quadratic, watts for the wind farm, degrees
    /// Celsius for the exchanger network end temperature.
    pub fn cost(&self, u: &[f64]) -> Result<f64, PlantError> {
        let expected = self.input_dim();
        if u.len() != expected {
            return Err(PlantError::DimensionMismatch {
                expected,
                got: u.len(),
            });
        }
        for (i, &x) in u.iter().enumerate() {
            if !x.is_finite() {
                return Err(PlantError::NonFiniteInput { index: i, value: x });
            }
        }
        match self {
            PlantModel::Quadratic(q) => Ok(q.cost(u[0])),
            PlantModel::WindFarm(w) => {
                for (i, &x) in u.iter().enumerate() {
                    if !(0.0..=1.0).contains(&x) {
                        return Err(PlantError::InputOutOfRange {
                            index: i,
                            value: x,
                            min: 0.0,
                            max: 1.0,
                        });
                    }
                }
                Ok(w.farm_power(u))
            }
            PlantModel::HeatExchanger(h) => h.end_temperature(u),
        }
    }

    /// Set one named parameter; see `Disturbance::path` for the grammar.
    pub fn set_param(&mut self, path: &str, value: f64) -> Result<(), PlantError> {
        if !value.is_finite() {
            return Err(PlantError::InvalidParam(format!(
                "value for `{path}` must be finite, got {value}"
            )));
        }
        match self {
            PlantModel::Quadratic(q) => match path {
                "curvature" => q.curvature = value,
                "optimum" => q.optimum = value,
                "offset" => q.offset = value,
                _ => {
                    return Err(PlantError::UnknownParamPath {
                        path: path.to_string(),
                    })
                }
            },
            PlantModel::WindFarm(w) => match path {
                "free_stream" => w.set_free_stream(value)?,
                "roughness" => w.set_roughness(value)?,
                "air_density" => w.set_air_density(value)?,
                _ => {
                    let (name, idx, field) =
                        parse_indexed(path).ok_or_else(|| PlantError::UnknownParamPath {
                            path: path.to_string(),
                        })?;
                    if name != "turbines" {
                        return Err(PlantError::UnknownParamPath {
                            path: path.to_string(),
                        });
                    }
                    w.set_turbine_field(idx, field, value).map_err(|e| match e {
                        PlantError::UnknownParamPath { .. } => PlantError::UnknownParamPath {
                            path: path.to_string(),
                        },
                        other => other,
                    })?;
                }
            },
            PlantModel::HeatExchanger(h) => match path {
                "cold_inlet" => h.set_cold_inlet(value),
                "cold_flow" => h.set_cold_flow(value)?,
                "heat_capacity" => h.set_heat_capacity(value)?,
                _ => {
                    let (name, idx, field) =
                        parse_indexed(path).ok_or_else(|| PlantError::UnknownParamPath {
                            path: path.to_string(),
                        })?;
                    if name != "branches" {
                        return Err(PlantError::UnknownParamPath {
                            path: path.to_string(),
                        });
                    }
                    h.set_branch_field(idx, field, value).map_err(|e| match e {
                        PlantError::UnknownParamPath { .. } => PlantError::UnknownParamPath {
                            path: path.to_string(),
                        },
                        other => other,
                    })?;
                }
            },
        }
        Ok(())
    }
}

/// Apply every scheduled disturbance due at `step`, in listed order.
pub fn apply_due_disturbances(
    plant: &mut PlantModel,
    schedule: &[Disturbance],
    step: u64,
) -> Result<(), PlantError> {
    for d in schedule.iter().filter(|d| d.step == step) {
        plant.set_param(&d.path, d.value)?;
    }
    Ok(())
}

/// Split `branches[3].ua` into `("branches", 3, "ua")`.
fn parse_indexed(path: &str) -> Option<(&str, usize, &str)> {
    let open = path.find('[')?;
    let close = path.find(']')?;
    if close < open {
        return None;
    }
    let name = &path[..open];
    let idx: usize = path[open + 1..close].parse().ok()?;
    let rest = &path[close + 1..];
    let field = rest.strip_prefix('.')?;
    Some((name, idx, field))
}
