//! Wind farm with wake interaction: expanding top-hat wakes, exact
//! circle-circle overlap, and the standard power curve in the axial
//! induction factor.
//!
//! Wind blows along +x; a turbine is waked by every turbine strictly upwind
//! of it. The wake of turbine j expands with downstream distance `dx` to
//! radius `(D_j + 2 k dx) / 2`, centered at the wake source's y coordinate.

use std::f64::consts::PI;

use super::PlantError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Turbine {
    /// Downwind coordinate in meters.
    pub x: f64,
    /// Crosswind coordinate in meters.
    pub y: f64,
    /// Rotor diameter in meters.
    pub diameter: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WindFarm {
    turbines: Vec<Turbine>,
    roughness: f64,
    free_stream: f64,
    air_density: f64,
}

impl WindFarm {
    pub fn new(
        turbines: Vec<Turbine>,
        roughness: f64,
        free_stream: f64,
        air_density: f64,
    ) -> Result<Self, PlantError> {
        if turbines.is_empty() {
            return Err(PlantError::InvalidParam("farm needs at least one turbine".into()));
        }
        for (i, t) in turbines.iter().enumerate() {
            if !t.diameter.is_finite() || t.diameter <= 0.0 {
                return Err(PlantError::InvalidParam(format!(
                    "turbine {} diameter must be positive, got {}",
                    i + 1,
                    t.diameter
                )));
            }
            if !t.x.is_finite() || !t.y.is_finite() {
                return Err(PlantError::InvalidParam(format!(
                    "turbine {} position must be finite",
                    i + 1
                )));
            }
        }
        if !roughness.is_finite() || roughness <= 0.0 {
            return Err(PlantError::InvalidParam(format!(
                "roughness must be positive, got {roughness}"
            )));
        }
        if !free_stream.is_finite() || free_stream < 0.0 {
            return Err(PlantError::InvalidParam(format!(
                "free-stream velocity must be nonnegative, got {free_stream}"
            )));
        }
        if !air_density.is_finite() || air_density <= 0.0 {
            return Err(PlantError::InvalidParam(format!(
                "air density must be positive, got {air_density}"
            )));
        }
        Ok(WindFarm {
            turbines,
            roughness,
            free_stream,
            air_density,
        })
    }

    pub fn turbines(&self) -> &[Turbine] {
        &self.turbines
    }

    pub fn roughness(&self) -> f64 {
        self.roughness
    }

    pub fn free_stream(&self) -> f64 {
        self.free_stream
    }

    pub fn air_density(&self) -> f64 {
        self.air_density
    }

    pub(super) fn set_free_stream(&mut self, v: f64) -> Result<(), PlantError> {
        if v < 0.0 {
            return Err(PlantError::InvalidParam(format!(
                "free-stream velocity must be nonnegative, got {v}"
            )));
        }
        self.free_stream = v;
        Ok(())
    }

    pub(super) fn set_roughness(&mut self, v: f64) -> Result<(), PlantError> {
        if v <= 0.0 {
            return Err(PlantError::InvalidParam(format!(
                "roughness must be positive, got {v}"
            )));
        }
        self.roughness = v;
        Ok(())
    }

    pub(super) fn set_air_density(&mut self, v: f64) -> Result<(), PlantError> {
        if v <= 0.0 {
            return Err(PlantError::InvalidParam(format!(
                "air density must be positive, got {v}"
            )));
        }
        self.air_density = v;
        Ok(())
    }

    pub(super) fn set_turbine_field(
        &mut self,
        idx: usize,
        field: &str,
        value: f64,
    ) -> Result<(), PlantError> {
        let len = self.turbines.len();
        let t = self
            .turbines
            .get_mut(idx)
            .ok_or(PlantError::BranchIndex { index: idx, len })?;
        match field {
            "x" => t.x = value,
            "y" => t.y = value,
            "diameter" => {
                if value <= 0.0 {
                    return Err(PlantError::InvalidParam(format!(
                        "diameter must be positive, got {value}"
                    )));
                }
                t.diameter = value;
            }
            _ => {
                return Err(PlantError::UnknownParamPath {
                    path: field.to_string(),
                })
            }
        }
        Ok(())
    }

    /// Fractional wind-speed deficit at turbine `i` caused by all strictly
    /// upwind turbines, saturated at full blockage.
    pub fn velocity_deficit(&self, u: &[f64], i: usize) -> f64 {
        let target = &self.turbines[i];
        let rotor_area = disk_area(target.diameter);
        let mut sum_sq = 0.0;
        for (j, source) in self.turbines.iter().enumerate() {
            if source.x >= target.x {
                continue;
            }
            let dx = target.x - source.x;
            let wake_diameter = source.diameter + 2.0 * self.roughness * dx;
            let overlap = circle_overlap_area(
                target.diameter / 2.0,
                wake_diameter / 2.0,
                (target.y - source.y).abs(),
            );
            if overlap == 0.0 {
                continue;
            }
            let decay = source.diameter / wake_diameter;
            let term = u[j] * decay * decay * (overlap / rotor_area);
            sum_sq += term * term;
        }
        (2.0 * sum_sq.sqrt()).min(1.0)
    }

    /// Wind speed seen by turbine `i` after wake losses.
    pub fn velocity_at(&self, u: &[f64], i: usize) -> f64 {
        self.free_stream * (1.0 - self.velocity_deficit(u, i))
    }

    /// Power of turbine `i` in watts.
    pub fn turbine_power(&self, u: &[f64], i: usize) -> f64 {
        let v = self.velocity_at(u, i);
        0.5 * self.air_density
            * disk_area(self.turbines[i].diameter)
            * power_coefficient(u[i])
            * v.powi(3)
    }

    /// Total farm power in watts; the measured cost for the wind-farm
    /// scenarios.
    pub fn farm_power(&self, u: &[f64]) -> f64 {
        (0..self.turbines.len())
            .map(|i| self.turbine_power(u, i))
            .sum()
    }
}

fn disk_area(diameter: f64) -> f64 {
    let r = diameter / 2.0;
    PI * r * r
}

/// Power coefficient `4 u (1 - u)^2` of the axial induction factor.
pub fn power_coefficient(u: f64) -> f64 {
    4.0 * u * (1.0 - u) * (1.0 - u)
}

/// Exact lens area of two circles with radii `r1`, `r2` whose centers are
/// `d` apart.
pub fn circle_overlap_area(r1: f64, r2: f64, d: f64) -> f64 {
    if d >= r1 + r2 {
        return 0.0;
    }
    if d <= (r1 - r2).abs() {
        let rm = r1.min(r2);
        return PI * rm * rm;
    }
    let d2 = d * d;
    let r1s = r1 * r1;
    let r2s = r2 * r2;
    let a1 = ((d2 + r1s - r2s) / (2.0 * d * r1)).clamp(-1.0, 1.0).acos();
    let a2 = ((d2 + r2s - r1s) / (2.0 * d * r2)).clamp(-1.0, 1.0).acos();
    let k = (-d + r1 + r2) * (d + r1 - r2) * (d - r1 + r2) * (d + r1 + r2);
    r1s * a1 + r2s * a2 - 0.5 * k.max(0.0).sqrt()
}
