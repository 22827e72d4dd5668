//! Heat exchanger network: a cold stream split across parallel
//! counter-current exchangers, mixed back together at the outlet.
//!
//! Each exchanger couples its outlet temperatures through the log-mean
//! temperature difference, approximated by the cube-root form
//! `[dT1 * dT2 * (dT1 + dT2) / 2]^(1/3)`. The resulting implicit equation is
//! solved in the duty Q by bisection on `[0, Q_pinch]`, which brackets the
//! root and keeps both temperature differences nonnegative.

use std::fmt;

use super::PlantError;

/// Smallest admissible split ratio. The cold-outlet equation divides by
/// `u_i * w_c`, so a zero split is singular.
pub const SPLIT_FLOOR: f64 = 1e-3;

const MAX_SOLVER_ITERATIONS: usize = 200;

/// Absolute duty-residual tolerance at return, in kW.
const RESIDUAL_TOL_KW: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlowType {
    CounterCurrent,
}

impl fmt::Display for FlowType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FlowType::CounterCurrent => write!(f, "counter_current"),
        }
    }
}

/// One branch: an exchanger against a dedicated hot stream.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExchangerBranch {
    /// Overall heat transfer coefficient times area, W/degC.
    pub ua: f64,
    /// Hot stream inlet temperature, degC.
    pub hot_inlet_temp: f64,
    /// Hot stream flow rate, kg/s.
    pub hot_flow: f64,
}

/// Converged outlet state of one exchanger.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExchangerOutlets {
    /// Cold stream outlet temperature, degC.
    pub cold_out: f64,
    /// Hot stream outlet temperature, degC.
    pub hot_out: f64,
    /// Transferred duty, kW.
    pub duty: f64,
    /// True when a temperature difference had to be clamped at zero during
    /// the solve (floating-point grazing of the pinch, not a model error).
    pub crossing_clamped: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeatExchangerNetwork {
    branches: Vec<ExchangerBranch>,
    cold_inlet: f64,
    cold_flow: f64,
    heat_capacity: f64,
    flow_type: FlowType,
}

impl HeatExchangerNetwork {
    pub fn new(
        branches: Vec<ExchangerBranch>,
        cold_inlet: f64,
        cold_flow: f64,
        heat_capacity: f64,
        flow_type: FlowType,
    ) -> Result<Self, PlantError> {
        if branches.len() < 2 {
            return Err(PlantError::InvalidParam(
                "network needs at least two branches".into(),
            ));
        }
        for (i, b) in branches.iter().enumerate() {
            if !b.ua.is_finite() || b.ua < 0.0 {
                return Err(PlantError::InvalidParam(format!(
                    "branch {} UA must be nonnegative, got {}",
                    i + 1,
                    b.ua
                )));
            }
            if !b.hot_flow.is_finite() || b.hot_flow <= 0.0 {
                return Err(PlantError::InvalidParam(format!(
                    "branch {} hot flow must be positive, got {}",
                    i + 1,
                    b.hot_flow
                )));
            }
            if !b.hot_inlet_temp.is_finite() {
                return Err(PlantError::InvalidParam(format!(
                    "branch {} hot inlet must be finite",
                    i + 1
                )));
            }
        }
        if !cold_flow.is_finite() || cold_flow <= 0.0 {
            return Err(PlantError::InvalidParam(format!(
                "cold flow must be positive, got {cold_flow}"
            )));
        }
        if !heat_capacity.is_finite() || heat_capacity <= 0.0 {
            return Err(PlantError::InvalidParam(format!(
                "heat capacity must be positive, got {heat_capacity}"
            )));
        }
        if !cold_inlet.is_finite() {
            return Err(PlantError::InvalidParam("cold inlet must be finite".into()));
        }
        Ok(HeatExchangerNetwork {
            branches,
            cold_inlet,
            cold_flow,
            heat_capacity,
            flow_type,
        })
    }

    pub fn branches(&self) -> &[ExchangerBranch] {
        &self.branches
    }

    pub fn cold_inlet(&self) -> f64 {
        self.cold_inlet
    }

    pub fn cold_flow(&self) -> f64 {
        self.cold_flow
    }

    pub fn heat_capacity(&self) -> f64 {
        self.heat_capacity
    }

    pub fn flow_type(&self) -> FlowType {
        self.flow_type
    }

    pub(super) fn set_cold_inlet(&mut self, v: f64) {
        self.cold_inlet = v;
    }

    pub(super) fn set_cold_flow(&mut self, v: f64) -> Result<(), PlantError> {
        if v <= 0.0 {
            return Err(PlantError::InvalidParam(format!(
                "cold flow must be positive, got {v}"
            )));
        }
        self.cold_flow = v;
        Ok(())
    }

    pub(super) fn set_heat_capacity(&mut self, v: f64) -> Result<(), PlantError> {
        if v <= 0.0 {
            return Err(PlantError::InvalidParam(format!(
                "heat capacity must be positive, got {v}"
            )));
        }
        self.heat_capacity = v;
        Ok(())
    }

    pub(super) fn set_branch_field(
        &mut self,
        idx: usize,
        field: &str,
        value: f64,
    ) -> Result<(), PlantError> {
        let len = self.branches.len();
        let b = self
            .branches
            .get_mut(idx)
            .ok_or(PlantError::BranchIndex { index: idx, len })?;
        match field {
            "ua" => {
                if value < 0.0 {
                    return Err(PlantError::InvalidParam(format!(
                        "UA must be nonnegative, got {value}"
                    )));
                }
                b.ua = value;
            }
            "hot_inlet_temp" => b.hot_inlet_temp = value,
            "hot_flow" => {
                if value <= 0.0 {
                    return Err(PlantError::InvalidParam(format!(
                        "hot flow must be positive, got {value}"
                    )));
                }
                b.hot_flow = value;
            }
            _ => {
                return Err(PlantError::UnknownParamPath {
                    path: field.to_string(),
                })
            }
        }
        Ok(())
    }

    /// Solve one branch for a given split ratio.
    ///
    /// Finds the duty Q satisfying `Q = UA * dTlm(Q)` with
    /// `T_c_out = T_c_in + Q / (u w_c c_p)` and
    /// `T_h_out = T_h_in - Q / (w_h c_p)`. Bisection on `[0, Q_pinch]`
    /// guarantees the second law: outlet temperatures stay between the two
    /// inlet temperatures.
    pub fn exchanger_outlets(
        &self,
        branch: usize,
        split: f64,
    ) -> Result<ExchangerOutlets, PlantError> {
        let b = *self
            .branches
            .get(branch)
            .ok_or(PlantError::BranchIndex {
                index: branch,
                len: self.branches.len(),
            })?;
        if !split.is_finite() || split < SPLIT_FLOOR {
            return Err(PlantError::SplitBelowFloor {
                index: branch,
                value: split,
                floor: SPLIT_FLOOR,
            });
        }
        if b.hot_inlet_temp <= self.cold_inlet {
            return Err(PlantError::TemperatureOrder { branch });
        }

        // work in kW: UA is given in W/degC, c_p in kJ/kg/degC
        let ua_kw = b.ua / 1000.0;
        let c_cold = split * self.cold_flow * self.heat_capacity; // kW/degC
        let c_hot = b.hot_flow * self.heat_capacity; // kW/degC
        let span = b.hot_inlet_temp - self.cold_inlet;
        if ua_kw == 0.0 {
            return Ok(ExchangerOutlets {
                cold_out: self.cold_inlet,
                hot_out: b.hot_inlet_temp,
                duty: 0.0,
                crossing_clamped: false,
            });
        }
        let q_pinch = c_cold.min(c_hot) * span;

        let mut clamped = false;
        let mut residual = |q: f64| -> f64 {
            let dt1 = b.hot_inlet_temp - (self.cold_inlet + q / c_cold);
            let dt2 = (b.hot_inlet_temp - q / c_hot) - self.cold_inlet;
            if dt1 < 0.0 || dt2 < 0.0 {
                clamped = true;
            }
            ua_kw * chen_lmtd(dt1, dt2) - q
        };

        // residual is strictly decreasing: positive at 0, negative at pinch
        let mut lo = 0.0_f64;
        let mut hi = q_pinch;
        for _ in 0..MAX_SOLVER_ITERATIONS {
            let mid = 0.5 * (lo + hi);
            if residual(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            // near the pinch the cube-root mean has unbounded slope, so the
            // bracket must shrink to a few ulps for the residual to settle
            if hi - lo <= 4.0 * f64::EPSILON * mid.max(1.0) {
                break;
            }
        }
        let q = 0.5 * (lo + hi);
        let final_residual = residual(q);
        if final_residual.abs() > RESIDUAL_TOL_KW {
            return Err(PlantError::SolverNoConverge {
                branch,
                residual: final_residual,
            });
        }
        Ok(ExchangerOutlets {
            cold_out: self.cold_inlet + q / c_cold,
            hot_out: b.hot_inlet_temp - q / c_hot,
            duty: q,
            crossing_clamped: clamped,
        })
    }

    /// Mixed cold-stream end temperature for `n - 1` controlled split
    /// ratios; the last split is fixed by mass balance,
    /// `u_n = 1 - sum(u_i)`. Any effective split below the floor rejects the
    /// input.
    pub fn end_temperature(&self, splits: &[f64]) -> Result<f64, PlantError> {
        let n = self.branches.len();
        if splits.len() + 1 != n {
            return Err(PlantError::DimensionMismatch {
                expected: n - 1,
                got: splits.len(),
            });
        }
        let mut full = Vec::with_capacity(n);
        full.extend_from_slice(splits);
        full.push(1.0 - splits.iter().sum::<f64>());
        for (i, &u) in full.iter().enumerate() {
            if !u.is_finite() || u < SPLIT_FLOOR {
                return Err(PlantError::SplitBelowFloor {
                    index: i,
                    value: u,
                    floor: SPLIT_FLOOR,
                });
            }
        }
        let mut t_end = 0.0;
        for (i, &u) in full.iter().enumerate() {
            t_end += u * self.exchanger_outlets(i, u)?.cold_out;
        }
        Ok(t_end)
    }
}

/// Cube-root approximation of the log-mean temperature difference. Negative
/// differences are clamped to zero; the caller flags the clamping.
fn chen_lmtd(dt1: f64, dt2: f64) -> f64 {
    let a = dt1.max(0.0);
    let b = dt2.max(0.0);
    (a * b * (0.5 * (a + b))).cbrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn simple_network() -> HeatExchangerNetwork {
        HeatExchangerNetwork::new(
            vec![
                ExchangerBranch {
                    ua: 5.0e4,
                    hot_inlet_temp: 120.0,
                    hot_flow: 15.0,
                },
                ExchangerBranch {
                    ua: 5.0e4,
                    hot_inlet_temp: 120.0,
                    hot_flow: 15.0,
                },
            ],
            60.0,
            100.0,
            4.2,
            FlowType::CounterCurrent,
        )
        .unwrap()
    }

    #[test]
    fn zero_ua_means_no_transfer() {
        let mut net = simple_network();
        net.set_branch_field(0, "ua", 0.0).unwrap();
        let o = net.exchanger_outlets(0, 0.5).unwrap();
        assert_eq!(o.duty, 0.0);
        assert_eq!(o.cold_out, 60.0);
        assert_eq!(o.hot_out, 120.0);
    }

    #[test]
    fn huge_ua_approaches_the_pinch_limit() {
        let mut net = simple_network();
        net.set_branch_field(0, "ua", 1.0e6).unwrap();
        let split = 0.5;
        let o = net.exchanger_outlets(0, split).unwrap();
        let c_min = (split * 100.0 * 4.2_f64).min(15.0 * 4.2);
        let q_pinch = c_min * 60.0;
        assert!(
            (o.duty - q_pinch).abs() / q_pinch < 0.01,
            "duty {} vs pinch {}",
            o.duty,
            q_pinch
        );
    }

    #[test]
    fn balanced_case_matches_closed_form() {
        // u w_c = w_h makes both temperature differences equal, so the
        // cube-root mean reduces to dT exactly and the duty has the closed
        // form Q = UA dT0 / (1 + UA/C).
        let net = simple_network();
        let split = 0.15; // 0.15 * 100 = 15 = hot flow
        let o = net.exchanger_outlets(0, split).unwrap();
        let c = 15.0 * 4.2;
        let ua_kw = 50.0;
        let expected = ua_kw * 60.0 / (1.0 + ua_kw / c);
        assert!(
            (o.duty - expected).abs() < 1e-6,
            "duty {} vs closed form {}",
            o.duty,
            expected
        );
    }

    #[test]
    fn duty_residual_and_energy_balance() {
        let net = simple_network();
        let split = 0.3;
        let o = net.exchanger_outlets(0, split).unwrap();
        // both energy-balance routes give back the duty
        let q_cold = split * 100.0 * 4.2 * (o.cold_out - 60.0);
        let q_hot = 15.0 * 4.2 * (120.0 - o.hot_out);
        assert!((q_cold - o.duty).abs() / o.duty < 1e-9);
        assert!((q_hot - o.duty).abs() / o.duty < 1e-9);
        // second law
        assert!(o.cold_out >= 60.0 && o.cold_out <= 120.0);
        assert!(o.hot_out >= 60.0 && o.hot_out <= 120.0);
    }

    #[test]
    fn raising_hot_inlet_raises_cold_outlet() {
        let mut net = simple_network();
        let before = net.exchanger_outlets(0, 0.3).unwrap().cold_out;
        net.set_branch_field(0, "hot_inlet_temp", 150.0).unwrap();
        let after = net.exchanger_outlets(0, 0.3).unwrap().cold_out;
        assert!(after > before);
    }

    #[test]
    fn split_floor_and_closure_enforced() {
        let net = simple_network();
        assert!(matches!(
            net.exchanger_outlets(0, 1e-4),
            Err(PlantError::SplitBelowFloor { .. })
        ));
        // one controlled split of 0.9995 leaves the closure split under floor
        assert!(matches!(
            net.end_temperature(&[0.9995]),
            Err(PlantError::SplitBelowFloor { index: 1, .. })
        ));
    }

    #[test]
    fn two_branch_mixing_identity() {
        let net = simple_network();
        // u1 close to 1: end temperature approaches branch 1's cold outlet
        let u1 = 0.999;
        let t_end = net.end_temperature(&[u1]).unwrap();
        let t1 = net.exchanger_outlets(0, u1).unwrap().cold_out;
        assert!((t_end - t1).abs() < 0.2, "t_end {t_end} vs t1 {t1}");
    }

    #[test]
    fn temperature_order_violation_detected() {
        let mut net = simple_network();
        net.set_branch_field(0, "hot_inlet_temp", 50.0).unwrap();
        assert!(matches!(
            net.exchanger_outlets(0, 0.3),
            Err(PlantError::TemperatureOrder { branch: 0 })
        ));
    }
}
