//! Per-channel steady-state gradient estimation from cost and input spectra.
//!
//! Both estimators read the dither-frequency bin of the cost spectrum. The
//! amplitude/phase form scales the single-sided cost amplitude by the dither
//! amplitude and takes its sign from the phase difference between cost and
//! input; the real-part ratio divides the raw bin real parts directly.

use serde::{Deserialize, Serialize};

use crate::dither::DitherSpec;
use crate::spectral::{wrap_phase, SpectralError, Spectrum, DEFAULT_AMP_FLOOR_SCALE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GradientMethod {
    AmplitudePhaseSign,
    RealPartRatio,
}

/// Diagnostic floors used by the estimators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradientConfig {
    /// Scale of the cost-amplitude floor: `floor = scale * (window RMS + 1)`.
    pub amp_floor_scale: f64,
    /// Absolute floor on `|Re(U(omega))|` for the real-part ratio.
    pub den_floor: f64,
}

impl Default for GradientConfig {
    fn default() -> Self {
        GradientConfig {
            amp_floor_scale: DEFAULT_AMP_FLOOR_SCALE,
            den_floor: 1e-9,
        }
    }
}

/// One channel's estimated steady-state gradient with diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradientEstimate {
    /// Estimated gradient in cost units per input unit.
    pub value: f64,
    /// Single-sided cost amplitude at the dither frequency.
    pub amplitude_at_dither: f64,
    /// Cost phase at the dither frequency (0 when flagged near-stationary).
    pub phase_cost: f64,
    /// Input phase at the dither frequency (0 when flagged near-stationary).
    pub phase_input: f64,
    pub method: GradientMethod,
    /// Set when the dither-frequency content was below the diagnostic floor,
    /// which happens by design at an extremum; the value is reported as 0.
    pub near_stationary: bool,
}

/// Amplitude-and-phase-sign estimate: `(amplitude / a_i)` signed positive
/// when the cost component is in phase with the input component and negative
/// when it is shifted by pi. The sign is computed as
/// `sign(cos(phase_cost - phase_input))`, which is the in-phase/anti-phase
/// test and stays well defined when either phase crosses zero.
pub fn estimate_gradient_amplitude_phase(
    cost: &Spectrum,
    input: &Spectrum,
    dither: &DitherSpec,
    cfg: &GradientConfig,
) -> Result<GradientEstimate, SpectralError> {
    check_lengths(cost, input)?;
    let f = dither.frequency();
    let amplitude = cost.amplitude_at(f)?;
    let cost_floor = cfg.amp_floor_scale * (cost.window_rms() + 1.0);
    let input_floor = cfg.amp_floor_scale * (input.window_rms() + 1.0);

    let phase_cost = cost.phase_at_with_floor(f, cost_floor);
    let phase_input = input.phase_at_with_floor(f, input_floor);
    match (phase_cost, phase_input) {
        (Ok(pj), Ok(pu)) => {
            let sign = if wrap_phase(pj - pu).cos() >= 0.0 {
                1.0
            } else {
                -1.0
            };
            Ok(GradientEstimate {
                value: sign * amplitude / dither.amplitude(),
                amplitude_at_dither: amplitude,
                phase_cost: pj,
                phase_input: pu,
                method: GradientMethod::AmplitudePhaseSign,
                near_stationary: false,
            })
        }
        (Err(SpectralError::PhaseUndefined { .. }), _)
        | (_, Err(SpectralError::PhaseUndefined { .. })) => Ok(GradientEstimate {
            value: 0.0,
            amplitude_at_dither: amplitude,
            phase_cost: 0.0,
            phase_input: 0.0,
            method: GradientMethod::AmplitudePhaseSign,
            near_stationary: true,
        }),
        (Err(e), _) | (_, Err(e)) => Err(e),
    }
}

/// Real-part ratio estimate `Re(J(omega)) / Re(U(omega))`.
///
/// Errors with `DegenerateInputPhase` when the denominator is under the
/// floor, which happens whenever the dither lands in the window as a pure
/// zero-phase sine; a nonzero dither phase offset avoids that.
pub fn estimate_gradient_real_ratio(
    cost: &Spectrum,
    input: &Spectrum,
    dither: &DitherSpec,
    cfg: &GradientConfig,
) -> Result<GradientEstimate, SpectralError> {
    check_lengths(cost, input)?;
    let f = dither.frequency();
    let l = cost.bin_of(f)?;
    let den = input.bins()[l].re;
    if den.abs() <= cfg.den_floor {
        return Err(SpectralError::DegenerateInputPhase {
            real_part: den,
            floor: cfg.den_floor,
        });
    }
    let amplitude = cost.amplitude_at(f)?;
    let cost_floor = cfg.amp_floor_scale * (cost.window_rms() + 1.0);
    let near_stationary = amplitude < cost_floor;
    Ok(GradientEstimate {
        value: cost.bins()[l].re / den,
        amplitude_at_dither: amplitude,
        phase_cost: if near_stationary {
            0.0
        } else {
            cost.phase_spectrum()[l]
        },
        phase_input: input.phase_spectrum()[l],
        method: GradientMethod::RealPartRatio,
        near_stationary,
    })
}

fn check_lengths(cost: &Spectrum, input: &Spectrum) -> Result<(), SpectralError> {
    if cost.n_points() != input.n_points() {
        return Err(SpectralError::LengthMismatch {
            cost: cost.n_points(),
            input: input.n_points(),
        });
    }
    Ok(())
}
