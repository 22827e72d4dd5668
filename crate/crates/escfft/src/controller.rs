//! Per-channel integral control driven by spectral gradient estimates.
//!
//! One step does the full loop iteration: push the newest cost measurement
//! and the previously applied inputs into their windows, estimate the
//! gradient for every channel once the windows are full, integrate the
//! nominal inputs toward zero gradient, and emit the next dithered input
//! vector. Until the windows fill, the nominal inputs are held and only the
//! dither moves.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dither::DitherSet;
use crate::gradient::{
    estimate_gradient_amplitude_phase, estimate_gradient_real_ratio, GradientConfig,
    GradientEstimate, GradientMethod,
};
use crate::spectral::{detrend, dft, SpectralError, Spectrum};
use crate::window::SlidingWindow;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ControllerError {
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    /// Gains stay nonnegative; the optimization direction is the `Sense`
    /// flag, never a sign baked into the gain.
    NegativeGain { channel: usize, value: f64 },
    InvalidWindow { len: usize },
    InvalidBox { channel: usize },
    NonFiniteInitialInput { channel: usize, value: f64 },
    /// The offending sample is rejected and the state left unchanged.
    NonFiniteCost { value: f64 },
    Spectral(SpectralError),
}

impl fmt::Display for ControllerError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ControllerError::DimensionMismatch {
                what,
                expected,
                got,
            } => write!(f, "{what}: expected {expected} entries, got {got}"),
            ControllerError::NegativeGain { channel, value } => write!(
                f,
                "gain for channel {} must be nonnegative, got {value}",
                channel + 1
            ),
            ControllerError::InvalidWindow { len } => {
                write!(f, "window length must be at least 2, got {len}")
            }
            ControllerError::InvalidBox { channel } => write!(
                f,
                "input box for channel {} must be a finite ordered interval",
                channel + 1
            ),
            ControllerError::NonFiniteInitialInput { channel, value } => write!(
                f,
                "initial input for channel {} must be finite, got {value}",
                channel + 1
            ),
            ControllerError::NonFiniteCost { value } => {
                write!(f, "cost sample is not finite: {value}; step rejected")
            }
            ControllerError::Spectral(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for ControllerError {}

impl From<SpectralError> for ControllerError {
    fn from(e: SpectralError) -> Self {
        ControllerError::Spectral(e)
    }
}

/// Everything needed to construct a `Controller`.
#[derive(Debug, Clone)]
pub struct ControllerConfig {
    pub dithers: DitherSet,
    /// Initial nominal inputs, one per channel.
    pub initial_inputs: Vec<f64>,
    /// Integral gains, one per channel, all nonnegative.
    pub gains: Vec<f64>,
    pub sense: Sense,
    /// Optional per-channel clamp on the nominal input.
    pub input_box: Option<Vec<(f64, f64)>>,
    pub window_len: usize,
    pub method: GradientMethod,
    pub gradient_config: GradientConfig,
}

/// Closed-loop extremum-seeking state: nominal inputs, gains, the sliding
/// windows, and the most recent gradient estimates.
#[derive(Debug, Clone)]
pub struct Controller {
    dithers: DitherSet,
    nominal: Vec<f64>,
    gains: Vec<f64>,
    sense: Sense,
    input_box: Option<Vec<(f64, f64)>>,
    method: GradientMethod,
    gradient_config: GradientConfig,
    step_counter: u64,
    cost_window: SlidingWindow,
    input_windows: Vec<SlidingWindow>,
    applied: Vec<f64>,
    last_gradients: Option<Vec<GradientEstimate>>,
}

impl Controller {
    pub fn new(cfg: ControllerConfig) -> Result<Self, ControllerError> {
        let n = cfg.dithers.len();
        if cfg.initial_inputs.len() != n {
            return Err(ControllerError::DimensionMismatch {
                what: "initial inputs",
                expected: n,
                got: cfg.initial_inputs.len(),
            });
        }
        if cfg.gains.len() != n {
            return Err(ControllerError::DimensionMismatch {
                what: "gains",
                expected: n,
                got: cfg.gains.len(),
            });
        }
        for (i, &k) in cfg.gains.iter().enumerate() {
            if !k.is_finite() || k < 0.0 {
                return Err(ControllerError::NegativeGain {
                    channel: i,
                    value: k,
                });
            }
        }
        for (i, &u) in cfg.initial_inputs.iter().enumerate() {
            if !u.is_finite() {
                return Err(ControllerError::NonFiniteInitialInput {
                    channel: i,
                    value: u,
                });
            }
        }
        if let Some(b) = &cfg.input_box {
            if b.len() != n {
                return Err(ControllerError::DimensionMismatch {
                    what: "input box",
                    expected: n,
                    got: b.len(),
                });
            }
            for (i, &(lo, hi)) in b.iter().enumerate() {
                if !lo.is_finite() || !hi.is_finite() || lo > hi {
                    return Err(ControllerError::InvalidBox { channel: i });
                }
            }
        }
        if cfg.window_len < 2 {
            return Err(ControllerError::InvalidWindow {
                len: cfg.window_len,
            });
        }

        let mut nominal = cfg.initial_inputs;
        clamp_into(&mut nominal, cfg.input_box.as_deref());
        let applied: Vec<f64> = nominal
            .iter()
            .zip(cfg.dithers.channels())
            .map(|(&u, d)| u + d.sample(0))
            .collect();
        Ok(Controller {
            input_windows: (0..n).map(|_| SlidingWindow::new(cfg.window_len)).collect(),
            cost_window: SlidingWindow::new(cfg.window_len),
            dithers: cfg.dithers,
            nominal,
            gains: cfg.gains,
            sense: cfg.sense,
            input_box: cfg.input_box,
            method: cfg.method,
            gradient_config: cfg.gradient_config,
            step_counter: 0,
            applied,
            last_gradients: None,
        })
    }

    /// The dithered input vector currently in effect.
    pub fn applied(&self) -> &[f64] {
        &self.applied
    }

    /// Nominal (dither-free) inputs.
    pub fn nominal(&self) -> &[f64] {
        &self.nominal
    }

    pub fn step_counter(&self) -> u64 {
        self.step_counter
    }

    pub fn window_len(&self) -> usize {
        self.cost_window.capacity()
    }

    pub fn is_warmed_up(&self) -> bool {
        self.cost_window.is_full()
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    pub fn dithers(&self) -> &DitherSet {
        &self.dithers
    }

    /// Gradient estimates computed on the most recent full window, i.e. the
    /// ones that produced the current nominal inputs. `None` during warm-up.
    pub fn last_gradients(&self) -> Option<&[GradientEstimate]> {
        self.last_gradients.as_deref()
    }

    /// Advance one sample: record `cost_sample` (measured under the current
    /// applied inputs), update the nominal inputs if the windows are full,
    /// and return the input vector to apply next.
    pub fn step(&mut self, cost_sample: f64) -> Result<&[f64], ControllerError> {
        if !cost_sample.is_finite() {
            return Err(ControllerError::NonFiniteCost { value: cost_sample });
        }
        self.cost_window.push(cost_sample);
        for (w, &a) in self.input_windows.iter_mut().zip(self.applied.iter()) {
            w.push(a);
        }

        if self.cost_window.is_full() {
            let gradients = self.estimate_all_gradients()?;
            let direction = match self.sense {
                Sense::Minimize => -1.0,
                Sense::Maximize => 1.0,
            };
            for (i, g) in gradients.iter().enumerate() {
                self.nominal[i] += direction * self.gains[i] * g.value;
            }
            clamp_into(&mut self.nominal, self.input_box.as_deref());
            self.last_gradients = Some(gradients);
        }

        self.step_counter += 1;
        for (i, a) in self.applied.iter_mut().enumerate() {
            *a = self.nominal[i] + self.dithers.channels()[i].sample(self.step_counter);
        }
        Ok(&self.applied)
    }

    /// One cost spectrum shared across channels, one input spectrum per
    /// channel, channel estimates independent of each other.
    pub fn estimate_all_gradients(&self) -> Result<Vec<GradientEstimate>, ControllerError> {
        let cost_spectrum = dft(&detrend(&self.cost_window)?)?;
        let mut out = Vec::with_capacity(self.dithers.len());
        for (w, d) in self.input_windows.iter().zip(self.dithers.channels()) {
            let input_spectrum = dft(&detrend(w)?)?;
            let est = match self.method {
                GradientMethod::AmplitudePhaseSign => estimate_gradient_amplitude_phase(
                    &cost_spectrum,
                    &input_spectrum,
                    d,
                    &self.gradient_config,
                )?,
                GradientMethod::RealPartRatio => estimate_gradient_real_ratio(
                    &cost_spectrum,
                    &input_spectrum,
                    d,
                    &self.gradient_config,
                )?,
            };
            out.push(est);
        }
        Ok(out)
    }

    /// Spectrum of the detrended cost window, for spectrogram frames.
    pub fn cost_spectrum(&self) -> Result<Spectrum, ControllerError> {
        Ok(dft(&detrend(&self.cost_window)?)?)
    }
}

fn clamp_into(values: &mut [f64], input_box: Option<&[(f64, f64)]>) {
    if let Some(b) = input_box {
        for (v, &(lo, hi)) in values.iter_mut().zip(b.iter()) {
            *v = v.clamp(lo, hi);
        }
    }
}
