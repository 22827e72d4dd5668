//! Extremum seeking control for multi-input single-output static maps,
//! with the gradient estimated spectrally from a single scalar cost
//! measurement.
//!
//! Each input channel carries a sinusoidal dither at its own rational
//! frequency. A sliding window of cost measurements is detrended and
//! transformed; the single-sided amplitude at each dither frequency, signed
//! by the phase relative to that channel's input, estimates the steady-state
//! gradient, and per-channel integrators drive those gradients to zero.
//!
//! The crate bundles:
//! - [`spectral`] / [`gradient`]: windowed DFT and the two gradient
//!   estimators,
//! - [`design`]: window length, dither independence, resolution, and gain
//!   interval calculators,
//! - [`controller`]: the per-step closed-loop update,
//! - [`plant`]: quadratic map, wind farm with wake coupling, and a heat
//!   exchanger network,
//! - [`sim`] / [`scenario`] / [`trace_io`]: the scenario-driven experiment
//!   runner and its CSV/JSON artifacts.

pub mod controller;
pub mod design;
pub mod dither;
pub mod freq;
pub mod gradient;
pub mod plant;
pub mod scenario;
pub mod sim;
pub mod spectral;
pub mod trace_io;
pub mod window;

pub use controller::{Controller, ControllerConfig, ControllerError, Sense};
pub use design::{
    check_resolution, design_report, error_bound, error_bound_mean_value, gain_interval,
    validate_dithers, window_length, DesignError, DesignReport, MapBounds, Violation,
    ViolationKind,
};
pub use dither::{DitherError, DitherSet, DitherSpec};
pub use freq::{DitherFreq, FreqError};
pub use gradient::{
    estimate_gradient_amplitude_phase, estimate_gradient_real_ratio, GradientConfig,
    GradientEstimate, GradientMethod,
};
pub use plant::{
    apply_due_disturbances, Disturbance, ExchangerBranch, HeatExchangerNetwork, PlantError,
    PlantModel, QuadraticMap, Turbine, WindFarm,
};
pub use scenario::{ScenarioError, ScenarioFile};
pub use sim::{
    run, spectrogram, GaussianNoise, NoiseSpec, RunFailure, Scenario, SimError, SpectrogramFrame,
    Trace, TraceRow, WindowChoice, RNG_ALGORITHM,
};
pub use spectral::{detrend, detrend_samples, dft, SpectralError, Spectrum};
pub use window::SlidingWindow;
