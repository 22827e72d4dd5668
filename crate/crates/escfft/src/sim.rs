//! Closed-loop experiment runner: plant + controller + dithers, seedable
//! measurement noise, per-step traces, and spectrogram frames.
//!
//! A run is fully determined by its scenario and noise seed: the noise
//! stream is a ChaCha20 generator with Ziggurat normal sampling, so reruns
//! reproduce traces bit for bit.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Normal};

use crate::controller::{Controller, ControllerConfig, ControllerError, Sense};
use crate::design::{window_length, DesignError};
use crate::dither::DitherSet;
use crate::gradient::{GradientConfig, GradientMethod};
use crate::plant::{apply_due_disturbances, Disturbance, PlantModel};
use crate::spectral::{detrend_samples, dft};

/// Name of the noise generator recorded in run metadata.
pub const RNG_ALGORITHM: &str = "chacha20 + ziggurat normal (rand_chacha/rand_distr)";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    /// Standard deviation in cost units.
    pub std: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WindowChoice {
    /// Smallest leakage-free window for the dither set.
    Auto,
    Fixed(u64),
}

/// A complete experiment description.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub plant: PlantModel,
    pub dithers: DitherSet,
    pub initial_inputs: Vec<f64>,
    pub gains: Vec<f64>,
    pub sense: Sense,
    pub input_box: Option<Vec<(f64, f64)>>,
    pub method: GradientMethod,
    pub window: WindowChoice,
    pub total_steps: u64,
    pub noise: Option<NoiseSpec>,
    pub disturbances: Vec<Disturbance>,
    /// Steps between recorded spectrogram frames; `None` means N/4.
    pub spectrogram_stride: Option<u64>,
    /// Factor applied to the plant output before it becomes the measured
    /// cost (e.g. 1e-6 to measure a wind farm in MW).
    pub cost_scale: f64,
}

impl Scenario {
    /// The window length this scenario will run with.
    pub fn resolve_window(&self) -> Result<u64, DesignError> {
        match self.window {
            WindowChoice::Auto => window_length(&self.dithers, 1),
            WindowChoice::Fixed(n) => Ok(n),
        }
    }

    /// The frame stride this scenario will run with.
    pub fn resolve_stride(&self, n: u64) -> u64 {
        self.spectrogram_stride.unwrap_or((n / 4).max(1)).max(1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub step: u64,
    /// Scaled plant output before noise.
    pub cost_raw: f64,
    /// What the controller actually measured.
    pub cost_noisy: f64,
    /// Nominal inputs in effect at this step.
    pub nominal: Vec<f64>,
    /// Dithered inputs applied at this step.
    pub applied: Vec<f64>,
    /// Gradient estimates that produced this step's nominal inputs; empty
    /// during warm-up. The first estimates appear at step index N.
    pub gradients: Option<Vec<f64>>,
}

/// Single-sided amplitude array of the detrended cost window ending at
/// `step`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrogramFrame {
    pub step: u64,
    pub amplitudes: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunFailure {
    pub step: u64,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    /// Window length used by the run.
    pub n_points: u64,
    /// Frame stride used by the run.
    pub stride: u64,
    pub input_dim: usize,
    pub rows: Vec<TraceRow>,
    pub frames: Vec<SpectrogramFrame>,
    /// Present when the run aborted mid-way; rows up to the failing step
    /// are kept.
    pub failure: Option<RunFailure>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SimError {
    Design(DesignError),
    Controller(ControllerError),
    Config(String),
}

impl fmt::Display for SimError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimError::Design(e) => write!(f, "{e}"),
            SimError::Controller(e) => write!(f, "{e}"),
            SimError::Config(msg) => write!(f, "{msg}"),
        }
    }
}

impl std::error::Error for SimError {}

impl From<DesignError> for SimError {
    fn from(e: DesignError) -> Self {
        SimError::Design(e)
    }
}

impl From<ControllerError> for SimError {
    fn from(e: ControllerError) -> Self {
        SimError::Controller(e)
    }
}

/// Reproducible Gaussian measurement-noise stream.
pub struct GaussianNoise {
    rng: ChaCha20Rng,
    dist: Normal<f64>,
}

impl GaussianNoise {
    pub fn new(seed: u64, std: f64) -> Result<Self, SimError> {
        if !std.is_finite() || std < 0.0 {
            return Err(SimError::Config(format!(
                "noise std must be nonnegative, got {std}"
            )));
        }
        Ok(GaussianNoise {
            rng: ChaCha20Rng::seed_from_u64(seed),
            dist: Normal::new(0.0, std)
                .map_err(|e| SimError::Config(format!("noise distribution: {e}")))?,
        })
    }

    pub fn sample(&mut self) -> f64 {
        self.dist.sample(&mut self.rng)
    }
}

/// Run a scenario to completion (or to the first plant failure).
///
/// Setup problems (bad dimensions, bad window) error out; a plant failure
/// mid-run returns the partial trace with the failing step recorded.
pub fn run(scenario: &Scenario) -> Result<Trace, SimError> {
    let n = scenario.resolve_window()?;
    if n < 2 {
        return Err(SimError::Config(format!(
            "window length must be at least 2, got {n}"
        )));
    }
    // runs shorter than the window are allowed: warm-up never ends and the
    // trace carries no gradient columns
    let input_dim = scenario.plant.input_dim();
    if input_dim != scenario.dithers.len() {
        return Err(SimError::Config(format!(
            "plant expects {input_dim} inputs but {} dither channels are configured",
            scenario.dithers.len()
        )));
    }
    if !scenario.cost_scale.is_finite() || scenario.cost_scale == 0.0 {
        return Err(SimError::Config(format!(
            "cost_scale must be finite and nonzero, got {}",
            scenario.cost_scale
        )));
    }
    let stride = scenario.resolve_stride(n);

    let mut controller = Controller::new(ControllerConfig {
        dithers: scenario.dithers.clone(),
        initial_inputs: scenario.initial_inputs.clone(),
        gains: scenario.gains.clone(),
        sense: scenario.sense,
        input_box: scenario.input_box.clone(),
        window_len: n as usize,
        method: scenario.method,
        gradient_config: GradientConfig::default(),
    })?;
    let mut plant = scenario.plant.clone();
    let mut noise = match &scenario.noise {
        Some(spec) => Some(GaussianNoise::new(spec.seed, spec.std)?),
        None => None,
    };

    let mut trace = Trace {
        n_points: n,
        stride,
        input_dim,
        rows: Vec::with_capacity(scenario.total_steps as usize),
        frames: Vec::new(),
        failure: None,
    };

    for step in 0..scenario.total_steps {
        if let Err(e) = apply_due_disturbances(&mut plant, &scenario.disturbances, step) {
            trace.failure = Some(RunFailure {
                step,
                message: e.to_string(),
            });
            return Ok(trace);
        }

        let applied = controller.applied().to_vec();
        let nominal = controller.nominal().to_vec();
        let gradients = controller
            .last_gradients()
            .map(|gs| gs.iter().map(|g| g.value).collect());

        let cost_raw = match plant.cost(&applied) {
            Ok(c) => c * scenario.cost_scale,
            Err(e) => {
                trace.failure = Some(RunFailure {
                    step,
                    message: e.to_string(),
                });
                return Ok(trace);
            }
        };
        let cost_noisy = cost_raw + noise.as_mut().map_or(0.0, |w| w.sample());

        trace.rows.push(TraceRow {
            step,
            cost_raw,
            cost_noisy,
            nominal,
            applied,
            gradients,
        });

        if let Err(e) = controller.step(cost_noisy) {
            trace.failure = Some(RunFailure {
                step,
                message: e.to_string(),
            });
            return Ok(trace);
        }

        // frame over the cost window ending at this step
        if step + 1 >= n && step % stride == 0 {
            let spectrum = controller.cost_spectrum()?;
            trace.frames.push(SpectrogramFrame {
                step,
                amplitudes: spectrum.amplitude_single_sided().to_vec(),
            });
        }
    }
    Ok(trace)
}

/// Recompute spectrogram frames offline from the recorded noisy cost
/// series. Matches the frames recorded live.
pub fn spectrogram(trace: &Trace) -> Vec<SpectrogramFrame> {
    let n = trace.n_points as usize;
    let mut frames = Vec::new();
    if trace.rows.len() < n {
        return frames;
    }
    for (idx, row) in trace.rows.iter().enumerate() {
        if idx + 1 >= n && row.step % trace.stride == 0 {
            let window: Vec<f64> = trace.rows[idx + 1 - n..=idx]
                .iter()
                .map(|r| r.cost_noisy)
                .collect();
            let spectrum = dft(&detrend_samples(&window)).expect("window length >= 2");
            frames.push(SpectrogramFrame {
                step: row.step,
                amplitudes: spectrum.amplitude_single_sided().to_vec(),
            });
        }
    }
    frames
}
