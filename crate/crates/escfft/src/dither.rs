//! Per-channel sinusoidal dither signals.

use std::fmt;

use crate::freq::DitherFreq;

#[derive(Debug, Clone, PartialEq)]
pub enum DitherError {
    NonPositiveAmplitude(f64),
    NonFinitePhase(f64),
    EmptySet,
}

impl fmt::Display for DitherError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DitherError::NonPositiveAmplitude(a) => {
                write!(f, "dither amplitude must be positive, got {a}")
            }
            DitherError::NonFinitePhase(p) => write!(f, "dither phase must be finite, got {p}"),
            DitherError::EmptySet => write!(f, "a dither set needs at least one channel"),
        }
    }
}

impl std::error::Error for DitherError {}

/// One channel's perturbation `amplitude * sin(omega * k + phase)`, where
/// `k` is the global sample counter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DitherSpec {
    amplitude: f64,
    frequency: DitherFreq,
    phase: f64,
}

impl DitherSpec {
    pub fn new(amplitude: f64, frequency: DitherFreq) -> Result<Self, DitherError> {
        Self::with_phase(amplitude, frequency, 0.0)
    }

    pub fn with_phase(
        amplitude: f64,
        frequency: DitherFreq,
        phase: f64,
    ) -> Result<Self, DitherError> {
        if !amplitude.is_finite() || amplitude <= 0.0 {
            return Err(DitherError::NonPositiveAmplitude(amplitude));
        }
        if !phase.is_finite() {
            return Err(DitherError::NonFinitePhase(phase));
        }
        Ok(DitherSpec {
            amplitude,
            frequency,
            phase,
        })
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn frequency(&self) -> DitherFreq {
        self.frequency
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    /// Dither value at global sample index `k`. The index is reduced modulo
    /// the period first, so the sequence is exactly periodic and the sine
    /// argument never grows with run length.
    pub fn sample(&self, k: u64) -> f64 {
        let k = (k % self.frequency.denom()) as f64;
        self.amplitude * (self.frequency.omega() * k + self.phase).sin()
    }
}

/// An ordered set of dither channels, one per plant input.
#[derive(Debug, Clone, PartialEq)]
pub struct DitherSet {
    channels: Vec<DitherSpec>,
}

impl DitherSet {
    /// Duplicate or otherwise colliding frequencies are accepted here;
    /// `design::validate_dithers` reports them as warnings.
    pub fn new(channels: Vec<DitherSpec>) -> Result<Self, DitherError> {
        if channels.is_empty() {
            return Err(DitherError::EmptySet);
        }
        Ok(DitherSet { channels })
    }

    pub fn channels(&self) -> &[DitherSpec] {
        &self.channels
    }

    pub fn len(&self) -> usize {
        self.channels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.channels.is_empty()
    }
}
