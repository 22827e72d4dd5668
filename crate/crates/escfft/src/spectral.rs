//! Detrending, finite-window DFT, and single-sided amplitude/phase spectra.
//!
//! The transform convention is the plain unnormalized forward DFT
//! `X(l) = sum_k x(k) exp(-j 2 pi l k / N)`, computed for any window length
//! N >= 2 (mixed-radix or Bluestein under the hood, so non-power-of-two
//! lengths are fine). Single-sided amplitudes carry a `2/N` factor (`1/N` at
//! DC and Nyquist) so a unit sinusoid sitting exactly on a bin reads
//! amplitude one.

use std::fmt;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::freq::DitherFreq;
use crate::window::SlidingWindow;

/// Scale for the amplitude floor below which a bin's phase is treated as
/// undefined: `floor = DEFAULT_AMP_FLOOR_SCALE * (window RMS + 1)`. At an
/// extremum the dither-frequency component of the cost vanishes by design,
/// so its phase is numerical garbage and consumers must be told so.
pub const DEFAULT_AMP_FLOOR_SCALE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum SpectralError {
    /// The sliding window has not filled yet.
    WindowNotFull { have: usize, need: usize },
    /// Transforms need at least two samples.
    InvalidLength { len: usize },
    /// The requested frequency does not land on a DFT bin for this window
    /// length. The window length must be fixed; interpolation is not offered.
    OffBinFrequency { freq: DitherFreq, n_points: usize },
    /// Bin amplitude below the floor; the phase there is meaningless.
    PhaseUndefined { amplitude: f64, floor: f64 },
    /// Real part of the input-dither bin too small for the real-part ratio.
    DegenerateInputPhase { real_part: f64, floor: f64 },
    /// Cost and input spectra were taken over different window lengths.
    LengthMismatch { cost: usize, input: usize },
}

impl fmt::Display for SpectralError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpectralError::WindowNotFull { have, need } => {
                write!(f, "insufficient samples: window holds {have} of {need}")
            }
            SpectralError::InvalidLength { len } => {
                write!(f, "transform needs at least 2 samples, got {len}")
            }
            SpectralError::OffBinFrequency { freq, n_points } => write!(
                f,
                "off-bin frequency: {freq} cycles/sample does not land on a bin of a \
                 {n_points}-point window; fix the window length rather than interpolating"
            ),
            SpectralError::PhaseUndefined { amplitude, floor } => write!(
                f,
                "phase undefined: bin amplitude {amplitude:e} is below the floor {floor:e}"
            ),
            SpectralError::DegenerateInputPhase { real_part, floor } => write!(
                f,
                "degenerate input phase: |Re| = {:e} is below the floor {:e}; give the \
                 dither a nonzero phase offset",
                real_part.abs(),
                floor
            ),
            SpectralError::LengthMismatch { cost, input } => write!(
                f,
                "cost spectrum has {cost} points but input spectrum has {input}"
            ),
        }
    }
}

impl std::error::Error for SpectralError {}

/// Remove the window mean so the spectrum sees only oscillatory content.
///
/// Errors with `WindowNotFull` until the window has all N samples.
pub fn detrend(window: &SlidingWindow) -> Result<Vec<f64>, SpectralError> {
    if !window.is_full() {
        return Err(SpectralError::WindowNotFull {
            have: window.len(),
            need: window.capacity(),
        });
    }
    Ok(detrend_samples(&window.to_vec()))
}

/// Mean-removal over a raw slice.
pub fn detrend_samples(samples: &[f64]) -> Vec<f64> {
    if samples.is_empty() {
        return Vec::new();
    }
    let mean = samples.iter().sum::<f64>() / samples.len() as f64;
    samples.iter().map(|x| x - mean).collect()
}

/// Complex DFT bins of a finite window plus the derived single-sided
/// amplitude and phase arrays (N/2 + 1 entries each).
#[derive(Debug, Clone)]
pub struct Spectrum {
    bins: Vec<Complex<f64>>,
    amplitude: Vec<f64>,
    phase: Vec<f64>,
    window_rms: f64,
}

impl Spectrum {
    fn from_bins(bins: Vec<Complex<f64>>, window_rms: f64) -> Self {
        let n = bins.len();
        let half = n / 2 + 1;
        let mut amplitude = Vec::with_capacity(half);
        let mut phase = Vec::with_capacity(half);
        for (l, bin) in bins.iter().enumerate().take(half) {
            let edge = l == 0 || (n.is_multiple_of(2) && l == n / 2);
            let scale = if edge { 1.0 } else { 2.0 };
            amplitude.push(scale * bin.norm() / n as f64);
            phase.push(principal_phase(*bin));
        }
        Spectrum {
            bins,
            amplitude,
            phase,
            window_rms,
        }
    }

    pub fn n_points(&self) -> usize {
        self.bins.len()
    }

    /// All N complex bins of the unnormalized forward transform.
    pub fn bins(&self) -> &[Complex<f64>] {
        &self.bins
    }

    /// Physical oscillation amplitude per bin, `l = 0 ..= N/2`.
    pub fn amplitude_single_sided(&self) -> &[f64] {
        &self.amplitude
    }

    /// Principal-value phase per bin, in (-pi, pi].
    pub fn phase_spectrum(&self) -> &[f64] {
        &self.phase
    }

    /// RMS of the transformed window, used to scale diagnostic floors.
    pub fn window_rms(&self) -> f64 {
        self.window_rms
    }

    pub fn default_phase_floor(&self) -> f64 {
        DEFAULT_AMP_FLOOR_SCALE * (self.window_rms + 1.0)
    }

    /// Bin index of a rational frequency, erroring when it is off-bin.
    pub fn bin_of(&self, freq: DitherFreq) -> Result<usize, SpectralError> {
        freq.bin_index(self.n_points())
            .ok_or(SpectralError::OffBinFrequency {
                freq,
                n_points: self.n_points(),
            })
    }

    /// Single-sided amplitude at a bin-aligned frequency. For a window that
    /// holds an integer number of cycles of `a*sin(2 pi f k)` this returns
    /// `a`.
    pub fn amplitude_at(&self, freq: DitherFreq) -> Result<f64, SpectralError> {
        Ok(self.amplitude[self.bin_of(freq)?])
    }

    /// Phase at a bin-aligned frequency, using the default amplitude floor.
    pub fn phase_at(&self, freq: DitherFreq) -> Result<f64, SpectralError> {
        self.phase_at_with_floor(freq, self.default_phase_floor())
    }

    pub fn phase_at_with_floor(
        &self,
        freq: DitherFreq,
        floor: f64,
    ) -> Result<f64, SpectralError> {
        let l = self.bin_of(freq)?;
        if self.amplitude[l] < floor {
            return Err(SpectralError::PhaseUndefined {
                amplitude: self.amplitude[l],
                floor,
            });
        }
        Ok(self.phase[l])
    }
}

/// N-point DFT of a real window.
///
/// Any N >= 2 is accepted. The result matches the direct-summation
/// definition to floating precision regardless of the transform algorithm
/// chosen internally.
pub fn dft(samples: &[f64]) -> Result<Spectrum, SpectralError> {
    let n = samples.len();
    if n < 2 {
        return Err(SpectralError::InvalidLength { len: n });
    }
    let mut buf: Vec<Complex<f64>> = samples.iter().map(|&x| Complex::new(x, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let rms = (samples.iter().map(|x| x * x).sum::<f64>() / n as f64).sqrt();
    Ok(Spectrum::from_bins(buf, rms))
}

/// Map `atan2`'s closed interval onto the principal branch (-pi, pi].
fn principal_phase(c: Complex<f64>) -> f64 {
    let a = c.arg();
    if a == -std::f64::consts::PI {
        std::f64::consts::PI
    } else {
        a
    }
}

/// Wrap a phase difference onto (-pi, pi].
pub fn wrap_phase(d: f64) -> f64 {
    use std::f64::consts::PI;
    let w = (d + PI).rem_euclid(2.0 * PI) - PI;
    if w == -PI {
        PI
    } else {
        w
    }
}
