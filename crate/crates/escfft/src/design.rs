//! Design-rule calculators for dither sets: leakage-free window length,
//! channel-independence checks, frequency resolution, stabilizing gain
//! intervals, and the moving-window estimation error bound.
//!
//! All frequency comparisons are done in exact rational arithmetic.

use std::fmt;

use num_integer::Integer;
use num_rational::Ratio;

use crate::dither::DitherSet;

#[derive(Debug, Clone, PartialEq)]
pub enum DesignError {
    /// `gamma` must be a positive integer.
    InvalidGamma,
    /// The least common multiple of the dither periods overflowed u64.
    WindowOverflow,
    /// Map bounds failed validation.
    InvalidBounds(String),
    /// Per-channel data did not match the number of dither channels.
    ChannelCountMismatch { expected: usize, got: usize },
}

impl fmt::Display for DesignError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DesignError::InvalidGamma => write!(f, "gamma must be a positive integer"),
            DesignError::WindowOverflow => {
                write!(f, "window length overflows the 64-bit integer range")
            }
            DesignError::InvalidBounds(msg) => write!(f, "invalid map bounds: {msg}"),
            DesignError::ChannelCountMismatch { expected, got } => {
                write!(f, "expected {expected} per-channel entries, got {got}")
            }
        }
    }
}

impl std::error::Error for DesignError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    /// Two channels share a frequency.
    Duplicate,
    /// One channel's frequency is twice another's.
    SecondHarmonic,
    /// The sum of two channel frequencies equals a third's.
    SumCollision,
    /// Two frequencies closer than the window can resolve.
    Resolution,
}

/// A dither-set warning with the 0-based channels involved. For
/// `SecondHarmonic` the channels are `[i, j]` with `2 f_i = f_j`; for
/// `SumCollision` they are `[i, j, k]` with `f_i + f_j = f_k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub channels: Vec<usize>,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ch: Vec<String> = self.channels.iter().map(|c| format!("u{}", c + 1)).collect();
        match self.kind {
            ViolationKind::Duplicate => {
                write!(f, "duplicate frequency on channels {} and {}", ch[0], ch[1])
            }
            ViolationKind::SecondHarmonic => write!(
                f,
                "second harmonic: 2*f({}) equals f({})",
                ch[0], ch[1]
            ),
            ViolationKind::SumCollision => write!(
                f,
                "sum collision: f({}) + f({}) equals f({})",
                ch[0], ch[1], ch[2]
            ),
            ViolationKind::Resolution => write!(
                f,
                "frequencies of {} and {} are too close to resolve in the amplitude spectrum",
                ch[0], ch[1]
            ),
        }
    }
}

/// Check the mutual-independence conditions on the dither frequencies:
/// `f_i != f_j`, `2 f_i != f_j`, and `f_i + f_j != f_k` for distinct
/// channels. Violations are warnings, not errors: sets that fail the sum
/// condition can still converge in practice, but the excitation is no
/// longer provably unique, so the report surfaces them loudly.
pub fn validate_dithers(set: &DitherSet) -> Vec<Violation> {
    let f: Vec<Ratio<i128>> = set
        .channels()
        .iter()
        .map(|d| d.frequency().as_signed_ratio())
        .collect();
    let n = f.len();
    let mut out = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if f[i] == f[j] {
                out.push(Violation {
                    kind: ViolationKind::Duplicate,
                    channels: vec![i, j],
                });
            }
        }
    }
    let two = Ratio::from_integer(2i128);
    for i in 0..n {
        for j in 0..n {
            if i != j && two * f[i] == f[j] {
                out.push(Violation {
                    kind: ViolationKind::SecondHarmonic,
                    channels: vec![i, j],
                });
            }
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            for k in 0..n {
                if k != i && k != j && f[i] + f[j] == f[k] {
                    out.push(Violation {
                        kind: ViolationKind::SumCollision,
                        channels: vec![i, j, k],
                    });
                }
            }
        }
    }
    out
}

/// Smallest window length (times `gamma`) containing an integer number of
/// cycles of every dither: `gamma * lcm(q_1, ..., q_n)` for reduced
/// frequencies `p_i/q_i`. This is the no-leakage window size; any smaller
/// window cuts at least one dither mid-cycle.
pub fn window_length(set: &DitherSet, gamma: u64) -> Result<u64, DesignError> {
    if gamma == 0 {
        return Err(DesignError::InvalidGamma);
    }
    let mut l: u64 = 1;
    for d in set.channels() {
        let q = d.frequency().denom();
        let g = l.gcd(&q);
        l = (l / g).checked_mul(q).ok_or(DesignError::WindowOverflow)?;
    }
    gamma.checked_mul(l).ok_or(DesignError::WindowOverflow)
}

/// All channel pairs whose frequency spacing is at or below the resolution
/// limit `1/(N-1)` of an `n`-point rectangular window.
///
/// # Panics
/// Panics if `n < 2`.
pub fn check_resolution(set: &DitherSet, n: u64) -> Vec<(usize, usize)> {
    assert!(n >= 2, "resolution check needs a window of at least 2");
    let limit = Ratio::new(1i128, (n - 1) as i128);
    let f: Vec<Ratio<i128>> = set
        .channels()
        .iter()
        .map(|d| d.frequency().as_signed_ratio())
        .collect();
    let mut out = Vec::new();
    for i in 0..f.len() {
        for j in (i + 1)..f.len() {
            let diff = if f[i] >= f[j] {
                f[i] - f[j]
            } else {
                f[j] - f[i]
            };
            if diff <= limit {
                out.push((i, j));
            }
        }
    }
    out
}

/// User-supplied bounds on the unknown static map, needed to size gains.
#[derive(Debug, Clone, PartialEq)]
pub struct MapBounds {
    alpha1: f64,
    alpha2: f64,
    hessian_bound: Vec<f64>,
    d: f64,
}

impl MapBounds {
    /// Default slack factor: the gain bound is tightest as `d` approaches 1
    /// from above, so a near-1 default is the least conservative valid
    /// choice.
    pub const DEFAULT_D: f64 = 1.01;

    pub fn new(alpha1: f64, alpha2: f64, hessian_bound: Vec<f64>, d: f64) -> Result<Self, DesignError> {
        if !alpha1.is_finite() || alpha1 <= 0.0 {
            return Err(DesignError::InvalidBounds(format!(
                "alpha1 must be positive, got {alpha1}"
            )));
        }
        if !alpha2.is_finite() || alpha2 < alpha1 {
            return Err(DesignError::InvalidBounds(format!(
                "alpha2 must satisfy alpha2 >= alpha1, got {alpha2}"
            )));
        }
        if !d.is_finite() || d <= 1.0 {
            return Err(DesignError::InvalidBounds(format!(
                "d must be greater than 1, got {d}"
            )));
        }
        if hessian_bound.is_empty() {
            return Err(DesignError::InvalidBounds(
                "at least one Hessian bound is required".into(),
            ));
        }
        for (i, &h) in hessian_bound.iter().enumerate() {
            if !h.is_finite() || h <= 0.0 {
                return Err(DesignError::InvalidBounds(format!(
                    "Hessian bound for channel {} must be positive, got {h}",
                    i + 1
                )));
            }
        }
        Ok(MapBounds {
            alpha1,
            alpha2,
            hessian_bound,
            d,
        })
    }

    pub fn alpha1(&self) -> f64 {
        self.alpha1
    }

    pub fn alpha2(&self) -> f64 {
        self.alpha2
    }

    pub fn hessian_bound(&self) -> &[f64] {
        &self.hessian_bound
    }

    pub fn d(&self) -> f64 {
        self.d
    }
}

/// Upper end of the stabilizing gain interval `(0, K_max_i)` per channel:
/// `K_max_i = alpha1 / (alpha2 * N * H_i * d)`.
pub fn gain_interval(bounds: &MapBounds, n: u64) -> Vec<f64> {
    bounds
        .hessian_bound
        .iter()
        .map(|h| bounds.alpha1 / (bounds.alpha2 * n as f64 * h * bounds.d))
        .collect()
}

/// Bound on the moving-window gradient estimation error:
/// `K * N * max|H| * max|dJ/du|` over the recent history.
pub fn error_bound(gain: f64, n: u64, hessian_bound: f64, max_recent_gradient: f64) -> f64 {
    gain * n as f64 * hessian_bound * max_recent_gradient
}

/// Mean-value form of the same bound: `max|H| * delta_u` for an observed
/// input span `delta_u` inside the window.
pub fn error_bound_mean_value(hessian_bound: f64, input_span: f64) -> f64 {
    hessian_bound * input_span
}

/// Everything the design subcommand reports for one dither set.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignReport {
    /// Minimum leakage-free window length (`gamma = 1`).
    pub n_min: u64,
    /// Independence and resolution warnings.
    pub violations: Vec<Violation>,
    /// Per-channel `K_max`, present when map bounds were supplied.
    pub gain_bounds: Option<Vec<f64>>,
}

pub fn design_report(
    set: &DitherSet,
    bounds: Option<&MapBounds>,
) -> Result<DesignReport, DesignError> {
    let n_min = window_length(set, 1)?;
    let mut violations = validate_dithers(set);
    violations.extend(
        check_resolution(set, n_min)
            .into_iter()
            .map(|(i, j)| Violation {
                kind: ViolationKind::Resolution,
                channels: vec![i, j],
            }),
    );
    let gain_bounds = match bounds {
        None => None,
        Some(b) => {
            if b.hessian_bound().len() != set.len() {
                return Err(DesignError::ChannelCountMismatch {
                    expected: set.len(),
                    got: b.hessian_bound().len(),
                });
            }
            Some(gain_interval(b, n_min))
        }
    };
    Ok(DesignReport {
        n_min,
        violations,
        gain_bounds,
    })
}
