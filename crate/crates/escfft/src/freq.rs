//! Exact rational frequencies in cycles per sample.
//!
//! Dither frequencies are kept as reduced fractions rather than floats so
//! that window-length selection (least common multiples of the periods) and
//! the independence checks between channels are exact. Floating comparison
//! would make both meaningless.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Error building or parsing a dither frequency.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FreqError {
    /// Denominator was zero.
    ZeroDenominator,
    /// Frequency must satisfy 0 < f < 1/2 (cycles per sample).
    OutOfRange { num: u64, den: u64 },
    /// String did not parse as `p/q`.
    Malformed(String),
}

impl fmt::Display for FreqError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FreqError::ZeroDenominator => write!(f, "frequency denominator must be nonzero"),
            FreqError::OutOfRange { num, den } => {
                write!(f, "frequency {num}/{den} outside the open interval (0, 1/2)")
            }
            FreqError::Malformed(s) => {
                write!(f, "malformed rational frequency `{s}` (expected `p/q`)")
            }
        }
    }
}

impl std::error::Error for FreqError {}

/// A frequency in cycles per sample, stored as a reduced fraction.
///
/// Valid frequencies lie strictly between zero and the Nyquist limit 1/2, so
/// every representable dither completes `numer()` full cycles in `denom()`
/// samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DitherFreq(Ratio<u64>);

impl DitherFreq {
    pub fn new(num: u64, den: u64) -> Result<Self, FreqError> {
        if den == 0 {
            return Err(FreqError::ZeroDenominator);
        }
        if num == 0 || (num as u128) * 2 >= den as u128 {
            return Err(FreqError::OutOfRange { num, den });
        }
        Ok(DitherFreq(Ratio::new(num, den)))
    }

    /// Numerator of the reduced fraction.
    pub fn numer(&self) -> u64 {
        *self.0.numer()
    }

    /// Denominator of the reduced fraction (the period in samples).
    pub fn denom(&self) -> u64 {
        *self.0.denom()
    }

    pub fn value(&self) -> f64 {
        self.numer() as f64 / self.denom() as f64
    }

    /// Angular frequency in radians per sample.
    pub fn omega(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.value()
    }

    /// DFT bin index of this frequency in an `n`-point window, provided the
    /// window contains an integer number of cycles. `None` means off-bin.
    pub fn bin_index(&self, n: usize) -> Option<usize> {
        let p = self.numer() as u128;
        let q = self.denom() as u128;
        let n = n as u128;
        if n.is_multiple_of(q) {
            Some((p * (n / q)) as usize)
        } else {
            None
        }
    }

    pub(crate) fn as_signed_ratio(&self) -> Ratio<i128> {
        Ratio::new(self.numer() as i128, self.denom() as i128)
    }
}

impl fmt::Display for DitherFreq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

impl FromStr for DitherFreq {
    type Err = FreqError;

    fn from_str(s: &str) -> Result<Self, FreqError> {
        let (p, q) = s
            .split_once('/')
            .ok_or_else(|| FreqError::Malformed(s.to_string()))?;
        let num: u64 = p
            .trim()
            .parse()
            .map_err(|_| FreqError::Malformed(s.to_string()))?;
        let den: u64 = q
            .trim()
            .parse()
            .map_err(|_| FreqError::Malformed(s.to_string()))?;
        DitherFreq::new(num, den)
    }
}

impl Serialize for DitherFreq {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for DitherFreq {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(D::Error::custom)
    }
}
