//! CSV and JSON artifacts for runs: `trace.csv`, `spectrogram.csv`,
//! `meta.json`, and the offline single-frame spectrum view.
//!
//! Floats are written in Rust's shortest round-trip decimal form, so a
//! parsed value is bit-identical to the recorded one and reruns with the
//! same seed diff clean.

use std::fmt;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::scenario::ScenarioFile;
use crate::sim::{RunFailure, Trace};
use crate::spectral::{detrend_samples, dft};

#[derive(Debug)]
pub enum TraceReadError {
    Io(io::Error),
    /// Header or row does not match the trace.csv layout.
    Malformed { line: usize, message: String },
    /// Requested step not present in the trace.
    StepOutOfRange { step: u64 },
    /// Fewer than N rows end at the requested step.
    TooShort { need: usize, have: usize },
}

impl fmt::Display for TraceReadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TraceReadError::Io(e) => write!(f, "cannot read trace: {e}"),
            TraceReadError::Malformed { line, message } => {
                write!(f, "malformed trace at line {line}: {message}")
            }
            TraceReadError::StepOutOfRange { step } => {
                write!(f, "step {step} is not in the trace")
            }
            TraceReadError::TooShort { need, have } => write!(
                f,
                "need {need} samples ending at the requested step, trace provides {have}"
            ),
        }
    }
}

impl std::error::Error for TraceReadError {}

impl From<io::Error> for TraceReadError {
    fn from(e: io::Error) -> Self {
        TraceReadError::Io(e)
    }
}

/// `step, cost_raw, cost_noisy, u_1..u_n, applied_1..applied_n,
/// grad_1..grad_n`; gradient cells are empty during warm-up.
pub fn write_trace_csv(path: &Path, trace: &Trace) -> io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    let n = trace.input_dim;
    let mut header = String::from("step,cost_raw,cost_noisy");
    for i in 1..=n {
        header.push_str(&format!(",u_{i}"));
    }
    for i in 1..=n {
        header.push_str(&format!(",applied_{i}"));
    }
    for i in 1..=n {
        header.push_str(&format!(",grad_{i}"));
    }
    writeln!(w, "{header}")?;
    for row in &trace.rows {
        let mut line = format!("{},{},{}", row.step, row.cost_raw, row.cost_noisy);
        for v in &row.nominal {
            line.push(',');
            line.push_str(&v.to_string());
        }
        for v in &row.applied {
            line.push(',');
            line.push_str(&v.to_string());
        }
        match &row.gradients {
            Some(gs) => {
                for v in gs {
                    line.push(',');
                    line.push_str(&v.to_string());
                }
            }
            None => {
                for _ in 0..n {
                    line.push(',');
                }
            }
        }
        writeln!(w, "{line}")?;
    }
    w.flush()
}

/// Long-format frames: `step, bin_freq, amplitude`.
pub fn write_spectrogram_csv(path: &Path, trace: &Trace) -> io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "step,bin_freq,amplitude")?;
    let n = trace.n_points as f64;
    for frame in &trace.frames {
        for (l, amp) in frame.amplitudes.iter().enumerate() {
            writeln!(w, "{},{},{}", frame.step, l as f64 / n, amp)?;
        }
    }
    w.flush()
}

#[derive(Debug, Serialize)]
pub struct RngMeta {
    pub algorithm: &'static str,
    pub seed: Option<u64>,
    pub noise_std: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct FailureMeta {
    pub step: u64,
    pub message: String,
}

/// Everything needed to reproduce and audit a run.
#[derive(Debug, Serialize)]
pub struct RunMeta<'a> {
    pub version: &'static str,
    pub n_points: u64,
    pub spectrogram_stride: u64,
    pub total_steps: u64,
    pub rng: RngMeta,
    pub defaults_applied: &'a [String],
    pub dither_warnings: Vec<String>,
    pub failure: Option<FailureMeta>,
    /// The resolved scenario file, after CLI overrides.
    pub scenario: &'a ScenarioFile,
}

impl<'a> RunMeta<'a> {
    pub fn new(
        file: &'a ScenarioFile,
        trace: &Trace,
        defaults_applied: &'a [String],
        dither_warnings: Vec<String>,
    ) -> Self {
        RunMeta {
            version: env!("CARGO_PKG_VERSION"),
            n_points: trace.n_points,
            spectrogram_stride: trace.stride,
            total_steps: trace.rows.len() as u64,
            rng: RngMeta {
                algorithm: crate::sim::RNG_ALGORITHM,
                seed: file.run.noise.as_ref().map(|n| n.seed),
                noise_std: file.run.noise.as_ref().map(|n| n.std),
            },
            defaults_applied,
            dither_warnings,
            failure: trace.failure.as_ref().map(|f: &RunFailure| FailureMeta {
                step: f.step,
                message: f.message.clone(),
            }),
            scenario: file,
        }
    }
}

pub fn write_meta_json(path: &Path, meta: &RunMeta) -> io::Result<()> {
    let text = serde_json::to_string_pretty(meta).expect("meta serialization cannot fail");
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{text}")?;
    w.flush()
}

/// Read back `(step, cost_noisy)` pairs from a trace.csv.
pub fn read_cost_series(path: &Path) -> Result<Vec<(u64, f64)>, TraceReadError> {
    let reader = BufReader::new(File::open(path)?);
    let mut lines = reader.lines().enumerate();
    let (_, header) = lines.next().ok_or(TraceReadError::Malformed {
        line: 1,
        message: "empty file".into(),
    })?;
    let header = header?;
    let columns: Vec<&str> = header.split(',').collect();
    let step_col = columns
        .iter()
        .position(|&c| c == "step")
        .ok_or(TraceReadError::Malformed {
            line: 1,
            message: "missing `step` column".into(),
        })?;
    let cost_col = columns
        .iter()
        .position(|&c| c == "cost_noisy")
        .ok_or(TraceReadError::Malformed {
            line: 1,
            message: "missing `cost_noisy` column".into(),
        })?;
    let mut out = Vec::new();
    for (idx, line) in lines {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let parse = |col: usize| -> Result<&str, TraceReadError> {
            fields.get(col).copied().ok_or(TraceReadError::Malformed {
                line: idx + 1,
                message: format!("missing column {col}"),
            })
        };
        let step: u64 = parse(step_col)?
            .parse()
            .map_err(|e| TraceReadError::Malformed {
                line: idx + 1,
                message: format!("bad step: {e}"),
            })?;
        let cost: f64 = parse(cost_col)?
            .parse()
            .map_err(|e| TraceReadError::Malformed {
                line: idx + 1,
                message: format!("bad cost: {e}"),
            })?;
        out.push((step, cost));
    }
    Ok(out)
}

/// Recompute the single-sided amplitude array for the window of `n` noisy
/// cost samples ending at `step`. Matches the frame a live run would have
/// recorded at that step.
pub fn spectrum_frame(
    costs: &[(u64, f64)],
    n: usize,
    step: u64,
) -> Result<Vec<(f64, f64)>, TraceReadError> {
    let idx = costs
        .iter()
        .position(|&(s, _)| s == step)
        .ok_or(TraceReadError::StepOutOfRange { step })?;
    if idx + 1 < n {
        return Err(TraceReadError::TooShort {
            need: n,
            have: idx + 1,
        });
    }
    let window: Vec<f64> = costs[idx + 1 - n..=idx].iter().map(|&(_, c)| c).collect();
    let spectrum = dft(&detrend_samples(&window)).map_err(|e| TraceReadError::Malformed {
        line: 0,
        message: e.to_string(),
    })?;
    Ok(spectrum
        .amplitude_single_sided()
        .iter()
        .enumerate()
        .map(|(l, &a)| (l as f64 / n as f64, a))
        .collect())
}

/// `bin_freq, amplitude` rows for one frame.
pub fn write_spectrum_csv<W: Write>(mut w: W, frame: &[(f64, f64)]) -> io::Result<()> {
    writeln!(w, "bin_freq,amplitude")?;
    for (freq, amp) in frame {
        writeln!(w, "{freq},{amp}")?;
    }
    Ok(())
}
