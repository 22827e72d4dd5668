//! Command-line front end: design reports, scenario runs, and offline
//! spectrum frames.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};

use escfft::scenario::{ResolvedScenario, ScenarioFile};
use escfft::trace_io::{
    read_cost_series, spectrum_frame, write_meta_json, write_spectrogram_csv, write_spectrum_csv,
    write_trace_csv, RunMeta,
};
use escfft::{design_report, run, DesignReport};

#[derive(Parser)]
#[command(
    name = "escfft",
    version,
    about = "FFT-based multivariable extremum seeking toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a scenario's dither set and print the design report
    Design {
        /// Scenario file (JSON)
        #[arg(long)]
        config: PathBuf,
    },
    /// Run a scenario and write trace.csv, spectrogram.csv, and meta.json
    Run {
        /// Scenario file (JSON)
        #[arg(long)]
        config: PathBuf,
        /// Output directory (created if missing)
        #[arg(long)]
        out: PathBuf,
        /// Override the noise seed
        #[arg(long)]
        seed: Option<u64>,
        /// Override the number of steps
        #[arg(long)]
        steps: Option<u64>,
    },
    /// Recompute one spectrogram frame from a recorded trace.csv
    Spectrum {
        /// Path to trace.csv (meta.json must sit next to it)
        #[arg(long)]
        trace: PathBuf,
        /// Step index the window should end at
        #[arg(long)]
        step: u64,
        /// Output CSV path; stdout when omitted
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Design { config } => cmd_design(&config),
        Command::Run {
            config,
            out,
            seed,
            steps,
        } => cmd_run(&config, &out, seed, steps).map(|_| 0),
        Command::Spectrum { trace, step, out } => cmd_spectrum(&trace, step, out.as_deref()).map(|_| 0),
    };
    match code {
        Ok(c) => ExitCode::from(c),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn load(config: &Path) -> Result<(ScenarioFile, ResolvedScenario)> {
    let file = ScenarioFile::from_path(config)
        .with_context(|| format!("loading {}", config.display()))?;
    let resolved = file.resolve()?;
    Ok((file, resolved))
}

fn cmd_design(config: &Path) -> Result<u8> {
    let (_, resolved) = load(config)?;
    let report: DesignReport =
        design_report(&resolved.scenario.dithers, resolved.map_bounds.as_ref())?;

    println!("minimum leakage-free window: N = {} samples", report.n_min);
    println!("channels:");
    for (i, d) in resolved.scenario.dithers.channels().iter().enumerate() {
        let k_max = report
            .gain_bounds
            .as_ref()
            .map(|g| format!(", gain interval (0, {:.6e})", g[i]))
            .unwrap_or_default();
        println!(
            "  u{}: f = {} cycles/sample, amplitude {}{}",
            i + 1,
            d.frequency(),
            d.amplitude(),
            k_max
        );
    }
    if report.gain_bounds.is_none() {
        println!("gain intervals: not computed (no map_bounds section)");
    }
    if report.violations.is_empty() {
        println!("no dither violations");
        Ok(0)
    } else {
        for v in &report.violations {
            println!("warning: {v}");
        }
        Ok(2)
    }
}

fn cmd_run(config: &Path, out: &Path, seed: Option<u64>, steps: Option<u64>) -> Result<()> {
    let mut file = ScenarioFile::from_path(config)
        .with_context(|| format!("loading {}", config.display()))?;
    if let Some(s) = steps {
        file.run.steps = s;
    }
    if let Some(s) = seed {
        match &mut file.run.noise {
            Some(noise) => noise.seed = s,
            None => bail!("--seed given but the scenario has no noise section"),
        }
    }
    let resolved = file.resolve()?;

    let report = design_report(&resolved.scenario.dithers, None)?;
    let warnings: Vec<String> = report.violations.iter().map(|v| v.to_string()).collect();
    for w in &warnings {
        eprintln!("dither warning: {w}");
    }

    let trace = run(&resolved.scenario)?;

    std::fs::create_dir_all(out)
        .with_context(|| format!("creating output directory {}", out.display()))?;
    write_trace_csv(&out.join("trace.csv"), &trace)?;
    write_spectrogram_csv(&out.join("spectrogram.csv"), &trace)?;
    let meta = RunMeta::new(&file, &trace, &resolved.defaults_applied, warnings);
    write_meta_json(&out.join("meta.json"), &meta)?;

    if let Some(failure) = &trace.failure {
        bail!(
            "run aborted at step {}: {} (partial trace written to {})",
            failure.step,
            failure.message,
            out.display()
        );
    }
    println!(
        "wrote {} rows and {} spectrogram frames to {}",
        trace.rows.len(),
        trace.frames.len(),
        out.display()
    );
    Ok(())
}

fn cmd_spectrum(trace_path: &Path, step: u64, out: Option<&Path>) -> Result<()> {
    let meta_path = trace_path
        .parent()
        .map(|d| d.join("meta.json"))
        .ok_or_else(|| anyhow!("cannot locate meta.json next to {}", trace_path.display()))?;
    let meta_text = std::fs::read_to_string(&meta_path)
        .with_context(|| format!("reading {}", meta_path.display()))?;
    let meta: serde_json::Value = serde_json::from_str(&meta_text)?;
    let n = meta
        .get("n_points")
        .and_then(|v| v.as_u64())
        .ok_or_else(|| anyhow!("meta.json has no n_points field"))? as usize;

    let costs = read_cost_series(trace_path)?;
    let frame = spectrum_frame(&costs, n, step)?;
    match out {
        Some(path) => {
            let file = std::fs::File::create(path)
                .with_context(|| format!("creating {}", path.display()))?;
            write_spectrum_csv(std::io::BufWriter::new(file), &frame)?;
        }
        None => write_spectrum_csv(std::io::stdout().lock(), &frame)?,
    }
    Ok(())
}
