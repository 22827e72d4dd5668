//! Shared test oracles, all independent of the library's computation paths:
//! direct-summation DFT, Monte-Carlo circle overlap, effectiveness-NTU
//! closed form, and derivative-free searches used as optima references.

#![allow(dead_code)]

use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// O(N^2) direct-summation DFT, the oracle every transform must match.
pub fn naive_dft(samples: &[f64]) -> Vec<(f64, f64)> {
    let n = samples.len();
    let mut out = Vec::with_capacity(n);
    for l in 0..n {
        let mut re = 0.0;
        let mut im = 0.0;
        for (k, &x) in samples.iter().enumerate() {
            let angle = -2.0 * std::f64::consts::PI * (l as f64) * (k as f64) / n as f64;
            re += x * angle.cos();
            im += x * angle.sin();
        }
        out.push((re, im));
    }
    out
}

/// Largest bin-wise deviation between a spectrum and the naive oracle,
/// normalized by the oracle's peak magnitude.
pub fn max_relative_bin_error(
    bins: &[rustfft::num_complex::Complex<f64>],
    oracle: &[(f64, f64)],
) -> f64 {
    let peak = oracle
        .iter()
        .map(|&(re, im)| (re * re + im * im).sqrt())
        .fold(0.0_f64, f64::max)
        .max(1.0);
    bins.iter()
        .zip(oracle)
        .map(|(b, &(re, im))| {
            let dre = b.re - re;
            let dim = b.im - im;
            (dre * dre + dim * dim).sqrt() / peak
        })
        .fold(0.0, f64::max)
}

/// Monte-Carlo estimate of the overlap area of two circles (centers `d`
/// apart), sampling the bounding box of the intersection region.
pub fn mc_circle_overlap(r1: f64, r2: f64, d: f64, samples: u64, seed: u64) -> f64 {
    let x_lo = (-r1).max(d - r2);
    let x_hi = r1.min(d + r2);
    let y_max = r1.min(r2);
    if x_hi <= x_lo {
        return 0.0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0u64;
    for _ in 0..samples {
        let x = rng.gen_range(x_lo..x_hi);
        let y = rng.gen_range(-y_max..y_max);
        if x * x + y * y <= r1 * r1 {
            let dx = x - d;
            if dx * dx + y * y <= r2 * r2 {
                hits += 1;
            }
        }
    }
    let box_area = (x_hi - x_lo) * 2.0 * y_max;
    hits as f64 / samples as f64 * box_area
}

/// Closed-form duty of a balanced counter-current exchanger
/// (equal capacitance rates `c` on both sides): `Q = eps * c * dT0` with
/// `eps = NTU / (1 + NTU)`.
pub fn balanced_counterflow_duty(ua: f64, c: f64, dt0: f64) -> f64 {
    let ntu = ua / c;
    (ntu / (1.0 + ntu)) * c * dt0
}

/// Derivative-free coordinate search of a box-constrained maximum. Sweeps
/// channels with a shrinking step menu until no move improves the
/// objective.
pub fn coordinate_search_max(
    mut u: Vec<f64>,
    bounds: &[(f64, f64)],
    mut objective: impl FnMut(&[f64]) -> f64,
) -> (Vec<f64>, f64) {
    let steps = [1e-2, 1e-3, 1e-4, 1e-5];
    for _ in 0..500 {
        let mut moved = false;
        for i in 0..u.len() {
            let base = objective(&u);
            'menu: for &s in &steps {
                for dir in [1.0, -1.0] {
                    let cand = (u[i] + dir * s).clamp(bounds[i].0, bounds[i].1);
                    if cand == u[i] {
                        continue;
                    }
                    let old = u[i];
                    u[i] = cand;
                    if objective(&u) > base {
                        moved = true;
                        break 'menu;
                    }
                    u[i] = old;
                }
            }
        }
        if !moved {
            return (u.clone(), objective(&u));
        }
    }
    let value = objective(&u);
    (u, value)
}

/// Path of a shipped scenario file.
pub fn scenario_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(name)
}
