//! Harness-level behavior: determinism, noise isolation, warm-up length,
//! live/offline spectrogram agreement, and the desk-scale noise-robustness
//! proxy.

mod common;

use escfft::{
    run, spectrogram, DitherFreq, DitherSet, DitherSpec, GradientMethod, NoiseSpec, PlantModel,
    QuadraticMap, Scenario, Sense, WindowChoice,
};

fn quadratic_scenario(steps: u64, gain: f64, noise: Option<NoiseSpec>) -> Scenario {
    Scenario {
        plant: PlantModel::Quadratic(QuadraticMap {
            curvature: -100.0,
            optimum: 0.5,
            offset: 0.0,
        }),
        dithers: DitherSet::new(vec![
            DitherSpec::new(0.01, DitherFreq::new(1, 8).unwrap()).unwrap(),
        ])
        .unwrap(),
        initial_inputs: vec![0.2],
        gains: vec![gain],
        sense: Sense::Maximize,
        input_box: None,
        method: GradientMethod::AmplitudePhaseSign,
        window: WindowChoice::Fixed(128),
        total_steps: steps,
        noise,
        disturbances: vec![],
        spectrogram_stride: None,
        cost_scale: 1.0,
    }
}

#[test]
fn identical_config_and_seed_reproduce_the_trace_exactly() {
    let scenario = quadratic_scenario(1000, 1.5e-5, Some(NoiseSpec { std: 0.05, seed: 9 }));
    let a = run(&scenario).unwrap();
    let b = run(&scenario).unwrap();
    assert_eq!(a, b);
}

#[test]
fn zero_gain_holds_the_nominal_for_the_whole_run() {
    let trace = run(&quadratic_scenario(500, 0.0, None)).unwrap();
    for row in &trace.rows {
        assert_eq!(row.nominal[0], 0.2);
    }
}

#[test]
fn noise_enters_the_measured_cost_only() {
    // with the integrator disabled the raw series is seed-independent while
    // the noisy series differs; with it enabled, the warm-up prefix (where
    // noise has not yet fed back through the controller) is seed-independent
    let a = run(&quadratic_scenario(500, 0.0, Some(NoiseSpec { std: 0.05, seed: 1 }))).unwrap();
    let b = run(&quadratic_scenario(500, 0.0, Some(NoiseSpec { std: 0.05, seed: 2 }))).unwrap();
    let mut saw_noise_difference = false;
    for (ra, rb) in a.rows.iter().zip(&b.rows) {
        assert_eq!(ra.cost_raw, rb.cost_raw);
        if ra.cost_noisy != rb.cost_noisy {
            saw_noise_difference = true;
        }
    }
    assert!(saw_noise_difference);

    let a = run(&quadratic_scenario(500, 1.5e-5, Some(NoiseSpec { std: 0.05, seed: 1 }))).unwrap();
    let b = run(&quadratic_scenario(500, 1.5e-5, Some(NoiseSpec { std: 0.05, seed: 2 }))).unwrap();
    for (ra, rb) in a.rows.iter().take(128).zip(&b.rows) {
        assert_eq!(ra.cost_raw, rb.cost_raw);
    }
}

#[test]
fn warm_up_lasts_exactly_n_steps() {
    let trace = run(&quadratic_scenario(300, 1.5e-5, None)).unwrap();
    for row in &trace.rows[..128] {
        assert!(row.gradients.is_none());
        assert_eq!(row.nominal[0], 0.2);
    }
    assert!(trace.rows[128].gradients.is_some());
}

#[test]
fn live_and_offline_spectrograms_agree() {
    let scenario = quadratic_scenario(1500, 1.5e-5, Some(NoiseSpec { std: 0.01, seed: 4 }));
    let trace = run(&scenario).unwrap();
    assert!(!trace.frames.is_empty());
    let offline = spectrogram(&trace);
    assert_eq!(trace.frames.len(), offline.len());
    for (live, off) in trace.frames.iter().zip(&offline) {
        assert_eq!(live.step, off.step);
        for (a, b) in live.amplitudes.iter().zip(&off.amplitudes) {
            assert!((a - b).abs() <= 1e-12, "frame mismatch: {a} vs {b}");
        }
    }
}

#[test]
fn frames_start_after_warm_up_on_stride_multiples() {
    let trace = run(&quadratic_scenario(400, 1.5e-5, None)).unwrap();
    // stride defaults to N/4 = 32; the first step that is both past
    // warm-up and a stride multiple is 128
    assert_eq!(trace.frames[0].step, 128);
    for frame in &trace.frames {
        assert_eq!(frame.step % 32, 0);
        assert!(frame.step >= 127);
    }
}

#[test]
fn open_loop_frames_show_the_dither_line_at_the_local_slope() {
    // a gentle quadratic evaluated far from its vertex: the local slope at
    // u0 = 0.2 is 2*0.5*(0.2 + 99.8) = 100, so with the integrator disabled
    // every frame's dither bin reads slope * a = 1.0 (the curvature term
    // lives entirely at twice the frequency)
    let mut scenario = quadratic_scenario(600, 0.0, None);
    scenario.plant = PlantModel::Quadratic(QuadraticMap {
        curvature: 0.5,
        optimum: -99.8,
        offset: 0.0,
    });
    let trace = run(&scenario).unwrap();
    let f = DitherFreq::new(1, 8).unwrap();
    let bin = f.bin_index(128).unwrap();
    for frame in &trace.frames {
        let amp = frame.amplitudes[bin];
        assert!(
            (amp - 100.0 * 0.01).abs() < 1e-3,
            "dither line should read 1.0, got {amp}"
        );
    }
}

#[test]
fn zero_cost_plant_yields_zero_frames() {
    let mut scenario = quadratic_scenario(400, 0.0, None);
    scenario.plant = PlantModel::Quadratic(QuadraticMap {
        curvature: 0.0,
        optimum: 0.0,
        offset: 0.0,
    });
    let trace = run(&scenario).unwrap();
    for frame in &trace.frames {
        for &a in &frame.amplitudes {
            assert!(a.abs() < 1e-12);
        }
    }
}

#[test]
fn noisy_final_error_stays_within_three_times_noise_free() {
    // noise std at 10% of the dither-induced cost amplitude
    // |J'(u0)| * a = 60 * 0.01 = 0.6, run short enough that the
    // deterministic residual dominates the noise-driven wander
    let steps = 1200;
    let noise_free = run(&quadratic_scenario(steps, 1.5e-5, None)).unwrap();
    let err_free = (noise_free.rows.last().unwrap().nominal[0] - 0.5).abs();
    for seed in 1..=5 {
        let noisy = run(&quadratic_scenario(
            steps,
            1.5e-5,
            Some(NoiseSpec {
                std: 0.06,
                seed,
            }),
        ))
        .unwrap();
        let err_noisy = (noisy.rows.last().unwrap().nominal[0] - 0.5).abs();
        assert!(
            err_noisy <= 3.0 * err_free,
            "seed {seed}: noisy error {err_noisy} vs noise-free {err_free}"
        );
    }
}

#[test]
fn aborted_run_records_partial_trace_via_plant_failure() {
    let mut scenario = quadratic_scenario(600, 1.5e-5, None);
    scenario.disturbances = vec![escfft::Disturbance {
        step: 200,
        path: "bogus".into(),
        value: 0.0,
    }];
    let trace = run(&scenario).unwrap();
    assert_eq!(trace.rows.len(), 200);
    assert_eq!(trace.failure.as_ref().unwrap().step, 200);
}
