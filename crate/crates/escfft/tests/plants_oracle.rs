//! Plant models against independent oracles: a hand-built power chain for
//! the reference farm layout, Monte-Carlo wake overlap, effectiveness-NTU
//! closed forms, and grid searches over split ratios.

mod common;

use escfft::plant::{
    circle_overlap_area, ExchangerBranch, FlowType, HeatExchangerNetwork, Turbine, WindFarm,
};

fn reference_farm() -> WindFarm {
    WindFarm::new(
        vec![
            Turbine { x: 0.0, y: 200.0, diameter: 80.0 },
            Turbine { x: 400.0, y: 200.0, diameter: 80.0 },
            Turbine { x: 800.0, y: 200.0, diameter: 80.0 },
            Turbine { x: 0.0, y: 0.0, diameter: 80.0 },
            Turbine { x: 400.0, y: 0.0, diameter: 80.0 },
            Turbine { x: 800.0, y: 0.0, diameter: 80.0 },
        ],
        0.075,
        8.0,
        1.225,
    )
    .unwrap()
}

#[test]
fn six_turbine_farm_power_matches_independent_arithmetic() {
    // The two rows are 200 m apart while the widest wake radius at 800 m is
    // 100 m, so the rows decouple into two identical coaxial triples and
    // the whole farm reduces to scalar arithmetic:
    //   wake diameters: 140 m at 400 m, 200 m at 800 m (both full shadow)
    let farm = reference_farm();
    let u = vec![0.3; 6];

    let area = std::f64::consts::PI * 40.0 * 40.0;
    let cp = |a: f64| 4.0 * a * (1.0 - a) * (1.0 - a);
    let p = |v: f64, a: f64| 0.5 * 1.225 * area * cp(a) * v * v * v;

    let d2 = 2.0 * 0.3 * (80.0_f64 / 140.0).powi(2);
    let t31 = 0.3 * (80.0_f64 / 200.0).powi(2);
    let t32 = 0.3 * (80.0_f64 / 140.0).powi(2);
    let d3 = 2.0 * (t31 * t31 + t32 * t32).sqrt();
    let row = p(8.0, 0.3) + p(8.0 * (1.0 - d2), 0.3) + p(8.0 * (1.0 - d3), 0.3);
    let expected = 2.0 * row;

    let got = farm.farm_power(&u);
    assert!(
        ((got - expected) / expected).abs() < 1e-12,
        "farm power {got} vs independent chain {expected}"
    );
    // regression pin from the first verified computation
    assert!((got - 3_703_381.793_923_611_6).abs() < 1e-6, "got {got}");
}

#[test]
fn wake_overlap_matches_monte_carlo() {
    // partial overlaps at assorted geometries, 1e6 samples each
    let cases = [
        (40.0, 70.0, 90.0),
        (40.0, 100.0, 120.0),
        (40.0, 55.0, 60.0),
        (30.0, 45.0, 50.0),
    ];
    for (i, &(r1, r2, d)) in cases.iter().enumerate() {
        let exact = circle_overlap_area(r1, r2, d);
        let mc = common::mc_circle_overlap(r1, r2, d, 1_000_000, 1000 + i as u64);
        let rel = (exact - mc).abs() / exact;
        assert!(
            rel < 0.005,
            "case {i}: exact {exact} vs MC {mc} (rel {rel})"
        );
    }
}

#[test]
fn duty_solver_matches_effectiveness_ntu_on_balanced_counterflow() {
    // equal capacitance rates on both sides is the regime where the
    // cube-root mean is exact, so the closed form is a true oracle
    let cases = [
        (5.0e4, 0.15, 120.0),
        (2.0e4, 0.15, 140.0),
        (8.0e4, 0.15, 95.0),
        (1.0e5, 0.15, 130.0),
    ];
    for &(ua, split, hot_in) in &cases {
        let net = HeatExchangerNetwork::new(
            vec![
                ExchangerBranch { ua, hot_inlet_temp: hot_in, hot_flow: 15.0 },
                ExchangerBranch { ua: 1.0, hot_inlet_temp: 100.0, hot_flow: 15.0 },
            ],
            60.0,
            100.0,
            4.2,
            FlowType::CounterCurrent,
        )
        .unwrap();
        let got = net.exchanger_outlets(0, split).unwrap().duty;
        let c = 15.0 * 4.2;
        let expected = common::balanced_counterflow_duty(ua / 1000.0, c, hot_in - 60.0);
        assert!(
            (got - expected).abs() < 1e-6,
            "UA {ua}: duty {got} vs NTU closed form {expected}"
        );
    }
}

#[test]
fn identical_branches_are_best_served_by_equal_splits() {
    let net = HeatExchangerNetwork::new(
        vec![
            ExchangerBranch { ua: 5.0e4, hot_inlet_temp: 120.0, hot_flow: 15.0 },
            ExchangerBranch { ua: 5.0e4, hot_inlet_temp: 120.0, hot_flow: 15.0 },
            ExchangerBranch { ua: 5.0e4, hot_inlet_temp: 120.0, hot_flow: 15.0 },
        ],
        60.0,
        100.0,
        4.2,
        FlowType::CounterCurrent,
    )
    .unwrap();
    // grid search over the two controlled splits
    let mut best = (-f64::INFINITY, 0.0, 0.0);
    let mut u1 = 0.02;
    while u1 < 0.96 {
        let mut u2 = 0.02;
        while u1 + u2 < 0.98 {
            if let Ok(t) = net.end_temperature(&[u1, u2]) {
                if t > best.0 {
                    best = (t, u1, u2);
                }
            }
            u2 += 0.01;
        }
        u1 += 0.01;
    }
    assert!(
        (best.1 - 1.0 / 3.0).abs() < 0.02 && (best.2 - 1.0 / 3.0).abs() < 0.02,
        "grid optimum at ({}, {}), expected equal thirds",
        best.1,
        best.2
    );
    let equal = net.end_temperature(&[1.0 / 3.0, 1.0 / 3.0]).unwrap();
    assert!(equal >= best.0 - 1e-6);
}

#[test]
fn dead_branch_attracts_the_floor_split() {
    // branch 1 transfers nothing; the best split starves it
    let net = HeatExchangerNetwork::new(
        vec![
            ExchangerBranch { ua: 0.0, hot_inlet_temp: 120.0, hot_flow: 15.0 },
            ExchangerBranch { ua: 5.0e4, hot_inlet_temp: 120.0, hot_flow: 15.0 },
        ],
        60.0,
        100.0,
        4.2,
        FlowType::CounterCurrent,
    )
    .unwrap();
    let mut best = (-f64::INFINITY, 0.0);
    let mut u1 = 0.002;
    while u1 < 0.99 {
        if let Ok(t) = net.end_temperature(&[u1]) {
            if t > best.0 {
                best = (t, u1);
            }
        }
        u1 += 0.002;
    }
    assert!(best.1 < 0.01, "optimal dead-branch split {} should hug the floor", best.1);
}

#[test]
fn wake_deficit_is_reflection_symmetric_in_crosswind_offset() {
    let mut farm = reference_farm();
    let u = vec![0.3; 6];
    // move the downwind turbine of row two off-axis by +60 and -60
    farm = WindFarm::new(
        {
            let mut t = farm.turbines().to_vec();
            t[4].y = 60.0;
            t
        },
        0.075,
        8.0,
        1.225,
    )
    .unwrap();
    let up = farm.velocity_deficit(&u, 4);
    let farm_down = WindFarm::new(
        {
            let mut t = reference_farm().turbines().to_vec();
            t[4].y = -60.0;
            t
        },
        0.075,
        8.0,
        1.225,
    )
    .unwrap();
    let down = farm_down.velocity_deficit(&u, 4);
    assert!((up - down).abs() < 1e-12);
}
