use noetherlab_core::analysis::*;
use noetherlab_core::dynamics::{integrate, EventKind, IntegratorOptions, PhaseState, Trajectory};
use noetherlab_core::systems::*;
use proptest::prelude::*;
use std::f64::consts::PI;

const POLICY: ReferencePoint = ReferencePoint::OuterTurning;

fn run(sys: &SystemDef, s0: PhaseState, horizon: f64) -> Trajectory {
    let opts = IntegratorOptions::default().with_tol(1e-12).with_sample_dt(0.01);
    integrate(sys, &s0, horizon, &opts).unwrap().with_events(sys, &sys.natural_events())
}

fn integral(sys: &SystemDef, name: &str) -> FirstIntegral {
    sys.first_integrals(POLICY).into_iter().find(|i| i.name == name).unwrap()
}

fn theta_report(sys: &SystemDef, starts: &[PhaseState], horizon: f64) -> DiagnosticsReport {
    let runs: Vec<_> = starts.iter().map(|s| run(sys, *s, horizon)).collect();
    classify(sys, &integral(sys, "Theta"), &runs)
}

/// Angle between apsides of `U = −k/r − K/r²` at angular momentum `L`.
fn perturbed_apsidal(big_k: f64, l: f64) -> f64 {
    PI / (1.0 - 2.0 * big_k / (l * l)).sqrt()
}

fn bound_starts() -> [PhaseState; 3] {
    [
        PhaseState::polar(0.0, 1.0, 0.0, 0.1, 0.9),
        PhaseState::polar(0.0, 1.2, 0.5, -0.2, 0.7),
        PhaseState::polar(0.0, 0.8, 1.0, 0.3, 1.1),
    ]
}

#[test]
fn drift_of_conserved_and_corrupted_quantities() {
    let sys = make_darboux(0.5, 1.0).unwrap();
    let traj = run(&sys, PhaseState::polar(0.0, 0.7, 0.1, 0.2, 0.8), 100.0);
    let l = integral(&sys, "L");
    let d = drift(&traj, &l);
    assert!(d.max < 1e-9 && d.failed_at.is_empty(), "{d:?}");

    let l0 = l.value(&traj.samples[0]).unwrap();
    assert!(l0.abs() < 1.0);
    let eval = l.eval.clone();
    let corrupted = FirstIntegral::new("L+0.01t", move |s| Ok(eval(s)? + 0.01 * s.t));
    assert!((drift(&traj, &corrupted).max - 0.01 * traj.t_end()).abs() < 1e-8);

    let osc = make_uncoupled(1.0, 1.5).unwrap();
    let traj = run(&osc, PhaseState::cartesian(0.0, [1.0, 0.3], [0.2, -0.4]), 100.0);
    assert!(drift(&traj, &integral(&osc, "Phi")).max < 1e-9);
}

#[test]
fn failed_evaluations_are_reported_not_fatal() {
    let sys = make_darboux(0.5, 1.0).unwrap();
    let traj = run(&sys, PhaseState::polar(0.0, 0.7, 0.1, 0.2, 0.8), 5.0);
    let flaky = FirstIntegral::new("flaky", |s| if s.t > 2.0 && s.t < 3.0 { Err(noetherlab_core::Error::EvaluationFailed) } else { Ok(1.0) });
    let d = drift(&traj, &flaky);
    assert_eq!(d.max, 0.0);
    assert!(!d.failed_at.is_empty() && d.failed_at.iter().all(|t| *t > 2.0 && *t < 3.0));
    let r = classify(&sys, &flaky, &[traj]);
    assert!(r.evaluation_failures > 0);
    assert_ne!(r.classification, Classification::SingleValued);
}

#[test]
fn jumps_at_turning_points() {
    let coulomb = make_central(Potential::Coulomb { k: 1.0 }).unwrap();
    let traj = run(&coulomb, bound_starts()[0], 60.0);
    let jumps = jump_scan(&traj, &integral(&coulomb, "Theta"), &traj.events);
    assert!(jumps.len() > 4);
    assert!(jumps.iter().all(|j| j.magnitude < 1e-6), "{jumps:?}");

    let darboux = make_darboux(0.5, 1.0).unwrap();
    let traj = run(&darboux, PhaseState::polar(0.0, 0.5, 0.2, 0.1, 0.6), 60.0);
    let jumps = jump_scan(&traj, &integral(&darboux, "Theta"), &traj.events);
    assert!(jumps.len() > 4);
    assert!(jumps.iter().all(|j| j.magnitude < 1e-6), "{jumps:?}");

    let perturbed = make_central(Potential::PerturbedCoulomb { k: 1.0, big_k: 0.18 }).unwrap();
    let traj = run(&perturbed, PhaseState::polar(0.0, 1.0, 0.0, 0.2, 1.0), 60.0);
    let jumps = jump_scan(&traj, &integral(&perturbed, "Theta"), &traj.events);
    let want = 2.0 * (perturbed_apsidal(0.18, 1.0) - PI).abs();
    assert!((want - PI / 2.0).abs() < 1e-12);
    let big: Vec<_> = jumps.iter().filter(|j| j.magnitude > 1e-3).collect();
    assert!(big.len() > 2);
    for j in big {
        assert!((j.magnitude - want).abs() < 1e-4, "{} vs {want}", j.magnitude);
    }
}

#[test]
fn jumps_do_not_see_a_full_turn() {
    let sys = make_central(Potential::PerturbedCoulomb { k: 1.0, big_k: 0.18 }).unwrap();
    let theta = integral(&sys, "Theta");
    let s0 = PhaseState::polar(0.0, 1.0, 0.4, 0.2, 1.0);
    let mut turned = s0;
    turned.q[1] += 2.0 * PI;
    let a = run(&sys, s0, 30.0);
    let b = run(&sys, turned, 30.0);
    let ja = jump_scan(&a, &theta, &a.events);
    let jb = jump_scan(&b, &theta, &b.events);
    assert_eq!(ja.len(), jb.len());
    for (x, y) in ja.iter().zip(&jb) {
        assert!((x.magnitude - y.magnitude).abs() < 1e-9);
    }
}

#[test]
fn apsidal_angles_two_ways() {
    let cases = [
        (Potential::Coulomb { k: 1.0 }, PI, 1e-6),
        (Potential::Isotropic { k: 0.5 }, PI / 2.0, 1e-6),
        (Potential::PerturbedCoulomb { k: 1.0, big_k: 0.18 }, perturbed_apsidal(0.18, 1.0), 1e-5),
    ];
    for (p, want, tol) in cases {
        let sys = make_central(p).unwrap();
        // L = 1 for every start
        let s0 = PhaseState::polar(0.0, 1.0, 0.0, 0.2, 1.0);
        let from_events = apsidal_angle(&run(&sys, s0, 20.0)).unwrap();
        let from_quadrature = apsidal_angle_quadrature(&sys, &s0).unwrap();
        assert!((from_events - want).abs() < tol, "{p:?}: {from_events} vs {want}");
        assert!((from_quadrature - want).abs() < tol, "{p:?}: {from_quadrature} vs {want}");
        assert!((from_events - from_quadrature).abs() < 1e-5);
    }
}

#[test]
fn apsidal_angle_in_the_cartesian_chart() {
    // the equal-frequency oscillator is the isotropic one
    let sys = make_uncoupled(1.0, 1.0).unwrap();
    let traj = run(&sys, PhaseState::cartesian(0.0, [1.0, 0.2], [0.1, 0.6]), 10.0).with_events(&sys, &[EventKind::TurningPoint]);
    assert!((apsidal_angle(&traj).unwrap() - PI / 2.0).abs() < 1e-6);
    let short = run(&sys, PhaseState::cartesian(0.0, [1.0, 0.2], [0.1, 0.6]), 0.1).with_events(&sys, &[EventKind::TurningPoint]);
    assert_eq!(apsidal_angle(&short), Err(noetherlab_core::Error::InsufficientEvents));
}

#[test]
fn commensurability_examples() {
    assert_eq!(commensurability(1.0, 1.5, 100, 1e-9), Some((2, 3)));
    assert_eq!(commensurability(1.0, 2f64.sqrt(), 100, 1e-9), None);
    assert_eq!(commensurability(1.3, 1.3, 100, 1e-9), Some((1, 1)));
}

/// Φ on the exact two-frequency solution, sampled away from velocity reversals.
fn exact_phi_samples(omega: [f64; 2], horizon: f64) -> Vec<f64> {
    let osc = Uncoupled::new(omega[0], omega[1]).unwrap();
    let (amp, phase) = ([1.0, 0.7], [0.3, 1.1]);
    let dt = 0.01;
    let mut out = Vec::new();
    for k in 0..=(horizon / dt) as usize {
        let t = k as f64 * dt;
        let arg = [omega[0] * t + phase[0], omega[1] * t + phase[1]];
        // one guard window either side of q̇ᵢ = 0
        if (0..2).any(|i| arg[i].sin().abs() < omega[i] * EVENT_GUARD) {
            continue;
        }
        let q = [amp[0] * arg[0].cos(), amp[1] * arg[1].cos()];
        let v = [-amp[0] * omega[0] * arg[0].sin(), -amp[1] * omega[1] * arg[1].sin()];
        out.push(osc.phase(&PhaseState::cartesian(t, q, v)).unwrap());
    }
    out
}

#[test]
fn census_finite_for_commensurate_frequencies() {
    let horizon = 30.0 * 2.0 * PI;
    let once = value_census(&exact_phi_samples([1.0, 1.5], horizon), Valuedness::ModPi, CENSUS_RADIUS);
    let twice = value_census(&exact_phi_samples([1.0, 1.5], 2.0 * horizon), Valuedness::ModPi, CENSUS_RADIUS);
    // observed plateau of the exact solution: five values
    assert_eq!(once, 5);
    assert_eq!(twice, once);

    let once = value_census(&exact_phi_samples([1.0, 2f64.sqrt()], horizon), Valuedness::ModPi, CENSUS_RADIUS);
    let twice = value_census(&exact_phi_samples([1.0, 2f64.sqrt()], 2.0 * horizon), Valuedness::ModPi, CENSUS_RADIUS);
    assert!(twice > once && once > 12, "{once} {twice}");
}

#[test]
fn census_along_integrated_trajectories() {
    let census = |omega2: f64, horizon: f64| {
        let sys = make_uncoupled(1.0, omega2).unwrap();
        let traj = run(&sys, PhaseState::cartesian(0.0, [1.0, 0.3], [0.2, -0.4]), horizon);
        value_census(&census_samples(&traj, &integral(&sys, "Phi")), Valuedness::ModPi, CENSUS_RADIUS)
    };
    let horizon = 30.0 * 2.0 * PI;
    assert_eq!(census(1.5, horizon), census(1.5, 2.0 * horizon));
    assert!(census(1.5, horizon) <= 12);
    assert!(census(2f64.sqrt(), 2.0 * horizon) > census(2f64.sqrt(), horizon));
}

#[test]
fn deformed_theta_is_single_valued_for_every_deformation() {
    let starts = [
        PhaseState::polar(0.0, 0.5, 0.2, 0.1, 0.6),
        PhaseState::polar(0.0, 0.6, 1.0, -0.1, 0.4),
        PhaseState::polar(0.0, 0.4, 2.0, 0.3, 0.9),
    ];
    for lambda in [0.0, 0.1, 0.5, 1.0, 2.0] {
        let r = theta_report(&make_darboux(lambda, 1.0).unwrap(), &starts, 40.0);
        assert_eq!(r.classification, Classification::SingleValued, "λ={lambda}: {}", max_jump(&r));
        assert!(r.jumps.len() > 10);
    }
}

#[test]
fn central_theta_verdicts() {
    for p in [Potential::Coulomb { k: 1.0 }, Potential::Isotropic { k: 0.5 }] {
        let r = theta_report(&make_central(p).unwrap(), &bound_starts(), 40.0);
        assert_eq!(r.classification, Classification::SingleValued, "{p:?}");
    }
    // L = 1 throughout, energies differ
    let starts = [0.1, 0.2, 0.3].map(|rdot| PhaseState::polar(0.0, 1.0, 0.0, rdot, 1.0));
    let sys = make_central(Potential::PerturbedCoulomb { k: 1.0, big_k: 0.18 }).unwrap();
    let r = theta_report(&sys, &starts, 40.0);
    assert_eq!(r.classification, Classification::MultiValued);
    let want = 2.0 * (perturbed_apsidal(0.18, 1.0) - PI);
    assert!((max_jump(&r) - want).abs() < 1e-4, "{} vs {want}", max_jump(&r));
    assert!((r.apsidal_angle.unwrap() - perturbed_apsidal(0.18, 1.0)).abs() < 1e-5);
}

#[test]
fn angle_partial_is_singular_at_turning_points() {
    let sys = make_central(Potential::Coulomb { k: 1.0 }).unwrap();
    let c = match sys {
        SystemDef::Central(c) => c,
        _ => unreachable!(),
    };
    let d_l_theta = FirstIntegral::new("dL_Theta", move |s| Ok(c.theta_partials(s, POLICY)?.0));
    let runs: Vec<_> = bound_starts().iter().map(|s| run(&sys, *s, 20.0)).collect();
    let r = classify(&sys, &d_l_theta, &runs);
    assert_eq!(r.classification, Classification::SingularAtEvents);
    assert!(r.singular_events > 3);
    // the integrals themselves are not flagged
    assert_eq!(classify(&sys, &integral(&sys, "L"), &runs).singular_events, 0);
}

#[test]
fn reports_ignore_trajectory_order() {
    let sys = make_central(Potential::PerturbedCoulomb { k: 1.0, big_k: 0.18 }).unwrap();
    let theta = integral(&sys, "Theta");
    let mut runs: Vec<_> = bound_starts().iter().map(|s| run(&sys, *s, 20.0)).collect();
    let forward = classify(&sys, &theta, &runs);
    runs.reverse();
    let backward = classify(&sys, &theta, &runs);
    assert_eq!(forward, backward);
    runs.swap(0, 1);
    assert_eq!(classify(&sys, &theta, &runs), forward);
}

#[test]
fn uncoupled_reports_carry_the_frequency_ratio() {
    let starts = [
        PhaseState::cartesian(0.0, [1.0, 0.3], [0.2, -0.4]),
        PhaseState::cartesian(0.0, [0.5, -0.3], [0.4, 0.1]),
        PhaseState::cartesian(0.0, [-0.2, 0.8], [0.3, 0.3]),
    ];
    for (omega2, want) in [(1.5, Some((2, 3))), (2f64.sqrt(), None)] {
        let sys = make_uncoupled(1.0, omega2).unwrap();
        let runs: Vec<_> = starts.iter().map(|s| run(&sys, *s, 20.0)).collect();
        let r = classify(&sys, &integral(&sys, "Phi"), &runs);
        assert_eq!(r.commensurate, want);
        // Φ jumps at every reversal whatever the ratio; commensurability only
        // makes its set of values finite
        assert_eq!(r.classification, Classification::MultiValued);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rationals_are_recovered(p in 1u64..60, q in 1u64..60) {
        let g = gcd(p, q);
        let got = commensurability(p as f64, q as f64, 100, 1e-9);
        prop_assert_eq!(got, Some((p / g, q / g)));
    }

    #[test]
    fn census_ignores_order_and_full_periods(values in prop::collection::vec(0.0..PI, 1..40), turns in -3i32..3) {
        let base = value_census(&values, Valuedness::ModPi, CENSUS_RADIUS);
        let mut shuffled: Vec<f64> = values.iter().rev().map(|v| v + turns as f64 * PI).collect();
        shuffled.rotate_left(values.len() / 2);
        prop_assert_eq!(value_census(&shuffled, Valuedness::ModPi, CENSUS_RADIUS), base);
        prop_assert!(base >= 1 && base <= values.len());
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 { a } else { gcd(b, a % b) }
}
