use noetherlab_core::catalog::{
    darboux_multipliers, darboux_theta_generator, darboux_time_generator, radial_scaling, rotation_generator,
    time_translation_generator,
};
use noetherlab_core::dynamics::{Chart, Dynamics, PhaseState};
use noetherlab_core::noether::*;
use noetherlab_core::sampling::{admissible, random_states};
use noetherlab_core::systems::{make_central, make_darboux, make_uncoupled, Potential, ReferencePoint, SystemDef};
use noetherlab_core::Error;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const POLICY: ReferencePoint = ReferencePoint::OuterTurning;

fn darboux(lambda: f64) -> SystemDef {
    make_darboux(lambda, 1.0).unwrap()
}

fn curve_points(sys: &SystemDef) -> Vec<CurvePoint> {
    let pts = sample_curve_points(sys.chart(), 11, 50, &|s| admissible(sys, s));
    assert_eq!(pts.len(), 50);
    pts
}

fn four_generators(sys: &SystemDef) -> [Generator; 4] {
    let d = *sys.as_darboux().unwrap();
    [
        rotation_generator(),
        time_translation_generator(),
        darboux_theta_generator(d, POLICY),
        darboux_time_generator(d, POLICY),
    ]
}

#[test]
fn weights_turn_generators_into_multipliers() {
    let sys = darboux(0.5);
    let s = PhaseState::polar(0.3, 1.2, 0.4, -0.5, 0.7);
    let m = 1.0 + 0.5 * 1.44;
    let q = multiplier_from_generator(&rotation_generator(), &sys).value(&s).unwrap();
    assert_eq!(q, [0.0, 1.44 * m]);
    let q = multiplier_from_generator(&time_translation_generator(), &sys).value(&s).unwrap();
    assert!((q[0] - m * -0.5).abs() < 1e-15 && (q[1] - 1.44 * m * 0.7).abs() < 1e-15);

    let kepler = make_central(Potential::Coulomb { k: 1.0 }).unwrap();
    let q = multiplier_from_generator(&rotation_generator(), &kepler).value(&s).unwrap();
    assert_eq!(q, [0.0, 1.44]);
}

#[test]
fn round_trip_is_the_identity() {
    let sys = darboux(0.5);
    let states = random_states(&sys, 1, 100);
    for g in four_generators(&sys) {
        let back = generator_from_multiplier(&multiplier_from_generator(&g, &sys), &sys);
        for s in &states {
            assert_eq!(back.value(s).unwrap(), g.value(s).unwrap(), "{}", g.name);
        }
    }
    for m in darboux_multipliers(*sys.as_darboux().unwrap(), POLICY) {
        let back = multiplier_from_generator(&generator_from_multiplier(&m, &sys), &sys);
        for s in &states {
            assert_eq!(back.value(s).unwrap(), m.value(s).unwrap(), "{}", m.source);
        }
    }
}

#[test]
fn closed_form_pairs_come_from_their_generators() {
    for lambda in [0.0, 0.5, 2.0] {
        let sys = darboux(lambda);
        let states = random_states(&sys, 2, 100);
        assert_eq!(states.len(), 100);
        let pairs = darboux_multipliers(*sys.as_darboux().unwrap(), POLICY);
        for (g, want) in four_generators(&sys).iter().zip(&pairs) {
            let got = multiplier_from_generator(g, &sys);
            for s in &states {
                let (a, b) = (got.value(s).unwrap(), want.value(s).unwrap());
                for k in 0..2 {
                    assert!((a[k] - b[k]).abs() <= 1e-12 * b[k].abs().max(1.0), "{} at {s:?}", want.source);
                }
            }
        }
    }
}

#[test]
fn inverse_map_recovers_displayed_generator() {
    let sys = darboux(0.5);
    let d = *sys.as_darboux().unwrap();
    let [_, _, q_theta, _] = darboux_multipliers(d, POLICY);
    let g = generator_from_multiplier(&q_theta, &sys);
    let want = darboux_theta_generator(d, POLICY);
    for s in random_states(&sys, 3, 50) {
        let (a, b) = (g.value(&s).unwrap(), want.value(&s).unwrap());
        for k in 0..2 {
            assert!((a[k] - b[k]).abs() <= 1e-12 * b[k].abs().max(1.0));
        }
    }
    let zero = MultiplierPair::new("zero", |_| Ok(0.0), |_| Ok(0.0));
    let g = generator_from_multiplier(&zero, &sys);
    assert_eq!(g.value(&PhaseState::polar(0.0, 1.0, 0.0, 0.3, 0.2)).unwrap(), [0.0, 0.0]);
}

#[test]
fn multipliers_are_velocity_gradients_of_integrals() {
    for lambda in [0.1, 0.5, 1.0] {
        let sys = darboux(lambda);
        let integrals = sys.first_integrals(POLICY);
        let pairs = darboux_multipliers(*sys.as_darboux().unwrap(), POLICY);
        for (i, q) in integrals.iter().zip(&pairs) {
            let fd = multiplier_from_integral(i);
            for s in random_states(&sys, 4, 100) {
                let (a, b) = (q.value(&s).unwrap(), fd.value(&s).unwrap());
                for k in 0..2 {
                    let tol = 1e-6 * a[k].abs().max(1.0);
                    assert!((a[k] - b[k]).abs() < tol, "λ={lambda} {}: {a:?} vs {b:?}", q.source);
                }
            }
        }
    }
}

/// Euler–Lagrange expression of ℒ agrees with `−wᵢ(q̈ⁱ − fⁱ)` off-shell.
#[test]
fn lagrangian_matches_equations_of_motion() {
    let systems = [
        darboux(0.5),
        make_uncoupled(1.0, 1.5).unwrap(),
        make_central(Potential::Coulomb { k: 1.0 }).unwrap(),
        make_central(Potential::PerturbedCoulomb { k: 1.0, big_k: 0.18 }).unwrap(),
    ];
    for sys in systems {
        let lag = |j: &Jet2| Ok(sys.lagrangian(&j.state));
        let pts = sample_curve_points(sys.chart(), 5, 100, &|s| admissible(&sys, s));
        for p in &pts {
            let j = p.curve.jet(p.t);
            let e = euler_operator(&lag, p).unwrap();
            let w = sys.noether_weights(j.state.q);
            let f = sys.accel(&j.state);
            for i in 0..2 {
                let want = -w[i] * (j.accel[i] - f[i]);
                assert!((e[i] - want).abs() < 1e-6, "{}: {} vs {want}", sys.label(), e[i]);
            }
        }
    }
}

#[test]
fn angular_momentum_multiplier_is_variational() {
    let sys = darboux(0.5);
    let pts = curve_points(&sys);
    let [q_l, ..] = darboux_multipliers(*sys.as_darboux().unwrap(), POLICY);
    assert!(euler_residual(&q_l, &sys, &pts).unwrap() < 1e-6);
    let bent = MultiplierPair::new("bent", |_| Ok(0.1), move |s| (q_l.q[1])(s));
    assert!(euler_residual(&bent, &sys, &pts).unwrap() > 1e-2);

    let kepler = make_central(Potential::Coulomb { k: 1.0 }).unwrap();
    let q = MultiplierPair::new("L", |_| Ok(0.0), |s| Ok(s.q[0] * s.q[0]));
    assert!(euler_residual(&q, &kepler, &curve_points(&kepler)).unwrap() < 1e-6);
}

fn corrupted(pairs: &[MultiplierPair; 4]) -> Vec<MultiplierPair> {
    let [l, e, th, t] = pairs.clone().map(|m| m.q);
    let (l1, e0, e1, th0, th1, t0, t1) = (l[1].clone(), e[0].clone(), e[1].clone(), th[0].clone(), th[1].clone(), t[0].clone(), t[1].clone());
    let (e0b, e1b, l1b, th0b) = (e0.clone(), e1.clone(), l1.clone(), th0.clone());
    vec![
        MultiplierPair::new("L+0.1", |_| Ok(0.1), move |s| l1(s)),
        MultiplierPair::new("E scaled", move |s| e0(s), move |s| Ok(1.1 * e1(s)?)),
        MultiplierPair::new("E swapped", move |s| e1b(s), move |s| e0b(s)),
        MultiplierPair::new("Theta flipped", move |s| Ok(-th0(s)?), move |s| th1(s)),
        MultiplierPair::new("T plus", move |s| t0(s), move |s| Ok(t1(s)? + l1b(s)? * th0b(s)?)),
    ]
}

#[test]
fn euler_operator_separates_true_and_corrupted_pairs() {
    for lambda in [0.0, 0.1, 0.5, 1.0, 2.0] {
        let sys = darboux(lambda);
        let pts = curve_points(&sys);
        let pairs = darboux_multipliers(*sys.as_darboux().unwrap(), POLICY);
        for m in &pairs {
            let r = euler_residual(m, &sys, &pts).unwrap();
            assert!(r < VARIATIONAL_TOL, "λ={lambda} {}: {r:e}", m.source);
        }
        for m in corrupted(&pairs) {
            let r = euler_residual(&m, &sys, &pts).unwrap();
            assert!(r > 1e-3, "λ={lambda} {}: {r:e}", m.source);
        }
    }
}

#[test]
fn named_generators_are_variational() {
    let sys = darboux(0.5);
    let pts = curve_points(&sys);
    for g in four_generators(&sys) {
        let (ok, r) = is_variational(&g, &sys, &pts).unwrap();
        assert!(ok, "{}: {r:e}", g.name);
    }
    let (ok, r) = is_variational(&radial_scaling(), &sys, &pts).unwrap();
    assert!(!ok && r > 1e-3, "{r:e}");

    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for n in 0..5 {
        let c: [f64; 5] = std::array::from_fn(|_| rng.random_range(-1.0..=1.0));
        let g = Generator::evolutionary(
            &format!("random{n}"),
            move |s| Ok(c[0] * s.q[0] + c[1] * s.v[0] * s.v[1] + c[2]),
            move |s| Ok(c[3] * s.q[0] * s.q[0] + c[4] * s.v[0]),
        );
        let (ok, r) = is_variational(&g, &sys, &pts).unwrap();
        assert!(!ok && r > 1e-3, "{}: {r:e}", g.name);
    }
}

#[test]
fn integral_from_known_boundary_term() {
    let osc = make_uncoupled(1.0, 1.5).unwrap();
    let s = PhaseState::cartesian(0.2, [0.3, -0.4], [0.5, 0.6]);
    let g = Generator::evolutionary("Xhat_E", |s| Ok(-s.v[0]), |s| Ok(-s.v[1]));
    let r: noetherlab_core::systems::StateFn = std::sync::Arc::new(move |s: &PhaseState| Ok(-osc.lagrangian(s)));
    let energy = 0.5 * (0.25 + 0.36) + 0.5 * (0.09 + 2.25 * 0.16);
    assert!((noether_integral_from_r(&g, &r, &osc, &s).unwrap() - energy).abs() < 1e-9);

    let sys = darboux(0.5);
    let s = PhaseState::polar(0.0, 1.1, 0.2, 0.3, 0.8);
    let zero: noetherlab_core::systems::StateFn = std::sync::Arc::new(|_: &PhaseState| Ok(0.0));
    let l = noether_integral_from_r(&rotation_generator(), &zero, &sys, &s).unwrap();
    let want = sys.as_darboux().unwrap().angular_momentum(&s);
    assert!((l - want).abs() < 1e-9);
    assert_eq!(noether_integral_from_r(&Generator::zero(), &zero, &sys, &s).unwrap(), 0.0);
}

#[test]
fn rotation_and_time_translation_rebuild_l_and_e() {
    let sys = darboux(0.5);
    let d = *sys.as_darboux().unwrap();
    let base = default_basepoint(&sys, 0.8);
    assert!((d.angular_momentum(&base) - 0.8).abs() < 1e-15);
    for s in random_states(&sys, 6, 10) {
        let s = PhaseState { t: 0.0, ..s };
        let dl = reconstruct_integral(&rotation_generator(), &sys, &s, &base).unwrap();
        assert!((dl - (d.angular_momentum(&s) - 0.8)).abs() < 1e-8);
        let de = reconstruct_integral(&time_translation_generator(), &sys, &s, &base).unwrap();
        assert!((de - (d.energy(&s) - d.energy(&base))).abs() < 1e-8);
    }
}

/// Endpoints on the basepoint's sheet: `ṙ > 0` and `θ̇ > 0` all along the segment.
fn sheet_endpoints(sys: &SystemDef, n: usize) -> Vec<PhaseState> {
    random_states(sys, 5, 2000)
        .into_iter()
        .filter(|s| s.v[0] > 0.0 && s.v[1] > 0.0)
        .map(|s| PhaseState { t: 0.0, ..s })
        .take(n)
        .collect()
}

fn sheet_base(lambda: f64) -> PhaseState {
    if lambda > 1.0 {
        PhaseState::polar(0.0, 0.6, 0.3, 0.25, 0.3)
    } else {
        PhaseState::polar(0.0, 0.8, 0.3, 0.4, 0.5)
    }
}

#[test]
fn reconstruction_matches_closed_forms() {
    for lambda in [0.0, 0.5, 2.0] {
        let sys = darboux(lambda);
        let base = sheet_base(lambda);
        assert!(admissible(&sys, &base));
        let ends = sheet_endpoints(&sys, 20);
        assert_eq!(ends.len(), 20);
        for (g, i) in four_generators(&sys).iter().zip(sys.first_integrals(POLICY)) {
            let i0 = i.value(&base).unwrap();
            let offsets: Vec<f64> = ends
                .iter()
                .map(|e| {
                    let rec = reconstruct_integral(g, &sys, e, &base).unwrap();
                    rec - i.valuedness.difference(i.value(e).unwrap(), i0)
                })
                .collect();
            // Θ is only defined modulo its period
            let spread = offsets.iter().map(|o| i.valuedness.difference(*o, offsets[0]).abs()).fold(0.0, f64::max);
            assert!(spread < 1e-7, "λ={lambda} {}: {spread:e}", g.name);
        }
    }
}

#[test]
fn reconstruction_is_path_independent() {
    let sys = darboux(0.5);
    let base = sheet_base(0.5);
    for g in four_generators(&sys) {
        for e in sheet_endpoints(&sys, 5) {
            let mid = PhaseState::polar(0.0, 0.5 * (base.q[0] + e.q[0]) + 0.05, 0.1, 0.5 * (base.v[0] + e.v[0]), 0.5 * (base.v[1] + e.v[1]) + 0.05);
            let direct = reconstruct_integral(&g, &sys, &e, &base).unwrap();
            let detour = reconstruct_along(&g, &sys, &[base, mid, e]).unwrap();
            assert!((direct - detour).abs() < 1e-8, "{}: {:e}", g.name, (direct - detour).abs());
        }
    }
}

#[test]
fn path_through_the_origin_is_rejected() {
    let sys = darboux(0.5);
    let base = sheet_base(0.5);
    let bad = PhaseState::polar(0.0, -0.2, 0.0, 0.3, 0.3);
    assert_eq!(reconstruct_integral(&rotation_generator(), &sys, &bad, &base), Err(Error::PathLeavesDomain));
    let cart = PhaseState::cartesian(0.0, [1.0, 0.0], [0.0, 1.0]);
    assert!(matches!(reconstruct_integral(&rotation_generator(), &sys, &cart, &base), Err(Error::InvalidState(_))));
}

fn polar_state() -> impl Strategy<Value = PhaseState> {
    (0.3..2.0f64, -3.0..3.0f64, -1.5..1.5f64, -1.5..1.5f64).prop_map(|(r, th, rd, td)| PhaseState::polar(0.0, r, th, rd, td))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fresh_maps_invert_each_other(s in polar_state(), lambda in 0.0..2.0f64, a in -2.0..2.0f64, b in -2.0..2.0f64) {
        let sys = darboux(lambda);
        // built from scratch so neither map can fall back on a remembered origin
        let q = MultiplierPair::new("q", move |s| Ok(a * s.v[0] + s.q[0]), move |s| Ok(b * s.q[0] * s.v[1]));
        let g = generator_from_multiplier(&q, &sys);
        let p = g.value(&s).unwrap();
        let g2 = Generator::evolutionary("p", move |_| Ok(p[0]), move |_| Ok(p[1]));
        let back = multiplier_from_generator(&g2, &sys).value(&s).unwrap();
        let want = q.value(&s).unwrap();
        for k in 0..2 {
            prop_assert!((back[k] - want[k]).abs() <= 1e-14 * want[k].abs().max(1.0));
        }
    }

    #[test]
    fn point_form_relation_holds(s in polar_state(), c in -2.0..2.0f64) {
        let g = Generator::point("g", move |s| Ok(c * s.q[0]), |s| Ok(s.q[0] * s.q[0]), |s| Ok(s.v[0]));
        let eta = g.eta(&s).unwrap();
        let p = g.value(&s).unwrap();
        let tau = c * s.q[0];
        prop_assert!((eta[0] - (p[0] + tau * s.v[0])).abs() < 1e-14 * eta[0].abs().max(1.0));
        prop_assert!((eta[1] - (p[1] + tau * s.v[1])).abs() < 1e-14 * eta[1].abs().max(1.0));
    }

    #[test]
    fn random_detours_do_not_change_the_integral(dr in -0.1..0.1f64, dth in -0.3..0.3f64, dv in -0.1..0.1f64) {
        let sys = darboux(0.5);
        let base = sheet_base(0.5);
        let end = PhaseState::polar(0.0, 1.1, 0.9, 0.5, 0.6);
        let mid = PhaseState::polar(0.0, 0.95 + dr, 0.6 + dth, 0.45 + dv, 0.55 - dv);
        let g = darboux_theta_generator(*sys.as_darboux().unwrap(), POLICY);
        let direct = reconstruct_integral(&g, &sys, &end, &base).unwrap();
        let detour = reconstruct_along(&g, &sys, &[base, mid, end]).unwrap();
        prop_assert!((direct - detour).abs() < 1e-8);
    }
}

#[test]
fn test_curves_stay_in_the_requested_chart() {
    let pts = sample_curve_points(Chart::Cartesian, 1, 10, &|_| true);
    assert!(pts.iter().all(|p| p.curve.jet(p.t).state.chart == Chart::Cartesian));
    let again = sample_curve_points(Chart::Cartesian, 1, 10, &|_| true);
    assert_eq!(pts, again);
}
