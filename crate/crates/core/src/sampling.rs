//! Seeded random test points.

use crate::dynamics::{Chart, PhaseState};
use crate::systems::{Darboux, ReferencePoint, SystemDef};
use alloc::vec::Vec;
use core::f64::consts::PI;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Smallest `|ṙ|` (or `|q̇ᵢ|`) accepted; the closed-form partials carry `1/|ṙ|`.
pub const MIN_SPEED: f64 = 0.2;

/// Whether generator components built from the closed-form integrals are
/// comfortably defined at `s`. Point symmetries need none of this but
/// sharing one domain keeps suites comparable.
pub fn admissible(sys: &SystemDef, s: &PhaseState) -> bool {
    if s.validate().is_err() || s.chart != sys_chart(sys) {
        return false;
    }
    match sys {
        SystemDef::Uncoupled(_) => s.v.iter().all(|v| v.abs() > MIN_SPEED),
        SystemDef::Central(c) => {
            let l = c.angular_momentum(s);
            s.q[0] > 0.3 && s.v[0].abs() > MIN_SPEED && l.abs() > 0.05
        }
        SystemDef::Darboux(d) => darboux_admissible(d, s),
    }
}

fn darboux_admissible(d: &Darboux, s: &PhaseState) -> bool {
    if !(s.q[0] > 0.3 && s.v[0].abs() > MIN_SPEED) {
        return false;
    }
    let l = d.angular_momentum(s);
    let e = d.energy(s);
    let w2 = d.omega * d.omega;
    let a = w2 - 2.0 * d.lambda * e;
    let disc = e * e - a * l * l;
    l.abs() > 0.05 && a > 0.2 * w2 && disc > 1e-3 * e * e && d.partials(s, ReferencePoint::OuterTurning).is_ok()
}

fn sys_chart(sys: &SystemDef) -> Chart {
    match sys {
        SystemDef::Uncoupled(_) => Chart::Cartesian,
        _ => Chart::Polar,
    }
}

/// `n` admissible states drawn from a fixed box: polar `r ∈ [0.5, 1.5]`,
/// `|ṙ| ∈ [0.2, 1]`, `θ̇ ∈ [−1.5, 1.5]`; Cartesian coordinates and
/// velocities in `[−1, 1]`.
pub fn random_states(sys: &SystemDef, seed: u64, n: usize) -> Vec<PhaseState> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    let mut draws = 0;
    while out.len() < n && draws < 1_000_000 {
        draws += 1;
        let s = match sys_chart(sys) {
            Chart::Polar => {
                let speed = rng.random_range(MIN_SPEED..=1.0);
                let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                PhaseState::polar(
                    rng.random_range(-1.0..=1.0),
                    rng.random_range(0.5..=1.5),
                    rng.random_range(0.0..2.0 * PI),
                    sign * speed,
                    rng.random_range(-1.5..=1.5),
                )
            }
            Chart::Cartesian => PhaseState::cartesian(
                rng.random_range(-1.0..=1.0),
                [rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0)],
                [rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0)],
            ),
        };
        if admissible(sys, &s) {
            out.push(s);
        }
    }
    out
}
