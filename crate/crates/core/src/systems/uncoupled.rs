use super::{positive, FirstIntegral, Valuedness};
use crate::dynamics::{Chart, Dynamics, EventKind, PhaseState};
use crate::error::{Error, Result};
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // redundant once std is linked in
use num_traits::Float;

/// Two independent harmonic oscillators `q̈ᵢ = −ωᵢ² qᵢ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Uncoupled {
    pub omega1: f64,
    pub omega2: f64,
}

impl Uncoupled {
    pub fn new(omega1: f64, omega2: f64) -> Result<Self> {
        Ok(Self { omega1: positive("omega1", omega1)?, omega2: positive("omega2", omega2)? })
    }

    pub fn omegas(&self) -> [f64; 2] {
        [self.omega1, self.omega2]
    }

    /// `Eᵢ = ½(q̇ᵢ² + ωᵢ² qᵢ²)`.
    pub fn energies(&self, s: &PhaseState) -> [f64; 2] {
        let w = self.omegas();
        [0, 1].map(|i| 0.5 * (s.v[i] * s.v[i] + w[i] * w[i] * s.q[i] * s.q[i]))
    }

    /// `atan(ωᵢ qᵢ / q̇ᵢ)` with IEEE signed-zero limits `±π/2` at `q̇ᵢ = ±0`.
    fn phase_angles(&self, s: &PhaseState) -> Result<[f64; 2]> {
        let w = self.omegas();
        let mut out = [0.0; 2];
        for i in 0..2 {
            if s.q[i] == 0.0 && s.v[i] == 0.0 {
                return Err(Error::UndefinedPhase);
            }
            out[i] = (w[i] * s.q[i] / s.v[i]).atan();
        }
        Ok(out)
    }

    /// Relative phase Φ, reduced to `[0, π)`.
    pub fn phase(&self, s: &PhaseState) -> Result<f64> {
        let [a1, a2] = self.phase_angles(s)?;
        let (w1, w2) = (self.omega1, self.omega2);
        let phi = (1.0 + w2 / w1) * a1 - (1.0 + w1 / w2) * a2;
        Ok(Valuedness::ModPi.reduce(phi))
    }

    /// `T = t − Σ atan(ωᵢqᵢ/q̇ᵢ)/(2ωᵢ)`.
    pub fn time_integral(&self, s: &PhaseState) -> Result<f64> {
        let [a1, a2] = self.phase_angles(s)?;
        Ok(s.t - a1 / (2.0 * self.omega1) - a2 / (2.0 * self.omega2))
    }

    pub fn first_integrals(&self) -> Vec<FirstIntegral> {
        let u = *self;
        let reversals = [EventKind::VelocityZero(1), EventKind::VelocityZero(2)];
        vec![
            FirstIntegral::new("E1", move |s| Ok(u.energies(s)[0])),
            FirstIntegral::new("E2", move |s| Ok(u.energies(s)[1])),
            FirstIntegral::new("Phi", move |s| u.phase(s))
                .valued(Valuedness::ModPi)
                .jumps_at(&reversals),
            FirstIntegral::new("Tosc", move |s| u.time_integral(s))
                .time_explicit()
                .jumps_at(&reversals),
        ]
    }
}

impl Dynamics for Uncoupled {
    fn chart(&self) -> Chart {
        Chart::Cartesian
    }

    fn accel(&self, s: &PhaseState) -> [f64; 2] {
        [-self.omega1 * self.omega1 * s.q[0], -self.omega2 * self.omega2 * s.q[1]]
    }

    fn lagrangian(&self, s: &PhaseState) -> f64 {
        let [e1, e2] = self.energies(s);
        let kinetic = 0.5 * (s.v[0] * s.v[0] + s.v[1] * s.v[1]);
        2.0 * kinetic - e1 - e2
    }

    fn noether_weights(&self, _q: [f64; 2]) -> [f64; 2] {
        [1.0, 1.0]
    }
}
