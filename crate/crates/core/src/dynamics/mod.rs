//! Phase states, the system abstraction, adaptive integration with dense
//! output, and event detection.

mod events;
mod integrator;
mod tableau;

pub use events::{detect_events, event_value, refine_event, Event, EventKind};
pub use integrator::{integrate, propagate, IntegratorOptions, IntegratorStats, Trajectory};

use crate::error::{Error, Result};
#[allow(unused_imports)] // redundant once std is linked in
use num_traits::Float;

/// Guard radius of the polar chart; states closer to the origin abort.
pub const MIN_RADIUS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Chart {
    /// `q = (r, θ)`.
    Polar,
    /// `q = (q₁, q₂)` with `q₁ = r cos θ`, `q₂ = r sin θ`.
    Cartesian,
}

/// A point `(t, q, q̇)` of the first jet space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseState {
    pub t: f64,
    pub q: [f64; 2],
    pub v: [f64; 2],
    pub chart: Chart,
}

impl PhaseState {
    pub fn polar(t: f64, r: f64, theta: f64, rdot: f64, thetadot: f64) -> Self {
        Self { t, q: [r, theta], v: [rdot, thetadot], chart: Chart::Polar }
    }

    pub fn cartesian(t: f64, q: [f64; 2], v: [f64; 2]) -> Self {
        Self { t, q, v, chart: Chart::Cartesian }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.t, self.q[0], self.q[1], self.v[0], self.v[1]];
        if all.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidState("non-finite component"));
        }
        if self.chart == Chart::Polar && !(self.q[0] > 0.0) {
            return Err(Error::InvalidState("polar radius must be positive"));
        }
        Ok(())
    }

    pub(crate) fn to_vec(self) -> [f64; 4] {
        [self.q[0], self.q[1], self.v[0], self.v[1]]
    }

    pub(crate) fn from_vec(t: f64, y: &[f64; 4], chart: Chart) -> Self {
        Self { t, q: [y[0], y[1]], v: [y[2], y[3]], chart }
    }

    /// Radius and radial velocity, whatever the chart.
    pub fn radial(&self) -> (f64, f64) {
        match self.chart {
            Chart::Polar => (self.q[0], self.v[0]),
            Chart::Cartesian => {
                let r = self.q[0].hypot(self.q[1]);
                (r, (self.q[0] * self.v[0] + self.q[1] * self.v[1]) / r)
            }
        }
    }
}

/// A planar second-order system `q̈ = f(t, q, q̇)` with a Lagrangian whose
/// Euler–Lagrange expressions are `−wᵢ(q)·(q̈ⁱ − fⁱ)`.
pub trait Dynamics {
    fn chart(&self) -> Chart;
    fn accel(&self, s: &PhaseState) -> [f64; 2];
    fn lagrangian(&self, s: &PhaseState) -> f64;
    fn noether_weights(&self, q: [f64; 2]) -> [f64; 2];
}
