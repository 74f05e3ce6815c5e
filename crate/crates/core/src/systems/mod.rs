//! The three benchmark systems and their first integrals.

mod central;
mod coords;
mod darboux;
mod uncoupled;

pub use central::{CentralForce, Potential};
pub use coords::{to_cartesian, to_polar};
pub use darboux::{CartesianConstants, Darboux, DarbouxIntegrals, DarbouxPartials, Orbit};
pub use uncoupled::Uncoupled;

use crate::dynamics::{Chart, Dynamics, EventKind, PhaseState};
use crate::error::{Error, Result};
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)] // redundant once std is linked in
use num_traits::Float;

/// Reference radius `r₀` of the Θ and T quadratures.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum ReferencePoint {
    #[default]
    OuterTurning,
    InnerTurning,
    /// Minimum of the effective potential.
    Inertial,
    Explicit(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Valuedness {
    SingleValued,
    ModPi,
    Mod2Pi,
}

impl Valuedness {
    pub fn period(self) -> Option<f64> {
        match self {
            Valuedness::SingleValued => None,
            Valuedness::ModPi => Some(PI),
            Valuedness::Mod2Pi => Some(2.0 * PI),
        }
    }

    /// Representative in `[0, period)`.
    pub fn reduce(self, x: f64) -> f64 {
        match self.period() {
            None => x,
            Some(p) => {
                let y = num_traits::Euclid::rem_euclid(&x, &p);
                if y >= p {
                    0.0
                } else {
                    y
                }
            }
        }
    }

    /// `a − b` taken to the representative nearest zero.
    pub fn difference(self, a: f64, b: f64) -> f64 {
        let d = a - b;
        match self.period() {
            None => d,
            Some(p) => d - p * (d / p).round(),
        }
    }
}

pub type StateFn = Arc<dyn Fn(&PhaseState) -> Result<f64> + Send + Sync>;

#[derive(Clone)]
pub struct IntegralPartials {
    pub d_l: StateFn,
    pub d_e: StateFn,
}

/// An evaluable conserved quantity.
#[derive(Clone)]
pub struct FirstIntegral {
    pub name: String,
    pub eval: StateFn,
    pub partials: Option<IntegralPartials>,
    pub time_explicit: bool,
    pub valuedness: Valuedness,
    /// Events at which the closed form may legitimately jump.
    pub jump_events: Vec<EventKind>,
    pub reference_point: Option<ReferencePoint>,
}

impl FirstIntegral {
    pub fn new(name: &str, eval: impl Fn(&PhaseState) -> Result<f64> + Send + Sync + 'static) -> Self {
        Self {
            name: name.into(),
            eval: Arc::new(eval),
            partials: None,
            time_explicit: false,
            valuedness: Valuedness::SingleValued,
            jump_events: Vec::new(),
            reference_point: None,
        }
    }

    pub fn value(&self, s: &PhaseState) -> Result<f64> {
        (self.eval)(s)
    }

    fn valued(mut self, v: Valuedness) -> Self {
        self.valuedness = v;
        self
    }

    fn jumps_at(mut self, kinds: &[EventKind]) -> Self {
        self.jump_events = kinds.to_vec();
        self
    }

    fn time_explicit(mut self) -> Self {
        self.time_explicit = true;
        self
    }
}

impl core::fmt::Debug for FirstIntegral {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("FirstIntegral")
            .field("name", &self.name)
            .field("time_explicit", &self.time_explicit)
            .field("valuedness", &self.valuedness)
            .finish()
    }
}

/// `U_eff(r; L)` of the radial motion and its derivative.
pub trait EffectivePotential {
    fn effective_potential(&self, r: f64, l: f64) -> f64;
    fn effective_potential_derivative(&self, r: f64, l: f64) -> f64;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SystemDef {
    Uncoupled(Uncoupled),
    Central(CentralForce),
    Darboux(Darboux),
}

pub fn make_uncoupled(omega1: f64, omega2: f64) -> Result<SystemDef> {
    Uncoupled::new(omega1, omega2).map(SystemDef::Uncoupled)
}

pub fn make_central(potential: Potential) -> Result<SystemDef> {
    CentralForce::new(potential).map(SystemDef::Central)
}

pub fn make_darboux(lambda: f64, omega: f64) -> Result<SystemDef> {
    Darboux::new(lambda, omega).map(SystemDef::Darboux)
}

impl SystemDef {
    pub fn label(&self) -> &'static str {
        match self {
            SystemDef::Uncoupled(_) => "uncoupled",
            SystemDef::Central(_) => "central",
            SystemDef::Darboux(_) => "darboux",
        }
    }

    /// The catalogued first integrals of this system.
    pub fn first_integrals(&self, policy: ReferencePoint) -> Vec<FirstIntegral> {
        match self {
            SystemDef::Uncoupled(u) => u.first_integrals(),
            SystemDef::Central(c) => c.first_integrals(policy),
            SystemDef::Darboux(d) => d.first_integrals(policy),
        }
    }

    /// Event kinds relevant to the diagnostics of this system.
    pub fn natural_events(&self) -> Vec<EventKind> {
        match self {
            SystemDef::Uncoupled(_) => alloc::vec![EventKind::VelocityZero(1), EventKind::VelocityZero(2)],
            _ => alloc::vec![EventKind::TurningPoint],
        }
    }

    pub fn as_darboux(&self) -> Result<&Darboux> {
        match self {
            SystemDef::Darboux(d) => Ok(d),
            _ => Err(Error::NotApplicable("requires the deformed oscillator")),
        }
    }
}

impl Dynamics for SystemDef {
    fn chart(&self) -> Chart {
        match self {
            SystemDef::Uncoupled(_) => Chart::Cartesian,
            _ => Chart::Polar,
        }
    }

    fn accel(&self, s: &PhaseState) -> [f64; 2] {
        match self {
            SystemDef::Uncoupled(u) => u.accel(s),
            SystemDef::Central(c) => c.accel(s),
            SystemDef::Darboux(d) => d.accel(s),
        }
    }

    fn lagrangian(&self, s: &PhaseState) -> f64 {
        match self {
            SystemDef::Uncoupled(u) => u.lagrangian(s),
            SystemDef::Central(c) => c.lagrangian(s),
            SystemDef::Darboux(d) => d.lagrangian(s),
        }
    }

    fn noether_weights(&self, q: [f64; 2]) -> [f64; 2] {
        match self {
            SystemDef::Uncoupled(u) => u.noether_weights(q),
            SystemDef::Central(c) => c.noether_weights(q),
            SystemDef::Darboux(d) => d.noether_weights(q),
        }
    }
}

/// Direction of radial motion; at `ṙ = 0` the direction right after the
/// turning point, i.e. the sign of `r̈`.
pub(crate) fn radial_branch(rdot: f64, rddot: f64) -> Result<f64> {
    if rdot > 0.0 {
        Ok(1.0)
    } else if rdot < 0.0 {
        Ok(-1.0)
    } else if rddot > 0.0 {
        Ok(1.0)
    } else if rddot < 0.0 {
        Ok(-1.0)
    } else {
        Err(Error::UndefinedOnCircular)
    }
}

pub(crate) fn require_polar(s: &PhaseState) -> Result<()> {
    if s.chart != Chart::Polar {
        return Err(Error::InvalidState("expected a polar state"));
    }
    s.validate()
}

pub(crate) fn positive(name: &'static str, value: f64) -> Result<f64> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(Error::InvalidParam { name, value, expected: "a positive finite number" })
    }
}
