//! Planar motion in a central potential `U(r)`.
//!
//! Θ and T have no closed form here; they are quadratures between turning
//! points. The radicand `2(E + U_eq − U)r² − L²` is evaluated near a turning
//! point `r*` as an exact difference `rad(r* + δ) − rad(r*)` so the quadrature
//! sees a clean simple root.

use super::{
    radial_branch, require_polar, EffectivePotential, FirstIntegral, IntegralPartials, ReferencePoint, Valuedness,
};
use crate::dynamics::{Chart, Dynamics, EventKind, PhaseState};
use crate::error::{Error, Result};
use crate::quadrature::{bracketed_root, integrate_singular, Node, SingularEnds, SingularIntegral};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // redundant once std is linked in
use num_traits::Float;

const QUAD_TOL: f64 = 1e-13;
const FD_STEP: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Potential {
    /// `−k/r`
    Coulomb { k: f64 },
    /// `k r²`
    Isotropic { k: f64 },
    /// `−k/r − K/r²`
    PerturbedCoulomb { k: f64, big_k: f64 },
    /// `k r^p`
    PowerLaw { k: f64, p: f64 },
    /// `−½k r² + K/(2r²)`, radial force `k r + K/r³`.
    SpecialKKr3 { k: f64, big_k: f64 },
}

impl Potential {
    pub fn validate(&self) -> Result<()> {
        let finite = |name: &'static str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParam { name, value: v, expected: "a finite number" })
            }
        };
        match *self {
            Potential::Coulomb { k } | Potential::Isotropic { k } => super::positive("k", k).map(|_| ()),
            Potential::PerturbedCoulomb { k, big_k } | Potential::SpecialKKr3 { k, big_k } => {
                super::positive("k", k)?;
                finite("K", big_k)
            }
            Potential::PowerLaw { k, p } => {
                finite("k", k)?;
                if !(p > -2.0 && p != 0.0 && p.is_finite()) {
                    return Err(Error::InvalidParam { name: "p", value: p, expected: "p in (−2, ∞) without 0" });
                }
                if !(k * p > 0.0) {
                    return Err(Error::InvalidParam { name: "k", value: k, expected: "k·p > 0 (attractive)" });
                }
                Ok(())
            }
        }
    }

    /// `U = Σ c rⁿ` as `(c, n)` pairs; unused slots have `c = 0`.
    pub fn terms(&self) -> [(f64, f64); 2] {
        match *self {
            Potential::Coulomb { k } => [(-k, -1.0), (0.0, 0.0)],
            Potential::Isotropic { k } => [(k, 2.0), (0.0, 0.0)],
            Potential::PerturbedCoulomb { k, big_k } => [(-k, -1.0), (-big_k, -2.0)],
            Potential::PowerLaw { k, p } => [(k, p), (0.0, 0.0)],
            Potential::SpecialKKr3 { k, big_k } => [(-0.5 * k, 2.0), (0.5 * big_k, -2.0)],
        }
    }

    pub fn value(&self, r: f64) -> f64 {
        self.terms().iter().filter(|t| t.0 != 0.0).map(|&(c, n)| c * r.powf(n)).sum()
    }

    pub fn derivative(&self, r: f64) -> f64 {
        self.terms().iter().filter(|t| t.0 != 0.0).map(|&(c, n)| c * n * r.powf(n - 1.0)).sum()
    }

    /// Interior stationary point of `U`, when there is one.
    pub fn equilibrium(&self) -> Option<f64> {
        match *self {
            Potential::PerturbedCoulomb { k, big_k } if big_k < 0.0 => Some(-2.0 * big_k / k),
            Potential::SpecialKKr3 { k, big_k } if big_k < 0.0 => Some((-big_k / k).powf(0.25)),
            _ => None,
        }
    }

    /// Closed orbits with apsidal angle π/2 make Θ single-valued only mod π.
    pub fn valuedness(&self) -> Valuedness {
        match *self {
            Potential::Isotropic { .. } => Valuedness::ModPi,
            Potential::PowerLaw { p, .. } if p == 2.0 => Valuedness::ModPi,
            _ => Valuedness::Mod2Pi,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CentralForce {
    pub potential: Potential,
    /// `U(r_eq)`, subtracted from the energy.
    pub shift: f64,
}

/// Radii of one bound orbit `(L, E)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Apsides {
    pub inner: f64,
    pub outer: f64,
    /// Minimum of the effective potential.
    pub inertial: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Angle,
    Time,
}

impl CentralForce {
    pub fn new(potential: Potential) -> Result<Self> {
        potential.validate()?;
        let shift = potential.equilibrium().map_or(0.0, |r| potential.value(r));
        Ok(Self { potential, shift })
    }

    pub fn angular_momentum(&self, s: &PhaseState) -> f64 {
        s.q[0] * s.q[0] * s.v[1]
    }

    pub fn energy(&self, s: &PhaseState) -> f64 {
        let (r, rdot) = (s.q[0], s.v[0]);
        let l = self.angular_momentum(s);
        0.5 * rdot * rdot + self.effective_potential(r, l)
    }

    pub fn radicand(&self, r: f64, l: f64, e: f64) -> f64 {
        2.0 * (e + self.shift - self.potential.value(r)) * r * r - l * l
    }

    /// `rad(r0 + dr) − rad(r0)` without cancellation.
    fn radicand_delta(&self, r0: f64, dr: f64, e: f64) -> f64 {
        let lr = (dr / r0).ln_1p();
        let pd = |k: f64| r0.powf(k) * (k * lr).exp_m1();
        let mut out = 2.0 * (e + self.shift) * pd(2.0);
        for (c, n) in self.potential.terms() {
            if c != 0.0 {
                out -= 2.0 * c * pd(n + 2.0);
            }
        }
        out
    }

    pub fn apsides(&self, l: f64, e: f64, seed: f64) -> Result<Apsides> {
        let du = |r: f64| self.effective_potential_derivative(r, l);
        let (mut lo, mut hi) = (seed, seed);
        let mut n = 0;
        while du(lo) >= 0.0 {
            lo *= 0.5;
            n += 1;
            if n > 400 {
                return Err(Error::UnboundedRegime);
            }
        }
        n = 0;
        while du(hi) <= 0.0 {
            hi *= 2.0;
            n += 1;
            if n > 400 || !hi.is_finite() {
                return Err(Error::UnboundedRegime);
            }
        }
        let inertial = bracketed_root(du, lo, hi, 0.0)?;
        let rad = |r: f64| self.radicand(r, l, e);
        let peak = rad(inertial);
        let scale = l * l + 2.0 * (e + self.shift).abs() * inertial * inertial;
        if peak <= 1e-12 * scale {
            return Err(if peak >= -1e-12 * scale { Error::UndefinedOnCircular } else { Error::OutsideClassicalRegion });
        }
        let mut hi = inertial * 1.5;
        n = 0;
        while rad(hi) >= 0.0 {
            hi *= 1.5;
            n += 1;
            if n > 400 || !hi.is_finite() {
                return Err(Error::UnboundedRegime);
            }
        }
        let outer = bracketed_root(rad, inertial, hi, 0.0)?;
        let mut lo = inertial / 1.5;
        n = 0;
        while rad(lo) >= 0.0 {
            lo /= 1.5;
            n += 1;
            if n > 400 {
                return Err(Error::NotApplicable("orbit reaches the origin"));
            }
        }
        let inner = bracketed_root(rad, lo, inertial, 0.0)?;
        Ok(Apsides { inner, outer, inertial })
    }

    fn integrand(kind: Kind, r: f64, rad: f64) -> f64 {
        let root = rad.max(0.0).sqrt();
        match kind {
            Kind::Angle => 1.0 / (r * root),
            Kind::Time => r / root,
        }
    }

    /// `∫_{inner}^{outer}` of the chosen integrand (positive).
    fn half_orbit(&self, kind: Kind, ap: &Apsides, e: f64) -> Result<f64> {
        let f = |n: Node| {
            let rad = if n.from_a <= n.from_b {
                self.radicand_delta(ap.inner, n.from_a, e)
            } else {
                self.radicand_delta(ap.outer, -n.from_b, e)
            };
            Self::integrand(kind, n.x, rad)
        };
        integrate_singular(&SingularIntegral { integrand: f, a: ap.inner, b: ap.outer, singular_at: SingularEnds::Both }, QUAD_TOL)
    }

    /// `∫_{outer}^{x}`, split at the midpoint so only one end is ever close.
    fn from_outer(&self, kind: Kind, ap: &Apsides, e: f64, x: f64) -> Result<f64> {
        if x >= ap.outer {
            return Ok(0.0);
        }
        if x <= ap.inner {
            return Ok(-self.half_orbit(kind, ap, e)?);
        }
        let mid = 0.5 * (ap.inner + ap.outer);
        if x >= mid {
            let f = |n: Node| Self::integrand(kind, n.x, self.radicand_delta(ap.outer, -n.from_b, e));
            let v = integrate_singular(&SingularIntegral { integrand: f, a: x, b: ap.outer, singular_at: SingularEnds::B }, QUAD_TOL)?;
            Ok(-v)
        } else {
            let f = |n: Node| Self::integrand(kind, n.x, self.radicand_delta(ap.inner, n.from_a, e));
            let v = integrate_singular(&SingularIntegral { integrand: f, a: ap.inner, b: x, singular_at: SingularEnds::A }, QUAD_TOL)?;
            Ok(v - self.half_orbit(kind, ap, e)?)
        }
    }

    fn reference_radius(&self, ap: &Apsides, l: f64, e: f64, policy: ReferencePoint) -> Result<f64> {
        match policy {
            ReferencePoint::OuterTurning => Ok(ap.outer),
            ReferencePoint::InnerTurning => Ok(ap.inner),
            ReferencePoint::Inertial => Ok(ap.inertial),
            ReferencePoint::Explicit(r0) => {
                let scale = l * l + 2.0 * (e + self.shift).abs() * r0 * r0;
                if !(r0 > 0.0) || self.radicand(r0, l, e) < -1e-12 * scale {
                    Err(Error::OutsideClassicalRegion)
                } else {
                    Ok(r0.clamp(ap.inner, ap.outer))
                }
            }
        }
    }

    fn quadrature(&self, kind: Kind, r: f64, l: f64, e: f64, policy: ReferencePoint) -> Result<f64> {
        let ap = self.apsides(l, e, r)?;
        let scale = l * l + 2.0 * (e + self.shift).abs() * r * r;
        if self.radicand(r, l, e) < -1e-10 * scale {
            return Err(Error::OutsideClassicalRegion);
        }
        let r0 = self.reference_radius(&ap, l, e, policy)?;
        if r0 == r {
            return Ok(0.0);
        }
        Ok(self.from_outer(kind, &ap, e, r)? - self.from_outer(kind, &ap, e, r0)?)
    }

    /// `Θ = θ − sgn(ṙ)·L·∫_{r₀}^{r} dr/(r√rad)`, not reduced.
    pub fn theta_at(&self, theta: f64, r: f64, l: f64, e: f64, branch: f64, policy: ReferencePoint) -> Result<f64> {
        Ok(theta - branch * l * self.quadrature(Kind::Angle, r, l, e, policy)?)
    }

    /// `T = t − sgn(ṙ)·∫_{r₀}^{r} r dr/√rad`.
    pub fn time_at(&self, t: f64, r: f64, l: f64, e: f64, branch: f64, policy: ReferencePoint) -> Result<f64> {
        Ok(t - branch * self.quadrature(Kind::Time, r, l, e, policy)?)
    }

    fn branch(&self, s: &PhaseState) -> Result<f64> {
        radial_branch(s.v[0], self.accel(s)[0])
    }

    /// Θ at a state, reduced by the potential's valuedness.
    pub fn theta(&self, s: &PhaseState, policy: ReferencePoint) -> Result<f64> {
        require_polar(s)?;
        let (l, e) = (self.angular_momentum(s), self.energy(s));
        let raw = self.theta_at(s.q[1], s.q[0], l, e, self.branch(s)?, policy)?;
        Ok(self.potential.valuedness().reduce(raw))
    }

    pub fn time_integral(&self, s: &PhaseState, policy: ReferencePoint) -> Result<f64> {
        require_polar(s)?;
        let (l, e) = (self.angular_momentum(s), self.energy(s));
        self.time_at(s.t, s.q[0], l, e, self.branch(s)?, policy)
    }

    /// `(∂_LΘ, ∂_EΘ)` by central differences of the quadrature at fixed `r`.
    pub fn theta_partials(&self, s: &PhaseState, policy: ReferencePoint) -> Result<(f64, f64)> {
        require_polar(s)?;
        let (l, e) = (self.angular_momentum(s), self.energy(s));
        let (r, th, br) = (s.q[0], s.q[1], self.branch(s)?);
        let hl = FD_STEP * l.abs().max(1.0);
        let he = FD_STEP * e.abs().max(1.0);
        let f = |l: f64, e: f64| self.theta_at(th, r, l, e, br, policy);
        let dl = (f(l + hl, e)? - f(l - hl, e)?) / (2.0 * hl);
        let de = (f(l, e + he)? - f(l, e - he)?) / (2.0 * he);
        Ok((dl, de))
    }

    /// Angle swept between consecutive apsides, by direct quadrature.
    pub fn apsidal_angle(&self, l: f64, e: f64) -> Result<f64> {
        let ap = self.apsides(l, e, self.apsides_seed(l, e))?;
        Ok(l.abs() * self.half_orbit(Kind::Angle, &ap, e)?)
    }

    /// Time between consecutive apsides.
    pub fn radial_half_period(&self, l: f64, e: f64) -> Result<f64> {
        let ap = self.apsides(l, e, self.apsides_seed(l, e))?;
        self.half_orbit(Kind::Time, &ap, e)
    }

    fn apsides_seed(&self, l: f64, _e: f64) -> f64 {
        l.abs().max(1e-3)
    }

    pub fn first_integrals(&self, policy: ReferencePoint) -> Vec<FirstIntegral> {
        let c = *self;
        let apsides = [EventKind::TurningPoint];
        let mut theta = FirstIntegral::new("Theta", move |s| c.theta(s, policy))
            .valued(self.potential.valuedness())
            .jumps_at(&apsides);
        theta.partials = Some(IntegralPartials {
            d_l: Arc::new(move |s| Ok(c.theta_partials(s, policy)?.0)),
            d_e: Arc::new(move |s| Ok(c.theta_partials(s, policy)?.1)),
        });
        theta.reference_point = Some(policy);
        let mut time = FirstIntegral::new("T", move |s| c.time_integral(s, policy)).time_explicit().jumps_at(&apsides);
        time.reference_point = Some(policy);
        vec![
            FirstIntegral::new("L", move |s| {
                require_polar(s)?;
                Ok(c.angular_momentum(s))
            }),
            FirstIntegral::new("E", move |s| {
                require_polar(s)?;
                Ok(c.energy(s))
            }),
            theta,
            time,
        ]
    }
}

impl EffectivePotential for CentralForce {
    fn effective_potential(&self, r: f64, l: f64) -> f64 {
        self.potential.value(r) + 0.5 * l * l / (r * r) - self.shift
    }

    fn effective_potential_derivative(&self, r: f64, l: f64) -> f64 {
        self.potential.derivative(r) - l * l / (r * r * r)
    }
}

impl Dynamics for CentralForce {
    fn chart(&self) -> Chart {
        Chart::Polar
    }

    fn accel(&self, s: &PhaseState) -> [f64; 2] {
        let (r, rdot, thetadot) = (s.q[0], s.v[0], s.v[1]);
        [thetadot * thetadot * r - self.potential.derivative(r), -2.0 * thetadot * rdot / r]
    }

    fn lagrangian(&self, s: &PhaseState) -> f64 {
        let (r, rdot, thetadot) = (s.q[0], s.v[0], s.v[1]);
        0.5 * (rdot * rdot + thetadot * thetadot * r * r) - self.potential.value(r)
    }

    fn noether_weights(&self, q: [f64; 2]) -> [f64; 2] {
        [1.0, q[0] * q[0]]
    }
}
