//! The λ-deformed isotropic oscillator with position-dependent mass
//! `m(r) = 1 + λr²`.
//!
//! Shorthand used throughout: `a = ω² − 2λE`, `D = E² − aL²`,
//! `N(r) = E − a r²` and the radicand `2E r² m − L² − ω² r⁴`, which on a
//! state equals `(r m ṙ)²`. The turning points are the roots in `s = r²` of
//! `−a s² + 2E s − L²`.

use super::{
    radial_branch, require_polar, EffectivePotential, FirstIntegral, IntegralPartials, ReferencePoint, Valuedness,
};
use crate::dynamics::{Chart, Dynamics, EventKind, PhaseState};
use crate::error::{Error, Result};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;
#[allow(unused_imports)] // redundant once std is linked in
use num_traits::Float;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Darboux {
    pub lambda: f64,
    pub omega: f64,
}

/// A radius on a given orbit `(L, E)` and branch, with `√radicand` there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Orbit {
    pub r: f64,
    pub l: f64,
    pub e: f64,
    /// `sgn ṙ`.
    pub branch: f64,
    pub sqrt_rad: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DarbouxIntegrals {
    pub l: f64,
    pub e: f64,
    /// Reduced to `[0, π)`.
    pub theta: f64,
    pub t: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DarbouxPartials {
    pub d_l_theta: f64,
    pub d_e_theta: f64,
    pub d_e_t: f64,
    pub d_l_t: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CartesianConstants {
    pub e1: f64,
    pub e2: f64,
    pub c2: f64,
}

/// Where the `|ʳ_{r₀}` boundary terms are taken.
#[derive(Debug, Clone, Copy)]
enum Boundary {
    /// Arctangent terms sit at their `±π/2` limits and the rest vanish.
    Turning { outer: bool },
    At(Orbit),
}

/// Orbit-level constants shared by every term.
#[derive(Debug, Clone, Copy)]
struct Shape {
    l: f64,
    e: f64,
    a: f64,
    d: f64,
}

impl Darboux {
    pub fn new(lambda: f64, omega: f64) -> Result<Self> {
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidParam { name: "lambda", value: lambda, expected: "λ ≥ 0" });
        }
        let omega = super::positive("omega", omega)?;
        Ok(Self { lambda, omega })
    }

    pub fn mass(&self, r: f64) -> f64 {
        1.0 + self.lambda * r * r
    }

    pub fn angular_momentum(&self, s: &PhaseState) -> f64 {
        let r = s.q[0];
        r * r * self.mass(r) * s.v[1]
    }

    pub fn energy(&self, s: &PhaseState) -> f64 {
        let (r, rdot) = (s.q[0], s.v[0]);
        let l = self.angular_momentum(s);
        0.5 * (self.mass(r) * rdot * rdot + self.effective_potential(r, l))
    }

    pub fn radicand(&self, r: f64, l: f64, e: f64) -> f64 {
        let r2 = r * r;
        2.0 * e * r2 * self.mass(r) - l * l - self.omega * self.omega * r2 * r2
    }

    fn shape(&self, l: f64, e: f64) -> Result<Shape> {
        let a = self.omega * self.omega - 2.0 * self.lambda * e;
        let d = e * e - a * l * l;
        if !(d >= 0.0) {
            return Err(Error::OutsideClassicalRegion);
        }
        if d <= 1e-13 * e * e {
            return Err(Error::UndefinedOnCircular);
        }
        Ok(Shape { l, e, a, d })
    }

    /// Orbit data at a state; `√radicand = r m |ṙ|` avoids cancellation.
    pub fn orbit(&self, s: &PhaseState) -> Result<Orbit> {
        require_polar(s)?;
        let (r, rdot) = (s.q[0], s.v[0]);
        let branch = radial_branch(rdot, self.accel(s)[0])?;
        Ok(Orbit {
            r,
            l: self.angular_momentum(s),
            e: self.energy(s),
            branch,
            sqrt_rad: r * self.mass(r) * rdot.abs(),
        })
    }

    /// Orbit data at an arbitrary `(r, L, E)` and branch.
    pub fn orbit_at(&self, r: f64, l: f64, e: f64, branch: f64) -> Result<Orbit> {
        if !(r > 0.0) {
            return Err(Error::InvalidState("polar radius must be positive"));
        }
        let rad = self.radicand(r, l, e);
        let scale = l * l + 2.0 * e.abs() * r * r * self.mass(r) + self.omega * self.omega * r.powi(4);
        let sqrt_rad = if rad >= 0.0 {
            rad.sqrt()
        } else if rad > -1e-14 * scale {
            0.0
        } else {
            return Err(Error::OutsideClassicalRegion);
        };
        Ok(Orbit { r, l, e, branch: branch.signum(), sqrt_rad })
    }

    /// Inner turning radius and, in the bound regime, the outer one.
    pub fn turning_points(&self, l: f64, e: f64) -> Result<(f64, Option<f64>)> {
        let sh = self.shape(l, e)?;
        let root = sh.d.sqrt();
        if !(e + root > 0.0) {
            return Err(Error::OutsideClassicalRegion);
        }
        let inner = (l * l / (e + root)).sqrt();
        let outer = if sh.a > 0.0 { Some(((e + root) / sh.a).sqrt()) } else { None };
        Ok((inner, outer))
    }

    /// Minimum of the effective potential, from `ω²s² − 2λL²s − L² = 0`.
    pub fn inertial_point(&self, l: f64) -> Result<f64> {
        if l == 0.0 {
            return Err(Error::NotApplicable("no inertial point at zero angular momentum"));
        }
        let w2 = self.omega * self.omega;
        let s = (self.lambda * l * l + l.abs() * (self.lambda * self.lambda * l * l + w2).sqrt()) / w2;
        Ok(s.sqrt())
    }

    fn boundary(&self, o: &Orbit, sh: &Shape, policy: ReferencePoint) -> Result<Boundary> {
        let r0 = match policy {
            ReferencePoint::OuterTurning => {
                if sh.a <= 0.0 {
                    return Err(Error::UnboundedRegime);
                }
                return Ok(Boundary::Turning { outer: true });
            }
            ReferencePoint::InnerTurning => return Ok(Boundary::Turning { outer: false }),
            ReferencePoint::Inertial => self.inertial_point(sh.l)?,
            ReferencePoint::Explicit(r0) => r0,
        };
        let at = self.orbit_at(r0, sh.l, sh.e, o.branch)?;
        if at.sqrt_rad == 0.0 {
            let outer = sh.a > 0.0 && sh.a * r0 * r0 > sh.e;
            return Ok(Boundary::Turning { outer });
        }
        Ok(Boundary::At(at))
    }

    fn theta_term(o: &Orbit, sh: &Shape) -> f64 {
        (o.branch * (sh.e * o.r * o.r - sh.l * sh.l) / (sh.l * o.sqrt_rad)).atan()
    }

    fn time_atan_term(o: &Orbit, sh: &Shape) -> f64 {
        (o.branch * (sh.e - sh.a * o.r * o.r) / (sh.a.sqrt() * o.sqrt_rad)).atan()
    }

    fn theta_boundary(o: &Orbit, sh: &Shape, b: Boundary) -> f64 {
        match b {
            Boundary::Turning { outer } => {
                let side = if outer { 1.0 } else { -1.0 };
                o.branch * FRAC_PI_2 * sh.l.signum() * side
            }
            Boundary::At(at) => Self::theta_term(&at, sh),
        }
    }

    fn time_boundary(o: &Orbit, sh: &Shape, b: Boundary) -> (f64, f64) {
        match b {
            Boundary::Turning { outer } => {
                let side = if outer { -1.0 } else { 1.0 };
                (o.branch * FRAC_PI_2 * side, 0.0)
            }
            Boundary::At(at) => (Self::time_atan_term(&at, sh), at.branch * at.sqrt_rad),
        }
    }

    /// Θ before reduction; continuous along each monotone-ṙ arc.
    pub fn theta_unreduced(&self, theta: f64, o: &Orbit, policy: ReferencePoint) -> Result<f64> {
        let sh = self.shape(o.l, o.e)?;
        let b = self.boundary(o, &sh, policy)?;
        Ok(theta - 0.5 * (Self::theta_term(o, &sh) - Self::theta_boundary(o, &sh, b)))
    }

    /// `T = t + ½(ω²−λE)a^{-3/2}·atan(sN/(√a√rad))|ʳ_{r₀} + ½(λ/a)·s√rad|ʳ_{r₀}`.
    pub fn time_integral(&self, t: f64, o: &Orbit, policy: ReferencePoint) -> Result<f64> {
        let sh = self.shape(o.l, o.e)?;
        if sh.a <= 0.0 {
            return Err(Error::UnboundedRegime);
        }
        let b = self.boundary(o, &sh, policy)?;
        let (b0, s0) = Self::time_boundary(o, &sh, b);
        let lam = self.lambda;
        let c = (self.omega * self.omega - lam * o.e) / sh.a.powf(1.5);
        Ok(t + 0.5 * c * (Self::time_atan_term(o, &sh) - b0) + 0.5 * (lam / sh.a) * (o.branch * o.sqrt_rad - s0))
    }

    pub fn integrals(&self, s: &PhaseState, policy: ReferencePoint) -> Result<DarbouxIntegrals> {
        let o = self.orbit(s)?;
        let theta = self.theta_unreduced(s.q[1], &o, policy)?;
        Ok(DarbouxIntegrals {
            l: o.l,
            e: o.e,
            theta: Valuedness::ModPi.reduce(theta),
            t: self.time_integral(s.t, &o, policy)?,
        })
    }

    /// `(∂_LΘ, ∂_EΘ)` integrand terms at one radius (boundary not subtracted).
    fn theta_partial_terms(&self, o: &Orbit, sh: &Shape) -> (f64, f64) {
        let w2 = self.omega * self.omega;
        let (r2, m) = (o.r * o.r, self.mass(o.r));
        let rho = o.branch / o.sqrt_rad;
        let dl = ((2.0 * m * sh.e - w2 * r2) * sh.e + (2.0 * self.lambda * sh.e - w2) * sh.l * sh.l) / (2.0 * sh.d) * rho;
        let de = sh.l * (w2 * r2 - m * sh.e - self.lambda * sh.l * sh.l) / (2.0 * sh.d) * rho;
        (dl, de)
    }

    /// Non-arctangent part of `∂_E T` at one radius.
    fn time_partial_term(&self, o: &Orbit, sh: &Shape) -> f64 {
        let (lam, w2) = (self.lambda, self.omega * self.omega);
        let (r2, m) = (o.r * o.r, self.mass(o.r));
        let q = w2 - lam * sh.e;
        let rho = o.branch / o.sqrt_rad;
        let p2 = m * (lam * r2 + q * (sh.e * r2 - sh.l * sh.l) / sh.d) / (2.0 * sh.a);
        let k3 = lam / (2.0 * sh.a * sh.a) * (2.0 * lam + sh.e * q / sh.d);
        rho * p2 + k3 * o.branch * o.sqrt_rad
    }

    pub fn partials_at(&self, o: &Orbit, policy: ReferencePoint) -> Result<DarbouxPartials> {
        let sh = self.shape(o.l, o.e)?;
        if sh.a <= 0.0 {
            return Err(Error::UnboundedRegime);
        }
        let b = self.boundary(o, &sh, policy)?;
        let (mut dl, mut de) = self.theta_partial_terms(o, &sh);
        let mut g = self.time_partial_term(o, &sh);
        if let Boundary::At(at) = b {
            let (dl0, de0) = self.theta_partial_terms(&at, &sh);
            dl -= dl0;
            de -= de0;
            g -= self.time_partial_term(&at, &sh);
        }
        let (b0, _) = Self::time_boundary(o, &sh, b);
        let lam = self.lambda;
        let w2 = self.omega * self.omega;
        let kb = 0.5 * lam * (2.0 * w2 - lam * o.e) / sh.a.powf(2.5);
        let de_t = kb * (Self::time_atan_term(o, &sh) - b0) + g;
        Ok(DarbouxPartials { d_l_theta: dl, d_e_theta: de, d_e_t: de_t, d_l_t: -de })
    }

    pub fn partials(&self, s: &PhaseState, policy: ReferencePoint) -> Result<DarbouxPartials> {
        self.partials_at(&self.orbit(s)?, policy)
    }

    /// `Eᵢ = pᵢ² − (2λH − ω²)qᵢ²` and `C⁽²⁾ = (q₁p₂ − q₂p₁)²` in Cartesian chart.
    pub fn cartesian_constants(&self, s: &PhaseState) -> CartesianConstants {
        let c = super::to_cartesian(s);
        let [x, y] = c.q;
        let m = 1.0 + self.lambda * (x * x + y * y);
        let p = [m * c.v[0], m * c.v[1]];
        let w2 = self.omega * self.omega;
        let h = (p[0] * p[0] + p[1] * p[1] + w2 * (x * x + y * y)) / (2.0 * m);
        let k = 2.0 * self.lambda * h - w2;
        let cross = x * p[1] - y * p[0];
        CartesianConstants { e1: p[0] * p[0] - k * x * x, e2: p[1] * p[1] - k * y * y, c2: cross * cross }
    }

    pub fn first_integrals(&self, policy: ReferencePoint) -> Vec<FirstIntegral> {
        let d = *self;
        let apsides = [EventKind::TurningPoint];
        let mut theta = FirstIntegral::new("Theta", move |s| Ok(d.integrals(s, policy)?.theta))
            .valued(Valuedness::ModPi)
            .jumps_at(&apsides);
        theta.partials = Some(IntegralPartials {
            d_l: Arc::new(move |s| Ok(d.partials(s, policy)?.d_l_theta)),
            d_e: Arc::new(move |s| Ok(d.partials(s, policy)?.d_e_theta)),
        });
        theta.reference_point = Some(policy);
        let mut time = FirstIntegral::new("T", move |s| Ok(d.integrals(s, policy)?.t))
            .time_explicit()
            .jumps_at(&apsides);
        time.partials = Some(IntegralPartials {
            d_l: Arc::new(move |s| Ok(d.partials(s, policy)?.d_l_t)),
            d_e: Arc::new(move |s| Ok(d.partials(s, policy)?.d_e_t)),
        });
        time.reference_point = Some(policy);
        vec![
            FirstIntegral::new("L", move |s| {
                require_polar(s)?;
                Ok(d.angular_momentum(s))
            }),
            FirstIntegral::new("E", move |s| {
                require_polar(s)?;
                Ok(d.energy(s))
            }),
            theta,
            time,
            FirstIntegral::new("E1_cart", move |s| Ok(d.cartesian_constants(s).e1)),
            FirstIntegral::new("E2_cart", move |s| Ok(d.cartesian_constants(s).e2)),
            FirstIntegral::new("C2_cart", move |s| Ok(d.cartesian_constants(s).c2)),
        ]
    }
}

impl EffectivePotential for Darboux {
    fn effective_potential(&self, r: f64, l: f64) -> f64 {
        (self.omega * self.omega * r * r + l * l / (r * r)) / self.mass(r)
    }

    fn effective_potential_derivative(&self, r: f64, l: f64) -> f64 {
        let w2 = self.omega * self.omega;
        let num = w2 * r * r + l * l / (r * r);
        let dnum = 2.0 * w2 * r - 2.0 * l * l / (r * r * r);
        let m = self.mass(r);
        (dnum * m - num * 2.0 * self.lambda * r) / (m * m)
    }
}

impl Dynamics for Darboux {
    fn chart(&self) -> Chart {
        Chart::Polar
    }

    fn accel(&self, s: &PhaseState) -> [f64; 2] {
        let (r, rdot, thetadot) = (s.q[0], s.v[0], s.v[1]);
        let lam = self.lambda;
        let m = self.mass(r);
        let k = 2.0 * lam * r * r + 1.0;
        let fr = (k * thetadot * thetadot - lam * rdot * rdot) * r / m - self.omega * self.omega * r / (m * m * m);
        let ftheta = -2.0 * thetadot * rdot * k / (m * r);
        [fr, ftheta]
    }

    fn lagrangian(&self, s: &PhaseState) -> f64 {
        let (r, rdot, thetadot) = (s.q[0], s.v[0], s.v[1]);
        let m = self.mass(r);
        0.5 * m * (rdot * rdot + thetadot * thetadot * r * r) - 0.5 * self.omega * self.omega * r * r / m
    }

    fn noether_weights(&self, q: [f64; 2]) -> [f64; 2] {
        let m = self.mass(q[0]);
        [m, q[0] * q[0] * m]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> Darboux {
        Darboux::new(1.0, 1.0).unwrap()
    }

    #[test]
    fn hand_substitution() {
        let d = unit();
        let s = PhaseState::polar(0.0, 1.0, 0.0, 0.0, 0.5);
        assert!((d.accel(&s)[0] - 0.25).abs() < 1e-15);
        assert_eq!(d.angular_momentum(&s), 1.0);
        assert_eq!(d.energy(&s), 0.5);
        assert_eq!(d.accel(&PhaseState::polar(0.0, 1.0, 0.0, 1.0, 0.0))[1], 0.0);
    }

    #[test]
    fn undeformed_limit_is_isotropic() {
        let d = Darboux::new(0.0, 1.3).unwrap();
        let s = PhaseState::polar(0.0, 0.8, 0.2, -0.3, 0.9);
        let [fr, ft] = d.accel(&s);
        assert!((fr - (0.81 * 0.8 - 1.69 * 0.8)).abs() < 1e-15);
        assert!((ft - (-2.0 * 0.9 * -0.3 / 0.8)).abs() < 1e-15);
        let l = d.angular_momentum(&s);
        let e = 0.5 * (0.09 + l * l / 0.64) + 0.5 * 1.69 * 0.64;
        assert!((d.energy(&s) - e).abs() < 1e-15);
    }

    #[test]
    fn turning_points_zero_the_radicand() {
        let d = Darboux::new(0.3, 1.0).unwrap();
        let s = PhaseState::polar(0.0, 1.0, 0.0, 0.4, 0.7);
        let o = d.orbit(&s).unwrap();
        let (ri, ro) = d.turning_points(o.l, o.e).unwrap();
        let ro = ro.unwrap();
        assert!(ri < 1.0 && 1.0 < ro);
        assert!(d.radicand(ri, o.l, o.e).abs() < 1e-13);
        assert!(d.radicand(ro, o.l, o.e).abs() < 1e-13);
        let rs = d.inertial_point(o.l).unwrap();
        assert!(d.effective_potential_derivative(rs, o.l).abs() < 1e-13);
    }

    #[test]
    fn state_radicand_identity() {
        let d = Darboux::new(0.7, 1.2).unwrap();
        let s = PhaseState::polar(0.0, 1.3, 0.0, -0.25, 0.4);
        let o = d.orbit(&s).unwrap();
        assert!((o.sqrt_rad.powi(2) - d.radicand(1.3, o.l, o.e)).abs() < 1e-13);
        assert_eq!(o.branch, -1.0);
    }

    #[test]
    fn circular_orbit_is_undefined() {
        let d = Darboux::new(0.0, 1.0).unwrap();
        let s = PhaseState::polar(0.0, 1.0, 0.0, 0.0, 1.0);
        assert_eq!(d.integrals(&s, ReferencePoint::OuterTurning), Err(Error::UndefinedOnCircular));
    }

    #[test]
    fn rejects_negative_lambda() {
        assert!(matches!(Darboux::new(-1.0, 1.0), Err(Error::InvalidParam { name: "lambda", .. })));
    }
}
