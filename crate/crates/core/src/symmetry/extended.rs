//! Point symmetries of the first-order radial system of the deformed
//! oscillator, acting on `(t, r, θ, L, E)`.
//!
//! On that space the equations of motion are `ṙ = Fʳ(r, L, E)`,
//! `θ̇ = F^θ(r, L)`, `L̇ = Ė = 0`, and each symmetry
//! `Y = τ∂t + η^θ∂θ + η^L∂L + η^E∂E` has no `∂r` part.

use crate::dynamics::PhaseState;
use crate::error::{Error, Result};
use crate::noether::Generator;
use crate::numdiff::{derivative, Trap};
use crate::systems::{Darboux, Orbit, ReferencePoint};
use alloc::string::String;
use alloc::sync::Arc;
#[allow(unused_imports)] // redundant once std is linked in
use num_traits::Float;

const H_R: f64 = 1e-4;
const H_BRACKET: f64 = 1e-5;

/// A point of `(t, r, θ, L, E)` plus the radial branch `sgn ṙ`, which the
/// closed-form integrals need to pick a sheet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtPoint {
    pub t: f64,
    pub r: f64,
    pub theta: f64,
    pub l: f64,
    pub e: f64,
    pub branch: f64,
}

impl ExtPoint {
    pub fn from_state(d: &Darboux, s: &PhaseState) -> Result<Self> {
        let o = d.orbit(s)?;
        Ok(Self { t: s.t, r: o.r, theta: s.q[1], l: o.l, e: o.e, branch: o.branch })
    }

    /// Coordinate `k` of `(t, θ, L, E)`.
    fn coord(&self, k: usize) -> f64 {
        [self.t, self.theta, self.l, self.e][k]
    }

    fn with_coord(mut self, k: usize, x: f64) -> Self {
        match k {
            0 => self.t = x,
            1 => self.theta = x,
            2 => self.l = x,
            _ => self.e = x,
        }
        self
    }

    fn with_r(mut self, r: f64) -> Self {
        self.r = r;
        self
    }
}

pub type ExtFn = Arc<dyn Fn(&ExtPoint) -> Result<f64> + Send + Sync>;

#[derive(Clone)]
pub struct ExtendedGenerator {
    pub name: String,
    pub tau: ExtFn,
    pub eta_theta: ExtFn,
    pub eta_l: ExtFn,
    pub eta_e: ExtFn,
    /// `(C₁, C₂, C₃, C₄)` for members of the solved family.
    pub constants: Option<[f64; 4]>,
}

impl core::fmt::Debug for ExtendedGenerator {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("ExtendedGenerator").field("name", &self.name).field("constants", &self.constants).finish()
    }
}

impl ExtendedGenerator {
    pub fn new(
        name: &str,
        tau: impl Fn(&ExtPoint) -> Result<f64> + Send + Sync + 'static,
        eta_theta: impl Fn(&ExtPoint) -> Result<f64> + Send + Sync + 'static,
        eta_l: impl Fn(&ExtPoint) -> Result<f64> + Send + Sync + 'static,
        eta_e: impl Fn(&ExtPoint) -> Result<f64> + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            tau: Arc::new(tau),
            eta_theta: Arc::new(eta_theta),
            eta_l: Arc::new(eta_l),
            eta_e: Arc::new(eta_e),
            constants: None,
        }
    }

    /// `(τ, η^θ, η^L, η^E)` at `p`.
    pub fn components(&self, p: &ExtPoint) -> Result<[f64; 4]> {
        Ok([(self.tau)(p)?, (self.eta_theta)(p)?, (self.eta_l)(p)?, (self.eta_e)(p)?])
    }

    fn component(&self, k: usize) -> &ExtFn {
        [&self.tau, &self.eta_theta, &self.eta_l, &self.eta_e][k]
    }

    /// `Y(F)` by central differences along each coordinate.
    fn apply(&self, f: &dyn Fn(&ExtPoint) -> Result<f64>, p: &ExtPoint) -> Result<f64> {
        let c = self.components(p)?;
        let trap = Trap::default();
        let mut out = 0.0;
        for (k, ck) in c.iter().enumerate() {
            if *ck == 0.0 {
                continue;
            }
            let d = derivative(|x| trap.eval(f(&p.with_coord(k, x))), p.coord(k), H_BRACKET);
            out += ck * trap.finish(d)?;
        }
        Ok(out)
    }
}

/// Sign convention for the `∂E` part of the solved family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyConvention {
    /// `η^E = −C₂`, which solves the determining equations.
    Consistent,
    /// `η^E = +C₂` exactly as printed; fails them whenever `C₂ ≠ 0`.
    Printed,
}

fn orbit_of(d: &Darboux, p: &ExtPoint) -> Result<Orbit> {
    d.orbit_at(p.r, p.l, p.e, p.branch)
}

/// Member `(C₁, C₂, C₃, C₄)` of the general solution
/// `τ = C₁∂_EΘ + C₂∂_ET + C₃`, `η^θ = −C₁∂_LΘ − C₂∂_LT − C₄`, `η^L = C₁`.
pub fn family_generator(c: [f64; 4], d: Darboux, policy: ReferencePoint, convention: FamilyConvention) -> ExtendedGenerator {
    let [c1, c2, c3, c4] = c;
    let name = match c {
        [1.0, 0.0, 0.0, 0.0] => "Y_Theta",
        [0.0, 1.0, 0.0, 0.0] => "Y_T",
        [0.0, 0.0, 1.0, 0.0] => "Y_E",
        [0.0, 0.0, 0.0, 1.0] => "Y_L",
        _ => "Y_family",
    };
    let needs_partials = c1 != 0.0 || c2 != 0.0;
    let tau = move |p: &ExtPoint| {
        if !needs_partials {
            return Ok(c3);
        }
        let pd = d.partials_at(&orbit_of(&d, p)?, policy)?;
        Ok(c1 * pd.d_e_theta + c2 * pd.d_e_t + c3)
    };
    let eta_theta = move |p: &ExtPoint| {
        if !needs_partials {
            return Ok(-c4);
        }
        let pd = d.partials_at(&orbit_of(&d, p)?, policy)?;
        Ok(-c1 * pd.d_l_theta - c2 * pd.d_l_t - c4)
    };
    let e_sign = match convention {
        FamilyConvention::Consistent => -1.0,
        FamilyConvention::Printed => 1.0,
    };
    let mut y = ExtendedGenerator::new(name, tau, eta_theta, move |_| Ok(c1), move |_| Ok(e_sign * c2));
    y.constants = Some(c);
    y
}

/// `Y_T` as displayed: `−∂_ET ∂t + ∂_LT ∂θ − ∂E`.
pub fn displayed_y_t(d: Darboux, policy: ReferencePoint) -> ExtendedGenerator {
    ExtendedGenerator::new(
        "Y_T_displayed",
        move |p| Ok(-d.partials_at(&orbit_of(&d, p)?, policy)?.d_e_t),
        move |p| Ok(d.partials_at(&orbit_of(&d, p)?, policy)?.d_l_t),
        |_| Ok(0.0),
        |_| Ok(-1.0),
    )
}

/// `(Fʳ, F^θ)` and their `(∂_L, ∂_E)` derivatives.
struct FirstOrder {
    fr: f64,
    ftheta: f64,
    fr_l: f64,
    fr_e: f64,
    ftheta_l: f64,
}

fn first_order(d: &Darboux, p: &ExtPoint) -> Result<FirstOrder> {
    let (r, l, e) = (p.r, p.l, p.e);
    let m = d.mass(r);
    let x = 2.0 * e * m - l * l / (r * r) - d.omega * d.omega * r * r;
    if !(x > 0.0) {
        return Err(Error::OutsideClassicalRegion);
    }
    let root = x.sqrt();
    let s = p.branch;
    Ok(FirstOrder {
        fr: s * root / m,
        ftheta: l / (r * r * m),
        fr_l: -s * l / (r * r * m * root),
        fr_e: s / root,
        ftheta_l: 1.0 / (r * r * m),
    })
}

/// Residuals of `pr⁽¹⁾Y` applied to `(L̇, Ė, θ̇ − F^θ, ṙ − Fʳ)` on-shell,
/// in that order.
pub fn determining_residual_1st(y: &ExtendedGenerator, d: &Darboux, p: &ExtPoint) -> Result<[f64; 4]> {
    let f = first_order(d, p)?;
    let trap = Trap::default();
    let mut dr = [0.0; 4];
    for (k, slot) in dr.iter_mut().enumerate() {
        let comp = y.component(k);
        *slot = trap.finish(derivative(|r| trap.eval(comp(&p.with_r(r))), p.r, H_R))?;
    }
    let [_, _, eta_l, eta_e] = y.components(p)?;
    let [dtau, deta_theta, deta_l, deta_e] = dr;
    Ok([
        f.fr * deta_l,
        f.fr * deta_e,
        f.fr * (deta_theta - f.ftheta * dtau) - eta_l * f.ftheta_l,
        -(f.fr * f.fr * dtau + eta_e * f.fr_e + eta_l * f.fr_l),
    ])
}

/// Evolutionary form projected onto `(r, θ)`:
/// `Pʳ = −τṙ`, `P^θ = η^θ − τθ̇`, with `(L, E)` read off the state.
pub fn project_to_dynamical(y: &ExtendedGenerator, d: Darboux) -> Generator {
    let (tau_r, tau_t, eta) = (y.tau.clone(), y.tau.clone(), y.eta_theta.clone());
    Generator::evolutionary(
        &alloc::format!("hat_{}", y.name),
        move |s| {
            let p = ExtPoint::from_state(&d, s)?;
            Ok(-tau_r(&p)? * s.v[0])
        },
        move |s| {
            let p = ExtPoint::from_state(&d, s)?;
            Ok(eta(&p)? - tau_t(&p)? * s.v[1])
        },
    )
}

/// Lie bracket `[Y₁, Y₂]` as `(τ, η^θ, η^L, η^E)` at `p`.
pub fn commutator(a: &ExtendedGenerator, b: &ExtendedGenerator, p: &ExtPoint, d: &Darboux) -> Result<[f64; 4]> {
    // both fields live on the classical region
    first_order(d, p)?;
    let mut out = [0.0; 4];
    for (k, slot) in out.iter_mut().enumerate() {
        let (ak, bk) = (a.component(k).clone(), b.component(k).clone());
        *slot = a.apply(&*bk, p)? - b.apply(&*ak, p)?;
    }
    Ok(out)
}

/// `Y(ζ) − 1`; zero when `ζ` is a canonical coordinate of `Y`.
pub fn canonical_coordinate_residual(
    y: &ExtendedGenerator,
    zeta: &dyn Fn(&ExtPoint) -> Result<f64>,
    p: &ExtPoint,
    d: &Darboux,
) -> Result<f64> {
    first_order(d, p)?;
    Ok(y.apply(zeta, p)? - 1.0)
}

impl Darboux {
    /// Θ (not reduced) as a function on the extended space.
    pub fn theta_on(&self, p: &ExtPoint, policy: ReferencePoint) -> Result<f64> {
        self.theta_unreduced(p.theta, &orbit_of(self, p)?, policy)
    }

    pub fn time_on(&self, p: &ExtPoint, policy: ReferencePoint) -> Result<f64> {
        self.time_integral(p.t, &orbit_of(self, p)?, policy)
    }

    /// `ṙ` at `p`, for building a state back from an extended point.
    pub fn radial_velocity(&self, p: &ExtPoint) -> Result<f64> {
        Ok(first_order(self, p)?.fr)
    }

    pub fn state_at(&self, p: &ExtPoint) -> Result<PhaseState> {
        let f = first_order(self, p)?;
        Ok(PhaseState::polar(p.t, p.r, p.theta, f.fr, f.ftheta))
    }
}
