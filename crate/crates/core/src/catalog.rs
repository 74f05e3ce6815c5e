//! Named generators and multiplier pairs of the three systems.
//!
//! Uncoupled-oscillator entries use the Noether normalisation `P = −Q/w`
//! with `Q = ∂I/∂q̇`, so each hatted generator is exactly the one whose
//! Noether integral is the matching first integral.

use crate::dynamics::PhaseState;
use crate::error::{Error, Result};
use crate::noether::{generator_from_multiplier, Generator, MultiplierPair};
use crate::symmetry::{family_generator, project_to_dynamical, FamilyConvention};
use crate::systems::{CentralForce, Darboux, Potential, ReferencePoint, SystemDef, Uncoupled};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // redundant once std is linked in
use num_traits::Float;

#[derive(Clone, Debug)]
pub enum CatalogObject {
    Generator(Generator),
    Multiplier(MultiplierPair),
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: String,
    pub object: CatalogObject,
    /// Whether the entry should pass its residual check for these parameters.
    pub expected: bool,
}

impl CatalogEntry {
    fn generator(g: Generator, expected: bool) -> Self {
        Self { name: g.name.clone(), object: CatalogObject::Generator(g), expected }
    }

    fn multiplier(m: MultiplierPair) -> Self {
        Self { name: m.source.clone(), object: CatalogObject::Multiplier(m), expected: true }
    }
}

pub fn catalog(sys: &SystemDef, policy: ReferencePoint) -> Vec<CatalogEntry> {
    match sys {
        SystemDef::Uncoupled(u) => uncoupled_entries(u),
        SystemDef::Central(c) => central_entries(c),
        SystemDef::Darboux(d) => darboux_entries(d, policy),
    }
}

pub fn lookup(sys: &SystemDef, policy: ReferencePoint, name: &str) -> Result<CatalogEntry> {
    catalog(sys, policy).into_iter().find(|e| e.name == name).ok_or(Error::NotApplicable("unknown catalog entry"))
}

pub fn rotation_generator() -> Generator {
    Generator::evolutionary("Xhat_L", |_| Ok(0.0), |_| Ok(-1.0))
}

/// `−ṙ∂r − θ̇∂θ`, the evolutionary form of `∂t`.
pub fn time_translation_generator() -> Generator {
    Generator::evolutionary("Xhat_E", |s| Ok(-s.v[0]), |s| Ok(-s.v[1]))
}

/// `−(ṙ ∂_EΘ)∂r − (∂_LΘ + θ̇ ∂_EΘ)∂θ`.
pub fn darboux_theta_generator(d: Darboux, policy: ReferencePoint) -> Generator {
    Generator::evolutionary(
        "Xhat_Theta",
        move |s| Ok(-s.v[0] * d.partials(s, policy)?.d_e_theta),
        move |s| {
            let p = d.partials(s, policy)?;
            Ok(-(p.d_l_theta + s.v[1] * p.d_e_theta))
        },
    )
}

/// `−(ṙ ∂_ET)∂r − (∂_LT + θ̇ ∂_ET)∂θ`.
pub fn darboux_time_generator(d: Darboux, policy: ReferencePoint) -> Generator {
    Generator::evolutionary(
        "Xhat_T",
        move |s| Ok(-s.v[0] * d.partials(s, policy)?.d_e_t),
        move |s| {
            let p = d.partials(s, policy)?;
            Ok(-(p.d_l_t + s.v[1] * p.d_e_t))
        },
    )
}

/// The four multiplier pairs of the deformed oscillator in closed form.
pub fn darboux_multipliers(d: Darboux, policy: ReferencePoint) -> [MultiplierPair; 4] {
    let w = move |r: f64| d.mass(r);
    [
        MultiplierPair::new("Q_L", |_| Ok(0.0), move |s| Ok(s.q[0] * s.q[0] * w(s.q[0]))),
        MultiplierPair::new("Q_E", move |s| Ok(w(s.q[0]) * s.v[0]), move |s| Ok(s.q[0] * s.q[0] * w(s.q[0]) * s.v[1])),
        MultiplierPair::new(
            "Q_Theta",
            move |s| Ok(w(s.q[0]) * s.v[0] * d.partials(s, policy)?.d_e_theta),
            move |s| {
                let p = d.partials(s, policy)?;
                Ok(s.q[0] * s.q[0] * w(s.q[0]) * (s.v[1] * p.d_e_theta + p.d_l_theta))
            },
        ),
        MultiplierPair::new(
            "Q_T",
            move |s| Ok(w(s.q[0]) * s.v[0] * d.partials(s, policy)?.d_e_t),
            move |s| {
                let p = d.partials(s, policy)?;
                Ok(s.q[0] * s.q[0] * w(s.q[0]) * (s.v[1] * p.d_e_t + p.d_l_t))
            },
        ),
    ]
}

fn darboux_entries(d: &Darboux, policy: ReferencePoint) -> Vec<CatalogEntry> {
    let d = *d;
    let mut out = vec![
        CatalogEntry::generator(rotation_generator(), true),
        CatalogEntry::generator(time_translation_generator(), true),
        CatalogEntry::generator(darboux_theta_generator(d, policy), true),
        CatalogEntry::generator(darboux_time_generator(d, policy), true),
        CatalogEntry::generator(point_rotation(), true),
        CatalogEntry::generator(point_time_translation(), true),
    ];
    for (c, name) in [([1.0, 0.0, 0.0, 0.0], "Yhat_Theta"), ([0.0, 1.0, 0.0, 0.0], "Yhat_T")] {
        let mut g = project_to_dynamical(&family_generator(c, d, policy, FamilyConvention::Consistent), d);
        g.name = name.into();
        out.push(CatalogEntry::generator(g, true));
    }
    // radial scaling survives only for the linear oscillator at λ = 0
    out.push(CatalogEntry::generator(radial_scaling(), d.lambda == 0.0));
    for m in darboux_multipliers(d, policy) {
        out.push(CatalogEntry::multiplier(m));
    }
    out
}

/// `r∂r`.
pub fn radial_scaling() -> Generator {
    Generator::evolutionary("X_scal_r", |s| Ok(s.q[0]), |_| Ok(0.0))
}

/// `−∂θ` in point form.
pub fn point_rotation() -> Generator {
    Generator::point("X_L", |_| Ok(0.0), |_| Ok(0.0), |_| Ok(-1.0))
}

/// `∂t` in point form.
pub fn point_time_translation() -> Generator {
    Generator::point("X_E", |_| Ok(1.0), |_| Ok(0.0), |_| Ok(0.0))
}

/// `((2 − p)/2) t∂t + r∂r`, a symmetry of `U = k rᵖ`.
pub fn scaling_symmetry(p: f64) -> Generator {
    let c = 0.5 * (2.0 - p);
    Generator::point("X1", move |s| Ok(c * s.t), |s| Ok(s.q[0]), |_| Ok(0.0))
}

/// `e^{2√k t}(∂t + √k r∂r)`, a symmetry when the radial force is `k r + K/r³`.
pub fn exponential_symmetry(k: f64) -> Generator {
    let rk = k.sqrt();
    Generator::point(
        "X2",
        move |s| Ok((2.0 * rk * s.t).exp()),
        move |s| Ok((2.0 * rk * s.t).exp() * rk * s.q[0]),
        |_| Ok(0.0),
    )
}

fn central_entries(c: &CentralForce) -> Vec<CatalogEntry> {
    let mut out = vec![
        CatalogEntry::generator(rotation_generator(), true),
        CatalogEntry::generator(time_translation_generator(), true),
        CatalogEntry::generator(point_rotation(), true),
        CatalogEntry::generator(point_time_translation(), true),
        CatalogEntry::multiplier(MultiplierPair::new("Q_L", |_| Ok(0.0), |s| Ok(s.q[0] * s.q[0]))),
        CatalogEntry::multiplier(MultiplierPair::new("Q_E", |s| Ok(s.v[0]), |s| Ok(s.q[0] * s.q[0] * s.v[1]))),
    ];
    match c.potential {
        Potential::PowerLaw { p, .. } => out.push(CatalogEntry::generator(scaling_symmetry(p), true)),
        Potential::Coulomb { .. } => out.push(CatalogEntry::generator(scaling_symmetry(-1.0), true)),
        Potential::SpecialKKr3 { k, .. } => out.push(CatalogEntry::generator(exponential_symmetry(k), true)),
        _ => {}
    }
    out
}

/// Real and imaginary parts of `e^{iφ}·m·(q₁∂₁ + q₂∂₂ − (i/ω)∂t)` with
/// `φ = harmonic·ωt` and `m = 1` or `m = qⱼ`.
fn complex_pair(name: &str, omega: f64, harmonic: f64, weight: Option<usize>) -> [Generator; 2] {
    let m = move |s: &PhaseState| weight.map_or(1.0, |j| s.q[j]);
    let phase = move |s: &PhaseState| harmonic * omega * s.t;
    // τ = Re/Im of −(i/ω)e^{iφ}·m and η = Re/Im of e^{iφ}·m·q
    let re = Generator::point(
        &format!("{name}_re"),
        move |s| Ok(m(s) * phase(s).sin() / omega),
        move |s| Ok(m(s) * phase(s).cos() * s.q[0]),
        move |s| Ok(m(s) * phase(s).cos() * s.q[1]),
    );
    let im = Generator::point(
        &format!("{name}_im"),
        move |s| Ok(-m(s) * phase(s).cos() / omega),
        move |s| Ok(m(s) * phase(s).sin() * s.q[0]),
        move |s| Ok(m(s) * phase(s).sin() * s.q[1]),
    );
    [re, im]
}

/// The extra point symmetries of two oscillators with equal frequency `ω`.
/// `harmonic` is the multiple of `ωt` in the dilation pair's phase.
pub fn equal_frequency_generators(omega: f64, harmonic: f64) -> Vec<Generator> {
    let mut out = vec![Generator::point("X_rot", |_| Ok(0.0), |s| Ok(s.q[1]), |s| Ok(-s.q[0]))];
    out.extend(complex_pair("X1", omega, harmonic, None));
    out.extend(complex_pair("X2", omega, 1.0, Some(0)));
    out.extend(complex_pair("X3", omega, 1.0, Some(1)));
    out
}

pub fn uncoupled_multipliers(u: Uncoupled) -> [MultiplierPair; 4] {
    let (w1, w2) = (u.omega1, u.omega2);
    let sum = w1 + w2;
    [
        MultiplierPair::new("Q_E1", |s| Ok(s.v[0]), |_| Ok(0.0)),
        MultiplierPair::new("Q_E2", |_| Ok(0.0), |s| Ok(s.v[1])),
        MultiplierPair::new(
            "Q_Phi",
            move |s| Ok(-sum * s.q[0] / (2.0 * u.energies(s)[0])),
            move |s| Ok(sum * s.q[1] / (2.0 * u.energies(s)[1])),
        ),
        MultiplierPair::new(
            "Q_T",
            move |s| Ok(s.q[0] / (4.0 * u.energies(s)[0])),
            move |s| Ok(s.q[1] / (4.0 * u.energies(s)[1])),
        ),
    ]
}

fn uncoupled_entries(u: &Uncoupled) -> Vec<CatalogEntry> {
    let u = *u;
    let [w1, w2] = u.omegas();
    let elementary = |name: &str, i: usize, w: f64, sine: bool| {
        let f = move |s: &PhaseState| if sine { (w * s.t).sin() } else { (w * s.t).cos() };
        if i == 0 {
            Generator::point(name, |_| Ok(0.0), move |s| Ok(f(s)), |_| Ok(0.0))
        } else {
            Generator::point(name, |_| Ok(0.0), |_| Ok(0.0), move |s| Ok(f(s)))
        }
    };
    let mut out = vec![
        CatalogEntry::generator(Generator::point("X_trans", |_| Ok(1.0), |_| Ok(0.0), |_| Ok(0.0)), true),
        CatalogEntry::generator(Generator::point("X_scal1", |_| Ok(0.0), |s| Ok(s.q[0]), |_| Ok(0.0)), true),
        CatalogEntry::generator(Generator::point("X_scal2", |_| Ok(0.0), |_| Ok(0.0), |s| Ok(s.q[1])), true),
        CatalogEntry::generator(elementary("X_cos1", 0, w1, false), true),
        CatalogEntry::generator(elementary("X_sin1", 0, w1, true), true),
        CatalogEntry::generator(elementary("X_cos2", 1, w2, false), true),
        CatalogEntry::generator(elementary("X_sin2", 1, w2, true), true),
    ];
    let sys = SystemDef::Uncoupled(u);
    for (m, name) in uncoupled_multipliers(u).into_iter().zip(["Xhat_E1", "Xhat_E2", "Xhat_Phi", "Xhat_T"]) {
        let mut g = generator_from_multiplier(&m, &sys);
        g.name = name.into();
        out.push(CatalogEntry::generator(g, true));
    }
    let equal = w1 == w2;
    for g in equal_frequency_generators(w1, 2.0) {
        out.push(CatalogEntry::generator(g, equal));
    }
    for m in uncoupled_multipliers(u) {
        out.push(CatalogEntry::multiplier(m));
    }
    out
}
