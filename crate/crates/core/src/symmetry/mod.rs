//! Determining equations for candidate symmetries, the extended point
//! symmetries on `(t, r, θ, L, E)` and their algebra.

mod extended;

pub use extended::{
    canonical_coordinate_residual, commutator, determining_residual_1st, displayed_y_t, family_generator,
    project_to_dynamical, ExtFn, ExtPoint, ExtendedGenerator, FamilyConvention,
};

use crate::dynamics::{Dynamics, PhaseState};
use crate::error::Result;
use crate::noether::{Generator, Jet2};
use crate::numdiff::{derivative, second_derivative, Trap};

pub const PASS_TOL: f64 = 1e-5;
pub const FAIL_TOL: f64 = 1e-3;

const H_FLOW: f64 = 1e-3;
const H_JET: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Verdict {
    Pass,
    Indeterminate,
    Fail,
}

impl Verdict {
    pub fn of(residual: f64) -> Self {
        if residual < PASS_TOL {
            Verdict::Pass
        } else if residual > FAIL_TOL || !residual.is_finite() {
            Verdict::Fail
        } else {
            Verdict::Indeterminate
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Indeterminate => "indeterminate",
            Verdict::Fail => "fail",
        }
    }
}

fn accel_partials<S: Dynamics + ?Sized>(sys: &S, s: &PhaseState) -> ([[f64; 2]; 2], [[f64; 2]; 2]) {
    let mut fq = [[0.0; 2]; 2];
    let mut fv = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            fq[i][j] = derivative(
                |x| {
                    let mut y = *s;
                    y.q[j] += x;
                    sys.accel(&y)[i]
                },
                0.0,
                H_JET,
            );
            fv[i][j] = derivative(
                |x| {
                    let mut y = *s;
                    y.v[j] += x;
                    sys.accel(&y)[i]
                },
                0.0,
                H_JET,
            );
        }
    }
    (fq, fv)
}

/// Linearised equations of motion applied to the evolutionary generator:
/// `P̈ⁱ − Σⱼ (Pʲ ∂fⁱ/∂qʲ + Ṗʲ ∂fⁱ/∂q̇ʲ)` on-shell at `s`.
///
/// Total derivatives follow the second-order Taylor curve of the flow, which
/// is all the second derivative at the base point can see.
pub fn determining_residual_2nd<S: Dynamics + ?Sized>(g: &Generator, sys: &S, s: &PhaseState) -> Result<[f64; 2]> {
    let jet = Jet2::on_shell(sys, s);
    let f = jet.accel;
    let fdot = [0, 1].map(|i| derivative(|e| sys.accel(&jet.advance(e))[i], 0.0, H_FLOW));
    let flow = |e: f64| PhaseState {
        t: s.t + e,
        q: [0, 1].map(|i| s.q[i] + e * s.v[i] + 0.5 * e * e * f[i]),
        v: [0, 1].map(|i| s.v[i] + e * f[i] + 0.5 * e * e * fdot[i]),
        chart: s.chart,
    };
    let trap = Trap::default();
    let p = g.value(s)?;
    let mut pd = [0.0; 2];
    let mut pdd = [0.0; 2];
    for i in 0..2 {
        let comp = |e: f64| trap.eval((g.p[i])(&flow(e)));
        pd[i] = trap.finish(derivative(comp, 0.0, H_FLOW))?;
        pdd[i] = trap.finish(second_derivative(comp, 0.0, H_FLOW))?;
    }
    let (fq, fv) = accel_partials(sys, s);
    Ok([0, 1].map(|i| pdd[i] - (0..2).map(|j| p[j] * fq[i][j] + pd[j] * fv[i][j]).sum::<f64>()))
}

/// Largest `|residual|` of [`determining_residual_2nd`] over `states`.
pub fn max_residual_2nd<S: Dynamics + ?Sized>(g: &Generator, sys: &S, states: &[PhaseState]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for s in states {
        let [a, b] = determining_residual_2nd(g, sys, s)?;
        worst = worst.max(a.abs()).max(b.abs());
    }
    Ok(worst)
}
