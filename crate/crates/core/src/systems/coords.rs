use crate::dynamics::{Chart, PhaseState};
use crate::error::{Error, Result};
#[allow(unused_imports)] // redundant once std is linked in
use num_traits::Float;

/// `(q₁, q₂, q̇₁, q̇₂) ↦ (r, θ, ṙ, θ̇)` with `θ ∈ (−π, π]`.
pub fn to_polar(s: &PhaseState) -> Result<PhaseState> {
    if s.chart == Chart::Polar {
        return Ok(*s);
    }
    let [x, y] = s.q;
    let [vx, vy] = s.v;
    let r = x.hypot(y);
    if r == 0.0 {
        return Err(Error::OriginSingularity);
    }
    let theta = y.atan2(x);
    let rdot = (x * vx + y * vy) / r;
    let thetadot = (x * vy - y * vx) / (r * r);
    Ok(PhaseState::polar(s.t, r, theta, rdot, thetadot))
}

pub fn to_cartesian(s: &PhaseState) -> PhaseState {
    if s.chart == Chart::Cartesian {
        return *s;
    }
    let [r, theta] = s.q;
    let [rdot, thetadot] = s.v;
    let (sin, cos) = theta.sin_cos();
    PhaseState::cartesian(
        s.t,
        [r * cos, r * sin],
        [rdot * cos - r * thetadot * sin, rdot * sin + r * thetadot * cos],
    )
}
