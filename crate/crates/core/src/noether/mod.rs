//! Generators, multipliers and the Noether correspondence between them.
//!
//! Everything is evaluated numerically: generator components are black-box
//! functions of the jet and all derivatives are finite differences.

mod curves;

pub use curves::{sample_curve_points, CurvePoint, TestCurve, SAMPLE_TIMES};

use crate::dynamics::{Chart, Dynamics, PhaseState};
use crate::error::{Error, Result};
use crate::numdiff::{derivative, derivative6, second_derivative6, Trap};
use crate::quadrature::tanh_sinh;
use crate::systems::{FirstIntegral, StateFn, SystemDef};
use alloc::string::String;
use alloc::sync::Arc;

/// Residual below which a multiplier or generator counts as variational.
pub const VARIATIONAL_TOL: f64 = 1e-5;

/// Step for derivatives in jet variables.
const H_JET: f64 = 1e-3;
/// Step for derivatives along a test curve.
const H_TIME: f64 = 1e-3;
const LINE_TOL: f64 = 1e-11;

/// A state together with second derivatives, not necessarily on-shell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet2 {
    pub state: PhaseState,
    pub accel: [f64; 2],
}

impl Jet2 {
    pub fn on_shell<S: Dynamics + ?Sized>(sys: &S, s: &PhaseState) -> Self {
        Self { state: *s, accel: sys.accel(s) }
    }

    /// First-order motion along the jet: `(t + ε, q + εq̇, q̇ + εq̈)`.
    pub fn advance(&self, eps: f64) -> PhaseState {
        let s = &self.state;
        PhaseState {
            t: s.t + eps,
            q: [s.q[0] + eps * s.v[0], s.q[1] + eps * s.v[1]],
            v: [s.v[0] + eps * self.accel[0], s.v[1] + eps * self.accel[1]],
            chart: s.chart,
        }
    }

    fn nudge_q(mut self, i: usize, d: f64) -> Self {
        self.state.q[i] += d;
        self
    }

    fn nudge_v(mut self, i: usize, d: f64) -> Self {
        self.state.v[i] += d;
        self
    }

    fn nudge_a(mut self, i: usize, d: f64) -> Self {
        self.accel[i] += d;
        self
    }
}

/// Evolutionary generator `P¹∂₁ + P²∂₂`, optionally remembering the time
/// component of a point form (`ηⁱ = Pⁱ + τ q̇ⁱ`).
#[derive(Clone)]
pub struct Generator {
    pub name: String,
    pub p: [StateFn; 2],
    pub tau: Option<StateFn>,
    origin: Option<Arc<MultiplierPair>>,
}

impl Generator {
    pub fn evolutionary(
        name: &str,
        p1: impl Fn(&PhaseState) -> Result<f64> + Send + Sync + 'static,
        p2: impl Fn(&PhaseState) -> Result<f64> + Send + Sync + 'static,
    ) -> Self {
        Self { name: name.into(), p: [Arc::new(p1), Arc::new(p2)], tau: None, origin: None }
    }

    /// From a point form `τ∂t + η¹∂₁ + η²∂₂`.
    pub fn point(
        name: &str,
        tau: impl Fn(&PhaseState) -> Result<f64> + Send + Sync + 'static,
        eta1: impl Fn(&PhaseState) -> Result<f64> + Send + Sync + 'static,
        eta2: impl Fn(&PhaseState) -> Result<f64> + Send + Sync + 'static,
    ) -> Self {
        let tau: StateFn = Arc::new(tau);
        let (t1, t2) = (tau.clone(), tau.clone());
        let mut g = Self::evolutionary(name, move |s| Ok(eta1(s)? - t1(s)? * s.v[0]), move |s| Ok(eta2(s)? - t2(s)? * s.v[1]));
        g.tau = Some(tau);
        g
    }

    pub fn zero() -> Self {
        Self::evolutionary("zero", |_| Ok(0.0), |_| Ok(0.0))
    }

    pub fn value(&self, s: &PhaseState) -> Result<[f64; 2]> {
        Ok([(self.p[0])(s)?, (self.p[1])(s)?])
    }

    /// Point-form components `η = P + τ q̇` (τ = 0 when absent).
    pub fn eta(&self, s: &PhaseState) -> Result<[f64; 2]> {
        let p = self.value(s)?;
        let tau = match &self.tau {
            Some(f) => f(s)?,
            None => 0.0,
        };
        Ok([p[0] + tau * s.v[0], p[1] + tau * s.v[1]])
    }

    /// `c·X`, named `name`.
    pub fn scaled(&self, name: &str, c: f64) -> Self {
        let [p1, p2] = self.p.clone();
        let mut g = Self::evolutionary(name, move |s| Ok(c * p1(s)?), move |s| Ok(c * p2(s)?));
        g.tau = self.tau.clone().map(|t| -> StateFn { Arc::new(move |s: &PhaseState| Ok(c * t(s)?)) });
        g
    }
}

impl core::fmt::Debug for Generator {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("Generator").field("name", &self.name).field("point", &self.tau.is_some()).finish()
    }
}

/// `(Q¹, Q²)` with `Σ(q̈ⁱ − fⁱ)Qⁱ` a total derivative when genuine.
#[derive(Clone)]
pub struct MultiplierPair {
    pub source: String,
    pub q: [StateFn; 2],
    origin: Option<Arc<Generator>>,
}

impl MultiplierPair {
    pub fn new(
        source: &str,
        q1: impl Fn(&PhaseState) -> Result<f64> + Send + Sync + 'static,
        q2: impl Fn(&PhaseState) -> Result<f64> + Send + Sync + 'static,
    ) -> Self {
        Self { source: source.into(), q: [Arc::new(q1), Arc::new(q2)], origin: None }
    }

    pub fn value(&self, s: &PhaseState) -> Result<[f64; 2]> {
        Ok([(self.q[0])(s)?, (self.q[1])(s)?])
    }
}

impl core::fmt::Debug for MultiplierPair {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("MultiplierPair").field("source", &self.source).finish()
    }
}

/// `Qᵢ = −wᵢ Pᵢ`. Mapping the result back returns `g` itself.
pub fn multiplier_from_generator(g: &Generator, sys: &SystemDef) -> MultiplierPair {
    if let Some(m) = &g.origin {
        return (**m).clone();
    }
    let sys = *sys;
    let [p1, p2] = g.p.clone();
    MultiplierPair {
        source: g.name.clone(),
        q: [
            Arc::new(move |s: &PhaseState| Ok(-sys.noether_weights(s.q)[0] * p1(s)?)),
            Arc::new(move |s: &PhaseState| Ok(-sys.noether_weights(s.q)[1] * p2(s)?)),
        ],
        origin: Some(Arc::new(g.clone())),
    }
}

/// `Pᵢ = −Qᵢ / wᵢ`, the inverse of [`multiplier_from_generator`].
pub fn generator_from_multiplier(m: &MultiplierPair, sys: &SystemDef) -> Generator {
    if let Some(g) = &m.origin {
        return (**g).clone();
    }
    let sys = *sys;
    let [q1, q2] = m.q.clone();
    Generator {
        name: m.source.clone(),
        p: [
            Arc::new(move |s: &PhaseState| Ok(-q1(s)? / sys.noether_weights(s.q)[0])),
            Arc::new(move |s: &PhaseState| Ok(-q2(s)? / sys.noether_weights(s.q)[1])),
        ],
        tau: None,
        origin: Some(Arc::new(m.clone())),
    }
}

/// `(∂I/∂q̇¹, ∂I/∂q̇²)` by central differences, respecting the integral's period.
pub fn multiplier_from_integral(i: &FirstIntegral) -> MultiplierPair {
    let comp = |k: usize| {
        let i = i.clone();
        move |s: &PhaseState| {
            let h = 1e-5;
            let at = |d: f64| {
                let mut x = *s;
                x.v[k] += d;
                i.value(&x)
            };
            let base = i.value(s)?;
            let trap = Trap::default();
            // differences taken to the nearest representative so a wrap does not leak in
            let d = derivative(|d| trap.eval(at(d).map(|v| i.valuedness.difference(v, base))), 0.0, h);
            trap.finish(d)
        }
    };
    MultiplierPair::new(&i.name, comp(0), comp(1))
}

/// `D_t F` along the jet (off-shell: uses the jet's own second derivatives).
pub fn total_derivative(f: &StateFn, j: &Jet2) -> Result<f64> {
    let trap = Trap::default();
    let d = derivative(|e| trap.eval(f(&j.advance(e))), 0.0, H_JET);
    trap.finish(d)
}

/// A scalar function of second-order jets.
pub type JetFn<'a> = &'a dyn Fn(&Jet2) -> Result<f64>;

/// Euler operator `∂K/∂qⁱ − D_t ∂K/∂q̇ⁱ + D_t² ∂K/∂q̈ⁱ` along a test curve.
///
/// `K` must be affine in the second derivatives, which holds for every
/// expression built here; the `q̈` derivative is then an exact unit difference.
pub fn euler_operator(k: JetFn<'_>, p: &CurvePoint) -> Result<[f64; 2]> {
    let trap = Trap::default();
    let mut out = [0.0; 2];
    for (i, e) in out.iter_mut().enumerate() {
        let jet = p.curve.jet(p.t);
        let dq = derivative6(|x| trap.eval(k(&jet.nudge_q(i, x))), 0.0, H_JET);
        let dv = |s: f64| {
            let j = p.curve.jet(s);
            derivative6(|x| trap.eval(k(&j.nudge_v(i, x))), 0.0, H_JET)
        };
        let da = |s: f64| {
            let j = p.curve.jet(s);
            0.5 * (trap.eval(k(&j.nudge_a(i, 1.0))) - trap.eval(k(&j.nudge_a(i, -1.0))))
        };
        *e = dq - derivative6(dv, p.t, H_TIME) + second_derivative6(da, p.t, H_TIME);
        trap.finish(*e)?;
    }
    Ok(out)
}

fn max_euler(k: JetFn<'_>, points: &[CurvePoint]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for p in points {
        let [a, b] = euler_operator(k, p)?;
        worst = worst.max(a.abs()).max(b.abs());
    }
    Ok(worst)
}

/// Largest Euler-operator residual of `Σ(q̈ⁱ − fⁱ)Qⁱ` over the test points;
/// below [`VARIATIONAL_TOL`] for genuine multipliers.
pub fn euler_residual(m: &MultiplierPair, sys: &SystemDef, points: &[CurvePoint]) -> Result<f64> {
    let k = |j: &Jet2| {
        let f = sys.accel(&j.state);
        let q = m.value(&j.state)?;
        Ok((j.accel[0] - f[0]) * q[0] + (j.accel[1] - f[1]) * q[1])
    };
    max_euler(&k, points)
}

/// `(∂ℒ/∂q, ∂ℒ/∂q̇)`.
fn lagrangian_gradient(sys: &SystemDef, s: &PhaseState) -> ([f64; 2], [f64; 2]) {
    let mut lq = [0.0; 2];
    let mut lv = [0.0; 2];
    for i in 0..2 {
        lq[i] = derivative(
            |x| {
                let mut y = *s;
                y.q[i] += x;
                sys.lagrangian(&y)
            },
            0.0,
            H_JET,
        );
        lv[i] = derivative(
            |x| {
                let mut y = *s;
                y.v[i] += x;
                sys.lagrangian(&y)
            },
            0.0,
            H_JET,
        );
    }
    (lq, lv)
}

/// `pr⁽¹⁾X̂(ℒ) = Σ Pⁱ ∂ℒ/∂qⁱ + (D_t Pⁱ) ∂ℒ/∂q̇ⁱ`, off-shell.
pub fn prolonged_action(g: &Generator, sys: &SystemDef, j: &Jet2) -> Result<f64> {
    let (lq, lv) = lagrangian_gradient(sys, &j.state);
    let p = g.value(&j.state)?;
    let dp = [total_derivative(&g.p[0], j)?, total_derivative(&g.p[1], j)?];
    Ok(p[0] * lq[0] + p[1] * lq[1] + dp[0] * lv[0] + dp[1] * lv[1])
}

/// Whether `pr⁽¹⁾X̂(ℒ)` is a total time derivative, by its Euler-operator residual.
///
/// `pr⁽¹⁾X̂(ℒ) = Σ Pⁱ Eᵢ(ℒ) + D_t(Σ Pⁱ ∂ℒ/∂q̇ⁱ)` and the Euler operator kills
/// the second term exactly, so it is applied to `Σ Pⁱ Eᵢ(ℒ)` with
/// `Eᵢ(ℒ) = −wᵢ(q̈ⁱ − fⁱ)`. Differencing the full expression instead would
/// nest three levels of differences and drown the answer in round-off.
pub fn is_variational(g: &Generator, sys: &SystemDef, points: &[CurvePoint]) -> Result<(bool, f64)> {
    let r = euler_residual(&multiplier_from_generator(g, sys), sys, points)?;
    Ok((r < VARIATIONAL_TOL, r))
}

/// `I = R − Σ Pⁱ ∂ℒ/∂q̇ⁱ` for a caller-supplied `R` with `pr⁽¹⁾X̂(ℒ) = Ṙ`.
pub fn noether_integral_from_r(g: &Generator, r: &StateFn, sys: &SystemDef, s: &PhaseState) -> Result<f64> {
    let (_, lv) = lagrangian_gradient(sys, s);
    let p = g.value(s)?;
    Ok(r(s)? - p[0] * lv[0] - p[1] * lv[1])
}

/// The closed one-form `dI` on the solution space, `I` being the Noether
/// integral of the multiplier `Q`: returns `(∂_t I, ∂_q I, ∂_q̇ I)`.
///
/// From `Ḋ I = Σ(q̈ⁱ − fⁱ)Qⁱ`: `∂_q̇ⁱ I = Qⁱ`,
/// `∂_qⁱ I = −D_t Qⁱ − Σⱼ Qʲ ∂fʲ/∂q̇ⁱ` and `∂_t I = −Q·f − q̇·∂_q I`.
fn integral_gradient(m: &MultiplierPair, sys: &SystemDef, s: &PhaseState) -> Result<(f64, [f64; 2], [f64; 2])> {
    let q = m.value(s)?;
    let f = sys.accel(s);
    let jet = Jet2::on_shell(sys, s);
    let mut dq = [0.0; 2];
    for i in 0..2 {
        let dtq = total_derivative(&m.q[i], &jet)?;
        let mut coupling = 0.0;
        for (jx, qj) in q.iter().enumerate() {
            let dfdv = derivative(
                |x| {
                    let mut y = *s;
                    y.v[i] += x;
                    sys.accel(&y)[jx]
                },
                0.0,
                H_JET,
            );
            coupling += qj * dfdv;
        }
        dq[i] = -dtq - coupling;
    }
    let dt = -(q[0] * f[0] + q[1] * f[1]) - (s.v[0] * dq[0] + s.v[1] * dq[1]);
    Ok((dt, dq, q))
}

/// Default start of the reconstruction path: `r = 1`, `θ = 0`, `ṙ = 0` and
/// `θ̇` chosen so the angular momentum is `l`. In the Cartesian chart,
/// `q = (1, 0)`, `q̇ = (0, l)`.
///
/// `ṙ = 0` is a turning point, where integrals that change sheet with
/// `sgn ṙ` (Θ, T) are not differentiable; start those on the endpoint's sheet.
pub fn default_basepoint(sys: &SystemDef, l: f64) -> PhaseState {
    match sys.chart() {
        Chart::Polar => PhaseState::polar(0.0, 1.0, 0.0, 0.0, l / sys.noether_weights([1.0, 0.0])[1]),
        Chart::Cartesian => PhaseState::cartesian(0.0, [1.0, 0.0], [0.0, l]),
    }
}

/// `I(endpoint) − I(basepoint)` for the Noether integral of `g`, by the line
/// integral of its one-form along the straight segment.
pub fn reconstruct_integral(g: &Generator, sys: &SystemDef, endpoint: &PhaseState, basepoint: &PhaseState) -> Result<f64> {
    reconstruct_along(g, sys, &[*basepoint, *endpoint])
}

/// Same as [`reconstruct_integral`] along a piecewise-linear path.
pub fn reconstruct_along(g: &Generator, sys: &SystemDef, path: &[PhaseState]) -> Result<f64> {
    let m = multiplier_from_generator(g, sys);
    let chart = sys.chart();
    let mut total = 0.0;
    for w in path.windows(2) {
        let (a, b) = (w[0], w[1]);
        for s in [a, b] {
            if s.chart != chart {
                return Err(Error::InvalidState("path state in the wrong chart"));
            }
            if s.validate().is_err() {
                return Err(Error::PathLeavesDomain);
            }
        }
        let dt = b.t - a.t;
        let dq = [b.q[0] - a.q[0], b.q[1] - a.q[1]];
        let dv = [b.v[0] - a.v[0], b.v[1] - a.v[1]];
        let trap = Trap::default();
        let integrand = |node: crate::quadrature::Node| {
            let u = node.x;
            let s = PhaseState {
                t: a.t + u * dt,
                q: [a.q[0] + u * dq[0], a.q[1] + u * dq[1]],
                v: [a.v[0] + u * dv[0], a.v[1] + u * dv[1]],
                chart,
            };
            trap.eval(integral_gradient(&m, sys, &s).map(|(it, iq, iv)| {
                it * dt + iq[0] * dq[0] + iq[1] * dq[1] + iv[0] * dv[0] + iv[1] * dv[1]
            }))
        };
        let v = tanh_sinh(integrand, 0.0, 1.0, LINE_TOL);
        // a failed evaluation explains a failed quadrature better than the quadrature does
        trap.finish(0.0)?;
        total += v?;
    }
    Ok(total)
}
