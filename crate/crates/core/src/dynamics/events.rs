use super::integrator::{propagate, restep, IntegratorOptions, Trajectory};
use super::{Chart, Dynamics, PhaseState};
use crate::error::{Error, Result};
use alloc::vec::Vec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EventKind {
    /// `ṙ = 0`.
    TurningPoint,
    /// `r̈ = 0`.
    InertialPoint,
    /// `qᵢ = 0`, index 1 or 2.
    ZeroCrossing(usize),
    /// `q̇ᵢ = 0`, index 1 or 2. An oscillator reverses direction here.
    VelocityZero(usize),
}

impl EventKind {
    pub fn label(&self) -> &'static str {
        match self {
            EventKind::TurningPoint => "turning_point",
            EventKind::InertialPoint => "inertial_point",
            EventKind::ZeroCrossing(1) => "zero_crossing_1",
            EventKind::ZeroCrossing(_) => "zero_crossing_2",
            EventKind::VelocityZero(1) => "velocity_zero_1",
            EventKind::VelocityZero(_) => "velocity_zero_2",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    pub kind: EventKind,
    pub t: f64,
    pub state: PhaseState,
    /// Sign of the event function's derivative at the crossing.
    pub direction: i8,
}

/// The quantity whose zeros define `kind`.
pub fn event_value<S: Dynamics + ?Sized>(sys: &S, kind: EventKind, s: &PhaseState) -> f64 {
    match kind {
        EventKind::TurningPoint => s.radial().1,
        EventKind::InertialPoint => match s.chart {
            Chart::Polar => sys.accel(s)[0],
            Chart::Cartesian => {
                let a = sys.accel(s);
                let (r, rdot) = s.radial();
                let v2 = s.v[0] * s.v[0] + s.v[1] * s.v[1];
                (s.q[0] * a[0] + s.q[1] * a[1] + v2 - rdot * rdot) / r
            }
        },
        EventKind::ZeroCrossing(i) => s.q[i.clamp(1, 2) - 1],
        EventKind::VelocityZero(i) => s.v[i.clamp(1, 2) - 1],
    }
}

fn sign(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

/// Bisection down to the resolution of `t`, then one secant polish from the
/// final bracket; returns the best of the candidates.
fn locate(
    eval: &dyn Fn(f64) -> Option<(f64, PhaseState)>,
    (mut lo, mut glo): (f64, f64),
    (mut hi, mut ghi): (f64, f64),
    tol: f64,
) -> Option<(f64, PhaseState, f64)> {
    let rising = ghi > glo;
    let mut best: Option<(f64, PhaseState, f64)> = None;
    let keep = |t: f64, s: PhaseState, g: f64, best: &mut Option<(f64, PhaseState, f64)>| {
        if best.map_or(true, |b| g.abs() < b.2.abs()) {
            *best = Some((t, s, g));
        }
    };
    for _ in 0..200 {
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        let (gm, sm) = eval(mid)?;
        keep(mid, sm, gm, &mut best);
        if gm == 0.0 {
            return best;
        }
        if (gm > 0.0) == rising {
            hi = mid;
            ghi = gm;
        } else {
            lo = mid;
            glo = gm;
        }
        if gm.abs() < 1e-3 * tol && hi - lo <= 64.0 * f64::EPSILON * hi.abs().max(1.0) {
            break;
        }
    }
    if ghi != glo {
        let ts = lo - glo * (hi - lo) / (ghi - glo);
        if ts > lo && ts < hi {
            let (gs, ss) = eval(ts)?;
            keep(ts, ss, gs, &mut best);
        }
    }
    best
}

/// All crossings of the requested event functions on `traj`, in time order.
pub fn detect_events<S: Dynamics + ?Sized>(sys: &S, traj: &Trajectory, kinds: &[EventKind]) -> Vec<Event> {
    let mut out = Vec::new();
    let chart = traj.chart;
    let tol = traj.event_tol;
    for &kind in kinds {
        let g = |y: &[f64; 4], t: f64| {
            let s = PhaseState::from_vec(t, y, chart);
            (event_value(sys, kind, &s), s)
        };
        let mut prev = traj.steps.first().map_or(0, |st| sign(g(&st.y0, st.t).0));
        for (idx, st) in traj.steps.iter().enumerate() {
            let exact = |t: f64| {
                let y = if t == st.t + st.h { st.y1 } else { restep(sys, chart, st.t, &st.y0, &st.f0, t - st.t) };
                g(&y, t)
            };
            // The Hermite midpoint catches a pair of crossings inside one step.
            let tm = st.t + 0.5 * st.h;
            let gm = g(&traj.hermite(idx, tm), tm).0;
            let mut left = st.t;
            for (tp, gp) in [(tm, gm), (st.t + st.h, g(&st.y1, st.t + st.h).0)] {
                let sp = sign(gp);
                if sp == 0 {
                    continue;
                }
                if prev != 0 && prev != sp {
                    let (glo, slo) = exact(left);
                    let (ghi, _) = exact(tp);
                    if glo == 0.0 {
                        out.push(Event { kind, t: left, state: slo, direction: sp });
                    } else if sign(glo) != sign(ghi) && ghi != 0.0 {
                        let eval = |t: f64| Some(exact(t));
                        if let Some((t, state, _)) = locate(&eval, (left, glo), (tp, ghi), tol) {
                            out.push(Event { kind, t, state, direction: sp });
                        }
                    }
                }
                prev = sp;
                left = tp;
            }
        }
    }
    out.sort_by(|a, b| a.t.total_cmp(&b.t).then(a.kind.cmp(&b.kind)));
    out
}

/// Refines an event inside `bracket` by integrating from its left end.
pub fn refine_event<S: Dynamics + ?Sized>(sys: &S, bracket: (PhaseState, PhaseState), kind: EventKind) -> Result<Event> {
    let (a, b) = if bracket.0.t <= bracket.1.t { bracket } else { (bracket.1, bracket.0) };
    let (ga, gb) = (event_value(sys, kind, &a), event_value(sys, kind, &b));
    if ga == 0.0 {
        return Ok(Event { kind, t: a.t, state: a, direction: sign(gb) });
    }
    if gb == 0.0 {
        return Ok(Event { kind, t: b.t, state: b, direction: -sign(ga) });
    }
    if sign(ga) == sign(gb) || !ga.is_finite() || !gb.is_finite() {
        return Err(Error::NoSignChange);
    }
    let opts = IntegratorOptions::default().with_tol(1e-14);
    let tol = opts.event_tol;
    let eval = |t: f64| {
        let s = propagate(sys, &a, t, &opts).ok()?;
        Some((event_value(sys, kind, &s), s))
    };
    let (t, state, _) = locate(&eval, (a.t, ga), (b.t, gb), tol).ok_or(Error::EvaluationFailed)?;
    Ok(Event { kind, t, state, direction: sign(gb) })
}
