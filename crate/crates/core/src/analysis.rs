//! Global-regularity diagnostics for first integrals along trajectories.

use crate::dynamics::{detect_events, Chart, Dynamics, Event, EventKind, PhaseState, Trajectory};
use crate::error::{Error, Result};
use crate::systems::{to_polar, FirstIntegral, SystemDef, Valuedness};
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
#[allow(unused_imports)] // redundant once std is linked in
use num_traits::Float;

/// Jumps below this are numerical noise.
pub const JUMP_TOL: f64 = 1e-5;
/// Cluster radius of [`value_census`].
pub const CENSUS_RADIUS: f64 = 1e-6;
/// Samples closer than this (in time) to an event are skipped.
pub const EVENT_GUARD: f64 = 1e-3;
/// Samples per side used for one-sided limits at an event.
pub const FIT_POINTS: usize = 5;
/// Offsets from an event at which unbounded growth is probed.
const PROBE_OFFSETS: [f64; 3] = [1e-2, 1e-3, 1e-4];
/// `1/√δ` growth gives √10 per decade of offset; smooth values give ≈ 1.
const PROBE_GROWTH: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    SingleValued,
    MultiValued,
    SingularAtEvents,
}

impl Classification {
    pub fn label(self) -> &'static str {
        match self {
            Classification::SingleValued => "SingleValued",
            Classification::MultiValued => "MultiValued",
            Classification::SingularAtEvents => "SingularAtEvents",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jump {
    pub event: Event,
    pub magnitude: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Drift {
    /// Max of `|I(s) − I(s₀)| / max(1, |I(s₀)|)` with `s₀` the first sample of each arc.
    pub max: f64,
    /// Sample times at which the integral could not be evaluated.
    pub failed_at: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsReport {
    pub integral: String,
    pub drift: f64,
    pub jumps: Vec<Jump>,
    pub apsidal_angle: Option<f64>,
    pub classification: Classification,
    pub commensurate: Option<(u64, u64)>,
    /// Sample evaluations that failed, across all trajectories.
    pub evaluation_failures: usize,
    /// Events at which the value grows without bound or cannot be evaluated.
    pub singular_events: usize,
}

fn near_any(t: f64, cuts: &[f64]) -> bool {
    cuts.iter().any(|&c| (c - t).abs() < EVENT_GUARD)
}

fn drift_with_cuts(traj: &Trajectory, i: &FirstIntegral, cuts: &[f64]) -> Drift {
    let mut out = Drift::default();
    let mut reference: Option<(usize, f64)> = None;
    for s in &traj.samples {
        if near_any(s.t, cuts) {
            continue;
        }
        let arc = cuts.partition_point(|&c| c < s.t);
        let v = match i.value(s) {
            Ok(v) if v.is_finite() => v,
            _ => {
                out.failed_at.push(s.t);
                continue;
            }
        };
        match reference {
            Some((a, v0)) if a == arc => {
                let d = i.valuedness.difference(v, v0).abs() / v0.abs().max(1.0);
                out.max = out.max.max(d);
            }
            _ => reference = Some((arc, v)),
        }
    }
    out
}

fn jump_cuts(i: &FirstIntegral, events: &[Event]) -> Vec<f64> {
    events.iter().filter(|e| i.jump_events.contains(&e.kind)).map(|e| e.t).collect()
}

/// Conservation drift along `traj`, restarted on each arc between the
/// integral's jump events as recorded on the trajectory.
pub fn drift(traj: &Trajectory, i: &FirstIntegral) -> Drift {
    drift_with_cuts(traj, i, &jump_cuts(i, &traj.events))
}

/// Least-squares polynomial of degree `min(2, n−1)` through `pts`, evaluated at `t0`.
fn extrapolate(pts: &[(f64, f64)], t0: f64) -> f64 {
    let n = pts.len().min(3);
    let scale = pts.iter().map(|p| (p.0 - t0).abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let mut a = [[0.0; 4]; 3];
    for &(t, v) in pts {
        let x = (t - t0) / scale;
        let powers = [1.0, x, x * x];
        for r in 0..n {
            for c in 0..n {
                a[r][c] += powers[r] * powers[c];
            }
            a[r][3] += powers[r] * v;
        }
    }
    // Gaussian elimination with partial pivoting on the n×n normal equations.
    for col in 0..n {
        let piv = (col..n).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs())).unwrap_or(col);
        a.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            for c in col..4 {
                a[r][c] -= f * a[col][c];
            }
        }
    }
    let mut coef = [0.0; 3];
    for r in (0..n).rev() {
        let tail: f64 = (r + 1..n).map(|c| a[r][c] * coef[c]).sum();
        coef[r] = (a[r][3] - tail) / a[r][r];
    }
    coef[0]
}

/// One-sided limits of `i` at each event, by quadratic extrapolation from the
/// nearest [`FIT_POINTS`] samples on either side outside the guard window.
/// Neighbouring events in `events` bound the arcs; events without samples on
/// both sides are skipped.
pub fn jump_scan(traj: &Trajectory, i: &FirstIntegral, events: &[Event]) -> Vec<Jump> {
    let mut times: Vec<f64> = events.iter().map(|e| e.t).collect();
    times.sort_by(f64::total_cmp);
    let mut out = Vec::new();
    for ev in events {
        let k = times.partition_point(|&t| t < ev.t);
        let prev = if k > 0 { times[k - 1] } else { f64::NEG_INFINITY };
        let next = times.get(k + 1).copied().unwrap_or(f64::INFINITY);
        let value = |s: &PhaseState| i.value(s).ok().filter(|v| v.is_finite()).map(|v| (s.t, v));
        let before: Vec<(f64, f64)> = traj
            .samples
            .iter()
            .rev()
            .filter(|s| s.t < ev.t - EVENT_GUARD && s.t > prev + EVENT_GUARD)
            .filter_map(value)
            .take(FIT_POINTS)
            .collect();
        let after: Vec<(f64, f64)> = traj
            .samples
            .iter()
            .filter(|s| s.t > ev.t + EVENT_GUARD && s.t < next - EVENT_GUARD)
            .filter_map(value)
            .take(FIT_POINTS)
            .collect();
        let Some(&(_, anchor)) = before.first() else { continue };
        if after.is_empty() {
            continue;
        }
        let unwrap = |pts: Vec<(f64, f64)>| -> Vec<(f64, f64)> {
            pts.into_iter().map(|(t, v)| (t, anchor + i.valuedness.difference(v, anchor))).collect()
        };
        let left = extrapolate(&unwrap(before), ev.t);
        let right = extrapolate(&unwrap(after), ev.t);
        out.push(Jump { event: *ev, magnitude: i.valuedness.difference(right, left).abs() });
    }
    out
}

/// Whether `|i|` blows up (or stops evaluating) as the trajectory approaches
/// `ev` from either side. Periodic quantities are bounded and never flagged.
fn singular_at<S: Dynamics + ?Sized>(sys: &S, traj: &Trajectory, i: &FirstIntegral, ev: &Event) -> bool {
    if i.valuedness != Valuedness::SingleValued {
        return false;
    }
    [-1.0, 1.0].iter().any(|&side| {
        let mut mags = Vec::new();
        for d in PROBE_OFFSETS {
            let Some(s) = traj.state_at(sys, ev.t + side * d) else { return false };
            match i.value(&s) {
                Ok(v) if v.is_finite() => mags.push(v.abs()),
                _ => return true,
            }
        }
        mags.windows(2).all(|w| w[1] > PROBE_GROWTH * w[0])
    })
}

fn polar_angle(s: &PhaseState) -> Result<f64> {
    match s.chart {
        Chart::Polar => Ok(s.q[1]),
        Chart::Cartesian => to_polar(s).map(|p| p.q[1]),
    }
}

/// `|θ(b) − θ(a)|` for the first pair of consecutive turning points of
/// opposite direction. Cartesian trajectories are unwrapped sample by sample.
pub fn apsidal_angle(traj: &Trajectory) -> Result<f64> {
    let tps: Vec<&Event> = traj.events.iter().filter(|e| e.kind == EventKind::TurningPoint).collect();
    let (a, b) = tps
        .windows(2)
        .map(|w| (w[0], w[1]))
        .find(|(a, b)| a.direction != b.direction)
        .ok_or(Error::InsufficientEvents)?;
    if traj.chart == Chart::Polar {
        return Ok((b.state.q[1] - a.state.q[1]).abs());
    }
    let mut last = polar_angle(&a.state)?;
    let mut swept = 0.0;
    let inside = traj.samples.iter().filter(|s| s.t > a.t && s.t < b.t).map(|s| s as &PhaseState);
    for s in inside.chain([&b.state]) {
        let th = polar_angle(s)?;
        swept += Valuedness::Mod2Pi.difference(th, last);
        last = th;
    }
    Ok(swept.abs())
}

/// The same angle from the quadrature `L ∫ dr / (r² √(2(E − U_eff)))`
/// between the apsides of the orbit through `s`.
pub fn apsidal_angle_quadrature(sys: &SystemDef, s: &PhaseState) -> Result<f64> {
    match sys {
        SystemDef::Central(c) => c.apsidal_angle(c.angular_momentum(s), c.energy(s)),
        _ => Err(Error::NotApplicable("apsidal quadrature needs a central potential")),
    }
}

/// Convergent `p/q` of `ω₁/ω₂` with `q ≤ max_den` and error below `tol`.
pub fn commensurability(omega1: f64, omega2: f64, max_den: u64, tol: f64) -> Option<(u64, u64)> {
    if !(omega1 > 0.0 && omega2 > 0.0) || max_den == 0 {
        return None;
    }
    let ratio = omega1 / omega2;
    let (mut p0, mut q0, mut p1, mut q1) = (0u64, 1u64, 1u64, 0u64);
    let mut x = ratio;
    for _ in 0..64 {
        let a = x.floor();
        if a > u64::MAX as f64 / 4.0 {
            break;
        }
        let a = a as u64;
        let p = a.checked_mul(p1)?.checked_add(p0)?;
        let q = a.checked_mul(q1)?.checked_add(q0)?;
        if q > max_den {
            break;
        }
        if (ratio - p as f64 / q as f64).abs() < tol {
            return Some((p, q));
        }
        (p0, q0, p1, q1) = (p1, q1, p, q);
        let frac = x - a as f64;
        if frac <= 0.0 {
            break;
        }
        x = 1.0 / frac;
    }
    None
}

/// Number of single-linkage clusters of radius `tol`; periodic values are
/// clustered on the circle.
pub fn value_census(samples: &[f64], valuedness: Valuedness, tol: f64) -> usize {
    if samples.is_empty() {
        return 0;
    }
    let mut v: Vec<f64> = samples.iter().map(|&x| valuedness.reduce(x)).collect();
    v.sort_by(f64::total_cmp);
    let gaps = v.windows(2).filter(|w| w[1] - w[0] > tol).count();
    match valuedness.period() {
        None => gaps + 1,
        Some(p) => {
            let wrap = v[0] + p - v[v.len() - 1] > tol;
            // On the circle every gap separates two clusters except when only
            // the wrap-around gap is missing.
            match (gaps, wrap) {
                (0, _) => 1,
                (g, true) => g + 1,
                (g, false) => g,
            }
        }
    }
}

/// Values of `i` on `traj` away from its jump events, for [`value_census`].
pub fn census_samples(traj: &Trajectory, i: &FirstIntegral) -> Vec<f64> {
    let cuts = jump_cuts(i, &traj.events);
    traj.samples
        .iter()
        .filter(|s| !near_any(s.t, &cuts))
        .filter_map(|s| i.value(s).ok())
        .filter(|v| v.is_finite())
        .map(|v| i.valuedness.reduce(v))
        .collect()
}

fn state_key(a: &PhaseState, b: &PhaseState) -> Ordering {
    a.t.total_cmp(&b.t)
        .then(a.q[0].total_cmp(&b.q[0]))
        .then(a.q[1].total_cmp(&b.q[1]))
        .then(a.v[0].total_cmp(&b.v[0]))
        .then(a.v[1].total_cmp(&b.v[1]))
}

/// Aggregates drift, jumps and singularity probes over `trajectories`, which
/// should start from at least three distinct states. Events are detected
/// afresh: the integral's jump events, or the system's natural events when it
/// declares none. The report does not depend on the order of the list.
pub fn classify(sys: &SystemDef, i: &FirstIntegral, trajectories: &[Trajectory]) -> DiagnosticsReport {
    let kinds = if i.jump_events.is_empty() { sys.natural_events() } else { i.jump_events.clone() };
    let mut drift_max: f64 = 0.0;
    let mut failures = 0;
    let mut singular = 0;
    let mut jumps = Vec::new();
    let mut apsides: Option<(PhaseState, f64)> = None;
    for traj in trajectories {
        let events = detect_events(sys, traj, &kinds);
        let d = drift_with_cuts(traj, i, &jump_cuts(i, &events));
        drift_max = drift_max.max(d.max);
        failures += d.failed_at.len();
        singular += events.iter().filter(|e| singular_at(sys, traj, i, e)).count();
        jumps.extend(jump_scan(traj, i, &events));
        // radial apsides mean nothing for two independent oscillators
        if matches!(sys, SystemDef::Uncoupled(_)) {
            continue;
        }
        let first = traj.samples.first().copied();
        let tps = traj.clone().with_events(sys, &[EventKind::TurningPoint]);
        if let (Some(s0), Ok(angle)) = (first, apsidal_angle(&tps)) {
            if apsides.map_or(true, |(best, _)| state_key(&s0, &best) == Ordering::Less) {
                apsides = Some((s0, angle));
            }
        }
    }
    jumps.sort_by(|a, b| {
        a.event
            .t
            .total_cmp(&b.event.t)
            .then(a.event.kind.cmp(&b.event.kind))
            .then(state_key(&a.event.state, &b.event.state))
            .then(a.magnitude.total_cmp(&b.magnitude))
    });
    let classification = if singular > 0 {
        Classification::SingularAtEvents
    } else if failures == 0 && jumps.iter().all(|j| j.magnitude < JUMP_TOL) {
        Classification::SingleValued
    } else {
        Classification::MultiValued
    };
    let commensurate = match sys {
        SystemDef::Uncoupled(u) => {
            let [w1, w2] = u.omegas();
            commensurability(w1, w2, 100, 1e-9)
        }
        _ => None,
    };
    DiagnosticsReport {
        integral: i.name.clone(),
        drift: drift_max,
        jumps,
        apsidal_angle: apsides.map(|(_, a)| a),
        classification,
        commensurate,
        evaluation_failures: failures,
        singular_events: singular,
    }
}

/// Largest jump in a report, zero when there are none.
pub fn max_jump(report: &DiagnosticsReport) -> f64 {
    report.jumps.iter().map(|j| j.magnitude).fold(0.0, f64::max)
}
