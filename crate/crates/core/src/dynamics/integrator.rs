use super::events::Event;
use super::tableau::{A, B, BHH, C, ER};
use super::{Chart, Dynamics, PhaseState, MIN_RADIUS};
use crate::error::{Error, Result};
use alloc::vec::Vec;
#[allow(unused_imports)] // redundant once std is linked in
use num_traits::Float;

type Vec4 = [f64; 4];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Spacing of the dense-output samples.
    pub sample_dt: f64,
    pub max_steps: usize,
    pub h_min: f64,
    /// Abort with `BlowUp` once any state component exceeds this.
    pub norm_cap: f64,
    pub event_tol: f64,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-12,
            atol: 1e-12,
            sample_dt: 0.01,
            max_steps: 5_000_000,
            h_min: 1e-14,
            norm_cap: 1e12,
            event_tol: 1e-10,
        }
    }
}

impl IntegratorOptions {
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.rtol = tol;
        self.atol = tol;
        self
    }

    pub fn with_sample_dt(mut self, dt: f64) -> Self {
        self.sample_dt = dt;
        self
    }

    fn validate(&self) -> Result<()> {
        let positive = [
            ("rtol", self.rtol),
            ("atol", self.atol),
            ("sample_dt", self.sample_dt),
            ("event_tol", self.event_tol),
        ];
        for (name, value) in positive {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::InvalidParam { name, value, expected: "a positive finite number" });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct IntegratorStats {
    pub steps: usize,
    pub rejected: usize,
    /// Largest accepted local error estimate, in units of the tolerance.
    pub max_error: f64,
}

/// One accepted step, kept so any time inside it can be re-stepped exactly.
#[derive(Debug, Clone, Copy)]
pub(crate) struct StepRecord {
    pub t: f64,
    pub h: f64,
    pub y0: Vec4,
    pub f0: Vec4,
    pub y1: Vec4,
    pub f1: Vec4,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub samples: Vec<PhaseState>,
    pub events: Vec<Event>,
    pub stats: IntegratorStats,
    pub chart: Chart,
    /// Residual target for event refinement.
    pub event_tol: f64,
    pub(crate) steps: Vec<StepRecord>,
}

impl Trajectory {
    pub fn t_start(&self) -> f64 {
        self.samples.first().map_or(0.0, |s| s.t)
    }

    pub fn t_end(&self) -> f64 {
        self.samples.last().map_or(0.0, |s| s.t)
    }

    /// Dense output: re-steps from the start of the accepted step holding `t`,
    /// so the state carries the full order of the method.
    pub fn state_at<S: Dynamics + ?Sized>(&self, sys: &S, t: f64) -> Option<PhaseState> {
        if self.steps.is_empty() || t < self.t_start() || t > self.t_end() {
            return None;
        }
        let idx = self.steps.partition_point(|st| st.t + st.h < t).min(self.steps.len() - 1);
        let st = &self.steps[idx];
        if t == st.t + st.h {
            return Some(PhaseState::from_vec(t, &st.y1, self.chart));
        }
        let y = restep(sys, self.chart, st.t, &st.y0, &st.f0, t - st.t);
        Some(PhaseState::from_vec(t, &y, self.chart))
    }

    /// Cubic Hermite interpolant inside the step holding `t`; cheap, used for
    /// bracketing only.
    pub(crate) fn hermite(&self, idx: usize, t: f64) -> Vec4 {
        let st = &self.steps[idx];
        let s = (t - st.t) / st.h;
        let (h00, h10, h01, h11) = (
            (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s),
            s * (1.0 - s) * (1.0 - s),
            s * s * (3.0 - 2.0 * s),
            s * s * (s - 1.0),
        );
        let mut y = [0.0; 4];
        for i in 0..4 {
            y[i] = h00 * st.y0[i] + h10 * st.h * st.f0[i] + h01 * st.y1[i] + h11 * st.h * st.f1[i];
        }
        y
    }

    pub fn with_events<S: Dynamics + ?Sized>(mut self, sys: &S, kinds: &[super::EventKind]) -> Self {
        self.events = super::detect_events(sys, &self, kinds);
        self
    }
}

pub(crate) fn rhs<S: Dynamics + ?Sized>(sys: &S, chart: Chart, t: f64, y: &Vec4) -> Vec4 {
    let a = sys.accel(&PhaseState::from_vec(t, y, chart));
    [y[2], y[3], a[0], a[1]]
}

/// One DOP853 step; returns the new state and the two raw error vectors
/// (fifth and third order).
fn step<S: Dynamics + ?Sized>(sys: &S, chart: Chart, t: f64, y: &Vec4, f0: &Vec4, h: f64) -> (Vec4, Vec4, Vec4) {
    let mut k = [[0.0; 4]; 12];
    k[0] = *f0;
    for i in 1..12 {
        let mut yi = *y;
        for (j, kj) in k.iter().enumerate().take(i) {
            let a = A[i][j];
            if a != 0.0 {
                for c in 0..4 {
                    yi[c] += h * a * kj[c];
                }
            }
        }
        k[i] = rhs(sys, chart, t + C[i] * h, &yi);
    }
    let mut incr = [0.0; 4];
    let mut e5 = [0.0; 4];
    for (i, ki) in k.iter().enumerate() {
        for c in 0..4 {
            incr[c] += B[i] * ki[c];
            e5[c] += ER[i] * ki[c];
        }
    }
    let mut y1 = *y;
    let mut e3 = [0.0; 4];
    for c in 0..4 {
        y1[c] += h * incr[c];
        e3[c] = incr[c] - BHH[0] * k[0][c] - BHH[1] * k[8][c] - BHH[2] * k[11][c];
    }
    (y1, e5, e3)
}

pub(crate) fn restep<S: Dynamics + ?Sized>(sys: &S, chart: Chart, t: f64, y: &Vec4, f0: &Vec4, h: f64) -> Vec4 {
    if h == 0.0 {
        return *y;
    }
    step(sys, chart, t, y, f0, h).0
}

fn admissible(y: &Vec4, chart: Chart, cap: f64) -> bool {
    y.iter().all(|v| v.is_finite() && v.abs() <= cap) && (chart == Chart::Cartesian || y[0] >= MIN_RADIUS)
}

fn initial_step(y: &Vec4, f: &Vec4, opts: &IntegratorOptions, span: f64) -> f64 {
    let mut d0: f64 = 0.0;
    let mut d1: f64 = 0.0;
    for c in 0..4 {
        let sk = opts.atol + opts.rtol * y[c].abs();
        d0 += (y[c] / sk).powi(2);
        d1 += (f[c] / sk).powi(2);
    }
    let h = if d0 < 1e-10 || d1 < 1e-10 { 1e-6 } else { 0.01 * (d0 / d1).sqrt() };
    h.min(span).max(1e-10_f64.min(span))
}

struct Driver<'a, S: ?Sized> {
    sys: &'a S,
    chart: Chart,
    opts: IntegratorOptions,
    stats: IntegratorStats,
}

impl<S: Dynamics + ?Sized> Driver<'_, S> {
    /// Advances from `(t, y)` to exactly `t_end`, calling `accept` for every
    /// accepted step.
    fn run(&mut self, mut t: f64, mut y: Vec4, t_end: f64, mut accept: impl FnMut(StepRecord)) -> Result<Vec4> {
        let opts = self.opts;
        let mut f = rhs(self.sys, self.chart, t, &y);
        let mut h = initial_step(&y, &f, &opts, t_end - t);
        let mut last_rejected = false;
        while t < t_end {
            if self.stats.steps + self.stats.rejected >= opts.max_steps {
                return Err(Error::StepUnderflow { t, h });
            }
            let h_floor = opts.h_min.max(16.0 * f64::EPSILON * t.abs());
            if h < h_floor {
                return Err(Error::StepUnderflow { t, h });
            }
            let last = t + h >= t_end;
            let hs = if last { t_end - t } else { h };
            let (y1, e5, e3) = step(self.sys, self.chart, t, &y, &f, hs);
            let err = error_norm(&y, &y1, &e5, &e3, hs, &opts);
            if !(err <= 1.0) || !admissible(&y1, self.chart, opts.norm_cap) {
                self.stats.rejected += 1;
                let shrink = if err.is_finite() { (0.9 * err.powf(-1.0 / 8.0)).max(0.2) } else { 0.25 };
                if !admissible(&y1, self.chart, opts.norm_cap) && hs <= 4.0 * h_floor {
                    return Err(Error::BlowUp { t });
                }
                h = hs * shrink.min(0.9);
                last_rejected = true;
                continue;
            }
            self.stats.steps += 1;
            self.stats.max_error = self.stats.max_error.max(err);
            let t1 = if last { t_end } else { t + hs };
            // The last stage is not evaluated at y1, so DOP853 is not FSAL.
            let f1 = rhs(self.sys, self.chart, t1, &y1);
            accept(StepRecord { t, h: t1 - t, y0: y, f0: f, y1, f1 });
            let grow = if err == 0.0 { 6.0 } else { (0.9 * err.powf(-1.0 / 8.0)).clamp(0.333, 6.0) };
            h = if last_rejected { hs * grow.min(1.0) } else { hs * grow };
            last_rejected = false;
            t = t1;
            y = y1;
            f = f1;
        }
        Ok(y)
    }
}

fn error_norm(y0: &Vec4, y1: &Vec4, e5: &Vec4, e3: &Vec4, h: f64, opts: &IntegratorOptions) -> f64 {
    let mut err = 0.0;
    let mut err2 = 0.0;
    for c in 0..4 {
        let sk = opts.atol + opts.rtol * y0[c].abs().max(y1[c].abs());
        err += (e5[c] / sk).powi(2);
        err2 += (e3[c] / sk).powi(2);
    }
    let mut deno = err + 0.01 * err2;
    if deno <= 0.0 {
        deno = 1.0;
    }
    h.abs() * err * (1.0 / (deno * 4.0)).sqrt()
}

/// Integrates `sys` from `s0` to `t_end`, sampling every `opts.sample_dt`
/// (plus the final time) by exact re-stepping.
pub fn integrate<S: Dynamics + ?Sized>(sys: &S, s0: &PhaseState, t_end: f64, opts: &IntegratorOptions) -> Result<Trajectory> {
    opts.validate()?;
    s0.validate()?;
    let chart = sys.chart();
    if s0.chart != chart {
        return Err(Error::InvalidState("initial state is in the wrong chart"));
    }
    if !(t_end > s0.t) || !t_end.is_finite() {
        return Err(Error::InvalidParam { name: "t_end", value: t_end, expected: "a finite time after s0.t" });
    }
    let y0 = s0.to_vec();
    if !admissible(&y0, chart, opts.norm_cap) {
        return Err(Error::BlowUp { t: s0.t });
    }
    let mut driver = Driver { sys, chart, opts: *opts, stats: IntegratorStats::default() };
    let mut steps = Vec::new();
    driver.run(s0.t, y0, t_end, |rec| steps.push(rec))?;

    let mut samples = Vec::new();
    samples.push(*s0);
    let mut k = 1u64;
    let mut idx = 0;
    loop {
        let ts = s0.t + k as f64 * opts.sample_dt;
        if ts >= t_end - 1e-9 * opts.sample_dt {
            break;
        }
        while steps[idx].t + steps[idx].h < ts {
            idx += 1;
        }
        let st = &steps[idx];
        let y = if ts == st.t + st.h { st.y1 } else { restep(sys, chart, st.t, &st.y0, &st.f0, ts - st.t) };
        samples.push(PhaseState::from_vec(ts, &y, chart));
        k += 1;
    }
    let last = steps.last().expect("at least one step");
    samples.push(PhaseState::from_vec(t_end, &last.y1, chart));

    Ok(Trajectory { samples, events: Vec::new(), stats: driver.stats, chart, event_tol: opts.event_tol, steps })
}

/// Final state at `t` (either direction of time is fine), without samples.
pub fn propagate<S: Dynamics + ?Sized>(sys: &S, s: &PhaseState, t: f64, opts: &IntegratorOptions) -> Result<PhaseState> {
    if t == s.t {
        return Ok(*s);
    }
    let chart = sys.chart();
    let mut driver = Driver { sys, chart, opts: *opts, stats: IntegratorStats::default() };
    if t > s.t {
        let y = driver.run(s.t, s.to_vec(), t, |_| {})?;
        return Ok(PhaseState::from_vec(t, &y, chart));
    }
    // Backward in time: integrate the time-reversed system forward.
    let reversed = Reversed { inner: sys, t0: s.t };
    let mut driver = Driver { sys: &reversed, chart, opts: *opts, stats: IntegratorStats::default() };
    let y = s.to_vec();
    let y = driver.run(0.0, [y[0], y[1], -y[2], -y[3]], s.t - t, |_| {})?;
    Ok(PhaseState::from_vec(t, &[y[0], y[1], -y[2], -y[3]], chart))
}

/// `q(σ) = q(t0 − σ)`; valid for any second-order system.
struct Reversed<'a, S: ?Sized> {
    inner: &'a S,
    t0: f64,
}

impl<S: Dynamics + ?Sized> Dynamics for Reversed<'_, S> {
    fn chart(&self) -> Chart {
        self.inner.chart()
    }
    fn accel(&self, s: &PhaseState) -> [f64; 2] {
        let orig = PhaseState { t: self.t0 - s.t, q: s.q, v: [-s.v[0], -s.v[1]], chart: s.chart };
        self.inner.accel(&orig)
    }
    fn lagrangian(&self, s: &PhaseState) -> f64 {
        self.inner.lagrangian(s)
    }
    fn noether_weights(&self, q: [f64; 2]) -> [f64; 2] {
        self.inner.noether_weights(q)
    }
}
