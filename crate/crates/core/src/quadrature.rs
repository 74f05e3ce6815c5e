//! Tanh-sinh quadrature with inverse-square-root endpoint singularities, and
//! a bracketing root finder.
//!
//! Integrands receive a [`Node`] carrying the abscissa together with its
//! distances to both endpoints. Those distances come straight from the
//! quadrature transform, so an integrand can form `radicand(r) − radicand(r*)`
//! near a turning point without cancellation.

use crate::error::{Error, Result};
#[allow(unused_imports)] // redundant once std is linked in
use num_traits::Float;

pub const DEFAULT_TOL: f64 = 1e-10;
const MAX_LEVEL: u32 = 12;
const MIN_LEVEL: u32 = 3;
const T_MAX: f64 = 4.0;
const HALF_PI: f64 = core::f64::consts::FRAC_PI_2;

/// An abscissa and its exact distances to the caller's endpoints `a` and `b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node {
    pub x: f64,
    pub from_a: f64,
    pub from_b: f64,
}

/// Which endpoints carry a `(distance)^(-1/2)` singularity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SingularEnds {
    Neither,
    A,
    B,
    Both,
}

impl SingularEnds {
    fn swapped(self) -> Self {
        match self {
            SingularEnds::A => SingularEnds::B,
            SingularEnds::B => SingularEnds::A,
            other => other,
        }
    }
}

pub struct SingularIntegral<F> {
    pub integrand: F,
    pub a: f64,
    pub b: f64,
    pub singular_at: SingularEnds,
}

/// Plain tanh-sinh over `[a, b]` for integrands that are finite inside.
pub fn tanh_sinh<F: Fn(Node) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    integrate_singular(
        &SingularIntegral {
            integrand: f,
            a,
            b,
            singular_at: SingularEnds::Neither,
        },
        tol,
    )
}

/// Integrates `si.integrand` from `a` to `b` to mixed tolerance
/// `tol·(1 + |result|)`.
///
/// Declared singular ends are removed by the substitution `x = end ± u²`;
/// with both ends singular the interval is split at its midpoint.
pub fn integrate_singular<F: Fn(Node) -> f64>(si: &SingularIntegral<F>, tol: f64) -> Result<f64> {
    let (a, b) = (si.a, si.b);
    if !(a.is_finite() && b.is_finite()) || !(tol > 0.0) {
        return Err(Error::InvalidParam {
            name: "tol",
            value: tol,
            expected: "finite endpoints and tol > 0",
        });
    }
    if a == b {
        return Ok(0.0);
    }
    if a < b {
        ordered(&|n: Node| (si.integrand)(n), a, b, si.singular_at, tol)
    } else {
        let f = |n: Node| {
            (si.integrand)(Node {
                x: n.x,
                from_a: n.from_b,
                from_b: n.from_a,
            })
        };
        ordered(&f, b, a, si.singular_at.swapped(), tol).map(|v| -v)
    }
}

fn ordered(f: &dyn Fn(Node) -> f64, lo: f64, hi: f64, ends: SingularEnds, tol: f64) -> Result<f64> {
    let len = hi - lo;
    match ends {
        SingularEnds::Neither => {
            let g = |dl: f64, dh: f64| {
                let x = if dl <= dh { lo + dl } else { hi - dh };
                f(Node { x, from_a: dl, from_b: dh })
            };
            ts_core(&g, len, tol)
        }
        SingularEnds::A => substituted_low(f, lo, len, len, tol),
        SingularEnds::B => substituted_high(f, hi, len, len, tol),
        SingularEnds::Both => {
            let half = 0.5 * len;
            let left = substituted_low(f, lo, half, len, tol)?;
            let right = substituted_high(f, hi, half, len, tol)?;
            Ok(left + right)
        }
    }
}

/// Piece `[lo, lo + span]` of a full interval of length `len`, singular at `lo`.
fn substituted_low(f: &dyn Fn(Node) -> f64, lo: f64, span: f64, len: f64, tol: f64) -> Result<f64> {
    let u_max = span.sqrt();
    let g = |du: f64, du_hi: f64| {
        let u = if du <= du_hi { du } else { u_max - du_hi };
        let dx = u * u;
        let rest = if span == len {
            du_hi * (u_max + u)
        } else {
            len - dx
        };
        2.0 * u * f(Node { x: lo + dx, from_a: dx, from_b: rest })
    };
    check_integrable(&g, u_max)?;
    ts_core(&g, u_max, tol)
}

/// Piece `[hi − span, hi]` of a full interval of length `len`, singular at `hi`.
fn substituted_high(f: &dyn Fn(Node) -> f64, hi: f64, span: f64, len: f64, tol: f64) -> Result<f64> {
    let u_max = span.sqrt();
    let g = |du: f64, du_hi: f64| {
        let u = if du <= du_hi { du } else { u_max - du_hi };
        let dx = u * u;
        let rest = if span == len {
            du_hi * (u_max + u)
        } else {
            len - dx
        };
        2.0 * u * f(Node { x: hi - dx, from_a: rest, from_b: dx })
    };
    check_integrable(&g, u_max)?;
    ts_core(&g, u_max, tol)
}

/// After substitution a simple root leaves a bounded integrand at `u → 0`;
/// a double root leaves `~1/u`, which shows up as growth over four decades.
fn check_integrable(g: &dyn Fn(f64, f64) -> f64, u_max: f64) -> Result<()> {
    let near = |s: f64| g(s * u_max, (1.0 - s) * u_max).abs();
    let (g4, g8) = (near(1e-4), near(1e-8));
    if !g4.is_finite() || !g8.is_finite() || (g8 > 1e3 * g4 && g8 > 1e-300) {
        return Err(Error::NonIntegrableSingularity);
    }
    Ok(())
}

/// Tanh-sinh on `[0, len]`; `g` takes the distances to both ends.
fn ts_core(g: &dyn Fn(f64, f64) -> f64, len: f64, tol: f64) -> Result<f64> {
    let half = 0.5 * len;
    let term = |t: f64| -> Result<f64> {
        let s = HALF_PI * t.sinh();
        let ch = s.cosh();
        let w = HALF_PI * t.cosh() / (ch * ch);
        // 1 − tanh|s| without cancellation.
        let comp = (-s.abs()).exp() / ch;
        let near = half * comp;
        if near <= 0.0 || w == 0.0 {
            return Ok(0.0);
        }
        let far = len - near;
        let v = if t < 0.0 { g(near, far) } else { g(far, near) };
        if !v.is_finite() {
            return Err(Error::NonIntegrableSingularity);
        }
        Ok(w * v)
    };

    let mut h = 1.0;
    let mut sum = term(0.0)?;
    let mut k = 1.0;
    while k <= T_MAX {
        sum += term(k)? + term(-k)?;
        k += 1.0;
    }
    let mut prev = half * h * sum;
    for level in 1..=MAX_LEVEL {
        h *= 0.5;
        let mut j = 1u64;
        loop {
            let t = j as f64 * h;
            if t > T_MAX {
                break;
            }
            sum += term(t)? + term(-t)?;
            j += 2;
        }
        let cur = half * h * sum;
        let est = (cur - prev).abs();
        if level >= MIN_LEVEL && est <= tol * (1.0 + cur.abs()) {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::MaxRefinementExceeded { estimate: prev })
}

/// Bisection root of `f` on `[lo, hi]`, refined until the bracket cannot
/// shrink further; returns the endpoint with the smaller residual.
pub fn bracketed_root<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    let (mut lo, mut hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let (mut flo, mut fhi) = (f(lo), f(hi));
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if !(flo.signum() != fhi.signum()) || flo.is_nan() || fhi.is_nan() {
        return Err(Error::NoSignChange);
    }
    for _ in 0..200 {
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
            fhi = fm;
        }
        if fm.abs() < tol * 1e-6 && hi - lo <= 4.0 * f64::EPSILON * hi.abs().max(1.0) {
            break;
        }
    }
    Ok(if flo.abs() <= fhi.abs() { lo } else { hi })
}
