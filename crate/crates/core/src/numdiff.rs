//! Central finite differences with one Richardson extrapolation step.
//!
//! All black-box derivatives in the crate go through these two helpers so the
//! truncation order (h⁴) is uniform and residual thresholds stay comparable.

/// Central difference over the step actually representable around `x`, so
/// linear functions are differentiated exactly.
fn central<F: Fn(f64) -> f64>(f: &F, x: f64, h: f64) -> f64 {
    let (hi, lo) = (x + h, x - h);
    (f(hi) - f(lo)) / (hi - lo)
}

/// First derivative of `f` at `x`, error O(h⁴).
pub fn derivative<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    let d = |h: f64| central(&f, x, h);
    let coarse = d(h);
    let fine = d(0.5 * h);
    (4.0 * fine - coarse) / 3.0
}

/// Second derivative of `f` at `x`, error O(h⁴).
pub fn second_derivative<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    let f0 = f(x);
    let d = |h: f64| (f(x + h) - 2.0 * f0 + f(x - h)) / (h * h);
    let coarse = d(h);
    let fine = d(0.5 * h);
    (4.0 * fine - coarse) / 3.0
}

/// First derivative with two extrapolation levels (`h`, `h/2`, `h/4`), error O(h⁶).
pub fn derivative6<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    let d = |h: f64| central(&f, x, h);
    richardson6(d(h), d(0.5 * h), d(0.25 * h))
}

/// Second derivative, error O(h⁶).
pub fn second_derivative6<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    let f0 = f(x);
    let d = |h: f64| (f(x + h) - 2.0 * f0 + f(x - h)) / (h * h);
    richardson6(d(h), d(0.5 * h), d(0.25 * h))
}

fn richardson6(coarse: f64, mid: f64, fine: f64) -> f64 {
    let a = (4.0 * mid - coarse) / 3.0;
    let b = (4.0 * fine - mid) / 3.0;
    (16.0 * b - a) / 15.0
}

/// Lets fallible evaluations run inside the plain `Fn(f64) -> f64` helpers
/// above: failures become NaN and the first error is kept for the caller.
#[derive(Default)]
pub(crate) struct Trap(core::cell::Cell<Option<crate::Error>>);

impl Trap {
    pub fn eval(&self, r: crate::Result<f64>) -> f64 {
        match r {
            Ok(v) => v,
            Err(e) => {
                if self.0.get().is_none() {
                    self.0.set(Some(e));
                }
                f64::NAN
            }
        }
    }

    pub fn finish(&self, v: f64) -> crate::Result<f64> {
        match self.0.get() {
            Some(e) => Err(e),
            None if v.is_finite() => Ok(v),
            None => Err(crate::Error::EvaluationFailed),
        }
    }
}
