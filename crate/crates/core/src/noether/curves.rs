use super::Jet2;
use crate::dynamics::{Chart, PhaseState};
use alloc::vec::Vec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Sample times used on every curve.
pub const SAMPLE_TIMES: [f64; 5] = [-0.2, -0.1, 0.0, 0.1, 0.2];

/// Half-width around a sample time that the time differences may reach.
const WINDOW: f64 = 0.03;

/// Off-shell curve `t ↦ q(t)` with quartic polynomial components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestCurve {
    pub chart: Chart,
    /// `qᵢ(t) = Σₖ coeffs[i][k] tᵏ`.
    pub coeffs: [[f64; 5]; 2],
}

impl TestCurve {
    /// Coefficients in `[−1, 1]`; in the polar chart the radius is shifted so
    /// `r(0) ∈ [0.5, 2]`. Points where it strays too close to the origin are
    /// left for the caller's acceptance test to drop.
    pub fn random<R: Rng>(rng: &mut R, chart: Chart) -> Self {
        let mut coeffs = [[0.0; 5]; 2];
        for row in coeffs.iter_mut() {
            for c in row.iter_mut() {
                *c = rng.random_range(-1.0..=1.0);
            }
        }
        if chart == Chart::Polar {
            coeffs[0][0] = rng.random_range(0.5..=2.0);
        }
        Self { chart, coeffs }
    }

    pub fn jet(&self, t: f64) -> Jet2 {
        let mut q = [0.0; 2];
        let mut v = [0.0; 2];
        let mut a = [0.0; 2];
        for i in 0..2 {
            let c = &self.coeffs[i];
            q[i] = c[0] + t * (c[1] + t * (c[2] + t * (c[3] + t * c[4])));
            v[i] = c[1] + t * (2.0 * c[2] + t * (3.0 * c[3] + t * 4.0 * c[4]));
            a[i] = 2.0 * c[2] + t * (6.0 * c[3] + t * 12.0 * c[4]);
        }
        Jet2 { state: PhaseState { t, q, v, chart: self.chart }, accel: a }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub curve: TestCurve,
    pub t: f64,
}

/// `n` curve points whose jets (and a small time window around them) satisfy
/// `accept`. Deterministic in `seed`.
pub fn sample_curve_points(chart: Chart, seed: u64, n: usize, accept: &dyn Fn(&PhaseState) -> bool) -> Vec<CurvePoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    let mut draws = 0;
    while out.len() < n && draws < 100_000 {
        draws += 1;
        let curve = TestCurve::random(&mut rng, chart);
        for &t in &SAMPLE_TIMES {
            if out.len() == n {
                break;
            }
            let ok = [t - WINDOW, t, t + WINDOW].iter().all(|&s| accept(&curve.jet(s).state));
            if ok {
                out.push(CurvePoint { curve, t });
            }
        }
    }
    out
}
