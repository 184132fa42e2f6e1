//! Embedded adaptive Runge-Kutta 5(4) (Dormand-Prince) with dense output.
//!
//! The dense interpolant is the standard quartic associated with the pair;
//! every accepted step stores its interpolation data, so solutions can be
//! evaluated anywhere in the integration range at interpolation order 4.

use crate::error::{Error, Result};
use crate::real::Real;

const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
/// Difference between the 5th- and 4th-order weights (error estimator).
const E: [f64; 7] = [
    35.0 / 384.0 - 5179.0 / 57600.0,
    0.0,
    500.0 / 1113.0 - 7571.0 / 16695.0,
    125.0 / 192.0 - 393.0 / 640.0,
    -2187.0 / 6784.0 + 92097.0 / 339200.0,
    11.0 / 84.0 - 187.0 / 2100.0,
    -1.0 / 40.0,
];
/// Dense-output weights for the quartic interpolant.
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

const MAX_STEPS: usize = 20_000_000;

/// One accepted step of the dense solution.
#[derive(Debug, Clone)]
struct Segment<R, const N: usize> {
    t0: R,
    h: R,
    cont: [[R; N]; 5],
}

impl<R: Real, const N: usize> Segment<R, N> {
    fn eval(&self, t: R) -> [R; N] {
        let s = (t - self.t0) / self.h;
        let s1 = R::one() - s;
        let mut out = [R::zero(); N];
        for i in 0..N {
            let c = &self.cont;
            out[i] = c[0][i] + s * (c[1][i] + s1 * (c[2][i] + s * (c[3][i] + s1 * c[4][i])));
        }
        out
    }
}

/// Dense record of an initial-value solve on [t_start, t_end].
#[derive(Debug, Clone)]
pub struct DenseOutput<R, const N: usize> {
    segments: Vec<Segment<R, N>>,
    t_start: R,
    t_end: R,
    y_start: [R; N],
    y_end: [R; N],
    /// Number of accepted steps.
    pub steps: usize,
}

impl<R: Real, const N: usize> DenseOutput<R, N> {
    pub fn t_start(&self) -> R {
        self.t_start
    }

    pub fn t_end(&self) -> R {
        self.t_end
    }

    pub fn y_end(&self) -> [R; N] {
        self.y_end
    }

    /// Evaluate the interpolated solution; `t` is clamped to the solve range.
    pub fn eval(&self, t: R) -> [R; N] {
        if self.segments.is_empty() || t <= self.t_start {
            return self.y_start;
        }
        if t >= self.t_end {
            return self.y_end;
        }
        // binary search for the segment containing t
        let mut lo = 0usize;
        let mut hi = self.segments.len() - 1;
        while lo < hi {
            let mid = (lo + hi + 1) / 2;
            if self.segments[mid].t0 <= t {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        self.segments[lo].eval(t)
    }

    /// Accepted step endpoints (t_start, interior nodes, t_end).
    pub fn nodes(&self) -> Vec<R> {
        let mut out = Vec::with_capacity(self.segments.len() + 1);
        out.push(self.t_start);
        for s in &self.segments {
            out.push(s.t0 + s.h);
        }
        out
    }
}

/// Integrate y' = f(t, y) from `t_start` to `t_end` (forward only) with
/// per-step relative and absolute tolerance `tol`, recording dense output.
pub fn integrate<R: Real, const N: usize>(
    f: impl Fn(R, &[R; N]) -> [R; N],
    t_start: R,
    t_end: R,
    y0: [R; N],
    tol: R,
) -> Result<DenseOutput<R, N>> {
    let span = t_end - t_start;
    if !(span > R::zero()) {
        return Err(Error::ToleranceNotMet(format!(
            "empty or reversed integration range [{t_start}, {t_end}]"
        )));
    }
    let atol = tol;
    let rtol = tol;
    let mut t = t_start;
    let mut y = y0;
    let mut k1 = f(t, &y);
    let mut h = initial_step(&y, &k1, span, tol);
    let h_floor = span * R::of(1e-14);
    let mut segments: Vec<Segment<R, N>> = Vec::new();

    for _ in 0..MAX_STEPS {
        if t + h >= t_end {
            h = t_end - t;
        }
        let mut k = [[R::zero(); N]; 7];
        k[0] = k1;
        for stage in 0..6 {
            let mut ys = y;
            for i in 0..N {
                let mut acc = R::zero();
                for (j, kj) in k.iter().enumerate().take(stage + 1) {
                    let a = R::of(A[stage][j]);
                    if A[stage][j] != 0.0 {
                        acc = acc + a * kj[i];
                    }
                }
                ys[i] = y[i] + h * acc;
            }
            k[stage + 1] = f(t + R::of(C[stage]) * h, &ys);
        }
        // 5th-order solution is the 6th stage argument (FSAL): recompute it
        let mut y1 = y;
        for i in 0..N {
            let mut acc = R::zero();
            for j in 0..6 {
                if A[5][j] != 0.0 {
                    acc = acc + R::of(A[5][j]) * k[j][i];
                }
            }
            y1[i] = y[i] + h * acc;
        }

        // weighted RMS error over the embedded 4th-order difference
        let mut err_sq = R::zero();
        let mut finite = true;
        for i in 0..N {
            let mut e = R::zero();
            for j in 0..7 {
                if E[j] != 0.0 {
                    e = e + R::of(E[j]) * k[j][i];
                }
            }
            e = e * h;
            let scale = atol + rtol * y[i].abs().max(y1[i].abs());
            let r = e / scale;
            err_sq = err_sq + r * r;
            if !y1[i].is_finite() {
                finite = false;
            }
        }
        let err = (err_sq / R::of(N as f64)).sqrt();

        if finite && err <= R::one() {
            // accept: store the quartic interpolant for this step
            let ydiff: [R; N] = std::array::from_fn(|i| y1[i] - y[i]);
            let bspl: [R; N] = std::array::from_fn(|i| h * k[0][i] - ydiff[i]);
            let mut cont = [[R::zero(); N]; 5];
            for i in 0..N {
                cont[0][i] = y[i];
                cont[1][i] = ydiff[i];
                cont[2][i] = bspl[i];
                cont[3][i] = ydiff[i] - h * k[6][i] - bspl[i];
                let mut acc = R::zero();
                for j in 0..7 {
                    if D[j] != 0.0 {
                        acc = acc + R::of(D[j]) * k[j][i];
                    }
                }
                cont[4][i] = h * acc;
            }
            segments.push(Segment { t0: t, h, cont });
            t = t + h;
            y = y1;
            k1 = k[6];
            if t >= t_end {
                return Ok(DenseOutput {
                    t_start,
                    t_end,
                    y_start: y0,
                    y_end: y,
                    steps: segments.len(),
                    segments,
                });
            }
            let factor = if err == R::zero() {
                R::of(5.0)
            } else {
                (R::of(0.9) * err.powf(R::of(-0.2))).min(R::of(5.0)).max(R::of(0.2))
            };
            h = h * factor;
        } else {
            // reject (including non-finite trial states) and shrink
            let factor = if finite && err.is_finite() {
                (R::of(0.9) * err.powf(R::of(-0.2))).max(R::of(0.1))
            } else {
                R::of(0.25)
            };
            h = h * factor;
            if h < h_floor {
                return Err(Error::ToleranceNotMet(format!(
                    "step size underflow at t = {t}"
                )));
            }
        }
    }
    Err(Error::ToleranceNotMet("maximum step count exceeded".into()))
}

fn initial_step<R: Real, const N: usize>(y: &[R; N], k1: &[R; N], span: R, tol: R) -> R {
    // crude guess from the first derivative magnitude
    let mut ynorm = R::zero();
    let mut fnorm = R::zero();
    for i in 0..N {
        ynorm = ynorm.max(y[i].abs());
        fnorm = fnorm.max(k1[i].abs());
    }
    let scale = (ynorm + R::one()) / (fnorm + R::of(1e-8));
    let guess = (tol.powf(R::of(0.2)) * scale).min(span / R::of(10.0));
    guess.max(span * R::of(1e-10))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{PI, TAU};

    #[test]
    fn exponential_decay_accuracy() {
        let sol = integrate(|_t, y: &[f64; 1]| [-y[0]], 0.0, 5.0, [1.0], 1e-10).unwrap();
        assert!((sol.y_end()[0] - (-5.0f64).exp()).abs() < 1e-9);
    }

    #[test]
    fn dense_output_matches_exact_solution() {
        // y'' = -y as a 2d system; dense samples against cos/sin
        let sol = integrate(
            |_t, y: &[f64; 2]| [y[1], -y[0]],
            0.0,
            TAU,
            [1.0, 0.0],
            1e-10,
        )
        .unwrap();
        for i in 0..=100 {
            let t = TAU * i as f64 / 100.0;
            let y = sol.eval(t);
            assert!((y[0] - t.cos()).abs() < 1e-8, "t = {t}");
            assert!((y[1] + t.sin()).abs() < 1e-8, "t = {t}");
        }
    }

    #[test]
    fn interpolant_is_consistent_at_nodes() {
        let sol = integrate(
            |t: f64, y: &[f64; 1]| [y[0] * (t).sin()],
            0.0,
            3.0,
            [1.0],
            1e-9,
        )
        .unwrap();
        let nodes = sol.nodes();
        assert_eq!(nodes.len(), sol.steps + 1);
        for w in nodes.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            // continuity across segment joins
            let eps = 1e-12 * (w[1] - w[0]);
            assert!((sol.eval(mid - eps)[0] - sol.eval(mid + eps)[0]).abs() < 1e-9);
        }
    }

    #[test]
    fn reversed_range_is_an_error() {
        let r = integrate(|_t, y: &[f64; 1]| [y[0]], 1.0, 0.0, [1.0], 1e-9);
        assert!(matches!(r, Err(crate::error::Error::ToleranceNotMet(_))));
    }

    #[test]
    fn fast_exponential_growth_is_resolved() {
        // exact solution e^{40 t}; endpoint value ~2.35e17
        let sol = integrate(|_t, y: &[f64; 1]| [40.0 * y[0]], 0.0, 1.0, [1.0], 1e-10).unwrap();
        let rel = (sol.y_end()[0] - (40.0f64).exp()).abs() / (40.0f64).exp();
        assert!(rel < 1e-7, "relative error {rel}");
    }

    #[test]
    fn rotation_period_error_scales_with_tolerance() {
        for &tol in &[1e-6, 1e-9, 1e-12] {
            let sol = integrate(
                |_t, y: &[f64; 2]| [y[1], -y[0]],
                0.0,
                10.0 * PI,
                [1.0, 0.0],
                tol,
            )
            .unwrap();
            let err = (sol.y_end()[0] - 1.0).abs() + sol.y_end()[1].abs();
            assert!(err < 1e4 * tol + 1e-12, "tol {tol} err {err}");
        }
    }
}
