//! Flows of the linear system J z' = S(t) z: the fundamental matrix path and
//! the clockwise polar lift of individual solutions.
//!
//! Solutions are written z(t) = r(t) (cos th(t), -sin th(t)), i.e. the angle
//! th increases when the solution turns clockwise. With S = [[a, b], [b, c]],
//!
//!   th' = a cos^2 th + c sin^2 th - 2 b cos th sin th,
//!   (log r)' = b cos 2 th + (a - c)/2 sin 2 th,
//!
//! and the winding number of a solution starting at angle w over k periods is
//! eta_kT(w) = (th(kT; w) - w) / (2 pi).

use crate::coeff::CoeffPath;
use crate::error::{Error, Result};
use crate::mat2::Mat2;
use crate::ode::{integrate, DenseOutput};
use crate::real::Real;

/// Default per-step tolerance for matrix-path integration.
pub const DEFAULT_MATRIX_TOL: f64 = 1e-10;
/// Default per-step tolerance for angular lifts.
pub const DEFAULT_ANGLE_TOL: f64 = 1e-10;

/// Dense record of the fundamental matrix M(t), M(0) = I.
#[derive(Debug, Clone)]
pub struct FundamentalPath<R> {
    dense: DenseOutput<R, 4>,
    period: R,
}

impl<R: Real> FundamentalPath<R> {
    /// M(t); clamped to the integrated range.
    pub fn eval(&self, t: R) -> Mat2<R> {
        let y = self.dense.eval(t);
        Mat2::new(y[0], y[2], y[1], y[3])
    }

    /// Terminal matrix M(t_end).
    pub fn terminal(&self) -> Mat2<R> {
        let y = self.dense.y_end();
        Mat2::new(y[0], y[2], y[1], y[3])
    }

    pub fn t_end(&self) -> R {
        self.dense.t_end()
    }

    /// Coefficient-path period of the underlying system.
    pub fn period(&self) -> R {
        self.period
    }

    /// Accepted integration nodes (step endpoints).
    pub fn nodes(&self) -> Vec<R> {
        self.dense.nodes()
    }
}

/// Integrate the fundamental matrix over [0, t_end]: M' = -J S(t) M, M(0) = I.
///
/// The symplectic residual |det M - 1| is checked at every accepted node and
/// at the endpoint, relative to the size of the determinant products (for a
/// hyperbolic path over a long horizon the cancellation in det M leaves no
/// absolute accuracy to certify); the allowance also scales with the horizon,
/// since local errors of order tol accumulate linearly in the drift.
pub fn integrate_fundamental<R: Real>(
    path: &CoeffPath<R>,
    t_end: R,
    tol: R,
) -> Result<FundamentalPath<R>> {
    // columns evolve by z' = [[b, c], [-a, -b]] z; state (m11, m21, m12, m22)
    let f = |t: R, y: &[R; 4]| -> [R; 4] {
        let a = path.a(t);
        let b = path.b(t);
        let c = path.c(t);
        [
            b * y[0] + c * y[1],
            -a * y[0] - b * y[1],
            b * y[2] + c * y[3],
            -a * y[2] - b * y[3],
        ]
    };
    let dense = integrate(f, R::zero(), t_end, [R::one(), R::zero(), R::zero(), R::one()], tol)?;
    let fp = FundamentalPath { dense, period: path.period };
    let allowed = R::of(50.0) * tol * (R::one() + t_end.abs());
    for t in fp.nodes() {
        let m = fp.eval(t);
        let scale = R::one() + (m.m11 * m.m22).abs() + (m.m12 * m.m21).abs();
        let res = m.symplectic_residual() / scale;
        if !(res <= allowed) {
            return Err(Error::ToleranceNotMet(format!(
                "symplectic residual {:.3e} at t = {} exceeds {:.1e}",
                res.to_f64().unwrap_or(f64::NAN),
                t,
                allowed.to_f64().unwrap_or(f64::NAN),
            )));
        }
    }
    Ok(fp)
}

/// Dense record of one solution's clockwise polar lift (theta, log r) with
/// theta(0) = omega and r(0) = 1.
#[derive(Debug, Clone)]
pub struct AngularSolution<R> {
    dense: DenseOutput<R, 2>,
    pub omega: R,
}

impl<R: Real> AngularSolution<R> {
    pub fn theta(&self, t: R) -> R {
        self.dense.eval(t)[0]
    }

    pub fn radius(&self, t: R) -> R {
        self.dense.eval(t)[1].exp()
    }

    pub fn theta_end(&self) -> R {
        self.dense.y_end()[0]
    }

    pub fn radius_end(&self) -> R {
        self.dense.y_end()[1].exp()
    }

    pub fn t_end(&self) -> R {
        self.dense.t_end()
    }

    /// Winding relative to the initial angle, (theta(t_end) - omega) / 2 pi.
    pub fn winding(&self) -> R {
        (self.theta_end() - self.omega) / R::TAU()
    }
}

/// Integrate the angular and radial lift over [0, t_end] from initial
/// clockwise angle `omega`. The lift is integrated directly, so `theta` is a
/// continuous representative by construction.
pub fn angle_lift<R: Real>(
    path: &CoeffPath<R>,
    omega: R,
    t_end: R,
    tol: R,
) -> Result<AngularSolution<R>> {
    let f = |t: R, y: &[R; 2]| -> [R; 2] {
        let a = path.a(t);
        let b = path.b(t);
        let c = path.c(t);
        let (s, co) = y[0].sin_cos();
        let (s2, c2) = (R::of(2.0) * y[0]).sin_cos();
        [
            a * co * co + c * s * s - R::of(2.0) * b * co * s,
            b * c2 + (a - c) / R::of(2.0) * s2,
        ]
    };
    let dense = integrate(f, R::zero(), t_end, [omega, R::zero()], tol)?;
    Ok(AngularSolution { dense, omega })
}

/// Winding number eta_kT(omega) of the solution with initial clockwise angle
/// `omega` over k periods, at the default angular tolerance.
pub fn winding<R: Real>(path: &CoeffPath<R>, k: u32, omega: R) -> Result<R> {
    let t_end = path.period * R::of(k as f64);
    Ok(angle_lift(path, omega, t_end, R::of(DEFAULT_ANGLE_TOL))?.winding())
}

/// d eta_T / d omega computed from the radial component:
/// eta_T'(omega) = (1/(2 pi)) (1/r(T; omega)^2 - 1).
pub fn winding_derivative<R: Real>(path: &CoeffPath<R>, omega: R) -> Result<R> {
    let sol = angle_lift(path, omega, path.period, R::of(DEFAULT_ANGLE_TOL))?;
    let r = sol.radius_end();
    Ok((R::one() / (r * r) - R::one()) / R::TAU())
}

/// Clockwise angle of a plane vector under z = r (cos th, -sin th).
pub fn clockwise_angle<R: Real>(z: [R; 2]) -> R {
    (-z[1]).atan2(z[0])
}

/// Unit vector at clockwise angle omega.
pub fn unit_at<R: Real>(omega: R) -> [R; 2] {
    let (s, c) = omega.sin_cos();
    [c, -s]
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI, TAU};

    fn rotation_system() -> CoeffPath<f64> {
        // S = I: M(t) = [[cos t, sin t], [-sin t, cos t]]
        CoeffPath::constant(1.0, 0.0, 1.0, TAU)
    }

    fn shear_free_hyperbolic() -> CoeffPath<f64> {
        // S = diag(-1, 1): M(t) = [[cosh t, sinh t], [sinh t, cosh t]]
        CoeffPath::constant(-1.0, 0.0, 1.0, 1.0)
    }

    #[test]
    fn zero_path_freezes_the_flow() {
        let path = CoeffPath::<f64>::zero(1.0);
        let fp = integrate_fundamental(&path, 1.0, 1e-10).unwrap();
        assert!(fp.terminal().sub(&Mat2::identity()).max_abs() < 1e-12);
        let a = angle_lift(&path, 0.4, 1.0, 1e-10).unwrap();
        assert!((a.theta_end() - 0.4).abs() < 1e-12);
        assert!((a.radius_end() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn identity_coefficients_rotate_clockwise() {
        let path = rotation_system();
        let fp = integrate_fundamental(&path, FRAC_PI_2, 1e-11).unwrap();
        let m = fp.terminal();
        let expect = Mat2::new(0.0, 1.0, -1.0, 0.0);
        assert!(m.sub(&expect).max_abs() < 1e-9, "{m:?}");
        // dense interior sample
        let m = fp.eval(0.3);
        assert!((m.m11 - 0.3f64.cos()).abs() < 1e-9);
        assert!((m.m12 - 0.3f64.sin()).abs() < 1e-9);
    }

    #[test]
    fn hyperbolic_closed_form() {
        let path = shear_free_hyperbolic();
        let fp = integrate_fundamental(&path, 1.0, 1e-11).unwrap();
        let m = fp.terminal();
        assert!((m.m11 - 1.0f64.cosh()).abs() < 1e-9);
        assert!((m.m12 - 1.0f64.sinh()).abs() < 1e-9);
        assert!((m.m21 - 1.0f64.sinh()).abs() < 1e-9);
        assert!((m.m22 - 1.0f64.cosh()).abs() < 1e-9);
    }

    #[test]
    fn hyperbolic_angle_is_minus_arctan_tanh() {
        let path = shear_free_hyperbolic();
        let sol = angle_lift(&path, 0.0, 1.0, 1e-11).unwrap();
        for i in 0..=10 {
            let t = i as f64 / 10.0;
            assert!((sol.theta(t) + t.tanh().atan()).abs() < 1e-9, "t = {t}");
        }
        // r(1)^2 = cosh(1)^2 + sinh(1)^2 = cosh 2
        assert!((sol.radius_end().powi(2) - 2.0f64.cosh()).abs() < 1e-8);
    }

    #[test]
    fn winding_of_rotation_system_is_linear_in_time() {
        let path = rotation_system();
        for k in 1..=3u32 {
            let eta = winding(&path, k, 0.7).unwrap();
            assert!((eta - k as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn winding_signs_straddle_zero_for_hyperbolic() {
        let path = shear_free_hyperbolic();
        let lo = winding(&path, 1, 0.0).unwrap();
        let hi = winding(&path, 1, FRAC_PI_2).unwrap();
        // frozen oracle: -atan(tanh 1)/2pi = -0.10359...
        let oracle = -(1.0f64.tanh().atan()) / TAU;
        assert!((lo - oracle).abs() < 1e-9);
        assert!(lo > -0.125 && lo < 0.0);
        assert!((hi + oracle).abs() < 1e-9);
        assert!(hi > 0.0);
    }

    #[test]
    fn winding_derivative_matches_radius_formula() {
        let path = shear_free_hyperbolic();
        let d = winding_derivative(&path, 0.0).unwrap();
        let oracle = (1.0 / 2.0f64.cosh() - 1.0) / TAU;
        assert!((d - oracle).abs() < 1e-9, "{d} vs {oracle}");
        // rotation system: r = 1 identically, derivative zero
        let d = winding_derivative(&rotation_system(), 1.234).unwrap();
        assert!(d.abs() < 1e-10);
    }

    #[test]
    fn lift_is_consistent_with_matrix_action() {
        // mildly oscillatory system; check M(T) e^{-i w} = r e^{-i th}
        let path = CoeffPath::<f64> {
            period: TAU,
            a: crate::coeff::Coefficient::Trig(crate::coeff::TrigPoly {
                cos: vec![0.5, 0.8],
                sin: vec![0.0, -0.3],
            }),
            b: crate::coeff::Coefficient::Trig(crate::coeff::TrigPoly {
                cos: vec![0.1],
                sin: vec![0.0, 0.4],
            }),
            c: crate::coeff::Coefficient::Trig(crate::coeff::TrigPoly {
                cos: vec![1.1, -0.2],
                sin: vec![],
            }),
        };
        let fp = integrate_fundamental(&path, TAU, 1e-11).unwrap();
        for i in 0..8 {
            let w = PI * i as f64 / 8.0;
            let sol = angle_lift(&path, w, TAU, 1e-11).unwrap();
            let mz = fp.terminal().apply(unit_at(w));
            let pz = [
                sol.radius_end() * sol.theta_end().cos(),
                -sol.radius_end() * sol.theta_end().sin(),
            ];
            let err = ((mz[0] - pz[0]).powi(2) + (mz[1] - pz[1]).powi(2)).sqrt();
            assert!(err < 1e-7, "w = {w}, err = {err}");
        }
    }

    #[test]
    fn angle_translation_rule() {
        // th(t; w + pi j) = th(t; w) + pi j
        let path = shear_free_hyperbolic();
        let base = angle_lift(&path, 0.3, 1.0, 1e-11).unwrap();
        for j in [-2i32, 1, 3] {
            let shifted = angle_lift(&path, 0.3 + PI * j as f64, 1.0, 1e-11).unwrap();
            assert!(
                (shifted.theta_end() - base.theta_end() - PI * j as f64).abs() < 1e-8,
                "j = {j}"
            );
        }
    }

    #[test]
    fn semigroup_property_of_the_angle() {
        // th(t + nT; w) = th(t; th(nT; w)) for periodic coefficients
        let path = CoeffPath::<f64>::constant(0.9, 0.2, 1.3, 1.5);
        let w = 0.8;
        let full = angle_lift(&path, w, 2.0 * 1.5 + 0.7, 1e-11).unwrap();
        let first = angle_lift(&path, w, 2.0 * 1.5, 1e-11).unwrap();
        let cont = angle_lift(&path, first.theta_end(), 0.7, 1e-11).unwrap();
        assert!((full.theta_end() - cont.theta_end()).abs() < 1e-7);
    }
}
