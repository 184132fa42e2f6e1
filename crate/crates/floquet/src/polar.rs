//! Polar coordinates on the symplectic group and the Krein rotation function.
//!
//! Every symplectic 2x2 matrix factors uniquely as M = P * O with P symmetric
//! positive definite of determinant one and O a rotation. The chart
//! (tau, sigma, theta) parameterizes P through its eigenvalue gap e^{+-tau}
//! and axis angle sigma, and O through its angle theta.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mat2::{Mat2, MultiplierClass};
use crate::real::Real;

/// Magnitude below which the Krein form counts as degenerate.
pub const KREIN_TOL: f64 = 1e-10;

/// Chart coordinates of a symplectic matrix: M = P(tau, sigma) * O(theta).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarCoords<R> {
    /// Hyperbolic stretch, >= 0; the positive factor has eigenvalues e^{+-tau}.
    pub tau: R,
    /// Axis angle of the positive factor, canonicalized to 0 when tau = 0.
    pub sigma: R,
    /// Rotation angle of the orthogonal factor, in (-pi, pi].
    pub theta: R,
}

/// Determinant-one symmetric positive factor:
/// [[cosh t + sinh t cos s, sinh t sin s], [sinh t sin s, cosh t - sinh t cos s]].
pub fn positive_factor<R: Real>(tau: R, sigma: R) -> Mat2<R> {
    let (ch, sh) = (tau.cosh(), tau.sinh());
    let (ss, cs) = sigma.sin_cos();
    Mat2::new(ch + sh * cs, sh * ss, sh * ss, ch - sh * cs)
}

/// Full chart map: P(tau, sigma) * O(theta).
pub fn covering<R: Real>(tau: R, sigma: R, theta: R) -> Mat2<R> {
    positive_factor(tau, sigma).mul(&Mat2::rotation(theta))
}

impl<R: Real> PolarCoords<R> {
    pub fn to_matrix(&self) -> Mat2<R> {
        covering(self.tau, self.sigma, self.theta)
    }
}

/// Decompose a symplectic matrix into its polar chart coordinates.
///
/// The positive factor is the closed-form square root of M M^T; for a 2x2
/// matrix with unit determinant, sqrt(G) = (G + I)/sqrt(tr G + 2).
pub fn polar_decompose<R: Real>(m: &Mat2<R>) -> Result<PolarCoords<R>> {
    let residual = m.symplectic_residual();
    if residual > R::of(crate::mat2::SYMPLECTIC_TOL) {
        return Err(Error::NotSymplectic {
            residual: residual.to_f64().unwrap_or(f64::NAN),
        });
    }
    let g = m.mul(&m.transpose());
    let norm = (g.trace() + R::of(2.0)).sqrt();
    let p = g.add(&Mat2::identity()).scale(R::one() / norm);

    // cosh tau = tr P / 2; sinh tau (cos sigma, sin sigma) = ((p11 - p22)/2, p12)
    let ch = (p.trace() / R::of(2.0)).max(R::one());
    let tau = (ch + (ch * ch - R::one()).sqrt()).ln();
    let vx = (p.m11 - p.m22) / R::of(2.0);
    let vy = p.m12;
    let sigma = if (vx * vx + vy * vy).sqrt() < R::of(1e-14) * (R::one() + p.trace()) {
        R::zero()
    } else {
        vy.atan2(vx)
    };

    // O = P^{-1} M with P^{-1} the adjugate (det P = 1)
    let p_inv = Mat2::new(p.m22, -p.m12, -p.m21, p.m11);
    let o = p_inv.mul(m);
    let mut theta = o.m21.atan2(o.m11);
    if theta <= -R::PI() {
        theta = R::PI();
    }
    Ok(PolarCoords { tau, sigma, theta })
}

/// Krein-selected normalized eigenvalue of a symplectic matrix.
///
/// Returns +1 when both multipliers are positive real, -1 when both are
/// negative real; for an elliptic matrix, returns mu/|mu| for the eigenvalue
/// whose eigenvector zeta satisfies <i J zeta, zeta> > 0. The form evaluates
/// to -2 Im(zeta_1 conj(zeta_2)) on a planar vector, and degenerates only as
/// the matrix approaches the parabolic boundary.
pub fn rotation_function<R: Real>(m: &Mat2<R>) -> Result<Complex<R>> {
    let pair = m.multipliers()?;
    match pair.class {
        MultiplierClass::Hyperbolic => Ok(Complex::new(pair.mu1.re.signum(), R::zero())),
        MultiplierClass::ParabolicPlus => Ok(Complex::new(R::one(), R::zero())),
        MultiplierClass::ParabolicMinus => Ok(Complex::new(-R::one(), R::zero())),
        MultiplierClass::Elliptic => {
            let kappa1 = krein_form(m, pair.mu1);
            let kappa2 = krein_form(m, pair.mu2);
            let mag = kappa1.abs().max(kappa2.abs());
            if mag < R::of(KREIN_TOL) {
                return Err(Error::DegenerateKrein {
                    magnitude: mag.to_f64().unwrap_or(f64::NAN),
                });
            }
            let mu = if kappa1 > R::zero() { pair.mu1 } else { pair.mu2 };
            Ok(mu / Complex::new(mu.norm(), R::zero()))
        }
    }
}

/// <i J zeta, zeta> for the unit eigenvector of `mu`, computed in closed form
/// from the characteristic system (no iterative eigensolver).
fn krein_form<R: Real>(m: &Mat2<R>, mu: Complex<R>) -> R {
    // (M - mu I) zeta = 0 with nonreal mu: first row gives zeta = (m12, mu - m11)
    let z1 = Complex::new(m.m12, R::zero());
    let z2 = mu - Complex::new(m.m11, R::zero());
    let n2 = z1.norm_sqr() + z2.norm_sqr();
    // <i J zeta, zeta> = -2 Im(zeta1 * conj(zeta2)), normalized to a unit vector
    -R::of(2.0) * (z1 * z2.conj()).im / n2
}
