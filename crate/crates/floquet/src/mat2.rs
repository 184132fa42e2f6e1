//! Real 2x2 matrices and the spectral trichotomy of symplectic ones.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::Real;

/// Relative half-width of the resonance band around trace = +-2.
pub const RESONANCE_BAND: f64 = 1e-9;
/// Acceptable departure of a monodromy matrix from det = 1.
pub const SYMPLECTIC_TOL: f64 = 1e-6;

/// Row-major 2x2 real matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mat2<R> {
    pub m11: R,
    pub m12: R,
    pub m21: R,
    pub m22: R,
}

impl<R: Real> Mat2<R> {
    pub fn new(m11: R, m12: R, m21: R, m22: R) -> Self {
        Mat2 { m11, m12, m21, m22 }
    }

    pub fn identity() -> Self {
        Mat2::new(R::one(), R::zero(), R::zero(), R::one())
    }

    /// The standard symplectic structure [[0, -1], [1, 0]].
    pub fn j() -> Self {
        Mat2::new(R::zero(), -R::one(), R::one(), R::zero())
    }

    pub fn diagonal(d1: R, d2: R) -> Self {
        Mat2::new(d1, R::zero(), R::zero(), d2)
    }

    /// Counterclockwise rotation by `angle`: [[cos, -sin], [sin, cos]].
    pub fn rotation(angle: R) -> Self {
        let (s, c) = angle.sin_cos();
        Mat2::new(c, -s, s, c)
    }

    pub fn det(&self) -> R {
        self.m11 * self.m22 - self.m12 * self.m21
    }

    pub fn trace(&self) -> R {
        self.m11 + self.m22
    }

    pub fn transpose(&self) -> Self {
        Mat2::new(self.m11, self.m21, self.m12, self.m22)
    }

    pub fn mul(&self, o: &Self) -> Self {
        Mat2::new(
            self.m11 * o.m11 + self.m12 * o.m21,
            self.m11 * o.m12 + self.m12 * o.m22,
            self.m21 * o.m11 + self.m22 * o.m21,
            self.m21 * o.m12 + self.m22 * o.m22,
        )
    }

    pub fn apply(&self, v: [R; 2]) -> [R; 2] {
        [
            self.m11 * v[0] + self.m12 * v[1],
            self.m21 * v[0] + self.m22 * v[1],
        ]
    }

    pub fn scale(&self, s: R) -> Self {
        Mat2::new(self.m11 * s, self.m12 * s, self.m21 * s, self.m22 * s)
    }

    pub fn add(&self, o: &Self) -> Self {
        Mat2::new(
            self.m11 + o.m11,
            self.m12 + o.m12,
            self.m21 + o.m21,
            self.m22 + o.m22,
        )
    }

    pub fn sub(&self, o: &Self) -> Self {
        Mat2::new(
            self.m11 - o.m11,
            self.m12 - o.m12,
            self.m21 - o.m21,
            self.m22 - o.m22,
        )
    }

    /// k-th matrix power by repeated multiplication.
    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Mat2::identity();
        let mut base = *self;
        let mut n = k;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            n >>= 1;
        }
        acc
    }

    pub fn max_abs(&self) -> R {
        self.m11
            .abs()
            .max(self.m12.abs())
            .max(self.m21.abs())
            .max(self.m22.abs())
    }

    /// |det M - 1|: distance from the symplectic group along the determinant.
    pub fn symplectic_residual(&self) -> R {
        (self.det() - R::one()).abs()
    }

    fn ensure_symplectic(&self) -> Result<()> {
        let r = self.symplectic_residual();
        if r > R::of(SYMPLECTIC_TOL) {
            return Err(Error::NotSymplectic {
                residual: r.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(())
    }

    /// Floquet multipliers (roots of mu^2 - tr*mu + 1) with the trichotomy class.
    ///
    /// Trace values within the relative resonance band of +-2 are snapped to the
    /// parabolic classes. For hyperbolic pairs the large multiplier comes first;
    /// for elliptic pairs the one with positive imaginary part.
    pub fn multipliers(&self) -> Result<MultiplierPair<R>> {
        self.ensure_symplectic()?;
        let tr = self.trace();
        let band = R::of(RESONANCE_BAND) * (R::one() + tr.abs());
        let two = R::of(2.0);
        let one = Complex::new(R::one(), R::zero());
        if (tr - two).abs() < band {
            return Ok(MultiplierPair {
                mu1: one,
                mu2: one,
                class: MultiplierClass::ParabolicPlus,
            });
        }
        if (tr + two).abs() < band {
            return Ok(MultiplierPair {
                mu1: -one,
                mu2: -one,
                class: MultiplierClass::ParabolicMinus,
            });
        }
        if tr.abs() < two {
            let im = (R::of(4.0) - tr * tr).sqrt() / two;
            let re = tr / two;
            Ok(MultiplierPair {
                mu1: Complex::new(re, im),
                mu2: Complex::new(re, -im),
                class: MultiplierClass::Elliptic,
            })
        } else {
            // real pair; compute the large root first and its inverse stably
            let disc = (tr * tr - R::of(4.0)).sqrt();
            let big = (tr.abs() + disc) / two * tr.signum();
            Ok(MultiplierPair {
                mu1: Complex::new(big, R::zero()),
                mu2: Complex::new(R::one() / big, R::zero()),
                class: MultiplierClass::Hyperbolic,
            })
        }
    }

    /// Sign stratum of det(I - M) with a tolerance band around zero.
    ///
    /// `Minus` holds exactly when both multipliers are positive real and != 1,
    /// `Zero` when both equal 1, `Plus` otherwise (negative real or elliptic);
    /// for symplectic M the determinant satisfies det(I - M) = 2 - tr M.
    pub fn lambda_stratum(&self) -> Result<LambdaStratum> {
        self.ensure_symplectic()?;
        let d = Mat2::identity().sub(self).det();
        let band = R::of(RESONANCE_BAND) * (R::one() + self.trace().abs());
        if d.abs() < band {
            Ok(LambdaStratum::Zero)
        } else if d < R::zero() {
            Ok(LambdaStratum::Minus)
        } else {
            Ok(LambdaStratum::Plus)
        }
    }
}

/// Floquet multiplier pair of a symplectic matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultiplierPair<R> {
    pub mu1: Complex<R>,
    pub mu2: Complex<R>,
    pub class: MultiplierClass,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MultiplierClass {
    /// Real pair off the unit circle (trace magnitude above 2).
    Hyperbolic,
    /// Double multiplier +1.
    ParabolicPlus,
    /// Double multiplier -1.
    ParabolicMinus,
    /// Unit-circle pair off +-1.
    Elliptic,
}

/// Stratum of the symplectic group by the sign of det(I - M).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LambdaStratum {
    Minus,
    Zero,
    Plus,
}
