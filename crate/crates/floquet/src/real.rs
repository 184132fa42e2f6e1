use num_traits::float::FloatConst;
use num_traits::{Float, FromPrimitive};

/// Scalar type for all numerical kernels. Implemented for `f32` and `f64`;
/// the accuracy targets in the default tolerances assume `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + core::fmt::Debug + core::fmt::Display + Send + Sync + 'static
{
    /// Lift an `f64` constant into the scalar type.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("constant not representable in this scalar type")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Wrap an angle into `(-pi, pi]`.
pub fn wrap_angle<R: Real>(x: R) -> R {
    let two_pi = R::TAU();
    let mut y = x % two_pi;
    if y <= -R::PI() {
        y = y + two_pi;
    } else if y > R::PI() {
        y = y - two_pi;
    }
    y
}

/// Reduce an angle into `[0, 2*pi)`.
pub fn mod_tau<R: Real>(x: R) -> R {
    let t = x % R::TAU();
    if t < R::zero() {
        t + R::TAU()
    } else {
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrap_angle_range() {
        for i in -40..40 {
            let x = 0.37 * i as f64;
            let w = wrap_angle(x);
            assert!(w > -std::f64::consts::PI && w <= std::f64::consts::PI);
            assert!(((x - w) / std::f64::consts::TAU).round() * std::f64::consts::TAU + w - x < 1e-12);
        }
    }

    #[test]
    fn mod_tau_range() {
        for i in -40..40 {
            let x = 0.37 * i as f64;
            let t = mod_tau(x);
            assert!((0.0..std::f64::consts::TAU).contains(&t));
            let r = (x - t).rem_euclid(std::f64::consts::TAU);
            assert!(r.min(std::f64::consts::TAU - r) < 1e-9);
        }
    }

    #[test]
    fn of_roundtrip() {
        assert_eq!(<f64 as Real>::of(1.5), 1.5);
        assert_eq!(<f32 as Real>::of(0.25), 0.25f32);
    }
}
