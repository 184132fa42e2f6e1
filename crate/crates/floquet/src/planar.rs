//! Nonlinear T-periodic planar Hamiltonian systems J z' = grad_z H(t, z) and
//! their Poincare maps, with the clockwise rotation number of individual
//! trajectories lifted along the flow.

use std::fmt;
use std::sync::Arc;

use crate::coeff::CoeffPath;
use crate::error::{Error, Result};
use crate::flow::clockwise_angle;
use crate::ode::integrate;

/// Default safety ball; trajectories of the catalog systems stay far inside,
/// while the Lotka-Volterra coordinates can legitimately spike to e^40-sized
/// values before returning.
pub const DEFAULT_SAFETY_RADIUS: f64 = 1e60;

/// Behavior of the field far from the origin.
#[derive(Debug, Clone, PartialEq)]
pub enum AtInfinity {
    /// grad H(t, z) = S(t) z + o(|z|) as |z| -> infinity.
    Linear(CoeffPath<f64>),
    /// grad H(t, z) / |z| -> 0 uniformly; the rotation at infinity vanishes.
    Sublinear,
}

type Field = Arc<dyn Fn(f64, [f64; 2]) -> [f64; 2] + Send + Sync>;

/// A nonlinear system z' = J^{-1} grad_z H(t, z) with its linearizations.
///
/// The stored closure returns the right side J^{-1} grad H directly. The
/// origin must be an equilibrium, and when a linearization at zero is
/// supplied it is validated against the field on shrinking circles.
#[derive(Clone)]
pub struct PlanarSystem {
    pub name: String,
    pub period: f64,
    field: Field,
    pub s0: Option<CoeffPath<f64>>,
    pub at_infinity: Option<AtInfinity>,
    pub safety_radius: f64,
}

impl fmt::Debug for PlanarSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PlanarSystem")
            .field("name", &self.name)
            .field("period", &self.period)
            .field("s0", &self.s0.is_some())
            .field("at_infinity", &self.at_infinity)
            .field("safety_radius", &self.safety_radius)
            .finish()
    }
}

impl PlanarSystem {
    pub fn new(
        name: impl Into<String>,
        period: f64,
        field: impl Fn(f64, [f64; 2]) -> [f64; 2] + Send + Sync + 'static,
        s0: Option<CoeffPath<f64>>,
        at_infinity: Option<AtInfinity>,
    ) -> Result<Self> {
        let sys = PlanarSystem {
            name: name.into(),
            period,
            field: Arc::new(field),
            s0,
            at_infinity,
            safety_radius: DEFAULT_SAFETY_RADIUS,
        };
        if !(period > 0.0) || !period.is_finite() {
            return Err(Error::InvalidConfig("period must be positive and finite".into()));
        }
        sys.check_equilibrium()?;
        sys.check_linearization()?;
        Ok(sys)
    }

    pub fn with_safety_radius(mut self, radius: f64) -> Self {
        self.safety_radius = radius;
        self
    }

    /// Evaluate the right side z' = J^{-1} grad_z H(t, z).
    pub fn eval(&self, t: f64, z: [f64; 2]) -> [f64; 2] {
        (self.field)(t, z)
    }

    /// A linear path J z' = S(t) z embedded as a nonlinear system; both
    /// linearizations are the path itself.
    pub fn from_linear(name: impl Into<String>, path: &CoeffPath<f64>) -> Self {
        let p = path.clone();
        let field = move |t: f64, z: [f64; 2]| {
            let s = p.s_matrix(t);
            // J^{-1} S z with J^{-1} = -J
            [
                s.m21 * z[0] + s.m22 * z[1],
                -(s.m11 * z[0] + s.m12 * z[1]),
            ]
        };
        PlanarSystem {
            name: name.into(),
            period: path.period,
            field: Arc::new(field),
            s0: Some(path.clone()),
            at_infinity: Some(AtInfinity::Linear(path.clone())),
            safety_radius: DEFAULT_SAFETY_RADIUS,
        }
    }

    fn check_equilibrium(&self) -> Result<()> {
        for i in 0..32 {
            let t = self.period * i as f64 / 32.0;
            let v = self.eval(t, [0.0, 0.0]);
            if v[0].abs() > 1e-12 || v[1].abs() > 1e-12 {
                return Err(Error::Precondition(format!(
                    "origin is not an equilibrium: |field(t, 0)| = {:.3e} at t = {t}",
                    v[0].hypot(v[1]),
                )));
            }
        }
        Ok(())
    }

    /// Worst relative deviation of the field from the linearization at zero
    /// over a circle of the given radius.
    pub fn linearization_defect(&self, radius: f64) -> Option<f64> {
        let s0 = self.s0.as_ref()?;
        let mut worst: f64 = 0.0;
        for it in 0..8 {
            let t = self.period * it as f64 / 8.0;
            let s = s0.s_matrix(t);
            for ia in 0..16 {
                let ang = std::f64::consts::TAU * ia as f64 / 16.0;
                let z = [radius * ang.cos(), radius * ang.sin()];
                let v = self.eval(t, z);
                let lin = [
                    s.m21 * z[0] + s.m22 * z[1],
                    -(s.m11 * z[0] + s.m12 * z[1]),
                ];
                let d = (v[0] - lin[0]).hypot(v[1] - lin[1]);
                worst = worst.max(d / radius);
            }
        }
        Some(worst)
    }

    fn check_linearization(&self) -> Result<()> {
        let (Some(coarse), Some(fine)) = (
            self.linearization_defect(1e-2),
            self.linearization_defect(1e-5),
        ) else {
            return Ok(());
        };
        // a smooth o(|z|) remainder scales at least linearly with the radius
        if fine > (coarse * 0.1).max(1e-9) {
            return Err(Error::Precondition(format!(
                "field does not match the declared linearization at zero: \
                 relative defect {fine:.3e} at radius 1e-5 vs {coarse:.3e} at 1e-2"
            )));
        }
        Ok(())
    }
}

/// Trajectory of one initial point over [0, kT]: uniform samples, the lifted
/// clockwise winding (None for the equilibrium), and the terminal point.
#[derive(Debug, Clone)]
pub struct OrbitTrace {
    pub times: Vec<f64>,
    pub points: Vec<[f64; 2]>,
    pub rot: Option<f64>,
    pub z_end: [f64; 2],
}

/// Integrate one trajectory of the system over [0, kT], lifting the
/// clockwise polar angle along the flow.
pub fn integrate_orbit(
    sys: &PlanarSystem,
    k: u32,
    z0: [f64; 2],
    tol: f64,
    samples: usize,
) -> Result<OrbitTrace> {
    if k == 0 {
        return Err(Error::InvalidConfig("cover count k must be positive".into()));
    }
    let horizon = sys.period * k as f64;
    let n = samples.max(2);
    let times: Vec<f64> = (0..n).map(|i| horizon * i as f64 / (n - 1) as f64).collect();

    if z0[0] == 0.0 && z0[1] == 0.0 {
        // the origin is a checked equilibrium; its angle is undefined
        return Ok(OrbitTrace {
            points: vec![[0.0, 0.0]; n],
            times,
            rot: None,
            z_end: [0.0, 0.0],
        });
    }

    let theta0 = clockwise_angle(z0);
    let f = |t: f64, y: &[f64; 3]| {
        let z = [y[0], y[1]];
        let v = sys.eval(t, z);
        let r2 = z[0] * z[0] + z[1] * z[1];
        [v[0], v[1], (z[1] * v[0] - z[0] * v[1]) / r2]
    };
    let sol = integrate(f, 0.0, horizon, [z0[0], z0[1], theta0], tol)?;

    let radius_at = |t: f64| {
        let y = sol.eval(t);
        y[0].hypot(y[1])
    };
    let mut checks = sol.nodes();
    for pair in sol.nodes().windows(2) {
        checks.push((pair[0] + pair[1]) * 0.5);
    }
    for t in checks {
        let r = radius_at(t);
        if !r.is_finite() || r > sys.safety_radius {
            return Err(Error::BlowUp { radius: r });
        }
    }

    let points: Vec<[f64; 2]> = times
        .iter()
        .map(|&t| {
            let y = sol.eval(t);
            [y[0], y[1]]
        })
        .collect();
    let y_end = sol.y_end();
    Ok(OrbitTrace {
        times,
        points,
        rot: Some((y_end[2] - theta0) / std::f64::consts::TAU),
        z_end: [y_end[0], y_end[1]],
    })
}

/// Poincare map of the k-fold period cover: terminal point and the lifted
/// clockwise rotation number Rot_k (None for the equilibrium).
pub fn poincare_map(
    sys: &PlanarSystem,
    k: u32,
    z0: [f64; 2],
    tol: f64,
) -> Result<([f64; 2], Option<f64>)> {
    let trace = integrate_orbit(sys, k, z0, tol, 2)?;
    Ok((trace.z_end, trace.rot))
}

/// Signed area of a polygon by the shoelace rule.
pub fn polygon_area(points: &[[f64; 2]]) -> f64 {
    let n = points.len();
    if n < 3 {
        return 0.0;
    }
    let mut acc = 0.0;
    for i in 0..n {
        let p = points[i];
        let q = points[(i + 1) % n];
        acc += p[0] * q[1] - q[0] * p[1];
    }
    acc * 0.5
}

/// Image of a polygon's vertices under the Poincare map of the k-fold cover.
pub fn polygon_image(
    sys: &PlanarSystem,
    k: u32,
    points: &[[f64; 2]],
    tol: f64,
) -> Result<Vec<[f64; 2]>> {
    points
        .iter()
        .map(|&z| Ok(poincare_map(sys, k, z, tol)?.0))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::CoeffPath;
    use std::f64::consts::{PI, TAU};

    fn rotation_system() -> PlanarSystem {
        PlanarSystem::from_linear("rotation", &CoeffPath::constant(1.0, 0.0, 1.0, TAU))
    }

    #[test]
    fn origin_must_be_an_equilibrium() {
        let r = PlanarSystem::new(
            "broken",
            1.0,
            |_t, _z| [1.0, 0.0],
            None,
            None,
        );
        assert!(matches!(r, Err(Error::Precondition(_))));
    }

    #[test]
    fn wrong_linearization_rejected() {
        // field is linear with S = I but claims S = 2I
        let claim = CoeffPath::constant(2.0, 0.0, 2.0, TAU);
        let r = PlanarSystem::new(
            "mismatch",
            TAU,
            |_t, z| [z[1], -z[0]],
            Some(claim),
            None,
        );
        assert!(matches!(r, Err(Error::Precondition(_))));
    }

    #[test]
    fn linear_embedding_rotates_clockwise() {
        // S = I: z' = (z2, -z1), clockwise; after a quarter period the point
        // (1, 0) moves to (0, -1)
        let sys = rotation_system();
        let trace = integrate_orbit(&sys, 1, [1.0, 0.0], 1e-10, 5).unwrap();
        assert!((trace.z_end[0] - 1.0).abs() < 1e-8);
        assert!(trace.z_end[1].abs() < 1e-8);
        let quarter = trace.points[1];
        assert!((quarter[0]).abs() < 1e-6 && (quarter[1] + 1.0).abs() < 1e-6);
        assert!((trace.rot.unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn equilibrium_has_no_rotation() {
        let (z, rot) = poincare_map(&rotation_system(), 3, [0.0, 0.0], 1e-10).unwrap();
        assert_eq!(z, [0.0, 0.0]);
        assert!(rot.is_none());
    }

    #[test]
    fn linear_rotation_matches_winding_for_any_radius() {
        let sys = rotation_system();
        for r in [1e-3, 1.0, 1e3] {
            let (_, rot) = poincare_map(&sys, 2, [r, 0.0], 1e-10).unwrap();
            assert!((rot.unwrap() - 2.0).abs() < 1e-8, "radius {r}");
        }
    }

    #[test]
    fn safety_ball_triggers_blowup() {
        let sys = PlanarSystem::new(
            "unstable",
            1.0,
            |_t, z| [z[0], -z[1]],
            None,
            None,
        )
        .unwrap()
        .with_safety_radius(10.0);
        // e^t growth passes radius 10 before t = 3
        let r = integrate_orbit(&sys, 3, [1.0, 0.0], 1e-10, 4);
        assert!(matches!(r, Err(Error::BlowUp { .. })));
    }

    #[test]
    fn area_preserved_by_linear_shear_flow() {
        let path = CoeffPath::constant(0.0, 0.0, 1.0, 1.0);
        let sys = PlanarSystem::from_linear("shear", &path);
        let quad = [
            [1.0, 1.0],
            [1.01, 1.0],
            [1.01, 1.01],
            [1.0, 1.01],
        ];
        let image = polygon_image(&sys, 1, &quad, 1e-12).unwrap();
        let a0 = polygon_area(&quad);
        let a1 = polygon_area(&image);
        assert!(((a1 - a0) / a0).abs() < 1e-9);
    }

    #[test]
    fn polygon_area_of_unit_square() {
        let square = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        assert!((polygon_area(&square) - 1.0).abs() < 1e-15);
    }
}
