//! Hill equations u'' + q(t) u = 0 as planar Hamiltonian systems: T-periodic
//! spectrum of the eigenvalue family u'' + (lambda + q(t)) u = 0 located by
//! rotation-number bisection, and the comparison of Morse, augmented Morse and
//! Conley-Zehnder indices.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coeff::{Coefficient, CoeffPath};
use crate::error::{Error, Result};
use crate::index::{
    cz_index, winding_extrema, WindingExtrema, DEFAULT_GRID_N, DEFAULT_REFINE_TOL,
};
use crate::real::Real;

/// Sweep resolution of the initial lambda window.
pub const SWEEP_SAMPLES: usize = 128;
/// Coincidence threshold under which an eigenvalue pair is flagged double.
pub const DOUBLE_TOL: f64 = 1e-7;
/// Eigenvalues closer to zero than max(tol, this) count as zero eigenvalues;
/// the floor keeps resonant spectra robust against bisection error.
pub const ZERO_COUNT_FLOOR: f64 = 1e-6;
/// Cover count of the rotation enclosures used for the empirical
/// monotonicity check along the sweep.
const SWEEP_ROTATION_K: u32 = 50;

/// A scalar T-periodic potential q(t).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HillProblem<R> {
    #[serde(rename = "T")]
    pub period: R,
    pub q: Coefficient<R>,
}

impl<R: Real> HillProblem<R> {
    pub fn new(period: R, q: Coefficient<R>) -> Result<Self> {
        if !(period > R::zero()) || !period.is_finite() {
            return Err(Error::InvalidConfig("period must be positive and finite".into()));
        }
        Ok(HillProblem { period, q })
    }

    pub fn constant(q0: R, period: R) -> Self {
        HillProblem {
            period,
            q: Coefficient::constant(q0),
        }
    }

    pub fn q_bound(&self) -> R {
        self.q.magnitude_bound()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Eigenvalue<R> {
    pub lambda: R,
    /// True on both members of a coincident pair lambda_{2l-1} = lambda_{2l}.
    pub double: bool,
}

/// T-periodic spectrum lambda_0 < lambda_1 <= lambda_2 < ... together with
/// the three indices of the equation at lambda = 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport<R> {
    pub eigenvalues: Vec<Eigenvalue<R>>,
    #[serde(rename = "m_T")]
    pub morse: i64,
    #[serde(rename = "m_T_plus")]
    pub morse_augmented: i64,
    #[serde(rename = "i_T")]
    pub cz: i64,
}

/// The first-order system of u'' + (lambda + q(t)) u = 0 under u' = v:
/// a(t) = lambda + q(t), b = 0, c = 1.
pub fn hill_to_coeffpath<R: Real>(p: &HillProblem<R>, lambda: R) -> Result<CoeffPath<R>> {
    CoeffPath::new(
        p.period,
        p.q.shifted(lambda),
        Coefficient::zero(),
        Coefficient::constant(R::one()),
    )
}

/// Which end of the rotation plateau {rho = l} a bisection targets: the left
/// edge is the zero of eta_plus - l, the right edge of eta_minus - l.
#[derive(Clone, Copy, PartialEq)]
enum Edge {
    Left,
    Right,
}

fn edge_gap<R: Real>(ext: &WindingExtrema<R>, edge: Edge, level: R) -> R {
    match edge {
        Edge::Left => ext.eta_plus - level,
        Edge::Right => ext.eta_minus - level,
    }
}

struct SpectrumSolver<'a, R> {
    problem: &'a HillProblem<R>,
    tol: R,
}

impl<'a, R: Real> SpectrumSolver<'a, R> {
    fn extrema(&self, lambda: R) -> Result<WindingExtrema<R>> {
        let path = hill_to_coeffpath(self.problem, lambda)?;
        winding_extrema(&path, DEFAULT_GRID_N, R::of(DEFAULT_REFINE_TOL))
    }

    /// Locate one plateau edge inside a sweep bracket by bisection on the
    /// sign of the monotone edge gap, then re-verify the trichotomy on both
    /// sides of the root.
    fn solve_edge(&self, edge: Edge, level: i64, xs: &[R], gaps: &[R]) -> Result<R> {
        let first_right = gaps.iter().position(|&g| g >= R::zero());
        let Some(i) = first_right else {
            return Err(Error::BracketNotFound { level });
        };
        if i == 0 {
            return Err(Error::BracketNotFound { level });
        }
        let level_r = R::of(level as f64);
        let (mut lo, mut hi) = (xs[i - 1], xs[i]);
        for _ in 0..128 {
            if hi - lo <= self.tol {
                break;
            }
            let mid = (lo + hi) * R::of(0.5);
            if edge_gap(&self.extrema(mid)?, edge, level_r) < R::zero() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let root = (lo + hi) * R::of(0.5);
        // checked hypothesis: strictly left of the root the level is not yet
        // reached, strictly right it is reached or passed
        let off = self.tol * R::of(100.0);
        let before = edge_gap(&self.extrema(root - off)?, edge, level_r);
        let after = edge_gap(&self.extrema(root + off)?, edge, level_r);
        if before >= R::of(1e-9) || after <= -R::of(1e-9) {
            return Err(Error::MonotonicityViolated {
                lambda: root.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(root)
    }
}

/// T-periodic eigenvalues lambda_0 .. lambda_{2 n_max} of the family
/// u'' + (lambda + q) u = 0, found by bisecting the winding-number extrema
/// across integer levels inside a crude spectral enclosure, with the
/// rotation-number monotonicity in lambda checked along the initial sweep.
pub fn periodic_eigenvalues<R: Real>(
    p: &HillProblem<R>,
    n_max: u32,
    tol: R,
) -> Result<SpectrumReport<R>> {
    if !(tol > R::zero()) || !tol.is_finite() {
        return Err(Error::InvalidConfig("bisection tolerance must be positive".into()));
    }
    let q_bound = p.q_bound();
    let lo = -q_bound - R::one();
    let top_rate = R::TAU() * R::of((n_max + 1) as f64) / p.period;
    let hi = top_rate * top_rate + q_bound + R::one();
    let n = SWEEP_SAMPLES;
    let xs: Vec<R> = (0..n)
        .map(|i| lo + (hi - lo) * R::of(i as f64) / R::of((n - 1) as f64))
        .collect();

    let solver = SpectrumSolver { problem: p, tol };
    let exts: Vec<WindingExtrema<R>> = xs
        .par_iter()
        .map(|&lambda| solver.extrema(lambda))
        .collect::<Result<_>>()?;

    // empirical monotonicity of the rotation number along the sweep
    let mids: Vec<R> = xs
        .par_iter()
        .map(|&lambda| {
            let path = hill_to_coeffpath(p, lambda)?;
            Ok(crate::index::rotation_number(&path, SWEEP_ROTATION_K)?.midpoint())
        })
        .collect::<Result<_>>()?;
    let slack = R::of(2.0) / R::of(SWEEP_ROTATION_K as f64) + R::of(1e-9);
    for i in 1..n {
        if mids[i] < mids[i - 1] - slack {
            return Err(Error::MonotonicityViolated {
                lambda: xs[i].to_f64().unwrap_or(f64::NAN),
            });
        }
    }

    // lambda_0 closes the {rho = 0} plateau; each level l >= 1 contributes
    // the pair of edges of the {rho = l} plateau
    let mut jobs: Vec<(Edge, i64)> = vec![(Edge::Right, 0)];
    for level in 1..=n_max as i64 {
        jobs.push((Edge::Left, level));
        jobs.push((Edge::Right, level));
    }
    let roots: Vec<R> = jobs
        .par_iter()
        .map(|&(edge, level)| {
            let gaps: Vec<R> = exts
                .iter()
                .map(|e| edge_gap(e, edge, R::of(level as f64)))
                .collect();
            solver.solve_edge(edge, level, &xs, &gaps)
        })
        .collect::<Result<_>>()?;

    let mut eigenvalues: Vec<Eigenvalue<R>> = roots
        .iter()
        .map(|&lambda| Eigenvalue { lambda, double: false })
        .collect();
    // collapse coincident pairs (lambda_{2l-1}, lambda_{2l}) onto their
    // midpoint and flag them double
    let double_tol = R::of(DOUBLE_TOL);
    for l in 0..n_max as usize {
        let (i, j) = (2 * l + 1, 2 * l + 2);
        let gap = eigenvalues[j].lambda - eigenvalues[i].lambda;
        if gap.abs() < double_tol {
            let mid = (eigenvalues[i].lambda + eigenvalues[j].lambda) * R::of(0.5);
            eigenvalues[i] = Eigenvalue { lambda: mid, double: true };
            eigenvalues[j] = Eigenvalue { lambda: mid, double: true };
        }
    }
    for w in eigenvalues.windows(2) {
        if w[1].lambda < w[0].lambda {
            return Err(Error::MonotonicityViolated {
                lambda: w[1].lambda.to_f64().unwrap_or(f64::NAN),
            });
        }
    }

    let zero_band = tol.max(R::of(ZERO_COUNT_FLOOR));
    let morse = eigenvalues.iter().filter(|e| e.lambda < -zero_band).count() as i64;
    let morse_augmented = eigenvalues.iter().filter(|e| e.lambda <= zero_band).count() as i64;
    let cz = cz_index(&hill_to_coeffpath(p, R::zero())?)?;
    Ok(SpectrumReport {
        eigenvalues,
        morse,
        morse_augmented,
        cz,
    })
}

/// (m_T, m_T_plus, i_T) of u'' + q u = 0: negative-eigenvalue count,
/// nonpositive-eigenvalue count, and the Conley-Zehnder index, computed from
/// a spectrum extended until it clears zero.
pub fn morse_indices<R: Real>(p: &HillProblem<R>) -> Result<(i64, i64, i64)> {
    let tol = R::of(1e-8);
    let mut n_max = 1u32;
    loop {
        let report = periodic_eigenvalues(p, n_max, tol)?;
        let top = report.eigenvalues.last().expect("spectrum nonempty").lambda;
        if top > tol.max(R::of(ZERO_COUNT_FLOOR)) {
            return Ok((report.morse, report.morse_augmented, report.cz));
        }
        if n_max >= 16 {
            return Err(Error::InsufficientSpectrum);
        }
        n_max *= 2;
    }
}
