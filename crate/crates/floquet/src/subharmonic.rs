//! Subharmonic orbits of nonlinear planar Hamiltonian systems via the twist
//! mechanism: enumeration of admissible (order, winding) pairs from the
//! rotation gap between zero and infinity, certification of twist radii on
//! the Poincare map, and location of kT-periodic orbits by damped Newton
//! polishing of fixed points.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::clockwise_angle;
use crate::index::RotationInterval;
use crate::planar::{integrate_orbit, poincare_map, PlanarSystem};
use crate::real::mod_tau;

/// Integration tolerance of the nonlinear certification runs.
pub const NONLINEAR_TOL: f64 = 1e-9;
/// Twist margin: circle rotation numbers must clear the target level by at
/// least ten times the integration tolerance.
pub const TWIST_MARGIN: f64 = 10.0 * NONLINEAR_TOL;
/// Margin under 1 required by the sublinear-rotation check.
pub const HSUB_MARGIN: f64 = 1e-3;
/// Annulus seeding for the orbit search.
pub const SEED_RADII: usize = 32;
pub const SEED_ANGLES: usize = 64;
/// Seeds kept for Newton polishing after the residual pre-filter.
const POLISH_POOL: usize = 96;
const NEWTON_MAX_ITERS: usize = 50;
/// Fixed points closer than this merge into one.
const DEDUP_TOL: f64 = 1e-6;
/// Orbits whose sample paths stay closer than this under the best time shift
/// by a period multiple are the same subharmonic.
const SHIFT_SEPARATION: f64 = 1e-4;
/// Trajectory samples per base period used for shift comparison and output.
const SAMPLES_PER_PERIOD: usize = 16;

/// An admissible subharmonic order/winding pair, with its certificates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubharmonicCandidate {
    pub k: u32,
    pub j: i64,
    /// gcd(k, |j|) = 1, so located orbits have minimal period kT.
    pub coprime: bool,
    /// j/k lies strictly inside the inner gap between the two rotation
    /// intervals.
    pub nodal_certified: bool,
}

/// Candidate counts per order from a horizon scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateCount {
    pub k: u32,
    pub count: usize,
    /// Euler-phi reference count phi(floor(k * gap width)), reported when the
    /// rotation data pins it down (point intervals with an integer endpoint);
    /// the enumerated count is the source of truth.
    pub phi_reference: Option<u64>,
}

/// Result of scanning orders 1..=horizon for admissible candidates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KStarReport {
    /// Smallest order from which every order up to the horizon admits a
    /// candidate. Verified by enumeration up to the horizon only.
    pub k_star: u32,
    pub horizon: u32,
    pub per_k: Vec<CandidateCount>,
}

/// A located kT-periodic orbit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitResult {
    pub z0: [f64; 2],
    /// |Phi_kT(z0) - z0| at the accepted point.
    pub residual: f64,
    pub winding: i64,
    pub minimal_period: bool,
    pub times: Vec<f64>,
    pub samples: Vec<[f64; 2]>,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn euler_phi(n: u64) -> u64 {
    let mut result = n;
    let mut m = n;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            while m % p == 0 {
                m /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if m > 1 {
        result -= result / m;
    }
    result
}

/// The open gap between two disjoint rotation enclosures, oriented low to
/// high; overlapping or touching enclosures certify nothing.
fn certified_gap(rho0: &RotationInterval<f64>, rhoinf: &RotationInterval<f64>) -> Result<(f64, f64)> {
    if rho0.hi < rhoinf.lo {
        Ok((rho0.hi, rhoinf.lo))
    } else if rhoinf.hi < rho0.lo {
        Ok((rhoinf.hi, rho0.lo))
    } else {
        Err(Error::GapUncertified)
    }
}

/// All windings j != 0 coprime with k such that j/k lies strictly inside the
/// inner gap between the rotation enclosures at zero and at infinity.
pub fn candidates(
    rho0: &RotationInterval<f64>,
    rhoinf: &RotationInterval<f64>,
    k: u32,
) -> Result<Vec<SubharmonicCandidate>> {
    if k == 0 {
        return Err(Error::InvalidConfig("order k must be positive".into()));
    }
    let (lo, hi) = certified_gap(rho0, rhoinf)?;
    let kf = k as f64;
    let j_min = (kf * lo).floor() as i64 - 1;
    let j_max = (kf * hi).ceil() as i64 + 1;
    let mut out = Vec::new();
    for j in j_min..=j_max {
        if j == 0 {
            continue;
        }
        let ratio = j as f64 / kf;
        if !(ratio > lo && ratio < hi) {
            continue;
        }
        if gcd(k as u64, j.unsigned_abs()) != 1 {
            continue;
        }
        out.push(SubharmonicCandidate {
            k,
            j,
            coprime: true,
            nodal_certified: true,
        });
    }
    Ok(out)
}

/// Scan orders 1..=horizon: per-order candidate counts and the smallest
/// order k* from which every scanned order admits a candidate.
pub fn k_star_scan(
    rho0: &RotationInterval<f64>,
    rhoinf: &RotationInterval<f64>,
    horizon: u32,
) -> Result<KStarReport> {
    if horizon == 0 {
        return Err(Error::InvalidConfig("scan horizon must be positive".into()));
    }
    let (lo, hi) = certified_gap(rho0, rhoinf)?;
    // the Euler-phi reference applies when the gap hangs off an integer
    // rotation number at one end
    let phi_anchor = if rho0.is_point() && rhoinf.is_point() {
        let (near, far) = if rhoinf.lo < rho0.lo {
            (rhoinf.lo, rho0.lo)
        } else {
            (rho0.lo, rhoinf.lo)
        };
        let _ = far;
        (near.round() - near).abs() < 1e-12
    } else {
        false
    };
    let mut per_k = Vec::with_capacity(horizon as usize);
    for k in 1..=horizon {
        let count = candidates(rho0, rhoinf, k)?.len();
        let phi_reference = if phi_anchor {
            let width = (hi - lo) * k as f64;
            let floor = width.floor() as i64;
            (floor >= 1).then(|| euler_phi(floor as u64))
        } else {
            None
        };
        per_k.push(CandidateCount {
            k,
            count,
            phi_reference,
        });
    }
    // longest all-nonempty suffix of the scan
    let mut k_star = None;
    for entry in per_k.iter().rev() {
        if entry.count == 0 {
            break;
        }
        k_star = Some(entry.k);
    }
    let Some(k_star) = k_star else {
        return Err(Error::NoneWithinHorizon);
    };
    Ok(KStarReport {
        k_star,
        horizon,
        per_k,
    })
}

/// Rotation numbers of the k-fold Poincare map on a circle of the given
/// radius; rung failures (blow-up, step underflow) are reported as errors.
fn circle_rotations(
    sys: &PlanarSystem,
    k: u32,
    radius: f64,
    grid_m: usize,
    tol: f64,
) -> Result<Vec<f64>> {
    (0..grid_m)
        .into_par_iter()
        .map(|i| {
            let ang = std::f64::consts::TAU * i as f64 / grid_m as f64;
            let z0 = [radius * ang.cos(), radius * ang.sin()];
            let (_, rot) = poincare_map(sys, k, z0, tol)?;
            rot.ok_or_else(|| Error::Precondition("rotation undefined at the origin".into()))
        })
        .collect()
}

#[derive(Clone, Copy, PartialEq)]
enum TwistSide {
    Above,
    Below,
}

fn twist_side(rots: &[f64], level: f64) -> Option<TwistSide> {
    let min = rots.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = rots.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if min - level >= TWIST_MARGIN {
        Some(TwistSide::Above)
    } else if level - max >= TWIST_MARGIN {
        Some(TwistSide::Below)
    } else {
        None
    }
}

/// Search the inner radius ladder 1e-1 .. 1e-8 and the outer ladder
/// 1e1 .. 1e8 for circles on which the k-fold rotation number clears the
/// level j strictly, with opposite signs inside and outside. Rungs that blow
/// up or exhaust the integrator are skipped.
pub fn twist_radii(
    sys: &PlanarSystem,
    k: u32,
    j: i64,
    grid_m: usize,
) -> Result<(f64, f64)> {
    if k == 0 || grid_m < 4 {
        return Err(Error::InvalidConfig(
            "twist check needs k >= 1 and at least 4 circle points".into(),
        ));
    }
    let level = j as f64;
    let mut inner = None;
    for e in 1..=8 {
        let r = 10f64.powi(-e);
        match circle_rotations(sys, k, r, grid_m, NONLINEAR_TOL) {
            Ok(rots) => {
                if let Some(side) = twist_side(&rots, level) {
                    inner = Some((r, side));
                    break;
                }
            }
            Err(Error::BlowUp { .. }) | Err(Error::ToleranceNotMet(_)) => continue,
            Err(err) => return Err(err),
        }
    }
    let Some((r_hat, inner_side)) = inner else {
        return Err(Error::TwistNotFound(format!(
            "no inner circle down to 1e-8 clears winding level {j} for k = {k}"
        )));
    };
    for e in 1..=8 {
        let r = 10f64.powi(e);
        match circle_rotations(sys, k, r, grid_m, NONLINEAR_TOL) {
            Ok(rots) => {
                if let Some(side) = twist_side(&rots, level) {
                    if side != inner_side {
                        return Ok((r_hat, r));
                    }
                }
            }
            Err(Error::BlowUp { .. }) | Err(Error::ToleranceNotMet(_)) => continue,
            Err(err) => return Err(err),
        }
    }
    Err(Error::TwistNotFound(format!(
        "no outer circle up to 1e8 reverses the twist at winding level {j} for k = {k}"
    )))
}

/// True iff |Rot_k| stays below 1 with margin on the circle of the given
/// radius.
pub fn verify_hsub(sys: &PlanarSystem, k: u32, radius: f64, grid_m: usize) -> Result<bool> {
    if k == 0 || grid_m < 4 || !(radius > 0.0) {
        return Err(Error::InvalidConfig(
            "sublinear check needs k >= 1, a positive radius and >= 4 points".into(),
        ));
    }
    let rots = circle_rotations(sys, k, radius, grid_m, NONLINEAR_TOL)?;
    let worst = rots.iter().fold(0.0f64, |acc, r| acc.max(r.abs()));
    Ok(worst < 1.0 - HSUB_MARGIN)
}

fn fixed_point_gap(sys: &PlanarSystem, k: u32, z: [f64; 2], tol: f64) -> Result<[f64; 2]> {
    let (zk, _) = poincare_map(sys, k, z, tol)?;
    Ok([zk[0] - z[0], zk[1] - z[1]])
}

fn norm(v: [f64; 2]) -> f64 {
    v[0].hypot(v[1])
}

/// Damped Newton iteration on Phi_kT(z) - z = 0 with a finite-difference
/// Jacobian; integration failures and stalls discard the seed.
fn polish_seed(sys: &PlanarSystem, k: u32, seed: [f64; 2], tol: f64) -> Option<([f64; 2], f64)> {
    let mut z = seed;
    let mut g = fixed_point_gap(sys, k, z, tol).ok()?;
    for _ in 0..NEWTON_MAX_ITERS {
        let res = norm(g);
        if res <= tol * 0.5 {
            return Some((z, res));
        }
        let h = 1e-6 * (1.0 + norm(z));
        let gx = fixed_point_gap(sys, k, [z[0] + h, z[1]], tol).ok()?;
        let gy = fixed_point_gap(sys, k, [z[0], z[1] + h], tol).ok()?;
        let j11 = (gx[0] - g[0]) / h;
        let j21 = (gx[1] - g[1]) / h;
        let j12 = (gy[0] - g[0]) / h;
        let j22 = (gy[1] - g[1]) / h;
        let det = j11 * j22 - j12 * j21;
        if det.abs() < 1e-14 * (1.0 + j11.abs() + j12.abs() + j21.abs() + j22.abs()) {
            return None;
        }
        let dx = -(j22 * g[0] - j12 * g[1]) / det;
        let dy = -(-j21 * g[0] + j11 * g[1]) / det;
        let mut improved = false;
        let mut scale = 1.0;
        for _ in 0..8 {
            let z_try = [z[0] + scale * dx, z[1] + scale * dy];
            if let Ok(g_try) = fixed_point_gap(sys, k, z_try, tol) {
                if norm(g_try) < res {
                    z = z_try;
                    g = g_try;
                    improved = true;
                    break;
                }
            }
            scale *= 0.5;
        }
        if !improved {
            return None;
        }
    }
    None
}

/// Best sup-distance between two sampled orbits over all time shifts by
/// multiples of the base period.
fn shifted_separation(a: &OrbitResult, b: &OrbitResult, k: u32) -> f64 {
    let per = SAMPLES_PER_PERIOD;
    let n = per * k as usize;
    let mut best = f64::INFINITY;
    for l in 0..k as usize {
        let mut worst: f64 = 0.0;
        for i in 0..n {
            let p = a.samples[i];
            let q = b.samples[(i + l * per) % n];
            worst = worst.max((p[0] - q[0]).hypot(p[1] - q[1]));
        }
        best = best.min(worst);
    }
    best
}

/// Locate kT-periodic orbits with winding j inside the twist annulus
/// [r_hat, r_check]: seed a polar grid, pre-filter by fixed-point residual,
/// polish by damped Newton, validate winding and minimality, and merge
/// duplicates and time-shifted copies. Deterministic output order: radius,
/// then angle.
pub fn find_orbits(
    sys: &PlanarSystem,
    k: u32,
    j: i64,
    r_hat: f64,
    r_check: f64,
    tol: f64,
) -> Result<Vec<OrbitResult>> {
    if k == 0 || !(r_hat > 0.0) || !(r_check > r_hat) || !(tol > 0.0) {
        return Err(Error::InvalidConfig(
            "orbit search needs k >= 1, 0 < r_hat < r_check and tol > 0".into(),
        ));
    }
    // polar seed grid, geometric in radius since the annulus spans decades
    let ratio = r_check / r_hat;
    let seeds: Vec<[f64; 2]> = (0..SEED_RADII)
        .flat_map(|ir| {
            let r = r_hat * ratio.powf(ir as f64 / (SEED_RADII - 1) as f64);
            (0..SEED_ANGLES).map(move |ia| {
                let ang = std::f64::consts::TAU * ia as f64 / SEED_ANGLES as f64;
                [r * ang.cos(), r * ang.sin()]
            })
        })
        .collect();

    // cheap residual pass keeps the most promising seeds
    let mut scored: Vec<(usize, f64)> = seeds
        .par_iter()
        .enumerate()
        .map(|(i, &z)| {
            let score = fixed_point_gap(sys, k, z, tol)
                .map(|g| norm(g) / (1.0 + norm(z)))
                .unwrap_or(f64::INFINITY);
            (i, score)
        })
        .collect();
    scored.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    scored.truncate(POLISH_POOL);
    scored.sort_by_key(|&(i, _)| i);

    let polished: Vec<Option<([f64; 2], f64)>> = scored
        .par_iter()
        .map(|&(i, _)| polish_seed(sys, k, seeds[i], tol))
        .collect();

    // merge fixed points that coincide, keeping the best residual
    let mut points: Vec<([f64; 2], f64)> = Vec::new();
    for (z, res) in polished.into_iter().flatten() {
        if norm(z) < 1e-3 * r_hat {
            // collapsed onto the equilibrium
            continue;
        }
        match points
            .iter_mut()
            .find(|(p, _)| (p[0] - z[0]).hypot(p[1] - z[1]) < DEDUP_TOL)
        {
            Some(entry) => {
                if res < entry.1 {
                    *entry = (z, res);
                }
            }
            None => points.push((z, res)),
        }
    }

    // validate winding and minimal period along the actual trajectory
    let samples = SAMPLES_PER_PERIOD * k as usize + 1;
    let mut orbits: Vec<OrbitResult> = Vec::new();
    for (z0, residual) in points {
        let Ok(trace) = integrate_orbit(sys, k, z0, tol, samples) else {
            continue;
        };
        let Some(rot) = trace.rot else { continue };
        if (rot - rot.round()).abs() > 1e-3 {
            continue;
        }
        if rot.round() as i64 != j {
            continue;
        }
        let mut minimal = gcd(k as u64, j.unsigned_abs()) == 1;
        for d in 1..k {
            if k % d == 0 {
                let zd = trace.samples[SAMPLES_PER_PERIOD * d as usize];
                if (zd[0] - z0[0]).hypot(zd[1] - z0[1]) <= 100.0 * tol * (1.0 + norm(z0)) {
                    minimal = false;
                }
            }
        }
        orbits.push(OrbitResult {
            z0,
            residual,
            winding: j,
            minimal_period: minimal,
            times: trace.times,
            samples: trace.points,
        });
    }

    // merge time-shifted copies of the same subharmonic
    let mut kept: Vec<OrbitResult> = Vec::new();
    for orbit in orbits {
        match kept
            .iter_mut()
            .find(|o| shifted_separation(o, &orbit, k) < SHIFT_SEPARATION)
        {
            Some(existing) => {
                if orbit.residual < existing.residual {
                    *existing = orbit;
                }
            }
            None => kept.push(orbit),
        }
    }

    kept.sort_by(|a, b| {
        let (ra, rb) = (norm(a.z0), norm(b.z0));
        ra.total_cmp(&rb)
            .then(mod_tau(clockwise_angle(a.z0)).total_cmp(&mod_tau(clockwise_angle(b.z0))))
    });
    if kept.is_empty() {
        return Err(Error::NoOrbitFound);
    }
    Ok(kept)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn point(v: f64) -> RotationInterval<f64> {
        RotationInterval::point(v)
    }

    #[test]
    fn candidate_enumeration_examples() {
        let js: Vec<i64> = candidates(&point(2.5), &point(0.0), 4)
            .unwrap()
            .iter()
            .map(|c| c.j)
            .collect();
        assert_eq!(js, vec![1, 3, 5, 7, 9]);

        assert!(candidates(&point(0.2), &point(0.0), 1).unwrap().is_empty());

        let js: Vec<i64> = candidates(&point(0.0), &point(-1.2), 3)
            .unwrap()
            .iter()
            .map(|c| c.j)
            .collect();
        assert_eq!(js, vec![-2, -1]);
    }

    #[test]
    fn overlapping_intervals_are_rejected() {
        assert!(matches!(
            candidates(&point(0.0), &point(0.0), 3),
            Err(Error::GapUncertified)
        ));
        let wide = RotationInterval { lo: 0.0, hi: 1.0 };
        let inside = RotationInterval { lo: 0.5, hi: 0.6 };
        assert!(matches!(
            candidates(&wide, &inside, 3),
            Err(Error::GapUncertified)
        ));
    }

    #[test]
    fn k_star_examples() {
        let report = k_star_scan(&point(1.3), &point(0.0), 20).unwrap();
        assert_eq!(report.k_star, 1);
        assert!(report.per_k.iter().all(|e| e.count > 0));

        let report = k_star_scan(&point(0.4), &point(0.0), 20).unwrap();
        assert_eq!(report.k_star, 3);
        assert_eq!(report.per_k[0].count, 0);
        assert_eq!(report.per_k[1].count, 0);
        assert!(report.per_k[2..].iter().all(|e| e.count > 0));

        assert!(matches!(
            k_star_scan(&point(0.0), &point(0.0), 5),
            Err(Error::GapUncertified)
        ));
    }

    #[test]
    fn no_candidates_within_horizon() {
        // gap (0, 0.05) admits nothing below k = 21
        assert!(matches!(
            k_star_scan(&point(0.05), &point(0.0), 20),
            Err(Error::NoneWithinHorizon)
        ));
    }

    #[test]
    fn phi_reference_counts_surface() {
        let report = k_star_scan(&point(2.5), &point(0.0), 6).unwrap();
        let e4 = &report.per_k[3];
        assert_eq!(e4.count, 5);
        // phi(floor(4 * 2.5)) = phi(10) = 4: the enumerated count differs
        assert_eq!(e4.phi_reference, Some(4));
    }

    #[test]
    fn euler_phi_small_values() {
        let expected = [1u64, 1, 2, 2, 4, 2, 6, 4, 6, 4];
        for (i, &phi) in expected.iter().enumerate() {
            assert_eq!(euler_phi(i as u64 + 1), phi);
        }
    }

    #[test]
    fn gcd_basics() {
        assert_eq!(gcd(12, 18), 6);
        assert_eq!(gcd(7, 1), 1);
        assert_eq!(gcd(5, 0), 5);
    }
}
