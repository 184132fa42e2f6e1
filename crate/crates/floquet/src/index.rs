//! Classification of the monodromy, Conley-Zehnder index (table-based and via
//! the polar-angle lift), rotation number with a certified enclosure, mean
//! index, index iteration along period multiples, and stability verdicts.

use serde::{Deserialize, Serialize};

use crate::coeff::CoeffPath;
use crate::error::{Error, Result};
use crate::flow::{
    angle_lift, clockwise_angle, integrate_fundamental, unit_at, winding, DEFAULT_ANGLE_TOL,
    DEFAULT_MATRIX_TOL,
};
use crate::mat2::{LambdaStratum, Mat2, MultiplierClass};
use crate::polar::polar_decompose;
use crate::real::{mod_tau, wrap_angle, Real};

/// Default omega-grid resolution for locating winding extrema on [0, pi).
pub const DEFAULT_GRID_N: usize = 256;
/// Default width to which extremal angles are refined.
pub const DEFAULT_REFINE_TOL: f64 = 1e-10;
/// Absolute threshold for deciding that the winding number attains a value in
/// (1/2)Z; below it the exact-rational rotation shortcut applies.
pub const ETA_RESONANCE_TOL: f64 = 1e-9;
/// Classification margins below this band are reported as NearDegenerate
/// rather than InconsistentClassification.
pub const NEAR_DEGENERATE_BAND: f64 = 1e-6;
/// Default cover count for rotation-number enclosures (width 2/K = 1/100).
pub const DEFAULT_ROTATION_K: u32 = 200;
/// Largest denominator tried when testing the elliptic angle phi for
/// commensurability with pi; beyond it the angle is treated as incommensurable.
pub const COMMENSURABILITY_MAX_DEN: u32 = 64;

/// Tag within the classification tables: h hyperbolic, p parabolic, e
/// elliptic; the r subscript marks T-resonance, the -/+/* superscripts record
/// which winding extremum touches the critical level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Tag {
    #[serde(rename = "h")]
    H,
    #[serde(rename = "p-r")]
    PMinusR,
    #[serde(rename = "p+r")]
    PPlusR,
    #[serde(rename = "p*r")]
    PStarR,
    #[serde(rename = "p-")]
    PMinus,
    #[serde(rename = "p+")]
    PPlus,
    #[serde(rename = "p*")]
    PStar,
    #[serde(rename = "e-")]
    EMinus,
    #[serde(rename = "e+")]
    EPlus,
}

impl Tag {
    pub fn as_str(self) -> &'static str {
        match self {
            Tag::H => "h",
            Tag::PMinusR => "p-r",
            Tag::PPlusR => "p+r",
            Tag::PStarR => "p*r",
            Tag::PMinus => "p-",
            Tag::PPlus => "p+",
            Tag::PStar => "p*",
            Tag::EMinus => "e-",
            Tag::EPlus => "e+",
        }
    }
}

impl std::fmt::Display for Tag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Classification of a T-periodic system: case 1 collects the strata with a
/// positive real multiplier pair (even index), case 2 the negative real and
/// elliptic ones (odd index); ell locates the winding window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassLabel {
    pub case: u8,
    pub tag: Tag,
    pub ell: i64,
}

impl ClassLabel {
    pub fn new(case: u8, tag: Tag, ell: i64) -> Result<Self> {
        let label = ClassLabel { case, tag, ell };
        if !label.is_valid() {
            return Err(Error::InvalidConfig(format!(
                "tag {tag} not allowed in case {case}"
            )));
        }
        Ok(label)
    }

    /// The tag/case combinations admitted by the classification tables.
    pub fn is_valid(&self) -> bool {
        match self.case {
            1 => matches!(self.tag, Tag::H | Tag::PMinusR | Tag::PPlusR | Tag::PStarR),
            2 => matches!(
                self.tag,
                Tag::H | Tag::PMinus | Tag::PPlus | Tag::PStar | Tag::EMinus | Tag::EPlus
            ),
            _ => false,
        }
    }

    /// Conley-Zehnder index read off the label: 2*ell in case 1 (the resonant
    /// tags included, by convention), 2*ell + 1 in case 2.
    pub fn cz_index(&self) -> i64 {
        if self.case == 1 {
            2 * self.ell
        } else {
            2 * self.ell + 1
        }
    }

    pub fn is_elliptic(&self) -> bool {
        matches!(self.tag, Tag::EMinus | Tag::EPlus)
    }
}

impl std::fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{}) ell={}", self.case, self.tag, self.ell)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stability {
    Unstable,
    Stable,
    StronglyStable,
}

/// Extrema of the winding number eta over starting angles omega in [0, pi).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindingExtrema<R> {
    pub eta_minus: R,
    pub eta_plus: R,
    pub argmin: R,
    pub argmax: R,
}

/// Closed enclosure of the rotation number; lo == hi when pinned exactly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotationInterval<R> {
    pub lo: R,
    pub hi: R,
}

impl<R: Real> RotationInterval<R> {
    pub fn point(value: R) -> Self {
        RotationInterval { lo: value, hi: value }
    }

    pub fn midpoint(&self) -> R {
        (self.lo + self.hi) / R::of(2.0)
    }

    pub fn width(&self) -> R {
        self.hi - self.lo
    }

    pub fn contains(&self, x: R) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }
}

/// Full rotational/index portrait at period T.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexReport<R> {
    pub eta_minus: R,
    pub eta_plus: R,
    pub label: ClassLabel,
    #[serde(rename = "i_T")]
    pub i_t: i64,
    pub rho_interval: RotationInterval<R>,
    pub m: R,
    /// Fractional part of the rotation number, rho = ell + tau; zero in
    /// case 1, one half for the case-2 hyperbolic/parabolic tags, and the
    /// elliptic angle fraction otherwise.
    pub tau: R,
    pub stability: Stability,
}

/// Either an exactly computed iterated index or a certified bracket (used in
/// the elliptic case when the direct classification at kT is too close to a
/// boundary to pin the value).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum IterationIndex {
    Exact(i64),
    Bracket { lo: i64, hi: i64 },
}

impl IterationIndex {
    pub fn exact(&self) -> Option<i64> {
        match self {
            IterationIndex::Exact(v) => Some(*v),
            IterationIndex::Bracket { .. } => None,
        }
    }

    pub fn bounds(&self) -> (i64, i64) {
        match self {
            IterationIndex::Exact(v) => (*v, *v),
            IterationIndex::Bracket { lo, hi } => (*lo, *hi),
        }
    }
}

/// Index of the k-fold period cover together with the predicted label of the
/// iterated monodromy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IterationReport {
    pub k: u32,
    #[serde(rename = "i_kT")]
    pub i_kt: IterationIndex,
    #[serde(rename = "predicted_label_kT")]
    pub predicted_label_kt: ClassLabel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RotationComparison {
    Equal,
    Less,
    Greater,
}

// ---------------------------------------------------------------------------
// winding data over one k-fold cover

/// Monodromy of the k-fold cover plus the lifted clockwise angle at omega = 0
/// and the Gram form of M, which gives |M e^{-i omega}|^2 in closed form.
struct EtaData<R> {
    mono: Mat2<R>,
    theta0: R,
    alpha: R,
    beta: R,
    gamma: R,
}

impl<R: Real> EtaData<R> {
    fn build(path: &CoeffPath<R>, k: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidConfig("cover count k must be positive".into()));
        }
        let horizon = path.period * R::of(k as f64);
        let fp = integrate_fundamental(path, horizon, R::of(DEFAULT_MATRIX_TOL))?;
        let mono = fp.terminal();
        let lift = angle_lift(path, R::zero(), horizon, R::of(DEFAULT_ANGLE_TOL))?;
        let theta0 = lift.theta_end();
        let hat0 = clockwise_angle(mono.apply(unit_at(R::zero())));
        if wrap_angle(theta0 - hat0).abs() > R::of(1e-6) {
            return Err(Error::ToleranceNotMet(
                "angular lift and monodromy disagree at omega = 0".into(),
            ));
        }
        // Gram form G = M^T M; |M e_omega|^2 = alpha + beta cos 2w + gamma sin 2w
        let g11 = mono.m11 * mono.m11 + mono.m21 * mono.m21;
        let g12 = mono.m11 * mono.m12 + mono.m21 * mono.m22;
        let g22 = mono.m12 * mono.m12 + mono.m22 * mono.m22;
        let half = R::of(0.5);
        Ok(EtaData {
            mono,
            theta0,
            alpha: (g11 + g22) * half,
            beta: (g11 - g22) * half,
            gamma: -g12,
        })
    }

    /// Squared radius of the solution from e^{-i omega} at the horizon.
    fn r2(&self, omega: R) -> R {
        let two_w = omega + omega;
        self.alpha + self.beta * two_w.cos() + self.gamma * two_w.sin()
    }

    /// Terminal clockwise angle modulo 2 pi.
    fn hat(&self, omega: R) -> R {
        clockwise_angle(self.mono.apply(unit_at(omega)))
    }
}

/// Increment of the terminal clockwise angle between nearby starting rays.
/// True increments lie in [0, pi); representatives near 2 pi are rounding
/// artifacts of a vanishing increment and are folded back.
fn ray_increment<R: Real>(d: R) -> R {
    let t = mod_tau(d);
    if t > R::of(1.5) * R::PI() {
        t - R::TAU()
    } else {
        t
    }
}

fn bisect_root<R: Real>(f: impl Fn(R) -> R, mut lo: R, mut hi: R, tol: R) -> R {
    let mut flo = f(lo);
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = (lo + hi) * R::of(0.5);
        let fm = f(mid);
        if fm == R::zero() {
            return mid;
        }
        if (fm > R::zero()) == (flo > R::zero()) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    (lo + hi) * R::of(0.5)
}

fn extrema_from<R: Real>(
    data: &EtaData<R>,
    grid_n: usize,
    refine_tol: R,
) -> Result<WindingExtrema<R>> {
    let pi = R::PI();
    let tau = R::TAU();
    let n = grid_n;

    // near-orthogonal monodromy: |M e^{-i omega}| is constant, eta likewise
    let amp = self_hypot(data.beta, data.gamma);
    if amp <= R::of(1e-13) * data.alpha {
        let eta = data.theta0 / tau;
        return Ok(WindingExtrema {
            eta_minus: eta,
            eta_plus: eta,
            argmin: R::zero(),
            argmax: R::zero(),
        });
    }

    // lifted terminal angles on the omega grid; increments are exact modular
    // arithmetic on atan2 values, only theta0 carries integration error
    let mut hats = Vec::with_capacity(n + 1);
    let mut thetas = Vec::with_capacity(n + 1);
    hats.push(data.hat(R::zero()));
    thetas.push(data.theta0);
    for i in 1..=n {
        let w = pi * R::of(i as f64) / R::of(n as f64);
        let hat = data.hat(w);
        let delta = ray_increment(hat - hats[i - 1]);
        thetas.push(thetas[i - 1] + delta);
        hats.push(hat);
    }
    if (thetas[n] - data.theta0 - pi).abs() > R::of(1e-6) {
        return Err(Error::ToleranceNotMet(
            "omega-grid lift failed to advance by pi over a half turn".into(),
        ));
    }

    let omega_at = |i: usize| pi * R::of(i as f64) / R::of(n as f64);
    // (omega, eta) candidates: grid extremes as a safety net...
    let mut cand: Vec<(R, R)> = Vec::new();
    let mut grid_min = (R::zero(), R::infinity());
    let mut grid_max = (R::zero(), R::neg_infinity());
    for i in 0..n {
        let w = omega_at(i);
        let eta = (thetas[i] - w) / tau;
        if eta < grid_min.1 {
            grid_min = (w, eta);
        }
        if eta > grid_max.1 {
            grid_max = (w, eta);
        }
    }
    cand.push(grid_min);
    cand.push(grid_max);

    // ...plus the refined critical points, where |M e^{-i omega}| crosses 1
    let h = |w: R| data.r2(w) - R::one();
    for i in 0..n {
        let (wl, wr) = (omega_at(i), omega_at(i + 1));
        let (hl, hr) = (h(wl), h(wr));
        let root = if hl == R::zero() {
            Some(wl)
        } else if (hl > R::zero()) != (hr > R::zero()) {
            Some(bisect_root(h, wl, wr, refine_tol))
        } else {
            None
        };
        if let Some(w) = root {
            let theta = thetas[i] + ray_increment(data.hat(w) - hats[i]);
            cand.push((w, (theta - w) / tau));
        }
    }

    let mut best_min = cand[0];
    let mut best_max = cand[0];
    for &(w, eta) in &cand[1..] {
        if eta < best_min.1 {
            best_min = (w, eta);
        }
        if eta > best_max.1 {
            best_max = (w, eta);
        }
    }
    Ok(WindingExtrema {
        eta_minus: best_min.1,
        eta_plus: best_max.1,
        argmin: best_min.0,
        argmax: best_max.0,
    })
}

fn self_hypot<R: Real>(a: R, b: R) -> R {
    let (a, b) = (a.abs(), b.abs());
    let big = a.max(b);
    if big == R::zero() {
        return R::zero();
    }
    let small = a.min(b) / big;
    big * (R::one() + small * small).sqrt()
}

/// Global extrema of the T-winding number over omega in [0, pi), located by a
/// uniform grid plus bisection at the sign changes of the winding derivative.
pub fn winding_extrema<R: Real>(
    path: &CoeffPath<R>,
    grid_n: usize,
    refine_tol: R,
) -> Result<WindingExtrema<R>> {
    winding_extrema_k(path, 1, grid_n, refine_tol)
}

/// Extrema of the winding number of the k-fold period cover.
pub fn winding_extrema_k<R: Real>(
    path: &CoeffPath<R>,
    k: u32,
    grid_n: usize,
    refine_tol: R,
) -> Result<WindingExtrema<R>> {
    if grid_n < 16 {
        return Err(Error::InvalidConfig("omega grid needs at least 16 points".into()));
    }
    let data = EtaData::build(path, k)?;
    extrema_from(&data, grid_n, refine_tol)
}

// ---------------------------------------------------------------------------
// classification

fn to_int<R: Real>(x: R) -> i64 {
    x.to_f64().map(|v| v.round() as i64).unwrap_or(0)
}

/// Distance to the nearest half-integer.
fn half_integer_gap<R: Real>(x: R) -> R {
    let two_x = x + x;
    (two_x - two_x.round()).abs() / R::of(2.0)
}

fn strictly_inside<R: Real>(x: R, lo: R, hi: R, band: R, what: &str) -> Result<()> {
    if x > lo + band && x < hi - band {
        return Ok(());
    }
    if x < lo - band || x > hi + band {
        return Err(Error::InconsistentClassification(format!(
            "{what} = {} escapes its window ({}, {})",
            x.to_f64().unwrap_or(f64::NAN),
            lo.to_f64().unwrap_or(f64::NAN),
            hi.to_f64().unwrap_or(f64::NAN),
        )));
    }
    Err(Error::NearDegenerate(format!(
        "{what} within tolerance of a window boundary"
    )))
}

/// Label decided from the winding extrema alone.
fn label_from_extrema<R: Real>(ext: &WindingExtrema<R>, band: R) -> Result<ClassLabel> {
    let em = ext.eta_minus;
    let ep = ext.eta_plus;
    let half = R::of(0.5);

    // integers and half-integers met by the (band-fuzzed) extremal range
    let int_lo = (em - band).ceil();
    let int_hi = (ep + band).floor();
    let sem_lo = ((em - band) * R::of(2.0)).ceil();
    let sem_hi = ((ep + band) * R::of(2.0)).floor();

    if int_hi >= int_lo {
        if int_hi > int_lo {
            return Err(Error::InconsistentClassification(
                "extremal range spans more than one integer level".into(),
            ));
        }
        let level = int_hi;
        let ell = to_int(level);
        // a case-1 window may not also meet a half-integer level
        if sem_hi - sem_lo >= R::of(2.0) {
            return Err(Error::NearDegenerate(
                "extremal range meets both an integer and a half-integer level".into(),
            ));
        }
        let bot = (em - level).abs() <= band;
        let top = (ep - level).abs() <= band;
        let tag = match (bot, top) {
            (true, true) => Tag::PStarR,
            (false, true) => Tag::PMinusR,
            (true, false) => Tag::PPlusR,
            (false, false) => Tag::H,
        };
        if !bot {
            strictly_inside(em, level - half, level, band, "eta_minus")?;
        }
        if !top {
            strictly_inside(ep, level, level + half, band, "eta_plus")?;
        }
        return ClassLabel::new(1, tag, ell);
    }

    if sem_hi >= sem_lo {
        if sem_hi > sem_lo {
            return Err(Error::InconsistentClassification(
                "extremal range spans more than one half-integer level".into(),
            ));
        }
        let level = sem_hi * half;
        let ell = to_int(level - half);
        let bot = (em - level).abs() <= band;
        let top = (ep - level).abs() <= band;
        let tag = match (bot, top) {
            (true, true) => Tag::PStar,
            (false, true) => Tag::PMinus,
            (true, false) => Tag::PPlus,
            (false, false) => Tag::H,
        };
        if !bot {
            strictly_inside(em, level - half, level, band, "eta_minus")?;
        }
        if !top {
            strictly_inside(ep, level, level + half, band, "eta_plus")?;
        }
        return ClassLabel::new(2, tag, ell);
    }

    // no critical level met: elliptic, on one side of the half-integer
    let ell_r = em.floor();
    if ep.floor() != ell_r {
        return Err(Error::InconsistentClassification(
            "extremal range crosses an integer yet meets no level".into(),
        ));
    }
    let mid = ell_r + half;
    let tag = if ep < mid {
        Tag::EMinus
    } else if em > mid {
        Tag::EPlus
    } else {
        return Err(Error::InconsistentClassification(
            "extremal range crosses a half-integer yet meets no level".into(),
        ));
    };
    ClassLabel::new(2, tag, to_int(ell_r))
}

/// Multiplier class demanded by each winding-based label.
fn spectrum_agreement<R: Real>(label: &ClassLabel, mono: &Mat2<R>) -> Result<()> {
    let pair = mono.multipliers()?;
    let tr = mono.trace();
    let ok = match (label.case, label.tag) {
        (1, Tag::H) => pair.class == MultiplierClass::Hyperbolic && tr > R::zero(),
        (1, _) => pair.class == MultiplierClass::ParabolicPlus,
        (2, Tag::H) => pair.class == MultiplierClass::Hyperbolic && tr < R::zero(),
        (2, Tag::EMinus) | (2, Tag::EPlus) => pair.class == MultiplierClass::Elliptic,
        (2, _) => pair.class == MultiplierClass::ParabolicMinus,
        _ => false,
    };
    if ok {
        return Ok(());
    }
    Err(Error::InconsistentClassification(format!(
        "winding label {label} does not match multiplier class {:?} (trace {})",
        pair.class,
        tr.to_f64().unwrap_or(f64::NAN),
    )))
}

fn classify_parts<R: Real>(ext: &WindingExtrema<R>, mono: &Mat2<R>) -> Result<ClassLabel> {
    let band = R::of(ETA_RESONANCE_TOL);
    let label = label_from_extrema(ext, band)?;
    if let Err(err) = spectrum_agreement(&label, mono) {
        // disagreements at a razor-thin margin are undecidable, not wrong
        let tr = mono.trace();
        let spec_margin = (tr.abs() - R::of(2.0)).abs() / (R::one() + tr.abs());
        let wind_margin = half_integer_gap(ext.eta_minus).min(half_integer_gap(ext.eta_plus));
        let near = R::of(NEAR_DEGENERATE_BAND);
        if spec_margin < near || wind_margin < near {
            return Err(Error::NearDegenerate(format!(
                "classification margins too thin: {err}"
            )));
        }
        return Err(err);
    }
    Ok(label)
}

/// Joint classification from the winding extrema and the Floquet multipliers;
/// the two sources must agree.
pub fn classify<R: Real>(path: &CoeffPath<R>) -> Result<ClassLabel> {
    classify_k(path, 1)
}

/// Classification of the k-fold period cover.
pub fn classify_k<R: Real>(path: &CoeffPath<R>, k: u32) -> Result<ClassLabel> {
    let data = EtaData::build(path, k)?;
    let ext = extrema_from(&data, DEFAULT_GRID_N, R::of(DEFAULT_REFINE_TOL))?;
    classify_parts(&ext, &data.mono)
}

/// Conley-Zehnder index at period T, read from the classification tables.
pub fn cz_index<R: Real>(path: &CoeffPath<R>) -> Result<i64> {
    Ok(classify(path)?.cz_index())
}

/// Conley-Zehnder index via the lifted rotation angle of the orthogonal polar
/// factor of the fundamental matrix, combined with the stratum of det(I - M).
/// Only defined away from the resonant stratum.
pub fn cz_index_via_polar<R: Real>(path: &CoeffPath<R>) -> Result<i64> {
    let fp = integrate_fundamental(path, path.period, R::of(DEFAULT_MATRIX_TOL))?;
    let mono = fp.terminal();
    let stratum = mono.lambda_stratum()?;
    if stratum == LambdaStratum::Zero {
        return Err(Error::ResonantInput);
    }

    // clockwise polar angle lifted through the accepted nodes and their
    // midpoints; the factor of M(0) = I is the identity, so the lift starts at 0
    let nodes = fp.nodes();
    let mut samples = Vec::with_capacity(2 * nodes.len());
    for pair in nodes.windows(2) {
        samples.push((pair[0] + pair[1]) * R::of(0.5));
        samples.push(pair[1]);
    }
    let mut lifted = R::zero();
    let mut prev = R::zero();
    for &t in &samples {
        let coords = polar_decompose(&fp.eval(t))?;
        let hat = -coords.theta;
        let step = wrap_angle(hat - prev);
        if step.abs() >= R::FRAC_PI_2() {
            return Err(Error::LiftStepTooLarge {
                step: step.to_f64().unwrap_or(f64::NAN),
            });
        }
        lifted = lifted + step;
        prev = hat;
    }

    let tau = R::TAU();
    let band = R::of(ETA_RESONANCE_TOL) * (R::one() + lifted.abs());
    match stratum {
        LambdaStratum::Minus => {
            // windows (2 ell pi - pi/2, 2 ell pi + pi/2)
            let ell = (lifted / tau).round();
            let offset = lifted - ell * tau;
            if offset.abs() >= R::FRAC_PI_2() - band {
                if offset.abs() > R::FRAC_PI_2() + band {
                    return Err(Error::InconsistentClassification(
                        "polar angle falls between index windows".into(),
                    ));
                }
                return Err(Error::NearDegenerate(
                    "polar angle within tolerance of a window boundary".into(),
                ));
            }
            Ok(2 * to_int(ell))
        }
        LambdaStratum::Plus => {
            // windows (2 ell pi, 2 (ell + 1) pi)
            let ell = (lifted / tau).floor();
            let offset = lifted - ell * tau;
            if offset <= band || offset >= tau - band {
                return Err(Error::NearDegenerate(
                    "polar angle within tolerance of a window boundary".into(),
                ));
            }
            Ok(2 * to_int(ell) + 1)
        }
        LambdaStratum::Zero => unreachable!("resonant stratum rejected above"),
    }
}

// ---------------------------------------------------------------------------
// rotation number, mean index

/// The half-integer attained by the extremal range, if any; two distinct
/// attained levels cannot be told apart reliably.
fn attained_half_integer<R: Real>(ext: &WindingExtrema<R>, band: R) -> Result<Option<R>> {
    let two = R::of(2.0);
    let lo = ((ext.eta_minus - band) * two).ceil();
    let hi = ((ext.eta_plus + band) * two).floor();
    if hi < lo {
        return Ok(None);
    }
    if hi > lo {
        return Err(Error::NearDegenerate(
            "extremal range meets two half-integer levels".into(),
        ));
    }
    Ok(Some(lo / two))
}

fn rotation_from_extrema<R: Real>(
    path: &CoeffPath<R>,
    ext: &WindingExtrema<R>,
    big_k: u32,
) -> Result<RotationInterval<R>> {
    if big_k == 0 {
        return Err(Error::InvalidConfig("rotation cover count must be positive".into()));
    }
    if let Some(level) = attained_half_integer(ext, R::of(ETA_RESONANCE_TOL))? {
        // a half-integer winding value propagates exactly along all covers,
        // pinning the rotation number
        return Ok(RotationInterval::point(level));
    }
    let horizon = path.period * R::of(big_k as f64);
    let lift = angle_lift(path, R::zero(), horizon, R::of(DEFAULT_ANGLE_TOL))?;
    let eta = lift.theta_end() / R::TAU();
    let kk = R::of(big_k as f64);
    Ok(RotationInterval {
        lo: eta / kk - R::one() / kk,
        hi: eta / kk + R::one() / kk,
    })
}

/// Certified enclosure of the rotation number: width 2/K around the winding
/// number of the K-fold cover at omega = 0, collapsed to an exact point when
/// the T-winding number attains a half-integer.
pub fn rotation_number<R: Real>(path: &CoeffPath<R>, big_k: u32) -> Result<RotationInterval<R>> {
    let ext = winding_extrema(path, DEFAULT_GRID_N, R::of(DEFAULT_REFINE_TOL))?;
    rotation_from_extrema(path, &ext, big_k)
}

fn mean_from_interval<R: Real>(
    path: &CoeffPath<R>,
    interval: &RotationInterval<R>,
    big_k: u32,
) -> Result<R> {
    let m = interval.midpoint() * R::of(2.0);
    if interval.is_point() {
        return Ok(m);
    }
    // slope cross-check on two long covers; skipped at points the direct
    // classification cannot decide
    for k in [big_k.div_euclid(2).max(1), big_k] {
        match classify_k(path, k) {
            Ok(label) => {
                let slope = R::of(label.cz_index() as f64) / R::of(k as f64);
                if (slope - m).abs() > R::of(3.0) / R::of(k as f64) + R::of(1e-6) {
                    return Err(Error::InconsistentClassification(format!(
                        "iterated index slope {} vs mean index {}",
                        slope.to_f64().unwrap_or(f64::NAN),
                        m.to_f64().unwrap_or(f64::NAN),
                    )));
                }
            }
            Err(Error::NearDegenerate(_)) => continue,
            Err(err) => return Err(err),
        }
    }
    Ok(m)
}

/// Mean Conley-Zehnder index, twice the rotation number midpoint, with a
/// slope cross-check against directly iterated indices.
pub fn mean_index<R: Real>(path: &CoeffPath<R>, big_k: u32) -> Result<R> {
    let interval = rotation_number(path, big_k)?;
    mean_from_interval(path, &interval, big_k)
}

// ---------------------------------------------------------------------------
// iteration

/// Best rational approximation p/q of x in (0, 1) by continued fractions with
/// q bounded; accepted only within the half-integer resonance tolerance.
fn commensurable_fraction<R: Real>(x: R) -> Option<(u32, u32)> {
    let target = x.to_f64()?;
    if !(0.0..1.0).contains(&target) {
        return None;
    }
    let (mut p0, mut q0, mut p1, mut q1) = (0u64, 1u64, 1u64, 0u64);
    let mut frac = target;
    for _ in 0..32 {
        let a = frac.floor();
        if a > 1e12 {
            break;
        }
        let ai = a as u64;
        let p2 = ai * p1 + p0;
        let q2 = ai * q1 + q0;
        if q2 > COMMENSURABILITY_MAX_DEN as u64 {
            break;
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        let rem = frac - a;
        if rem.abs() < 1e-15 {
            break;
        }
        frac = 1.0 / rem;
    }
    if q1 == 0 {
        return None;
    }
    let approx = p1 as f64 / q1 as f64;
    if (target - approx).abs() < ETA_RESONANCE_TOL && q1 >= 2 && p1 >= 1 {
        Some((p1 as u32, q1 as u32))
    } else {
        None
    }
}

fn iterate_elliptic<R: Real>(path: &CoeffPath<R>, k: u32, base: &ClassLabel) -> Result<IterationReport> {
    let ell = base.ell;
    let k_i = k as i64;
    let e_minus = base.tag == Tag::EMinus;
    let (b_lo, b_hi) = if e_minus {
        (2 * k_i * ell + 1, 2 * k_i * ell + k_i)
    } else {
        (2 * k_i * ell + k_i, 2 * k_i * ell + 2 * k_i - 1)
    };

    let mono = integrate_fundamental(path, path.period, R::of(DEFAULT_MATRIX_TOL))?.terminal();
    let cos_phi = (mono.trace() / R::of(2.0)).max(-R::one()).min(R::one());
    let phi_over_pi = cos_phi.acos() / R::PI();

    if let Some((p, q)) = commensurable_fraction(phi_over_pi) {
        if k % q == 0 {
            // the k-th power of e^{+-i pi p/q} is +-1: parabolic iterate with
            // 2 k rho an exact integer
            let m = (k / q) as i64;
            let two_k_rho = 2 * k_i * ell + if e_minus { m * p as i64 } else { 2 * k_i - m * p as i64 };
            let report = if two_k_rho % 2 == 0 {
                IterationReport {
                    k,
                    i_kt: IterationIndex::Exact(two_k_rho),
                    predicted_label_kt: ClassLabel::new(1, Tag::PStarR, two_k_rho / 2)?,
                }
            } else {
                IterationReport {
                    k,
                    i_kt: IterationIndex::Exact(two_k_rho),
                    predicted_label_kt: ClassLabel::new(2, Tag::PStar, (two_k_rho - 1) / 2)?,
                }
            };
            // the winding number of the cover must sit on the predicted level
            let eta_k = winding(path, k, R::zero())?;
            if (eta_k - R::of(two_k_rho as f64) / R::of(2.0)).abs() > R::of(1e-6) {
                return Err(Error::InconsistentClassification(format!(
                    "commensurable iterate: winding {} vs predicted level {}",
                    eta_k.to_f64().unwrap_or(f64::NAN),
                    two_k_rho as f64 / 2.0,
                )));
            }
            return Ok(report);
        }
    }

    match classify_k(path, k) {
        Ok(label_k) => {
            let i_kt = label_k.cz_index();
            if i_kt < b_lo || i_kt > b_hi {
                return Err(Error::InconsistentClassification(format!(
                    "iterated index {i_kt} outside elliptic bounds [{b_lo}, {b_hi}]"
                )));
            }
            Ok(IterationReport {
                k,
                i_kt: IterationIndex::Exact(i_kt),
                predicted_label_kt: label_k,
            })
        }
        // too close to a boundary to pin the integer: certify the bracket,
        // normalizing the predicted window to its lower endpoint
        Err(Error::NearDegenerate(_)) => Ok(IterationReport {
            k,
            i_kt: IterationIndex::Bracket { lo: b_lo, hi: b_hi },
            predicted_label_kt: ClassLabel::new(2, base.tag, k_i * ell)?,
        }),
        Err(err) => Err(err),
    }
}

/// Index of the k-fold cover: closed formulas for the hyperbolic and
/// parabolic classes, direct classification checked against the elliptic
/// bounds otherwise, with the commensurable-angle schedule applied when the
/// elliptic angle is a rational multiple of pi.
pub fn iterate_index<R: Real>(path: &CoeffPath<R>, k: u32) -> Result<IterationReport> {
    if k == 0 {
        return Err(Error::InvalidConfig("iterate count k must be positive".into()));
    }
    let base = classify(path)?;
    let ell = base.ell;
    let k_i = k as i64;
    match (base.case, base.tag) {
        (1, tag) => Ok(IterationReport {
            k,
            i_kt: IterationIndex::Exact(2 * k_i * ell),
            predicted_label_kt: ClassLabel::new(1, tag, k_i * ell)?,
        }),
        (2, Tag::EMinus) | (2, Tag::EPlus) => iterate_elliptic(path, k, &base),
        (2, tag) => {
            let i_kt = k_i * (2 * ell + 1);
            let report = if k % 2 == 0 {
                let resonant = match tag {
                    Tag::H => Tag::H,
                    Tag::PMinus => Tag::PMinusR,
                    Tag::PPlus => Tag::PPlusR,
                    Tag::PStar => Tag::PStarR,
                    _ => unreachable!("elliptic tags handled above"),
                };
                ClassLabel::new(1, resonant, k_i * ell + k_i / 2)?
            } else {
                ClassLabel::new(2, tag, k_i * ell + (k_i - 1) / 2)?
            };
            Ok(IterationReport {
                k,
                i_kt: IterationIndex::Exact(i_kt),
                predicted_label_kt: report,
            })
        }
        _ => unreachable!("labels are validated on construction"),
    }
}

// ---------------------------------------------------------------------------
// stability

/// Verdict read from the label: hyperbolic and boundary-touching parabolic
/// classes are unstable, the doubly-touching parabolic ones stable, elliptic
/// ones strongly stable.
pub fn stability_of(label: &ClassLabel) -> Stability {
    match label.tag {
        Tag::H | Tag::PMinusR | Tag::PPlusR | Tag::PMinus | Tag::PPlus => Stability::Unstable,
        Tag::PStarR | Tag::PStar => Stability::Stable,
        Tag::EMinus | Tag::EPlus => Stability::StronglyStable,
    }
}

pub fn stability<R: Real>(path: &CoeffPath<R>) -> Result<Stability> {
    Ok(stability_of(&classify(path)?))
}

/// Stable if, and only if, the indices at T and 2T are both odd; requires the
/// system to be nonresonant at both periods.
pub fn stability_via_second_iterate<R: Real>(path: &CoeffPath<R>) -> Result<Stability> {
    let fp = integrate_fundamental(path, path.period * R::of(2.0), R::of(DEFAULT_MATRIX_TOL))?;
    let at_t = fp.eval(path.period);
    let at_2t = fp.terminal();
    if at_t.lambda_stratum()? == LambdaStratum::Zero
        || at_2t.lambda_stratum()? == LambdaStratum::Zero
    {
        return Err(Error::ResonantInput);
    }
    let i_1 = cz_index(path)?;
    let i_2 = classify_k(path, 2)?.cz_index();
    Ok(if i_1 % 2 != 0 && i_2 % 2 != 0 {
        Stability::Stable
    } else {
        Stability::Unstable
    })
}

// ---------------------------------------------------------------------------
// rotation number vs winding number

/// Trichotomy of the rotation number against j/k, decided from the winding
/// extrema of the k-fold cover; marginal cases fall back on the rotation
/// enclosure and are undecidable when it straddles j/k.
pub fn rotation_vs_winding<R: Real>(
    path: &CoeffPath<R>,
    k: u32,
    j: i64,
) -> Result<RotationComparison> {
    if k == 0 {
        return Err(Error::InvalidConfig("cover count k must be positive".into()));
    }
    let ext = winding_extrema_k(path, k, DEFAULT_GRID_N, R::of(DEFAULT_REFINE_TOL))?;
    let band = R::of(ETA_RESONANCE_TOL);
    let level = R::of(j as f64);
    let top = ext.eta_plus - level;
    let bot = ext.eta_minus - level;
    if top < -band {
        return Ok(RotationComparison::Less);
    }
    if bot > band {
        return Ok(RotationComparison::Greater);
    }
    if top > band && bot < -band {
        if ext.eta_minus <= level - R::one() || ext.eta_plus >= level + R::one() {
            return Err(Error::InconsistentClassification(
                "winding range wider than the unit window around j".into(),
            ));
        }
        return Ok(RotationComparison::Equal);
    }
    // an extremum touches the level j within tolerance
    let rho = rotation_number(path, DEFAULT_ROTATION_K)?;
    let target = level / R::of(k as f64);
    if rho.is_point() {
        let s = rho.lo;
        return Ok(if (s - target).abs() <= band {
            RotationComparison::Equal
        } else if s < target {
            RotationComparison::Less
        } else {
            RotationComparison::Greater
        });
    }
    if rho.contains(target) {
        return Err(Error::Undecidable);
    }
    Ok(if rho.hi < target {
        RotationComparison::Less
    } else {
        RotationComparison::Greater
    })
}

// ---------------------------------------------------------------------------
// full report

/// Assemble the full portrait: extrema, label, index, rotation enclosure,
/// mean index, elliptic fraction, stability.
pub fn index_report<R: Real>(path: &CoeffPath<R>, big_k: u32) -> Result<IndexReport<R>> {
    let data = EtaData::build(path, 1)?;
    let ext = extrema_from(&data, DEFAULT_GRID_N, R::of(DEFAULT_REFINE_TOL))?;
    let label = classify_parts(&ext, &data.mono)?;
    let rho_interval = rotation_from_extrema(path, &ext, big_k)?;
    let m = mean_from_interval(path, &rho_interval, big_k)?;
    let tau = match (label.case, label.tag) {
        (1, _) => R::zero(),
        (2, Tag::EMinus) | (2, Tag::EPlus) => {
            let cos_phi = (data.mono.trace() / R::of(2.0)).max(-R::one()).min(R::one());
            let frac = cos_phi.acos() / R::TAU();
            if label.tag == Tag::EMinus {
                frac
            } else {
                R::one() - frac
            }
        }
        _ => R::of(0.5),
    };
    Ok(IndexReport {
        eta_minus: ext.eta_minus,
        eta_plus: ext.eta_plus,
        label,
        i_t: label.cz_index(),
        rho_interval,
        m,
        tau,
        stability: stability_of(&label),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn zero_path() -> CoeffPath<f64> {
        CoeffPath::zero(1.0)
    }

    /// S = I over [0, t_end]: clockwise rotation at unit speed.
    fn rotation_path(t_end: f64) -> CoeffPath<f64> {
        CoeffPath::constant(1.0, 0.0, 1.0, t_end)
    }

    /// S = diag(-1, 1) over [0, 1]: hyperbolic with multipliers e^{+-1}.
    fn hyperbolic_path() -> CoeffPath<f64> {
        CoeffPath::constant(-1.0, 0.0, 1.0, 1.0)
    }

    #[test]
    fn extrema_of_zero_path_vanish() {
        let ext = winding_extrema(&zero_path(), 64, 1e-10).unwrap();
        assert!(ext.eta_minus.abs() < 1e-12);
        assert!(ext.eta_plus.abs() < 1e-12);
    }

    #[test]
    fn extrema_of_quarter_rotation_are_constant() {
        let ext = winding_extrema(&rotation_path(PI / 2.0), 64, 1e-10).unwrap();
        assert!((ext.eta_minus - 0.25).abs() < 1e-9);
        assert!((ext.eta_plus - 0.25).abs() < 1e-9);
    }

    #[test]
    fn extrema_of_hyperbolic_path_straddle_zero() {
        let ext = winding_extrema(&hyperbolic_path(), 256, 1e-12).unwrap();
        assert!(ext.eta_minus < 0.0 && 0.0 < ext.eta_plus);
        assert!(ext.eta_minus > -0.5 && ext.eta_plus < 0.5);
        // dense closed-form scan: M = [[cosh 1, sinh 1], [sinh 1, cosh 1]]
        // turns less than a quarter, so eta needs no lift bookkeeping
        let (ch, sh) = (1.0f64.cosh(), 1.0f64.sinh());
        let eta = |w: f64| {
            let (c, s) = (w.cos(), w.sin());
            let v = (ch * c - sh * s, sh * c - ch * s);
            let hat = (-v.1).atan2(v.0);
            let mut d = hat - w;
            while d > PI {
                d -= 2.0 * PI;
            }
            while d < -PI {
                d += 2.0 * PI;
            }
            d / (2.0 * PI)
        };
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..31_416 {
            let v = eta(i as f64 * 1e-4);
            lo = lo.min(v);
            hi = hi.max(v);
        }
        assert!((ext.eta_minus - lo).abs() < 1e-6, "min {} vs {lo}", ext.eta_minus);
        assert!((ext.eta_plus - hi).abs() < 1e-6, "max {} vs {hi}", ext.eta_plus);
        // critical angles solve sin 2w = tanh 1
        let w1 = 1.0f64.tanh().asin() / 2.0;
        let w2 = (PI - 1.0f64.tanh().asin()) / 2.0;
        assert!((ext.argmin - w1).abs() < 1e-5, "argmin {}", ext.argmin);
        assert!((ext.argmax - w2).abs() < 1e-5, "argmax {}", ext.argmax);
    }

    #[test]
    fn coarse_grid_rejected() {
        assert!(matches!(
            winding_extrema(&zero_path(), 8, 1e-10),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn classify_zero_path() {
        let label = classify(&zero_path()).unwrap();
        assert_eq!(label, ClassLabel::new(1, Tag::PStarR, 0).unwrap());
    }

    #[test]
    fn classify_hyperbolic() {
        let label = classify(&hyperbolic_path()).unwrap();
        assert_eq!(label, ClassLabel::new(1, Tag::H, 0).unwrap());
    }

    #[test]
    fn classify_quarter_rotation() {
        let label = classify(&rotation_path(PI / 2.0)).unwrap();
        assert_eq!(label, ClassLabel::new(2, Tag::EMinus, 0).unwrap());
    }

    #[test]
    fn cz_index_examples() {
        assert_eq!(cz_index(&zero_path()).unwrap(), 0);
        assert_eq!(cz_index(&rotation_path(PI / 2.0)).unwrap(), 1);
        // eta = 5/4 sits in (1, 3/2): elliptic with ell = 1
        assert_eq!(cz_index(&rotation_path(2.5 * PI)).unwrap(), 3);
        // eta = 3/2: doubly resonant parabolic with ell = 1
        assert_eq!(cz_index(&rotation_path(3.0 * PI)).unwrap(), 3);
    }

    #[test]
    fn polar_index_examples() {
        assert_eq!(cz_index_via_polar(&hyperbolic_path()).unwrap(), 0);
        assert_eq!(cz_index_via_polar(&rotation_path(PI / 2.0)).unwrap(), 1);
        assert_eq!(cz_index_via_polar(&rotation_path(3.0 * PI)).unwrap(), 3);
        assert!(matches!(
            cz_index_via_polar(&zero_path()),
            Err(Error::ResonantInput)
        ));
    }

    #[test]
    fn methods_agree_on_quarter_rotation() {
        let p = rotation_path(PI / 2.0);
        assert_eq!(cz_index(&p).unwrap(), cz_index_via_polar(&p).unwrap());
    }

    #[test]
    fn rotation_number_exact_cases() {
        let rho = rotation_number(&zero_path(), 10).unwrap();
        assert!(rho.is_point() && rho.lo == 0.0);
        let rho = rotation_number(&hyperbolic_path(), 7).unwrap();
        assert!(rho.is_point() && rho.lo == 0.0);
    }

    #[test]
    fn rotation_number_enclosure() {
        let rho = rotation_number(&rotation_path(1.0), 100).unwrap();
        assert!(rho.contains(1.0 / (2.0 * PI)));
        assert!((rho.width() - 0.02).abs() < 1e-12);
    }

    #[test]
    fn mean_index_examples() {
        assert_eq!(mean_index(&zero_path(), 10).unwrap(), 0.0);
        assert_eq!(mean_index(&hyperbolic_path(), 50).unwrap(), 0.0);
        let m = mean_index(&rotation_path(2.0 * PI / 3.0), 200).unwrap();
        assert!((m - 2.0 / 3.0).abs() <= 0.01 + 1e-9, "m = {m}");
    }

    #[test]
    fn iterate_hyperbolic() {
        let rep = iterate_index(&hyperbolic_path(), 7).unwrap();
        assert_eq!(rep.i_kt, IterationIndex::Exact(0));
        assert_eq!(rep.predicted_label_kt, ClassLabel::new(1, Tag::H, 0).unwrap());
    }

    #[test]
    fn iterate_half_turn_parabolic() {
        // M(T) = -I: doubly resonant at 2T with eta = 1/2
        let p = rotation_path(PI);
        assert_eq!(classify(&p).unwrap(), ClassLabel::new(2, Tag::PStar, 0).unwrap());
        let rep = iterate_index(&p, 2).unwrap();
        assert_eq!(rep.i_kt, IterationIndex::Exact(2));
        assert_eq!(rep.predicted_label_kt, ClassLabel::new(1, Tag::PStarR, 1).unwrap());
    }

    #[test]
    fn iterate_commensurable_elliptic() {
        // phi = 2 pi / 3 = pi * (2/3): the third power of the monodromy is the
        // identity, a doubly resonant parabolic iterate
        let p = rotation_path(2.0 * PI / 3.0);
        assert_eq!(classify(&p).unwrap(), ClassLabel::new(2, Tag::EMinus, 0).unwrap());
        let rep = iterate_index(&p, 3).unwrap();
        assert_eq!(rep.i_kt, IterationIndex::Exact(2));
        assert_eq!(rep.predicted_label_kt, ClassLabel::new(1, Tag::PStarR, 1).unwrap());
    }

    #[test]
    fn iterate_incommensurable_elliptic() {
        // rho = 1/(2 pi): eta_{5T} = 5/(2 pi) lands in (1/2, 1)
        let p = rotation_path(1.0);
        let rep = iterate_index(&p, 5).unwrap();
        assert_eq!(rep.i_kt, IterationIndex::Exact(1));
        assert_eq!(rep.predicted_label_kt, ClassLabel::new(2, Tag::EPlus, 0).unwrap());
    }

    #[test]
    fn stability_verdicts() {
        assert_eq!(stability(&zero_path()).unwrap(), Stability::Stable);
        assert_eq!(stability(&hyperbolic_path()).unwrap(), Stability::Unstable);
        assert_eq!(
            stability(&rotation_path(PI / 2.0)).unwrap(),
            Stability::StronglyStable
        );
    }

    #[test]
    fn second_iterate_stability() {
        assert_eq!(
            stability_via_second_iterate(&rotation_path(PI / 5.0)).unwrap(),
            Stability::Stable
        );
        assert_eq!(
            stability_via_second_iterate(&hyperbolic_path()).unwrap(),
            Stability::Unstable
        );
        assert_eq!(
            stability_via_second_iterate(&rotation_path(2.0 * PI / 3.0)).unwrap(),
            Stability::Stable
        );
        assert!(matches!(
            stability_via_second_iterate(&zero_path()),
            Err(Error::ResonantInput)
        ));
    }

    #[test]
    fn rotation_vs_winding_trichotomy() {
        assert_eq!(
            rotation_vs_winding(&zero_path(), 3, 1).unwrap(),
            RotationComparison::Less
        );
        let full = rotation_path(2.0 * PI);
        assert_eq!(
            rotation_vs_winding(&full, 2, 2).unwrap(),
            RotationComparison::Equal
        );
        assert_eq!(
            rotation_vs_winding(&full, 3, 2).unwrap(),
            RotationComparison::Greater
        );
    }

    #[test]
    fn report_fields_serialize_by_contract() {
        let report = index_report(&rotation_path(PI / 2.0), 100).unwrap();
        assert_eq!(report.i_t, 1);
        assert_eq!(report.stability, Stability::StronglyStable);
        assert!((report.tau - 0.25).abs() < 1e-9);
        let value: serde_json::Value = serde_json::to_value(&report).unwrap();
        for key in [
            "eta_minus",
            "eta_plus",
            "label",
            "i_T",
            "rho_interval",
            "m",
            "tau",
            "stability",
        ] {
            assert!(value.get(key).is_some(), "missing field {key}");
        }
        assert_eq!(value["label"]["tag"], "e-");
        assert_eq!(value["stability"], "strongly_stable");
        let back: IndexReport<f64> = serde_json::from_value(value).unwrap();
        assert_eq!(back, report);
    }

    #[test]
    fn iteration_index_serde_shapes() {
        let exact = serde_json::to_value(IterationIndex::Exact(3)).unwrap();
        assert_eq!(exact, serde_json::json!(3));
        let bracket = serde_json::to_value(IterationIndex::Bracket { lo: 1, hi: 5 }).unwrap();
        assert_eq!(bracket, serde_json::json!({"lo": 1, "hi": 5}));
        let parsed: IterationIndex = serde_json::from_value(serde_json::json!(7)).unwrap();
        assert_eq!(parsed, IterationIndex::Exact(7));
    }

    #[test]
    fn mean_matches_elliptic_fraction() {
        // rho = 0.7 through a full slow turn: e+ with tau = 0.7
        let p = rotation_path(2.0 * PI * 0.7);
        let report = index_report(&p, 200).unwrap();
        assert_eq!(report.label, ClassLabel::new(2, Tag::EPlus, 0).unwrap());
        assert!((report.tau - 0.7).abs() < 1e-9);
        assert!((report.m - 1.4).abs() < 0.011);
        assert!(report.rho_interval.contains(0.7));
    }
}
