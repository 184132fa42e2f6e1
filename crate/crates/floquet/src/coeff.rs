//! Periodic coefficient paths S(t) = [[a, b], [b, c]] for the linear system
//! J z' = S(t) z, given either as trigonometric polynomials or as uniformly
//! sampled tables with periodic cubic interpolation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mat2::Mat2;
use crate::real::Real;

/// Real trigonometric polynomial on [0, T): coefficient index n multiplies
/// cos(2 pi n t / T) resp. sin(2 pi n t / T).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrigPoly<R> {
    #[serde(default = "Vec::new")]
    pub cos: Vec<R>,
    #[serde(default = "Vec::new")]
    pub sin: Vec<R>,
}

impl<R: Real> TrigPoly<R> {
    pub fn constant(value: R) -> Self {
        TrigPoly { cos: vec![value], sin: Vec::new() }
    }

    pub fn zero() -> Self {
        TrigPoly { cos: Vec::new(), sin: Vec::new() }
    }

    pub fn eval(&self, t: R, period: R) -> R {
        let base = R::TAU() * t / period;
        let mut acc = R::zero();
        for (n, &c) in self.cos.iter().enumerate() {
            if n == 0 {
                acc = acc + c;
            } else {
                acc = acc + c * (base * R::of(n as f64)).cos();
            }
        }
        for (n, &s) in self.sin.iter().enumerate() {
            if n > 0 {
                acc = acc + s * (base * R::of(n as f64)).sin();
            }
            // the n = 0 sine term is identically zero
        }
        acc
    }

    /// Shift the constant term by `delta`.
    pub fn shifted(&self, delta: R) -> Self {
        let mut cos = self.cos.clone();
        if cos.is_empty() {
            cos.push(delta);
        } else {
            cos[0] = cos[0] + delta;
        }
        TrigPoly { cos, sin: self.sin.clone() }
    }

    pub fn max_abs_bound(&self) -> R {
        let mut acc = R::zero();
        for &c in &self.cos {
            acc = acc + c.abs();
        }
        for &s in &self.sin {
            acc = acc + s.abs();
        }
        acc
    }
}

/// Uniform samples on [0, T) evaluated by local cubic interpolation with
/// periodic wraparound; values at t and t + T agree by construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PeriodicTable<R> {
    pub samples: Vec<R>,
}

impl<R: Real> PeriodicTable<R> {
    pub fn new(samples: Vec<R>) -> Result<Self> {
        if samples.len() < 4 {
            return Err(Error::InvalidConfig(
                "periodic table needs at least 4 samples".into(),
            ));
        }
        Ok(PeriodicTable { samples })
    }

    pub fn from_fn(f: impl Fn(R) -> R, n: usize, period: R) -> Result<Self> {
        let samples = (0..n)
            .map(|i| f(period * R::of(i as f64) / R::of(n as f64)))
            .collect();
        Self::new(samples)
    }

    pub fn eval(&self, t: R, period: R) -> R {
        let n = self.samples.len();
        let mut u = (t / period).fract() * R::of(n as f64);
        if u < R::zero() {
            u = u + R::of(n as f64);
        }
        let i = u.floor().to_f64().unwrap_or(0.0) as isize;
        let x = u - R::of(i as f64);
        let idx = |k: isize| -> R {
            let j = (i + k).rem_euclid(n as isize) as usize;
            self.samples[j]
        };
        let (p0, p1, p2, p3) = (idx(-1), idx(0), idx(1), idx(2));
        // Catmull-Rom cubic through the four neighboring samples
        let half = R::of(0.5);
        let a = (-p0 + R::of(3.0) * p1 - R::of(3.0) * p2 + p3) * half;
        let b = (R::of(2.0) * p0 - R::of(5.0) * p1 + R::of(4.0) * p2 - p3) * half;
        let c = (p2 - p0) * half;
        ((a * x + b) * x + c) * x + p1
    }

    pub fn max_abs(&self) -> R {
        self.samples
            .iter()
            .fold(R::zero(), |m, s| m.max(s.abs()))
    }
}

/// One scalar coefficient of the path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coefficient<R> {
    Trig(TrigPoly<R>),
    Table(PeriodicTable<R>),
}

impl<R: Real> Coefficient<R> {
    pub fn eval(&self, t: R, period: R) -> R {
        match self {
            Coefficient::Trig(p) => p.eval(t, period),
            Coefficient::Table(tb) => tb.eval(t, period),
        }
    }

    pub fn constant(value: R) -> Self {
        Coefficient::Trig(TrigPoly::constant(value))
    }

    pub fn zero() -> Self {
        Coefficient::Trig(TrigPoly::zero())
    }

    /// Upper bound for |coefficient| over a period.
    pub fn magnitude_bound(&self) -> R {
        match self {
            Coefficient::Trig(p) => p.max_abs_bound(),
            // cubic interpolation can overshoot samples slightly
            Coefficient::Table(tb) => tb.max_abs() * R::of(1.25),
        }
    }

    /// Shift the coefficient pointwise by a constant.
    pub fn shifted(&self, delta: R) -> Self {
        match self {
            Coefficient::Trig(p) => Coefficient::Trig(p.shifted(delta)),
            Coefficient::Table(tb) => Coefficient::Table(PeriodicTable {
                samples: tb.samples.iter().map(|&s| s + delta).collect(),
            }),
        }
    }
}

/// T-periodic symmetric coefficient path of a planar linear Hamiltonian system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoeffPath<R> {
    #[serde(rename = "T")]
    pub period: R,
    pub a: Coefficient<R>,
    pub b: Coefficient<R>,
    pub c: Coefficient<R>,
}

impl<R: Real> CoeffPath<R> {
    pub fn new(period: R, a: Coefficient<R>, b: Coefficient<R>, c: Coefficient<R>) -> Result<Self> {
        if !(period > R::zero()) || !period.is_finite() {
            return Err(Error::InvalidConfig("period must be positive and finite".into()));
        }
        Ok(CoeffPath { period, a, b, c })
    }

    /// Constant path S = [[a, b], [b, c]].
    pub fn constant(a: R, b: R, c: R, period: R) -> Self {
        CoeffPath {
            period,
            a: Coefficient::constant(a),
            b: Coefficient::constant(b),
            c: Coefficient::constant(c),
        }
    }

    /// The zero path S = 0.
    pub fn zero(period: R) -> Self {
        CoeffPath::constant(R::zero(), R::zero(), R::zero(), period)
    }

    pub fn a(&self, t: R) -> R {
        self.a.eval(t, self.period)
    }

    pub fn b(&self, t: R) -> R {
        self.b.eval(t, self.period)
    }

    pub fn c(&self, t: R) -> R {
        self.c.eval(t, self.period)
    }

    pub fn s_matrix(&self, t: R) -> Mat2<R> {
        let (a, b, c) = (self.a(t), self.b(t), self.c(t));
        Mat2::new(a, b, b, c)
    }

    /// Sum of coefficient magnitude bounds; controls winding speed.
    pub fn magnitude_bound(&self) -> R {
        self.a.magnitude_bound() + self.b.magnitude_bound() + self.c.magnitude_bound()
    }

    /// Parse the structured text configuration
    /// `{"T": .., "a": {"cos": [..], "sin": [..]}, "b": {..}, "c": {..}}`.
    pub fn from_json(text: &str) -> Result<Self>
    where
        R: serde::de::DeserializeOwned,
    {
        let path: CoeffPath<R> =
            serde_json::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        CoeffPath::new(path.period, path.a, path.b, path.c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    #[test]
    fn trig_eval_matches_series() {
        let p = TrigPoly { cos: vec![1.0, 0.5], sin: vec![0.0, -0.25] };
        let period = 3.0;
        for i in 0..17 {
            let t = 0.19 * i as f64;
            let w = TAU * t / period;
            let expected = 1.0 + 0.5 * w.cos() - 0.25 * w.sin();
            assert!((p.eval(t, period) - expected).abs() < 1e-14);
        }
    }

    #[test]
    fn table_interpolates_smooth_function_periodically() {
        let period = TAU;
        let table = PeriodicTable::from_fn(|t: f64| (t).sin() + 0.3 * (2.0 * t).cos(), 64, period).unwrap();
        for i in 0..50 {
            let t = 0.137 * i as f64;
            let exact = t.sin() + 0.3 * (2.0 * t).cos();
            assert!((table.eval(t, period) - exact).abs() < 5e-4, "t = {t}");
            // periodicity to machine precision
            assert!((table.eval(t, period) - table.eval(t + period, period)).abs() < 1e-12);
            assert!((table.eval(t, period) - table.eval(t - period, period)).abs() < 1e-12);
        }
    }

    #[test]
    fn config_parses_and_rejects_unknown_fields() {
        let text = r#"{"T": 6.283185307179586,
            "a": {"cos": [1.0], "sin": []},
            "b": {"cos": [], "sin": []},
            "c": {"cos": [1.0], "sin": []}}"#;
        let path: CoeffPath<f64> = CoeffPath::from_json(text).unwrap();
        assert!((path.a(0.3) - 1.0).abs() < 1e-15);
        assert!((path.b(0.3)).abs() < 1e-15);

        let bad = r#"{"T": 1.0, "a": {"cos": []}, "b": {"cos": []}, "c": {"cos": []}, "d": 3}"#;
        assert!(CoeffPath::<f64>::from_json(bad).is_err());
    }

    #[test]
    fn shifted_adds_to_constant_term() {
        let p = TrigPoly::<f64> { cos: vec![2.0, 1.0], sin: vec![] };
        let q = p.shifted(0.5);
        assert!((q.eval(0.0, 1.0) - 3.5).abs() < 1e-15);
        let z = TrigPoly::<f64>::zero().shifted(-1.0);
        assert_eq!(z.eval(0.7, 1.0), -1.0);
    }

    #[test]
    fn negative_period_rejected() {
        assert!(CoeffPath::<f64>::new(
            -1.0,
            Coefficient::zero(),
            Coefficient::zero(),
            Coefficient::zero()
        )
        .is_err());
    }
}
