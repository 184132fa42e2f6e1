//! Rotational and index portraits of T-periodic planar linear Hamiltonian
//! systems J z' = S(t) z, and subharmonic orbit search for their nonlinear
//! counterparts via the twist mechanism of the Poincare-Birkhoff theorem.
//!
//! The crate computes, for a given coefficient path S(t):
//! monodromy and Floquet multipliers, winding-number extrema of the clockwise
//! angular lift, the Conley-Zehnder index (by classification table and by
//! polar-angle lift), rotation number and mean index, index iteration along
//! k-fold period covers, and stability verdicts. On top of the linear layer it
//! enumerates subharmonic candidates (k, j) from rotation-number gaps between
//! zero and infinity, certifies twist radii, and locates kT-periodic orbits of
//! nonlinear planar Hamiltonian systems by a damped Newton method on the
//! Poincare map.

pub mod coeff;
pub mod error;
pub mod flow;
pub mod hill;
pub mod index;
pub mod mat2;
pub mod ode;
pub mod planar;
pub mod polar;
pub mod real;

pub use error::{Error, Result};
pub use real::Real;

// Concrete f64 aliases for the generic core types.
pub type Mat2d = mat2::Mat2<f64>;
pub type PolarCoordsd = polar::PolarCoords<f64>;
pub type CoeffPathd = coeff::CoeffPath<f64>;
pub type TrigPolyd = coeff::TrigPoly<f64>;
pub type FundamentalPathd = flow::FundamentalPath<f64>;
pub type AngularSolutiond = flow::AngularSolution<f64>;
pub type WindingExtremad = index::WindingExtrema<f64>;
pub type RotationIntervald = index::RotationInterval<f64>;
pub type IndexReportd = index::IndexReport<f64>;
pub type HillProblemd = hill::HillProblem<f64>;
pub type SpectrumReportd = hill::SpectrumReport<f64>;

// f32 variants of the low-level algebra.
pub type Mat2f = mat2::Mat2<f32>;
pub type PolarCoordsf = polar::PolarCoords<f32>;
pub type CoeffPathf = coeff::CoeffPath<f32>;
