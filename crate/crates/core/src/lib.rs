//! Computation and verification toolkit for M-metric spaces.
//!
//! An M-metric on a set `X` is a symmetric `sigma: X x X -> R` whose
//! self-distances may be nonzero (and negative), with
//! `m_xy = min(sigma(x,x), sigma(y,y))` bounded by `sigma(x,y)` and a triangle
//! inequality on `sigma(x,y) - m_xy`. Partial metrics and metrics are special
//! cases.
//!
//! The crate provides:
//!
//! * [`classify`] - exhaustive axiom checks on finite tables with witnesses;
//! * [`derived`] - `sigma*` and the induced partial metric;
//! * [`spacegen`] - seeded random M-metric and partial-metric tables;
//! * [`topology`] - ball families, generated topologies and their comparison;
//! * [`sequences`] - r-Cauchy analysis, limits and special limits;
//! * [`contraction`] - orbital contraction certificates and map properties;
//! * [`fixedpoint`] - the fixed-point solver with Banach and Kannan front-ends;
//! * [`corpus`] - named spaces and map systems.
//!
//! All of it is generic over [`Scalar`]; `f64` and [`Rational`] are the
//! common choices.

pub mod classify;
pub mod contraction;
pub mod corpus;
pub mod derived;
pub mod error;
pub mod fixedpoint;
pub mod scalar;
pub mod sequences;
pub mod space;
pub mod spacegen;
pub mod topology;

pub use contraction::{
    check_bounded_below, check_c_r, check_nonexpansive, check_phi_r, check_weak_orbital_continuity,
    ContractionCertificate, MapSystem, Phi,
};
pub use fixedpoint::{banach, kannan, solve, Branch, FixedPointResult, OrbitReport};
pub use sequences::{
    cauchy_analyze, is_limit, limit_transfer, special_limit_unique, special_limits, CauchyStatus,
    CauchyVerdict, LimitVerdict, SequencePrefix,
};
pub use classify::{classify, Axiom, AxiomResult, Class, ClassificationReport, Witness};
pub use derived::{induce_partial, min_max_inequality_check, sigma_star};
pub use error::{Error, Result};
pub use scalar::Scalar;
pub use space::{FiniteSpace, FunctionalSpace, Space};

/// Exact rational scalar.
pub type Rational = num_rational::Ratio<i64>;

pub type FiniteSpace64 = FiniteSpace<f64>;
pub type RationalSpace = FiniteSpace<Rational>;
pub type FunctionalSpace64 = FunctionalSpace<f64>;
pub type FiniteMap<S> = MapSystem<S, FiniteSpace<S>>;
pub type FunctionalMap64 = MapSystem<f64, FunctionalSpace<f64>>;
