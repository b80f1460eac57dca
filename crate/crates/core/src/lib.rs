//! Lower bounds for sorting under partial information.
//!
//! Given a finite poset `P`, this crate computes the classical quantities
//! (the information-theoretic bound `ln |Δ(P)|` and the entropy bound
//! `n (ln n - H(P))` over the chain polytope) and the quantum ones (the
//! adversary quantity `QLB(P)`, its polytope form `QH(P)`, and explicit
//! adversary matrices with spectral-norm certificates), together with
//! the numerical checks that tie them together.
//!
//! Real-valued geometry is generic over [`Scalar`] (`f32` or `f64`);
//! identities between harmonic sums are evaluated in exact rationals.

pub mod entropy;
pub mod error;
pub mod generate;
pub mod linext;
pub mod numeric;
pub mod orderstats;
pub mod polytope;
pub mod poset;
pub mod quadrature;
pub mod quantum;
pub mod report;
mod scalar;
pub mod sp;
pub mod suites;

pub use error::{Error, Result};
pub use linext::{LinearExtension, Limits};
pub use poset::{Chain, Poset};
pub use report::{analyze, AnalyzeOptions, BoundsReport};
pub use scalar::Scalar;
pub use sp::{parse_sp, recognize_sp, SpExpr};

pub type OrderPoint64 = polytope::OrderPoint<f64>;
pub type ChainPoint64 = polytope::ChainPoint<f64>;
pub type OrderPoint32 = polytope::OrderPoint<f32>;
pub type ChainPoint32 = polytope::ChainPoint<f32>;
pub type EntropySolution64 = entropy::EntropySolution<f64>;
pub type AdversaryMatrix64 = quantum::AdversaryMatrix<f64>;
pub type DenseSymmetric64 = quantum::DenseSymmetric<f64>;
/// Exact rational used for harmonic-sum identities.
pub type Rational = num_rational::BigRational;
