//! Numerical toolkit for quantum-information masking no-go theorems.
//!
//! The crate evaluates exact, probabilistic, and ε-approximate maskers,
//! certifies the operator-inequality chains behind the masking bounds on
//! arbitrary candidate maskers, computes the theoretical ε lower bound, and
//! searches the unitary group for the best achievable approximate masker.
//!
//! Core math is generic over the real scalar type (`f32` or `f64`) through
//! the [`Scalar`] trait; concrete `f64` aliases are exported at the root.

pub mod bounds;
pub mod error;
pub mod linalg;
pub mod masking;
pub mod optimizer;
pub mod rng;
pub mod scalar;
pub mod states;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Dense complex matrix over `f64`, the default numeric carrier.
pub type ComplexMatrix64 = linalg::ComplexMatrix<f64>;
/// Dense complex matrix over `f32`.
pub type ComplexMatrix32 = linalg::ComplexMatrix<f32>;
/// Normalized state vector over `f64`.
pub type Ket64 = states::Ket<f64>;
/// Bipartite pure state over `f64`.
pub type BipartitePureState64 = states::BipartitePureState<f64>;
/// Exact unitary masker over `f64`.
pub type UnitaryMasker64 = masking::UnitaryMasker<f64>;
/// Probabilistic (injective, trace-decreasing) masker over `f64`.
pub type ProbabilisticMasker64 = masking::ProbabilisticMasker<f64>;
/// Witness report over `f64`.
pub type WitnessReport64 = bounds::WitnessReport<f64>;
/// Theoretical bound over `f64`.
pub type BoundResult64 = bounds::BoundResult<f64>;
