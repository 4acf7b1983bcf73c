//! Dense complex linear algebra.
//!
//! Provides the spectral operations the masking bounds consume: Hermitian
//! eigendecomposition, SVD, trace (Schatten-1) norm, positive-semidefinite
//! square root, Uhlmann fidelity, and Haar-random sampling. All
//! decompositions are deterministic given input bits.

mod eigen;
mod matrix;
mod norms;
mod random;
mod svd;

pub use eigen::{hermitian_eigen, HermitianEigen};
pub use matrix::ComplexMatrix;
pub use norms::{
    fidelity, frobenius_norm, psd_sqrt, trace_norm, DEFAULT_HERMITICITY_TOL,
    DEFAULT_PSD_CLAMP_TOL,
};
pub use random::{ginibre, haar_unitary, random_density_matrix};
pub use svd::{qr, svd, Svd};
