//! Haar-random unitaries and random density matrices.

use num_complex::Complex;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::matrix::ComplexMatrix;
use super::svd::qr;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Complex Ginibre matrix: i.i.d. entries `(x + iy)/√2` with `x, y` standard
/// normal.
pub fn ginibre<S, R>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix<S>
where
    S: Scalar,
    R: Rng + ?Sized,
    StandardNormal: Distribution<S>,
{
    let inv_sqrt2 = S::real(std::f64::consts::FRAC_1_SQRT_2);
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        let re: S = rng.sample(StandardNormal);
        let im: S = rng.sample(StandardNormal);
        Complex::new(re * inv_sqrt2, im * inv_sqrt2)
    })
}

/// Haar-distributed `n x n` unitary.
///
/// Ginibre + QR with the R-diagonal phase normalization; plain QR of a
/// Gaussian matrix is not Haar.
pub fn haar_unitary<S, R>(n: usize, rng: &mut R) -> Result<ComplexMatrix<S>>
where
    S: Scalar,
    R: Rng + ?Sized,
    StandardNormal: Distribution<S>,
{
    if n == 0 {
        return Err(Error::InvalidDimension { min: 1, got: 0 });
    }
    let g = ginibre(n, n, rng);
    let (q, r) = qr(&g)?;
    let mut u = q;
    for j in 0..n {
        let d = r[(j, j)];
        let mag = d.norm();
        let phase = if mag > S::zero() {
            d / Complex::new(mag, S::zero())
        } else {
            Complex::new(S::one(), S::zero())
        };
        for row in 0..n {
            let cur = u[(row, j)];
            u[(row, j)] = cur * phase;
        }
    }
    Ok(u)
}

/// Random density matrix `G G† / Tr(G G†)` from a Ginibre factor.
pub fn random_density_matrix<S, R>(n: usize, rng: &mut R) -> Result<ComplexMatrix<S>>
where
    S: Scalar,
    R: Rng + ?Sized,
    StandardNormal: Distribution<S>,
{
    if n == 0 {
        return Err(Error::InvalidDimension { min: 1, got: 0 });
    }
    let g: ComplexMatrix<S> = ginibre(n, n, rng);
    let gram = (&g * &g.adjoint()).hermitize();
    let tr = gram.trace().re;
    Ok(gram.scaled(Complex::new(S::one() / tr, S::zero())))
}
