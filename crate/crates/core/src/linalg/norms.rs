//! Trace norm, PSD square root, and Uhlmann fidelity.

use super::eigen::hermitian_eigen;
use super::matrix::ComplexMatrix;
use super::svd::svd;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Relative anti-Hermitian part above this is an error, below it is
/// symmetrized away.
pub const DEFAULT_HERMITICITY_TOL: f64 = 1e-8;

/// Eigenvalues in `[-DEFAULT_PSD_CLAMP_TOL, 0)` are clamped to zero when
/// taking PSD square roots; anything lower is a genuine negativity.
pub const DEFAULT_PSD_CLAMP_TOL: f64 = 1e-9;

/// Hermitian fast path cutoff for the trace norm.
const HERMITIAN_FAST_PATH_TOL: f64 = 1e-10;

/// Schatten-1 norm: the sum of singular values.
///
/// Inputs Hermitian within 1e-10 take the |eigenvalue|-sum fast path.
pub fn trace_norm<S: Scalar>(a: &ComplexMatrix<S>) -> Result<S> {
    if a.is_square() && a.is_hermitian(S::real(HERMITIAN_FAST_PATH_TOL)) {
        let eig = hermitian_eigen(a, S::real(HERMITIAN_FAST_PATH_TOL))?;
        return Ok(eig.eigenvalues.iter().map(|l| l.abs()).sum());
    }
    let s = svd(a)?;
    Ok(s.singular_values.iter().copied().sum())
}

/// Hilbert–Schmidt (Frobenius) norm.
pub fn frobenius_norm<S: Scalar>(a: &ComplexMatrix<S>) -> S {
    a.frobenius_norm()
}

/// Hermitian PSD square root `S` with `S² = P`.
///
/// Eigenvalues in `[-clamp_tol, 0)` are clamped to zero; below `-clamp_tol`
/// the input is rejected as non-PSD.
pub fn psd_sqrt<S: Scalar>(p: &ComplexMatrix<S>, clamp_tol: S) -> Result<ComplexMatrix<S>> {
    let eig = hermitian_eigen(p, S::real(DEFAULT_HERMITICITY_TOL))?;
    let mut roots = Vec::with_capacity(eig.eigenvalues.len());
    for &l in &eig.eigenvalues {
        if l < -clamp_tol {
            return Err(Error::NotPositiveSemidefinite {
                value: l.as_f64(),
                tol: clamp_tol.as_f64(),
            });
        }
        roots.push(l.max(S::zero()).sqrt());
    }
    let d = ComplexMatrix::from_real_diagonal(&roots);
    Ok((&(&eig.eigenvectors * &d) * &eig.eigenvectors.adjoint()).hermitize())
}

fn validate_density<S: Scalar>(p: &ComplexMatrix<S>, name: &str) -> Result<()> {
    if !p.is_square() {
        return Err(Error::NotDensityMatrix { reason: format!("{name} is not square") });
    }
    if !p.is_hermitian(S::real(DEFAULT_HERMITICITY_TOL)) {
        return Err(Error::NotDensityMatrix { reason: format!("{name} is not Hermitian") });
    }
    let tr = p.trace();
    if (tr.re - S::one()).abs() > S::real(1e-8) || tr.im.abs() > S::real(1e-8) {
        return Err(Error::NotDensityMatrix {
            reason: format!("{name} has trace {:+e}{:+e}i", tr.re.as_f64(), tr.im.as_f64()),
        });
    }
    Ok(())
}

/// Uhlmann fidelity `F(P, Q) = Tr sqrt(sqrt(P) Q sqrt(P))`.
///
/// Computed as `‖sqrt(P) sqrt(Q)‖₁`, which agrees with the defining
/// expression in exact arithmetic and is stabler near rank deficiency.
pub fn fidelity<S: Scalar>(p: &ComplexMatrix<S>, q: &ComplexMatrix<S>) -> Result<S> {
    validate_density(p, "P")?;
    validate_density(q, "Q")?;
    if p.rows() != q.rows() {
        return Err(Error::DimensionMismatch { expected: p.rows(), got: q.rows() });
    }
    let clamp = S::real(1e-8);
    let sp = psd_sqrt(p, clamp)?;
    let sq = psd_sqrt(q, clamp)?;
    trace_norm(&(&sp * &sq))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use num_complex::Complex;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn pure(amplitudes: &[Complex<f64>]) -> ComplexMatrix<f64> {
        ComplexMatrix::outer(amplitudes, amplitudes)
    }

    #[test]
    fn trace_norm_hermitian_and_unitary() {
        let a = ComplexMatrix::from_real_diagonal(&[1.0, -1.0]);
        assert_abs_diff_eq!(trace_norm(&a).unwrap(), 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            trace_norm(&ComplexMatrix::<f64>::identity(3)).unwrap(),
            3.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn trace_norm_hadamard_half() {
        // Eigenvalues ±1/√2.
        let h = ComplexMatrix::new(
            2,
            2,
            vec![c(0.5, 0.0), c(0.5, 0.0), c(0.5, 0.0), c(-0.5, 0.0)],
        )
        .unwrap();
        assert_abs_diff_eq!(trace_norm(&h).unwrap(), 2f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn psd_sqrt_examples() {
        let i2 = ComplexMatrix::<f64>::identity(2);
        assert!((&psd_sqrt(&i2, 1e-9).unwrap() - &i2).frobenius_norm() < 1e-12);

        let d = ComplexMatrix::from_real_diagonal(&[4.0, 9.0]);
        let want = ComplexMatrix::from_real_diagonal(&[2.0, 3.0]);
        assert!((&psd_sqrt(&d, 1e-9).unwrap() - &want).frobenius_norm() < 1e-12);

        // Rank-1 projector is its own square root.
        let proj = pure(&[c(1.0 / 2f64.sqrt(), 0.0), c(1.0 / 2f64.sqrt(), 0.0)]);
        assert!((&psd_sqrt(&proj, 1e-9).unwrap() - &proj).frobenius_norm() < 1e-10);
    }

    #[test]
    fn psd_sqrt_rejects_negative() {
        let a = ComplexMatrix::from_real_diagonal(&[1.0, -1e-3]);
        assert!(matches!(psd_sqrt(&a, 1e-9), Err(Error::NotPositiveSemidefinite { .. })));
    }

    #[test]
    fn fidelity_examples() {
        let zero = pure(&[c(1.0, 0.0), c(0.0, 0.0)]);
        let one = pure(&[c(0.0, 0.0), c(1.0, 0.0)]);
        let mixed = ComplexMatrix::from_real_diagonal(&[0.5, 0.5]);
        assert_abs_diff_eq!(fidelity(&zero, &zero).unwrap(), 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(fidelity(&zero, &one).unwrap(), 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!(fidelity(&mixed, &zero).unwrap(), 1.0 / 2f64.sqrt(), epsilon = 1e-10);
    }

    #[test]
    fn fidelity_rejects_non_density() {
        let bad = ComplexMatrix::from_real_diagonal(&[0.9, 0.9]);
        let ok = ComplexMatrix::from_real_diagonal(&[0.5, 0.5]);
        assert!(fidelity(&bad, &ok).is_err());
    }
}
