//! Hermitian eigendecomposition via cyclic complex Jacobi rotations.
//!
//! Deterministic: sweep order is fixed, so identical input bits give
//! identical output bits.

use num_complex::Complex;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

const MAX_SWEEPS: usize = 128;

/// Spectral decomposition `A = V diag(λ) V†` of a Hermitian matrix.
///
/// Eigenvalues ascending; each eigenvector's largest-magnitude entry is made
/// real positive so degenerate inputs still decompose reproducibly.
#[derive(Clone, Debug)]
pub struct HermitianEigen<S> {
    pub eigenvalues: Vec<S>,
    pub eigenvectors: ComplexMatrix<S>,
}

impl<S: Scalar> HermitianEigen<S> {
    /// Rebuilds `V diag(λ) V†`.
    pub fn reconstruct(&self) -> ComplexMatrix<S> {
        let d = ComplexMatrix::from_real_diagonal(&self.eigenvalues);
        &(&self.eigenvectors * &d) * &self.eigenvectors.adjoint()
    }
}

/// 2x2 unitary `J` with `J† [[app, apq], [conj(apq), aqq]] J` diagonal.
///
/// Returned as `(j11, j12, j21, j22)`.
pub(crate) fn pair_rotation<S: Scalar>(
    app: S,
    aqq: S,
    apq: Complex<S>,
) -> (Complex<S>, Complex<S>, Complex<S>, Complex<S>) {
    let mag = apq.norm();
    let phase = apq / Complex::new(mag, S::zero());
    let tau = (aqq - app) / (S::real(2.0) * mag);
    let t = if tau == S::zero() {
        S::one()
    } else {
        tau.signum() / (tau.abs() + (S::one() + tau * tau).sqrt())
    };
    let c = S::one() / (S::one() + t * t).sqrt();
    let s = t * c;
    let j11 = Complex::new(c, S::zero());
    let j12 = Complex::new(s, S::zero());
    let j21 = -phase.conj() * s;
    let j22 = phase.conj() * c;
    (j11, j12, j21, j22)
}

fn off_diagonal_norm<S: Scalar>(w: &ComplexMatrix<S>) -> S {
    let n = w.rows();
    let mut sum = S::zero();
    for p in 0..n {
        for q in 0..n {
            if p != q {
                sum += w[(p, q)].norm_sqr();
            }
        }
    }
    sum.sqrt()
}

/// Decomposes a (numerically) Hermitian matrix.
///
/// The input is symmetrized to `(A + A†)/2` before iteration; an
/// anti-Hermitian part above `hermiticity_tol · max(1, ‖A‖_F)` is an error.
pub fn hermitian_eigen<S: Scalar>(
    a: &ComplexMatrix<S>,
    hermiticity_tol: S,
) -> Result<HermitianEigen<S>> {
    if !a.is_square() {
        return Err(Error::NonSquare { rows: a.rows(), cols: a.cols() });
    }
    let defect = a.hermitian_defect();
    let scale = S::one().max(a.frobenius_norm());
    if defect > hermiticity_tol * scale {
        return Err(Error::NotHermitian {
            defect: defect.as_f64(),
            tol: (hermiticity_tol * scale).as_f64(),
        });
    }

    let n = a.rows();
    let mut w = a.hermitize();
    let mut v = ComplexMatrix::<S>::identity(n);
    if n > 1 {
        let stop = S::epsilon() * S::real(n as f64) * scale;
        let rotate_floor = S::epsilon() * scale;
        let mut converged = false;
        for _ in 0..MAX_SWEEPS {
            if off_diagonal_norm(&w) <= stop {
                converged = true;
                break;
            }
            for p in 0..n - 1 {
                for q in p + 1..n {
                    let apq = w[(p, q)];
                    if apq.norm() <= rotate_floor {
                        continue;
                    }
                    let (j11, j12, j21, j22) = pair_rotation(w[(p, p)].re, w[(q, q)].re, apq);
                    // W <- J† W J on the (p, q) plane.
                    w.rotate_columns(p, q, j11, j12, j21, j22);
                    for col in 0..n {
                        let rp = w[(p, col)];
                        let rq = w[(q, col)];
                        w[(p, col)] = j11.conj() * rp + j21.conj() * rq;
                        w[(q, col)] = j12.conj() * rp + j22.conj() * rq;
                    }
                    v.rotate_columns(p, q, j11, j12, j21, j22);
                }
            }
        }
        if !converged && off_diagonal_norm(&w) > stop {
            return Err(Error::ConvergenceFailure { sweeps: MAX_SWEEPS });
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        w[(i, i)].re.partial_cmp(&w[(j, j)].re).expect("finite eigenvalues")
    });
    let eigenvalues: Vec<S> = order.iter().map(|&i| w[(i, i)].re).collect();
    let mut eigenvectors = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = v.column(src);
        // Phase convention: largest-magnitude entry real positive.
        let mut best = 0;
        for (j, z) in col.iter().enumerate() {
            if z.norm_sqr() > col[best].norm_sqr() {
                best = j;
            }
        }
        let mag = col[best].norm();
        if mag > S::zero() {
            let phase = col[best] / Complex::new(mag, S::zero());
            for z in col.iter_mut() {
                *z = *z * phase.conj();
            }
        }
        eigenvectors.set_column(dst, &col);
    }
    Ok(HermitianEigen { eigenvalues, eigenvectors })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn identity_eigenvalues() {
        let e = hermitian_eigen(&ComplexMatrix::<f64>::identity(2), 1e-10).unwrap();
        assert_abs_diff_eq!(e.eigenvalues[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(e.eigenvalues[1], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn diagonal_sorted_ascending() {
        let a = ComplexMatrix::from_real_diagonal(&[3.0, -1.0]);
        let e = hermitian_eigen(&a, 1e-10).unwrap();
        assert_abs_diff_eq!(e.eigenvalues[0], -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(e.eigenvalues[1], 3.0, epsilon = 1e-14);
    }

    #[test]
    fn pauli_x_spectrum() {
        // Characteristic polynomial λ² − 1.
        let a = ComplexMatrix::new(2, 2, vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
            .unwrap();
        let e = hermitian_eigen(&a, 1e-10).unwrap();
        assert_abs_diff_eq!(e.eigenvalues[0], -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(e.eigenvalues[1], 1.0, epsilon = 1e-12);
        assert!((&e.reconstruct() - &a).frobenius_norm() < 1e-12);
        assert!(e.eigenvectors.unitarity_defect() < 1e-12);
    }

    #[test]
    fn rejects_non_hermitian() {
        let a = ComplexMatrix::new(2, 2, vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)])
            .unwrap();
        assert!(matches!(hermitian_eigen(&a, 1e-10), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn rejects_non_square() {
        let a = ComplexMatrix::<f64>::zeros(2, 3);
        assert!(matches!(hermitian_eigen(&a, 1e-10), Err(Error::NonSquare { .. })));
    }
}
