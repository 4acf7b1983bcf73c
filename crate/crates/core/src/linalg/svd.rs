//! Singular value decomposition via one-sided Jacobi, plus Householder QR.

use num_complex::Complex;

use super::eigen::pair_rotation;
use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

const MAX_SWEEPS: usize = 128;

/// `A = U diag(σ) V†` with `U` (m x m) and `V` (n x n) unitary and the
/// singular values sorted descending.
#[derive(Clone, Debug)]
pub struct Svd<S> {
    pub singular_values: Vec<S>,
    pub u: ComplexMatrix<S>,
    pub v: ComplexMatrix<S>,
}

impl<S: Scalar> Svd<S> {
    /// Rebuilds `U diag(σ) V†`.
    pub fn reconstruct(&self) -> ComplexMatrix<S> {
        let m = self.u.rows();
        let n = self.v.rows();
        let mut sigma = ComplexMatrix::zeros(m, n);
        for (j, &s) in self.singular_values.iter().enumerate() {
            sigma[(j, j)] = Complex::new(s, S::zero());
        }
        &(&self.u * &sigma) * &self.v.adjoint()
    }
}

/// One-sided Jacobi SVD. Deterministic sweep order.
pub fn svd<S: Scalar>(a: &ComplexMatrix<S>) -> Result<Svd<S>> {
    if a.entries().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFiniteEntries);
    }
    if a.rows() < a.cols() {
        let t = svd(&a.adjoint())?;
        return Ok(Svd { singular_values: t.singular_values, u: t.v, v: t.u });
    }
    let m = a.rows();
    let n = a.cols();
    let mut b = a.clone();
    let mut v = ComplexMatrix::<S>::identity(n);

    if n > 1 {
        let eps = S::epsilon();
        let mut converged = false;
        for _ in 0..MAX_SWEEPS {
            let mut rotated = false;
            for p in 0..n - 1 {
                for q in p + 1..n {
                    let mut app = S::zero();
                    let mut aqq = S::zero();
                    let mut apq = Complex::new(S::zero(), S::zero());
                    for row in 0..m {
                        let bp = b[(row, p)];
                        let bq = b[(row, q)];
                        app += bp.norm_sqr();
                        aqq += bq.norm_sqr();
                        apq += bp.conj() * bq;
                    }
                    if app == S::zero() || aqq == S::zero() {
                        continue;
                    }
                    if apq.norm() <= eps * (app * aqq).sqrt() {
                        continue;
                    }
                    rotated = true;
                    let (j11, j12, j21, j22) = pair_rotation(app, aqq, apq);
                    b.rotate_columns(p, q, j11, j12, j21, j22);
                    v.rotate_columns(p, q, j11, j12, j21, j22);
                }
            }
            if !rotated {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::ConvergenceFailure { sweeps: MAX_SWEEPS });
        }
    }

    let mut sigma: Vec<S> = (0..n)
        .map(|k| b.column(k).iter().map(|z| z.norm_sqr()).sum::<S>().sqrt())
        .collect();
    // Sort descending by selection, permuting B and V alongside.
    for i in 0..n {
        let mut best = i;
        for j in i + 1..n {
            if sigma[j] > sigma[best] {
                best = j;
            }
        }
        if best != i {
            sigma.swap(i, best);
            b.swap_columns(i, best);
            v.swap_columns(i, best);
        }
    }

    let sigma_max = sigma.first().copied().unwrap_or(S::zero());
    let rank_tol = S::real(m.max(n) as f64) * S::epsilon() * sigma_max;
    let mut u = ComplexMatrix::<S>::zeros(m, m);
    let mut filled: Vec<usize> = Vec::new();
    for j in 0..n {
        if sigma[j] > rank_tol && sigma[j] > S::zero() {
            let col: Vec<Complex<S>> =
                b.column(j).iter().map(|z| z / Complex::new(sigma[j], S::zero())).collect();
            u.set_column(j, &col);
            filled.push(j);
        }
    }
    complete_orthonormal(&mut u, &mut filled);

    Ok(Svd { singular_values: sigma, u, v })
}

/// Fills the unfilled columns of `u` with an orthonormal completion, chosen
/// greedily from the standard basis (deterministic).
fn complete_orthonormal<S: Scalar>(u: &mut ComplexMatrix<S>, filled: &mut Vec<usize>) {
    let m = u.rows();
    let missing: Vec<usize> = (0..m).filter(|j| !filled.contains(j)).collect();
    for slot in missing {
        let mut best_col: Option<Vec<Complex<S>>> = None;
        let mut best_norm = S::zero();
        for e in 0..m {
            let mut w = vec![Complex::new(S::zero(), S::zero()); m];
            w[e] = Complex::new(S::one(), S::zero());
            for _ in 0..2 {
                for &k in filled.iter() {
                    let col = u.column(k);
                    let mut ip = Complex::new(S::zero(), S::zero());
                    for j in 0..m {
                        ip += col[j].conj() * w[j];
                    }
                    for j in 0..m {
                        w[j] = w[j] - col[j] * ip;
                    }
                }
            }
            let norm = w.iter().map(|z| z.norm_sqr()).sum::<S>().sqrt();
            if norm > best_norm {
                best_norm = norm;
                best_col = Some(w);
            }
        }
        let mut w = best_col.expect("residual basis vector exists");
        for z in w.iter_mut() {
            *z = *z / Complex::new(best_norm, S::zero());
        }
        u.set_column(slot, &w);
        filled.push(slot);
    }
}

/// Householder QR of a square matrix: `A = Q R` with `Q` unitary and `R`
/// upper triangular. Used by Haar sampling.
pub fn qr<S: Scalar>(a: &ComplexMatrix<S>) -> Result<(ComplexMatrix<S>, ComplexMatrix<S>)> {
    if !a.is_square() {
        return Err(Error::NonSquare { rows: a.rows(), cols: a.cols() });
    }
    let n = a.rows();
    let mut r = a.clone();
    let mut reflectors: Vec<Vec<Complex<S>>> = Vec::new();
    for k in 0..n.saturating_sub(1) {
        let mut x: Vec<Complex<S>> = (k..n).map(|j| r[(j, k)]).collect();
        let norm = x.iter().map(|z| z.norm_sqr()).sum::<S>().sqrt();
        if norm <= S::zero() {
            continue;
        }
        let x0 = x[0];
        let phase = if x0.norm() > S::zero() {
            x0 / Complex::new(x0.norm(), S::zero())
        } else {
            Complex::new(S::one(), S::zero())
        };
        // v = x + e^{i arg(x0)} ‖x‖ e1 avoids cancellation.
        x[0] = x0 + phase * norm;
        let vnorm = x.iter().map(|z| z.norm_sqr()).sum::<S>().sqrt();
        if vnorm <= S::zero() {
            continue;
        }
        for z in x.iter_mut() {
            *z = *z / Complex::new(vnorm, S::zero());
        }
        // R <- (I - 2 v v†) R on the trailing block.
        for col in k..n {
            let mut ip = Complex::new(S::zero(), S::zero());
            for (i, vz) in x.iter().enumerate() {
                ip += vz.conj() * r[(k + i, col)];
            }
            let two = Complex::new(S::real(2.0), S::zero());
            for (i, vz) in x.iter().enumerate() {
                let cur = r[(k + i, col)];
                r[(k + i, col)] = cur - two * vz * ip;
            }
        }
        reflectors.push(x);
    }
    // Q = H_0 H_1 ... H_{n-2} applied to the identity, in reverse.
    let mut q = ComplexMatrix::<S>::identity(n);
    for (k, v) in reflectors.iter().enumerate().rev() {
        let offset = k;
        for col in 0..n {
            let mut ip = Complex::new(S::zero(), S::zero());
            for (i, vz) in v.iter().enumerate() {
                ip += vz.conj() * q[(offset + i, col)];
            }
            let two = Complex::new(S::real(2.0), S::zero());
            for (i, vz) in v.iter().enumerate() {
                let cur = q[(offset + i, col)];
                q[(offset + i, col)] = cur - two * vz * ip;
            }
        }
    }
    Ok((q, r))
}
