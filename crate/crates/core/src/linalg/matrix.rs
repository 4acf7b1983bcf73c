use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Dense complex matrix in row-major storage.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix<S> {
    rows: usize,
    cols: usize,
    entries: Vec<Complex<S>>,
}

impl<S: Scalar> ComplexMatrix<S> {
    /// Builds a matrix from row-major entries, validating shape and finiteness.
    pub fn new(rows: usize, cols: usize, entries: Vec<Complex<S>>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidDimension { min: 1, got: rows.min(cols) });
        }
        if entries.len() != rows * cols {
            return Err(Error::ShapeMismatch { rows, cols, len: entries.len() });
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFiniteEntries);
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, entries: vec![Complex::new(S::zero(), S::zero()); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for j in 0..n {
            m[(j, j)] = Complex::new(S::one(), S::zero());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex<S>) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for j in 0..rows {
            for k in 0..cols {
                entries.push(f(j, k));
            }
        }
        Self { rows, cols, entries }
    }

    /// Diagonal matrix from real entries.
    pub fn from_real_diagonal(diag: &[S]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |j, k| {
            if j == k {
                Complex::new(diag[j], S::zero())
            } else {
                Complex::new(S::zero(), S::zero())
            }
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Complex<S>] {
        &self.entries
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |j, k| self[(k, j)].conj())
    }

    pub fn trace(&self) -> Complex<S> {
        debug_assert!(self.is_square());
        (0..self.rows).map(|j| self[(j, j)]).fold(Complex::new(S::zero(), S::zero()), |a, b| a + b)
    }

    pub fn scaled(&self, factor: Complex<S>) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> S {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<S>().sqrt()
    }

    pub fn max_abs(&self) -> S {
        self.entries.iter().map(|z| z.norm()).fold(S::zero(), S::max)
    }

    /// Frobenius norm of the anti-Hermitian part `A - A†`.
    pub fn hermitian_defect(&self) -> S {
        debug_assert!(self.is_square());
        let mut sum = S::zero();
        for j in 0..self.rows {
            for k in 0..self.cols {
                let d = self[(j, k)] - self[(k, j)].conj();
                sum += d.norm_sqr();
            }
        }
        sum.sqrt()
    }

    pub fn is_hermitian(&self, tol: S) -> bool {
        self.is_square() && self.hermitian_defect() <= tol * S::one().max(self.frobenius_norm())
    }

    /// Hermitian part `(A + A†)/2`.
    pub fn hermitize(&self) -> Self {
        debug_assert!(self.is_square());
        let half = Complex::new(S::real(0.5), S::zero());
        Self::from_fn(self.rows, self.cols, |j, k| (self[(j, k)] + self[(k, j)].conj()) * half)
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        Self::from_fn(self.rows * other.rows, self.cols * other.cols, |j, k| {
            self[(j / other.rows, k / other.cols)] * other[(j % other.rows, k % other.cols)]
        })
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[Complex<S>]) -> Vec<Complex<S>> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        (0..self.rows)
            .map(|j| {
                let mut acc = Complex::new(S::zero(), S::zero());
                for k in 0..self.cols {
                    acc += self[(j, k)] * v[k];
                }
                acc
            })
            .collect()
    }

    pub fn column(&self, k: usize) -> Vec<Complex<S>> {
        (0..self.rows).map(|j| self[(j, k)]).collect()
    }

    pub fn set_column(&mut self, k: usize, v: &[Complex<S>]) {
        assert_eq!(v.len(), self.rows);
        for j in 0..self.rows {
            self[(j, k)] = v[j];
        }
    }

    /// Outer product `u v†` of two vectors.
    pub fn outer(u: &[Complex<S>], v: &[Complex<S>]) -> Self {
        Self::from_fn(u.len(), v.len(), |j, k| u[j] * v[k].conj())
    }

    /// `‖U†U - I‖_F`, zero for unitary input.
    pub fn unitarity_defect(&self) -> S {
        debug_assert!(self.is_square());
        let gram = &self.adjoint() * self;
        (&gram - &Self::identity(self.rows)).frobenius_norm()
    }

    /// Swaps columns `p` and `q` in place.
    pub(crate) fn swap_columns(&mut self, p: usize, q: usize) {
        for j in 0..self.rows {
            self.entries.swap(j * self.cols + p, j * self.cols + q);
        }
    }

    /// Right-multiplies columns `p`, `q` by the 2x2 block `[[j11, j12], [j21, j22]]`.
    pub(crate) fn rotate_columns(
        &mut self,
        p: usize,
        q: usize,
        j11: Complex<S>,
        j12: Complex<S>,
        j21: Complex<S>,
        j22: Complex<S>,
    ) {
        for row in 0..self.rows {
            let a = self[(row, p)];
            let b = self[(row, q)];
            self[(row, p)] = a * j11 + b * j21;
            self[(row, q)] = a * j12 + b * j22;
        }
    }
}

impl<S: Scalar> Index<(usize, usize)> for ComplexMatrix<S> {
    type Output = Complex<S>;

    fn index(&self, (j, k): (usize, usize)) -> &Complex<S> {
        &self.entries[j * self.cols + k]
    }
}

impl<S: Scalar> IndexMut<(usize, usize)> for ComplexMatrix<S> {
    fn index_mut(&mut self, (j, k): (usize, usize)) -> &mut Complex<S> {
        &mut self.entries[j * self.cols + k]
    }
}

impl<S: Scalar> Mul for &ComplexMatrix<S> {
    type Output = ComplexMatrix<S>;

    fn mul(self, rhs: &ComplexMatrix<S>) -> ComplexMatrix<S> {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for j in 0..self.rows {
            for l in 0..self.cols {
                let a = self[(j, l)];
                if a.norm_sqr() == S::zero() {
                    continue;
                }
                for k in 0..rhs.cols {
                    out[(j, k)] += a * rhs[(l, k)];
                }
            }
        }
        out
    }
}

impl<S: Scalar> Add for &ComplexMatrix<S> {
    type Output = ComplexMatrix<S>;

    fn add(self, rhs: &ComplexMatrix<S>) -> ComplexMatrix<S> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix::from_fn(self.rows, self.cols, |j, k| self[(j, k)] + rhs[(j, k)])
    }
}

impl<S: Scalar> Sub for &ComplexMatrix<S> {
    type Output = ComplexMatrix<S>;

    fn sub(self, rhs: &ComplexMatrix<S>) -> ComplexMatrix<S> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix::from_fn(self.rows, self.cols, |j, k| self[(j, k)] - rhs[(j, k)])
    }
}

/// JSON wire form: dims header plus `[re, im]` pairs in row-major order.
#[derive(Serialize, Deserialize)]
struct MatrixRepr<S> {
    rows: usize,
    cols: usize,
    entries: Vec<[S; 2]>,
}

impl<S: Scalar + Serialize> Serialize for ComplexMatrix<S> {
    fn serialize<Ser: Serializer>(&self, serializer: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        MatrixRepr {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|z| [z.re, z.im]).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de, S: Scalar + Deserialize<'de>> Deserialize<'de> for ComplexMatrix<S> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = MatrixRepr::<S>::deserialize(deserializer)?;
        let entries = repr.entries.iter().map(|&[re, im]| Complex::new(re, im)).collect();
        ComplexMatrix::new(repr.rows, repr.cols, entries).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn new_rejects_bad_shape_and_nonfinite() {
        assert!(ComplexMatrix::new(2, 2, vec![c(1.0, 0.0); 3]).is_err());
        assert!(ComplexMatrix::new(1, 1, vec![c(f64::NAN, 0.0)]).is_err());
        assert!(ComplexMatrix::<f64>::new(0, 2, vec![]).is_err());
    }

    #[test]
    fn adjoint_and_product() {
        let a = ComplexMatrix::new(2, 2, vec![c(1.0, 1.0), c(0.0, 2.0), c(3.0, 0.0), c(0.0, -1.0)])
            .unwrap();
        let ada = &a.adjoint() * &a;
        assert!(ada.is_hermitian(1e-14));
        assert_abs_diff_eq!(ada.trace().re, a.frobenius_norm().powi(2), epsilon = 1e-12);
    }

    #[test]
    fn kron_of_identities() {
        let i2 = ComplexMatrix::<f64>::identity(2);
        let i3 = ComplexMatrix::<f64>::identity(3);
        assert_eq!(i2.kron(&i3), ComplexMatrix::identity(6));
    }

    #[test]
    fn json_round_trip() {
        let a = ComplexMatrix::new(1, 2, vec![c(0.5, -0.25), c(0.0, 1.0)]).unwrap();
        let json = serde_json::to_string(&a).unwrap();
        let b: ComplexMatrix<f64> = serde_json::from_str(&json).unwrap();
        assert_eq!(a, b);
    }
}
