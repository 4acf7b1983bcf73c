//! Kets, bipartite pure states with their coefficient-matrix view, partial
//! traces, and purification.
//!
//! Basis convention throughout: the row index of a coefficient matrix is
//! system A, the column index is system B, so a bipartite amplitude vector
//! indexes as `amp[j * dim_b + k]` for `|j⟩_A |k⟩_B`. The marginals of a
//! pure state with coefficient matrix `M` are then `M M†` on A and the
//! transpose of `M† M` on B (same spectrum, so every norm and fidelity
//! comparison between marginals is unaffected by the transpose).

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, ComplexMatrix};
use crate::scalar::Scalar;

/// Construction-time normalization tolerance.
const NORM_TOL: f64 = 1e-10;

fn vec_norm<S: Scalar>(v: &[Complex<S>]) -> S {
    v.iter().map(|z| z.norm_sqr()).sum::<S>().sqrt()
}

/// Normalized state vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "KetRepr<S>", into = "KetRepr<S>")]
#[serde(bound(
    serialize = "S: Scalar + Serialize",
    deserialize = "S: Scalar + Deserialize<'de>"
))]
pub struct Ket<S: Scalar> {
    dim: usize,
    amplitudes: Vec<Complex<S>>,
}

#[derive(Serialize, Deserialize)]
struct KetRepr<S> {
    dim: usize,
    amplitudes: Vec<[S; 2]>,
}

impl<S: Scalar> From<Ket<S>> for KetRepr<S> {
    fn from(k: Ket<S>) -> Self {
        KetRepr { dim: k.dim, amplitudes: k.amplitudes.iter().map(|z| [z.re, z.im]).collect() }
    }
}

impl<S: Scalar> TryFrom<KetRepr<S>> for Ket<S> {
    type Error = Error;

    fn try_from(repr: KetRepr<S>) -> Result<Self> {
        if repr.amplitudes.len() != repr.dim {
            return Err(Error::DimensionMismatch {
                expected: repr.dim,
                got: repr.amplitudes.len(),
            });
        }
        Ket::new(repr.amplitudes.iter().map(|&[re, im]| Complex::new(re, im)).collect())
    }
}

impl<S: Scalar> Ket<S> {
    /// Builds a ket, rejecting vectors not normalized within 1e-10.
    pub fn new(amplitudes: Vec<Complex<S>>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidDimension { min: 1, got: 0 });
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFiniteEntries);
        }
        let norm = vec_norm(&amplitudes);
        if (norm - S::one()).abs() > S::real(NORM_TOL) {
            return Err(Error::NotNormalized { norm: norm.as_f64() });
        }
        Ok(Self { dim: amplitudes.len(), amplitudes })
    }

    /// Normalizes a raw vector; degenerate norms are rejected.
    pub fn normalized(raw: Vec<Complex<S>>) -> Result<Self> {
        let norm = vec_norm(&raw);
        if norm <= S::real(1e-12) {
            return Err(Error::DegenerateSuperposition { norm: norm.as_f64() });
        }
        let inv = Complex::new(S::one() / norm, S::zero());
        Self::new(raw.into_iter().map(|z| z * inv).collect())
    }

    /// Computational basis ket `|k⟩` in dimension `dim`.
    pub fn basis(dim: usize, k: usize) -> Self {
        assert!(k < dim, "basis index out of range");
        let mut amplitudes = vec![Complex::new(S::zero(), S::zero()); dim];
        amplitudes[k] = Complex::new(S::one(), S::zero());
        Self { dim, amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn amplitudes(&self) -> &[Complex<S>] {
        &self.amplitudes
    }

    /// Inner product `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Complex<S> {
        assert_eq!(self.dim, other.dim);
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .fold(Complex::new(S::zero(), S::zero()), |acc, z| acc + z)
    }

    /// Tensor product `|self⟩|other⟩`.
    pub fn tensor(&self, other: &Self) -> Vec<Complex<S>> {
        let mut out = Vec::with_capacity(self.dim * other.dim);
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                out.push(a * b);
            }
        }
        out
    }

    /// Density matrix `|self⟩⟨self|`.
    pub fn projector(&self) -> ComplexMatrix<S> {
        ComplexMatrix::outer(&self.amplitudes, &self.amplitudes)
    }
}

/// Normalized pure state on `H_A ⊗ H_B` with its `r x s` coefficient matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BipartiteRepr<S>", into = "BipartiteRepr<S>")]
#[serde(bound(
    serialize = "S: Scalar + Serialize",
    deserialize = "S: Scalar + Deserialize<'de>"
))]
pub struct BipartitePureState<S: Scalar> {
    dim_a: usize,
    dim_b: usize,
    amplitudes: Vec<Complex<S>>,
    coeff: ComplexMatrix<S>,
}

#[derive(Serialize, Deserialize)]
struct BipartiteRepr<S> {
    dim_a: usize,
    dim_b: usize,
    amplitudes: Vec<[S; 2]>,
}

impl<S: Scalar> From<BipartitePureState<S>> for BipartiteRepr<S> {
    fn from(psi: BipartitePureState<S>) -> Self {
        BipartiteRepr {
            dim_a: psi.dim_a,
            dim_b: psi.dim_b,
            amplitudes: psi.amplitudes.iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl<S: Scalar> TryFrom<BipartiteRepr<S>> for BipartitePureState<S> {
    type Error = Error;

    fn try_from(repr: BipartiteRepr<S>) -> Result<Self> {
        BipartitePureState::new(
            repr.dim_a,
            repr.dim_b,
            repr.amplitudes.iter().map(|&[re, im]| Complex::new(re, im)).collect(),
        )
    }
}

impl<S: Scalar> BipartitePureState<S> {
    pub fn new(dim_a: usize, dim_b: usize, amplitudes: Vec<Complex<S>>) -> Result<Self> {
        if dim_a == 0 || dim_b == 0 {
            return Err(Error::InvalidDimension { min: 1, got: dim_a.min(dim_b) });
        }
        if amplitudes.len() != dim_a * dim_b {
            return Err(Error::DimensionMismatch {
                expected: dim_a * dim_b,
                got: amplitudes.len(),
            });
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFiniteEntries);
        }
        let norm = vec_norm(&amplitudes);
        if (norm - S::one()).abs() > S::real(NORM_TOL) {
            return Err(Error::NotNormalized { norm: norm.as_f64() });
        }
        let coeff = ComplexMatrix::from_fn(dim_a, dim_b, |j, k| amplitudes[j * dim_b + k]);
        Ok(Self { dim_a, dim_b, amplitudes, coeff })
    }

    /// Normalizes a raw amplitude vector first.
    pub fn normalized(dim_a: usize, dim_b: usize, raw: Vec<Complex<S>>) -> Result<Self> {
        let norm = vec_norm(&raw);
        if norm <= S::real(1e-12) {
            return Err(Error::DegenerateSuperposition { norm: norm.as_f64() });
        }
        let inv = Complex::new(S::one() / norm, S::zero());
        Self::new(dim_a, dim_b, raw.into_iter().map(|z| z * inv).collect())
    }

    /// Builds the state whose coefficient matrix is `m` (must have unit
    /// Frobenius norm).
    pub fn from_coeff_matrix(m: &ComplexMatrix<S>) -> Result<Self> {
        let (r, s) = (m.rows(), m.cols());
        Self::new(r, s, m.entries().to_vec())
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn amplitudes(&self) -> &[Complex<S>] {
        &self.amplitudes
    }

    /// Coefficient matrix `M` with `M[j][k]` the amplitude of `|j⟩_A |k⟩_B`.
    pub fn coeff_matrix(&self) -> &ComplexMatrix<S> {
        &self.coeff
    }

    /// Marginal on B: `Tr_A(|ψ⟩⟨ψ|)`, entrywise
    /// `Σ_j M[j,k] conj(M[j,k'])` — the transpose of `M†M`, with identical
    /// spectrum.
    pub fn partial_trace_a(&self) -> ComplexMatrix<S> {
        let m = &self.coeff;
        ComplexMatrix::from_fn(self.dim_b, self.dim_b, |k, kp| {
            (0..self.dim_a)
                .map(|j| m[(j, k)] * m[(j, kp)].conj())
                .fold(Complex::new(S::zero(), S::zero()), |a, b| a + b)
        })
        .hermitize()
    }

    /// Marginal on A: `Tr_B(|ψ⟩⟨ψ|) = M M†`.
    pub fn partial_trace_b(&self) -> ComplexMatrix<S> {
        (&self.coeff * &self.coeff.adjoint()).hermitize()
    }

    pub fn projector(&self) -> ComplexMatrix<S> {
        ComplexMatrix::outer(&self.amplitudes, &self.amplitudes)
    }

    /// Inner product `⟨self|other⟩`.
    pub fn overlap(&self, other: &Self) -> Complex<S> {
        assert_eq!((self.dim_a, self.dim_b), (other.dim_a, other.dim_b));
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .fold(Complex::new(S::zero(), S::zero()), |acc, z| acc + z)
    }
}

/// Which subsystem to trace out / keep in dense partial traces.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Subsystem {
    A,
    B,
}

/// Index-contraction partial trace of a density matrix on `H_A ⊗ H_B`.
///
/// `keep` names the subsystem whose marginal is returned.
pub fn partial_trace_dense<S: Scalar>(
    rho: &ComplexMatrix<S>,
    dim_a: usize,
    dim_b: usize,
    keep: Subsystem,
) -> Result<ComplexMatrix<S>> {
    let n = dim_a * dim_b;
    if rho.rows() != n || rho.cols() != n {
        return Err(Error::DimensionMismatch { expected: n, got: rho.rows() });
    }
    let out = match keep {
        Subsystem::A => ComplexMatrix::from_fn(dim_a, dim_a, |j, jp| {
            let mut acc = Complex::new(S::zero(), S::zero());
            for k in 0..dim_b {
                acc += rho[(j * dim_b + k, jp * dim_b + k)];
            }
            acc
        }),
        Subsystem::B => ComplexMatrix::from_fn(dim_b, dim_b, |k, kp| {
            let mut acc = Complex::new(S::zero(), S::zero());
            for j in 0..dim_a {
                acc += rho[(j * dim_b + k, j * dim_b + kp)];
            }
            acc
        }),
    };
    Ok(out)
}

/// Normalized superposition `(u ψ1 + v ψ2) / ‖·‖`.
///
/// The coefficient matrix of the result is `(u M + v N)` renormalized.
pub fn superpose<S: Scalar>(
    psi1: &BipartitePureState<S>,
    psi2: &BipartitePureState<S>,
    u: Complex<S>,
    v: Complex<S>,
) -> Result<BipartitePureState<S>> {
    if (psi1.dim_a, psi1.dim_b) != (psi2.dim_a, psi2.dim_b) {
        return Err(Error::DimensionMismatch {
            expected: psi1.dim_a * psi1.dim_b,
            got: psi2.dim_a * psi2.dim_b,
        });
    }
    let raw: Vec<Complex<S>> = psi1
        .amplitudes
        .iter()
        .zip(&psi2.amplitudes)
        .map(|(a, b)| u * a + v * b)
        .collect();
    BipartitePureState::normalized(psi1.dim_a, psi1.dim_b, raw)
}

/// Spectrum plus the two basis choices defining a purification
/// `Σ_j √λ_j |j⟩|μ_j⟩`.
#[derive(Clone, Debug)]
pub struct PurificationSpec<S: Scalar> {
    spectrum: Vec<S>,
    system_basis: Vec<Ket<S>>,
    ancilla_basis: Vec<Ket<S>>,
}

impl<S: Scalar> PurificationSpec<S> {
    /// Validates the probability spectrum and orthonormality of both bases.
    pub fn new(
        spectrum: Vec<S>,
        system_basis: Vec<Ket<S>>,
        ancilla_basis: Vec<Ket<S>>,
    ) -> Result<Self> {
        let n = spectrum.len();
        if n == 0 || system_basis.len() != n || ancilla_basis.len() != n {
            return Err(Error::InvalidParameter(
                "spectrum and bases must have equal nonzero length".into(),
            ));
        }
        if spectrum.iter().any(|&l| l < S::zero()) {
            return Err(Error::InvalidParameter("spectrum entries must be nonnegative".into()));
        }
        let total: S = spectrum.iter().copied().sum();
        if (total - S::one()).abs() > S::real(NORM_TOL) {
            return Err(Error::InvalidParameter(format!(
                "spectrum sums to {} instead of 1",
                total.as_f64()
            )));
        }
        for basis in [&system_basis, &ancilla_basis] {
            for i in 0..n {
                for j in i + 1..n {
                    if basis[i].inner(&basis[j]).norm() > S::real(NORM_TOL) {
                        return Err(Error::InvalidParameter(
                            "basis kets are not orthonormal".into(),
                        ));
                    }
                }
            }
        }
        Ok(Self { spectrum, system_basis, ancilla_basis })
    }

    pub fn spectrum(&self) -> &[S] {
        &self.spectrum
    }

    /// Assembles the purification `Σ_j √λ_j |j⟩|μ_j⟩`.
    pub fn build(&self) -> Result<BipartitePureState<S>> {
        let dim_a = self.system_basis[0].dim();
        let dim_b = self.ancilla_basis[0].dim();
        let mut raw = vec![Complex::new(S::zero(), S::zero()); dim_a * dim_b];
        for ((&l, sys), anc) in
            self.spectrum.iter().zip(&self.system_basis).zip(&self.ancilla_basis)
        {
            let w = Complex::new(l.sqrt(), S::zero());
            for (j, a) in sys.amplitudes().iter().enumerate() {
                for (k, b) in anc.amplitudes().iter().enumerate() {
                    raw[j * dim_b + k] += w * a * b;
                }
            }
        }
        BipartitePureState::normalized(dim_a, dim_b, raw)
    }
}

/// Purifies `rho`: returns `Σ_j √λ_j |e_j⟩|j⟩` with `|e_j⟩` the eigenbasis
/// of `rho`, so tracing out the ancilla (B side) reproduces `rho`.
///
/// Eigenvalues above 1e-12 are paired with the first `rank` computational
/// ancilla kets, in ascending eigenvalue order.
pub fn purify<S: Scalar>(
    rho: &ComplexMatrix<S>,
    ancilla_dim: usize,
) -> Result<BipartitePureState<S>> {
    let eig = hermitian_eigen(rho, S::real(1e-8))?;
    let tr = rho.trace();
    if (tr.re - S::one()).abs() > S::real(1e-8) {
        return Err(Error::NotDensityMatrix { reason: "trace differs from 1".into() });
    }
    let n = rho.rows();
    let cutoff = S::real(1e-12);
    let keep: Vec<usize> =
        (0..n).filter(|&j| eig.eigenvalues[j] > cutoff).collect();
    if keep.len() > ancilla_dim {
        return Err(Error::AncillaTooSmall { ancilla_dim, rank: keep.len() });
    }
    if eig.eigenvalues.iter().any(|&l| l < -S::real(DEFAULT_NEGATIVITY_TOL)) {
        return Err(Error::NotDensityMatrix { reason: "negative eigenvalue".into() });
    }
    let mut raw = vec![Complex::new(S::zero(), S::zero()); n * ancilla_dim];
    for (anc_idx, &j) in keep.iter().enumerate() {
        let w = Complex::new(eig.eigenvalues[j].sqrt(), S::zero());
        let col = eig.eigenvectors.column(j);
        for (sys_idx, amp) in col.iter().enumerate() {
            raw[sys_idx * ancilla_dim + anc_idx] = w * amp;
        }
    }
    BipartitePureState::normalized(n, ancilla_dim, raw)
}

const DEFAULT_NEGATIVITY_TOL: f64 = 1e-9;
