//! Masker models and the exact-masking / simultaneous-purification checks.
//!
//! A masker encodes system-A states into bipartite pure states whose
//! single-subsystem marginals are identical across inputs. The exact
//! unitary model acts as `U (|a⟩ ⊗ |b⟩)`; the probabilistic model is an
//! injective trace-decreasing linear map on A with the fixed ancilla ket
//! pre-absorbed, succeeding with amplitude `p = ‖L|a⟩‖`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{fidelity, svd, trace_norm, ComplexMatrix};
use crate::scalar::Scalar;
use crate::states::{superpose, BipartitePureState, Ket};

const UNITARITY_TOL: f64 = 1e-10;
const INJECTIVITY_TOL: f64 = 1e-10;

/// Exact masker: a unitary on `H_A ⊗ H_B` plus a fixed ancilla ket.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound(
    serialize = "S: Scalar + Serialize",
    deserialize = "S: Scalar + for<'a> Deserialize<'a>"
))]
pub struct UnitaryMasker<S: Scalar> {
    dim_a: usize,
    dim_b: usize,
    unitary: ComplexMatrix<S>,
    ancilla: Ket<S>,
}

impl<S: Scalar> UnitaryMasker<S> {
    pub fn new(
        dim_a: usize,
        dim_b: usize,
        unitary: ComplexMatrix<S>,
        ancilla: Ket<S>,
    ) -> Result<Self> {
        let n = dim_a * dim_b;
        if unitary.rows() != n || unitary.cols() != n {
            return Err(Error::DimensionMismatch { expected: n, got: unitary.rows() });
        }
        if ancilla.dim() != dim_b {
            return Err(Error::DimensionMismatch { expected: dim_b, got: ancilla.dim() });
        }
        let defect = unitary.unitarity_defect();
        if defect > S::real(UNITARITY_TOL) {
            return Err(Error::NotUnitary { defect: defect.as_f64() });
        }
        Ok(Self { dim_a, dim_b, unitary, ancilla })
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn unitary(&self) -> &ComplexMatrix<S> {
        &self.unitary
    }

    pub fn ancilla(&self) -> &Ket<S> {
        &self.ancilla
    }

    /// `U (|input⟩ ⊗ |b⟩)` reshaped into a bipartite pure state.
    pub fn apply(&self, input: &Ket<S>) -> Result<BipartitePureState<S>> {
        if input.dim() != self.dim_a {
            return Err(Error::DimensionMismatch { expected: self.dim_a, got: input.dim() });
        }
        let joint = input.tensor(&self.ancilla);
        let image = self.unitary.apply(&joint);
        BipartitePureState::normalized(self.dim_a, self.dim_b, image)
    }
}

/// Probabilistic masker: an injective, trace-decreasing linear map
/// `(r·s) x r` from system-A kets (ancilla pre-absorbed) to raw bipartite
/// vectors.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound(
    serialize = "S: Scalar + Serialize",
    deserialize = "S: Scalar + for<'a> Deserialize<'a>"
))]
pub struct ProbabilisticMasker<S: Scalar> {
    dim_a: usize,
    dim_b: usize,
    linear_map: ComplexMatrix<S>,
}

impl<S: Scalar> ProbabilisticMasker<S> {
    pub fn new(dim_a: usize, dim_b: usize, linear_map: ComplexMatrix<S>) -> Result<Self> {
        if linear_map.rows() != dim_a * dim_b {
            return Err(Error::DimensionMismatch {
                expected: dim_a * dim_b,
                got: linear_map.rows(),
            });
        }
        if linear_map.cols() != dim_a {
            return Err(Error::DimensionMismatch { expected: dim_a, got: linear_map.cols() });
        }
        let s = svd(&linear_map)?;
        let sigma_max = s.singular_values[0];
        let sigma_min = s.singular_values[dim_a - 1];
        if sigma_min <= S::real(INJECTIVITY_TOL) {
            return Err(Error::NotInjective { sigma_min: sigma_min.as_f64() });
        }
        if sigma_max > S::one() + S::real(INJECTIVITY_TOL) {
            return Err(Error::NotTraceDecreasing { sigma_max: sigma_max.as_f64() });
        }
        Ok(Self { dim_a, dim_b, linear_map })
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn linear_map(&self) -> &ComplexMatrix<S> {
        &self.linear_map
    }

    /// Applies the map, returning the success amplitude `p = ‖L|a⟩‖` and
    /// the normalized image state.
    pub fn apply(&self, input: &Ket<S>) -> Result<(S, BipartitePureState<S>)> {
        if input.dim() != self.dim_a {
            return Err(Error::DimensionMismatch { expected: self.dim_a, got: input.dim() });
        }
        let raw = self.linear_map.apply(input.amplitudes());
        let p = raw.iter().map(|z| z.norm_sqr()).sum::<S>().sqrt();
        if p <= S::real(1e-12) {
            // Contradicts injectivity checked at construction.
            return Err(Error::NotInjective { sigma_min: p.as_f64() });
        }
        let psi = BipartitePureState::normalized(self.dim_a, self.dim_b, raw)?;
        Ok((p, psi))
    }
}

/// Common behaviour of the two masker models: map an input ket to its
/// (normalized) masked image.
pub trait Masker<S: Scalar> {
    fn dim_a(&self) -> usize;
    fn dim_b(&self) -> usize;
    fn mask(&self, input: &Ket<S>) -> Result<BipartitePureState<S>>;
}

impl<S: Scalar> Masker<S> for UnitaryMasker<S> {
    fn dim_a(&self) -> usize {
        self.dim_a
    }

    fn dim_b(&self) -> usize {
        self.dim_b
    }

    fn mask(&self, input: &Ket<S>) -> Result<BipartitePureState<S>> {
        self.apply(input)
    }
}

impl<S: Scalar> Masker<S> for ProbabilisticMasker<S> {
    fn dim_a(&self) -> usize {
        self.dim_a
    }

    fn dim_b(&self) -> usize {
        self.dim_b
    }

    fn mask(&self, input: &Ket<S>) -> Result<BipartitePureState<S>> {
        self.apply(input).map(|(_, psi)| psi)
    }
}

/// Measured marginal deviations of a masker over a set of inputs.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound(
    serialize = "S: Scalar + Serialize",
    deserialize = "S: Scalar + for<'a> Deserialize<'a>"
))]
pub struct MaskResidualReport<S: Scalar> {
    /// Max pairwise trace-norm difference of A-side marginals.
    pub max_marginal_deviation_a: S,
    /// Max pairwise trace-norm difference of B-side marginals.
    pub max_marginal_deviation_b: S,
    pub pairwise_min_fidelity_a: S,
    pub pairwise_min_fidelity_b: S,
    /// Marginals of the first input, the fiducial pair.
    pub reference_marginal_a: ComplexMatrix<S>,
    pub reference_marginal_b: ComplexMatrix<S>,
}

impl<S: Scalar> MaskResidualReport<S> {
    /// Exact masking holds iff both deviations are within `tol`.
    pub fn is_exact(&self, tol: S) -> bool {
        self.max_marginal_deviation_a <= tol && self.max_marginal_deviation_b <= tol
    }
}

/// Masks every input and reports the worst pairwise marginal deviation and
/// fidelity on each side.
pub fn check_exact_masking<S: Scalar, M: Masker<S>>(
    masker: &M,
    inputs: &[Ket<S>],
) -> Result<MaskResidualReport<S>> {
    if inputs.len() < 2 {
        return Err(Error::InvalidParameter("need at least 2 inputs".into()));
    }
    let marginals: Vec<(ComplexMatrix<S>, ComplexMatrix<S>)> = inputs
        .iter()
        .map(|input| {
            let psi = masker.mask(input)?;
            Ok((psi.partial_trace_b(), psi.partial_trace_a()))
        })
        .collect::<Result<_>>()?;
    let mut dev_a = S::zero();
    let mut dev_b = S::zero();
    let mut fid_a = S::one();
    let mut fid_b = S::one();
    for i in 0..marginals.len() {
        for j in i + 1..marginals.len() {
            dev_a = dev_a.max(trace_norm(&(&marginals[i].0 - &marginals[j].0))?);
            dev_b = dev_b.max(trace_norm(&(&marginals[i].1 - &marginals[j].1))?);
            fid_a = fid_a.min(fidelity(&marginals[i].0, &marginals[j].0)?);
            fid_b = fid_b.min(fidelity(&marginals[i].1, &marginals[j].1)?);
        }
    }
    let (reference_marginal_a, reference_marginal_b) = marginals.into_iter().next().unwrap();
    Ok(MaskResidualReport {
        max_marginal_deviation_a: dev_a,
        max_marginal_deviation_b: dev_b,
        pairwise_min_fidelity_a: fid_a,
        pairwise_min_fidelity_b: fid_b,
        reference_marginal_a,
        reference_marginal_b,
    })
}

/// Generalized-CNOT masker `|j⟩|k⟩ → |j⟩|(j+k) mod d⟩` with ancilla `|0⟩`.
///
/// Masks the equal-amplitude phase family `d^{-1/2} Σ_j e^{iφ_j}|j⟩`
/// exactly, with both marginals `I/d`.
pub fn cnot_phase_masker<S: Scalar>(d: usize) -> Result<UnitaryMasker<S>> {
    if d < 2 {
        return Err(Error::InvalidDimension { min: 2, got: d });
    }
    let n = d * d;
    let mut u = ComplexMatrix::<S>::zeros(n, n);
    for j in 0..d {
        for k in 0..d {
            u[(j * d + (j + k) % d, j * d + k)] = Complex::new(S::one(), S::zero());
        }
    }
    UnitaryMasker::new(d, d, u, Ket::basis(d, 0))
}

/// Equal-amplitude phase state `d^{-1/2} Σ_j e^{iφ_j}|j⟩`.
pub fn phase_state<S: Scalar>(phases: &[S]) -> Result<Ket<S>> {
    if phases.is_empty() {
        return Err(Error::InvalidDimension { min: 1, got: 0 });
    }
    let w = S::one() / S::real(phases.len() as f64).sqrt();
    Ket::new(
        phases
            .iter()
            .map(|&phi| Complex::from_polar(w, phi))
            .collect(),
    )
}

/// The two superposition coefficient pairs whose cross product
/// `u₁ v̄₁ ū₂ v₂ = i/4` is non-real: `(1/√2, 1/√2)` and `(i/√2, 1/√2)`.
pub fn default_witness_pairs<S: Scalar>() -> [(Complex<S>, Complex<S>); 2] {
    let h = S::real(std::f64::consts::FRAC_1_SQRT_2);
    [
        (Complex::new(h, S::zero()), Complex::new(h, S::zero())),
        (Complex::new(S::zero(), h), Complex::new(h, S::zero())),
    ]
}

/// Marginal deviation introduced by superposing two probabilistically
/// masked images.
///
/// The superposed image `Φ ∝ u p₁ ψ₁ + v p₂ ψ₂` is normalized and the
/// maximum trace-norm difference over both sides and all pairs in
/// `{Φ, ψ₁, ψ₂}` is returned. Zero means the superposition masks exactly
/// alongside the originals.
pub fn probabilistic_masking_residual<S: Scalar>(
    psi1: &BipartitePureState<S>,
    psi2: &BipartitePureState<S>,
    p1: S,
    p2: S,
    u: Complex<S>,
    v: Complex<S>,
) -> Result<S> {
    let phi = superpose(
        psi1,
        psi2,
        u * Complex::new(p1, S::zero()),
        v * Complex::new(p2, S::zero()),
    )?;
    let states = [&phi, psi1, psi2];
    let mut residual = S::zero();
    for i in 0..states.len() {
        for j in i + 1..states.len() {
            let da = trace_norm(&(&states[i].partial_trace_b() - &states[j].partial_trace_b()))?;
            let db = trace_norm(&(&states[i].partial_trace_a() - &states[j].partial_trace_a()))?;
            residual = residual.max(da).max(db);
        }
    }
    Ok(residual)
}

/// Outcome of the simultaneous-purification consistency check.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound(
    serialize = "S: Scalar + Serialize",
    deserialize = "S: Scalar + for<'a> Deserialize<'a>"
))]
pub struct PurificationConsistency<S: Scalar> {
    /// All four states (the pair and both superposed images) share both
    /// marginals within tolerance.
    pub is_consistent: bool,
    /// `|⟨ψ1|ψ2⟩| ≥ 1 - tol`: the pair is equal up to a global phase.
    pub forced_phase_collinear: bool,
    pub max_deviation: S,
}

/// Checks whether `ψ1`, `ψ2` and their superposed images under the witness
/// pairs can all share both marginals.
///
/// Consistency without phase collinearity would contradict the
/// impossibility of probabilistic universal masking.
pub fn simultaneous_purification_check<S: Scalar>(
    psi1: &BipartitePureState<S>,
    psi2: &BipartitePureState<S>,
    witness_pairs: &[(Complex<S>, Complex<S>)],
    tol: S,
) -> Result<PurificationConsistency<S>> {
    let mut max_deviation = S::zero();
    for &(u, v) in witness_pairs {
        let r = probabilistic_masking_residual(psi1, psi2, S::one(), S::one(), u, v)?;
        max_deviation = max_deviation.max(r);
    }
    let overlap = psi1.overlap(psi2).norm();
    Ok(PurificationConsistency {
        is_consistent: max_deviation <= tol,
        forced_phase_collinear: overlap >= S::one() - tol,
        max_deviation,
    })
}
