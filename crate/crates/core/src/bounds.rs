//! Theoretical ε/δ lower bounds, the witness-δ evaluator replaying the
//! proof chains on candidate maskers, the claim-step verifier, and the
//! ellipse-line intersection solver.
//!
//! The witness inequality: for any masker image pair with matricizations
//! `M`, `N`, let δ be the maximum of the four constraint trace norms
//! `‖MM† − NN†‖₁`, `‖M†M − N†N‖₁`, and the two superposed-image marginal
//! deviations. The chain
//!   `‖MN†‖₁ ≤ 3δ` ⟹ `9δ² ≥ |Tr(M†M N†N)| ≥ 1/t − δ`
//! gives `9δ² + δ − 1/t ≥ 0` for every unitary and every injective
//! trace-decreasing masker, where `t = min(r, s)`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{fidelity, svd, trace_norm, ComplexMatrix};
use crate::masking::{Masker, ProbabilisticMasker, UnitaryMasker};
use crate::scalar::Scalar;
use crate::states::{BipartitePureState, Ket};

/// Theoretical minimum distinguishability for a universal masker at
/// subsystem dimensions `(r, s)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundResult<S> {
    /// `min(r, s)`.
    pub t: usize,
    /// Positive root of `9δ² + δ − 1/t = 0` (trace-norm scale).
    pub delta_star: S,
    /// Positive root of `72ε² + 2√2 ε − 1/t = 0` (fidelity scale).
    pub epsilon_star: S,
    /// Achievable-fidelity ceiling `1 − ε*`.
    pub max_fidelity: S,
}

/// `ε* = (√2/72)(−1 + √(1 + 36/t))` and `δ* = 2√2 ε*`.
pub fn theoretical_bound<S: Scalar>(r: usize, s: usize) -> Result<BoundResult<S>> {
    if r < 2 || s < 2 {
        return Err(Error::InvalidDimension { min: 2, got: r.min(s) });
    }
    let t = r.min(s);
    let root = (S::one() + S::real(36.0) / S::real(t as f64)).sqrt() - S::one();
    let delta_star = root / S::real(18.0);
    let epsilon_star = delta_star / (S::real(2.0) * S::real(2.0).sqrt());
    Ok(BoundResult { t, delta_star, epsilon_star, max_fidelity: S::one() - epsilon_star })
}

/// Converts a trace-norm deviation δ to the fidelity scale via the linear
/// reading `δ ≤ 2√2 ε`.
pub fn implied_epsilon_linear<S: Scalar>(delta: S) -> S {
    delta / (S::real(2.0) * S::real(2.0).sqrt())
}

/// Converts a trace-norm deviation δ via the exact Fuchs–van de Graaf form
/// `F ≤ √(1 − δ²/4)`, i.e. `ε ≥ 1 − √(1 − δ²/4)`.
pub fn implied_epsilon_exact<S: Scalar>(delta: S) -> S {
    let half = delta / S::real(2.0);
    S::one() - (S::one() - (half * half).min(S::one())).sqrt()
}

/// The four proof-chain trace norms of a candidate masker pair, their
/// aggregate δ, and the quadratic verdict.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WitnessReport<S> {
    /// `‖MM† − NN†‖₁` (A-side marginals).
    pub norm_a_side: S,
    /// `‖M†M − N†N‖₁` (B-side marginals).
    pub norm_b_side: S,
    /// `‖ΩΩ† − NN†‖₁` for the first superposition pair.
    pub norm_omega_1: S,
    /// Same for the second pair.
    pub norm_omega_2: S,
    /// Max of the four norms.
    pub delta: S,
    /// `δ / (2√2)`.
    pub implied_epsilon: S,
    /// `9δ² + δ − 1/t`; nonnegative for every masker.
    pub quadratic_slack: S,
    /// `|Tr(M†M L)|` with `L = N†N − M†M`.
    pub claim_lhs: S,
    /// `‖L‖₁`, which bounds the claim left-hand side.
    pub claim_rhs: S,
    /// `min(r, s)`.
    pub t: usize,
}

fn assemble_report<S: Scalar>(
    m: &ComplexMatrix<S>,
    n: &ComplexMatrix<S>,
    omega_reference: &ComplexMatrix<S>,
    omega_pairs: [(Complex<S>, Complex<S>); 2],
) -> Result<WitnessReport<S>> {
    let t = m.rows().min(m.cols());
    let mm = (m * &m.adjoint()).hermitize();
    let nn = (n * &n.adjoint()).hermitize();
    let mtm = (&m.adjoint() * m).hermitize();
    let ntn = (&n.adjoint() * n).hermitize();

    let norm_a_side = trace_norm(&(&mm - &nn))?;
    let norm_b_side = trace_norm(&(&mtm - &ntn))?;

    let mut omega_norms = [S::zero(); 2];
    for (slot, &(u, v)) in omega_pairs.iter().enumerate() {
        let omega = &m.scaled(u) + &n.scaled(v);
        let marg = (&omega * &omega.adjoint()).hermitize();
        omega_norms[slot] = trace_norm(&(&marg - omega_reference))?;
    }

    let delta = norm_a_side.max(norm_b_side).max(omega_norms[0]).max(omega_norms[1]);
    let l = &ntn - &mtm;
    let claim_lhs = (&mtm * &l).trace().norm();
    let claim_rhs = trace_norm(&l)?;
    let t_inv = S::one() / S::real(t as f64);
    Ok(WitnessReport {
        norm_a_side,
        norm_b_side,
        norm_omega_1: omega_norms[0],
        norm_omega_2: omega_norms[1],
        delta,
        implied_epsilon: implied_epsilon_linear(delta),
        quadratic_slack: S::real(9.0) * delta * delta + delta - t_inv,
        claim_lhs,
        claim_rhs,
        t,
    })
}

/// Replays the proof chain on a unitary masker and an orthonormal input
/// pair.
///
/// `M`, `N` are the matricizations of the two images; the superposed
/// images use the coefficient pairs `(1/√2, 1/√2)` and `(i/√2, 1/√2)` and
/// are compared against the second image's marginal.
pub fn witness_delta_unitary<S: Scalar>(
    masker: &UnitaryMasker<S>,
    input_1: &Ket<S>,
    input_2: &Ket<S>,
) -> Result<WitnessReport<S>> {
    let tol = S::real(1e-10);
    if input_1.inner(input_2).norm() > tol
        || (input_1.inner(input_1).norm() - S::one()).abs() > tol
        || (input_2.inner(input_2).norm() - S::one()).abs() > tol
    {
        return Err(Error::InvalidParameter("witness inputs must be orthonormal".into()));
    }
    let psi = masker.mask(input_1)?;
    let phi = masker.mask(input_2)?;
    let m = psi.coeff_matrix();
    let n = phi.coeff_matrix();
    let nn = (n * &n.adjoint()).hermitize();
    let h = S::real(std::f64::consts::FRAC_1_SQRT_2);
    let pairs = [
        (Complex::new(h, S::zero()), Complex::new(h, S::zero())),
        (Complex::new(S::zero(), h), Complex::new(h, S::zero())),
    ];
    assemble_report(m, n, &nn, pairs)
}

/// Replays the probabilistic proof chain.
///
/// The orthonormal image pair comes from the two leading left-singular
/// directions of the masker's linear map; their preimages are the matching
/// right-singular vectors with success amplitudes `p_j = σ_j`. The
/// ellipse-line solver certifies the equal-weight superpositions
/// `(Ψ₁ + e^{iθ}Ψ₂)/√2` for `θ ∈ {0, π/2}` are realizable masker images.
pub fn witness_delta_probabilistic<S: Scalar>(
    masker: &ProbabilisticMasker<S>,
) -> Result<WitnessReport<S>> {
    let decomp = svd(masker.linear_map())?;
    if decomp.singular_values.len() < 2 || decomp.singular_values[1] <= S::real(1e-10) {
        return Err(Error::RankDeficient {
            rank: decomp.singular_values.iter().filter(|&&x| x > S::real(1e-10)).count(),
        });
    }
    let (r, s) = (masker.dim_a(), masker.dim_b());
    let psi1 = BipartitePureState::normalized(r, s, decomp.u.column(0))?;
    let psi2 = BipartitePureState::normalized(r, s, decomp.u.column(1))?;
    let p1 = decomp.singular_values[0];
    let p2 = decomp.singular_values[1];
    // Preimages are the right-singular vectors; they are orthonormal, so
    // the overlap entering the realizability solver is zero.
    for theta in [S::zero(), S::real(std::f64::consts::FRAC_PI_2)] {
        let solution = lemma1_solve(S::zero(), theta, p1, p2)?;
        debug_assert!(solution.line_residual().abs() < S::epsilon().sqrt());
    }

    let m1 = psi1.coeff_matrix();
    let m2 = psi2.coeff_matrix();
    let m1m1 = (m1 * &m1.adjoint()).hermitize();
    let h = S::real(std::f64::consts::FRAC_1_SQRT_2);
    // Equal-weight superpositions (M1 + e^{iθ} M2)/√2 for θ = 0, π/2,
    // compared against the first image's marginal.
    let pairs = [
        (Complex::new(h, S::zero()), Complex::new(h, S::zero())),
        (Complex::new(h, S::zero()), Complex::new(S::zero(), h)),
    ];
    assemble_report(m2, m1, &m1m1, [(pairs[0].1, pairs[0].0), (pairs[1].1, pairs[1].0)])
}

/// Measured ε of a masker over a finite input set, on both scales.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EpsilonEstimate<S> {
    /// `1 −` min over sides and pairs of marginal fidelity.
    pub eps_fidelity: S,
    /// Max over sides and pairs of marginal trace-norm difference.
    pub eps_trace: S,
}

/// Worst pairwise marginal distinguishability over a set of inputs.
pub fn epsilon_over_state_set<S: Scalar, M: Masker<S>>(
    masker: &M,
    inputs: &[Ket<S>],
) -> Result<EpsilonEstimate<S>> {
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
    let mut min_fid = S::one();
    let mut max_trace = S::zero();
    for i in 0..marginals.len() {
        for j in i + 1..marginals.len() {
            for side in [
                (&marginals[i].0, &marginals[j].0),
                (&marginals[i].1, &marginals[j].1),
            ] {
                min_fid = min_fid.min(fidelity(side.0, side.1)?);
                max_trace = max_trace.max(trace_norm(&(side.0 - side.1))?);
            }
        }
    }
    Ok(EpsilonEstimate { eps_fidelity: (S::one() - min_fid).max(S::zero()), eps_trace: max_trace })
}

/// Intersection of the unit-norm ellipse
/// `x² + 2r cosθ xy + y² = 1` with the line `p₁x = p₂y`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Lemma1Solution<S> {
    pub x: S,
    pub y: S,
    pub overlap_r: S,
    pub theta: S,
    pub p1: S,
    pub p2: S,
}

impl<S: Scalar> Lemma1Solution<S> {
    /// Residual of the ellipse constraint.
    pub fn ellipse_residual(&self) -> S {
        self.x * self.x
            + S::real(2.0) * self.overlap_r * self.theta.cos() * self.x * self.y
            + self.y * self.y
            - S::one()
    }

    /// Residual of the line constraint `p₁x − p₂y`.
    pub fn line_residual(&self) -> S {
        self.p1 * self.x - self.p2 * self.y
    }
}

/// Solves the ellipse-line system in closed form.
///
/// Substituting `y = p₁x/p₂` gives
/// `x = p₂ / √(p₂² + 2r cosθ p₁p₂ + p₁²)`; the denominator is positive
/// because `0 ≤ r < 1`.
pub fn lemma1_solve<S: Scalar>(overlap_r: S, theta: S, p1: S, p2: S) -> Result<Lemma1Solution<S>> {
    if overlap_r < -S::real(1e-12) || overlap_r >= S::one() {
        return Err(Error::InvalidParameter(format!(
            "overlap must lie in [0, 1), got {}",
            overlap_r.as_f64()
        )));
    }
    if p1 <= S::zero() || p2 <= S::zero() {
        return Err(Error::InvalidParameter("success amplitudes must be positive".into()));
    }
    let overlap_r = overlap_r.max(S::zero());
    let denom =
        p2 * p2 + S::real(2.0) * overlap_r * theta.cos() * p1 * p2 + p1 * p1;
    let x = p2 / denom.sqrt();
    let y = p1 * x / p2;
    Ok(Lemma1Solution { x, y, overlap_r, theta, p1, p2 })
}

/// The three quantities in the claim-step inequality chain
/// `|Tr(M†M L)| ≤ ‖L‖₂ ≤ ‖L‖₁` with `L = N†N − M†M`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClaimCheck<S> {
    pub lhs: S,
    pub rhs_frobenius: S,
    pub rhs_trace: S,
}

/// Evaluates the claim-step chain for a state pair.
pub fn verify_claim_step<S: Scalar>(
    psi1: &BipartitePureState<S>,
    psi2: &BipartitePureState<S>,
) -> Result<ClaimCheck<S>> {
    if (psi1.dim_a(), psi1.dim_b()) != (psi2.dim_a(), psi2.dim_b()) {
        return Err(Error::DimensionMismatch {
            expected: psi1.dim_a() * psi1.dim_b(),
            got: psi2.dim_a() * psi2.dim_b(),
        });
    }
    let mtm = psi1.partial_trace_a();
    let ntn = psi2.partial_trace_a();
    let l = &ntn - &mtm;
    Ok(ClaimCheck {
        lhs: (&mtm * &l).trace().norm(),
        rhs_frobenius: l.frobenius_norm(),
        rhs_trace: trace_norm(&l)?,
    })
}

/// Marginal purity against its rank floor: `Tr((M†M)²) ≥ 1/t`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PurityBound<S> {
    /// Marginal purity `Tr((M†M)²)`.
    pub lhs: S,
    /// `1/min(r, s)`.
    pub rhs: S,
}

pub fn rank_trace_bound_check<S: Scalar>(psi: &BipartitePureState<S>) -> PurityBound<S> {
    let mtm = psi.partial_trace_a();
    let purity = (&mtm * &mtm).trace().re;
    let t = psi.dim_a().min(psi.dim_b());
    PurityBound { lhs: purity, rhs: S::one() / S::real(t as f64) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ginibre;
    use crate::rng::derive_stream;
    use crate::states::BipartitePureState;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn bound_values_from_quadratic_formula() {
        let b = theoretical_bound::<f64>(2, 2).unwrap();
        assert_eq!(b.t, 2);
        assert_abs_diff_eq!(b.epsilon_star, 0.0659752, epsilon = 1e-6);
        assert_abs_diff_eq!(b.delta_star, 0.1866055, epsilon = 1e-6);
        assert_abs_diff_eq!(b.max_fidelity, 1.0 - b.epsilon_star, epsilon = 1e-15);

        let b4 = theoretical_bound::<f64>(4, 4).unwrap();
        // δ*(4) = (√10 − 1)/18, ε* = δ*/(2√2).
        let want = (10f64.sqrt() - 1.0) / 18.0 / (2.0 * 2f64.sqrt());
        assert_abs_diff_eq!(b4.epsilon_star, want, epsilon = 1e-12);

        // t = min(r, s).
        let asym = theoretical_bound::<f64>(2, 17).unwrap();
        assert_abs_diff_eq!(asym.epsilon_star, b.epsilon_star, epsilon = 1e-15);

        assert!(theoretical_bound::<f64>(1, 4).is_err());
    }

    #[test]
    fn bound_quadratic_residuals_vanish() {
        for t in 2..=64 {
            let b = theoretical_bound::<f64>(t, t).unwrap();
            let res_delta = 9.0 * b.delta_star * b.delta_star + b.delta_star - 1.0 / t as f64;
            let res_eps = 72.0 * b.epsilon_star * b.epsilon_star
                + 2.0 * 2f64.sqrt() * b.epsilon_star
                - 1.0 / t as f64;
            assert!(res_delta.abs() < 1e-12, "t={t}: {res_delta:e}");
            assert!(res_eps.abs() < 1e-12, "t={t}: {res_eps:e}");
            assert_abs_diff_eq!(
                b.epsilon_star,
                b.delta_star / (2.0 * 2f64.sqrt()),
                epsilon = 1e-14
            );
        }
    }

    #[test]
    fn bound_large_t_limit() {
        let b = theoretical_bound::<f64>(1_000_000, 1_000_000).unwrap();
        assert_abs_diff_eq!(b.delta_star * 1e6, 1.0, epsilon = 1e-4);
    }

    #[test]
    fn identity_masker_witness_by_hand() {
        let m = UnitaryMasker::new(
            2,
            2,
            crate::linalg::ComplexMatrix::<f64>::identity(4),
            Ket::basis(2, 0),
        )
        .unwrap();
        let report =
            witness_delta_unitary(&m, &Ket::basis(2, 0), &Ket::basis(2, 1)).unwrap();
        assert_abs_diff_eq!(report.norm_a_side, 2.0, epsilon = 1e-10);
        assert_abs_diff_eq!(report.norm_b_side, 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!(report.norm_omega_1, 2f64.sqrt(), epsilon = 1e-10);
        assert_abs_diff_eq!(report.norm_omega_2, 2f64.sqrt(), epsilon = 1e-10);
        assert_abs_diff_eq!(report.delta, 2.0, epsilon = 1e-10);
        assert_abs_diff_eq!(report.quadratic_slack, 37.5, epsilon = 1e-9);
    }

    #[test]
    fn witness_rejects_non_orthonormal_inputs() {
        let m = UnitaryMasker::new(
            2,
            2,
            crate::linalg::ComplexMatrix::<f64>::identity(4),
            Ket::basis(2, 0),
        )
        .unwrap();
        let res = witness_delta_unitary(&m, &Ket::basis(2, 0), &Ket::basis(2, 0));
        assert!(res.is_err());
    }

    #[test]
    fn phase_collinear_images_zero_marginal_norms() {
        // CZ-free diagonal masker maps |0⟩,|1⟩ to images equal up to phase
        // once the second register ignores the first: use a masker whose
        // two images share marginals exactly.
        let m = crate::masking::cnot_phase_masker::<f64>(2).unwrap();
        let h = 1.0 / 2f64.sqrt();
        let in1 = Ket::new(vec![c(h, 0.0), c(h, 0.0)]).unwrap();
        let in2 = Ket::new(vec![c(h, 0.0), c(-h, 0.0)]).unwrap();
        let report = witness_delta_unitary(&m, &in1, &in2).unwrap();
        assert!(report.norm_a_side < 1e-10);
        assert!(report.norm_b_side < 1e-10);
        // δ comes from the superposition terms only.
        assert!(report.delta > 0.5);
    }

    #[test]
    fn probabilistic_witness_matches_unitary_on_isometry() {
        // Restrict a CNOT masker to A ⊗ |0⟩: the induced isometry is the
        // first two columns-block of the unitary.
        let um = crate::masking::cnot_phase_masker::<f64>(2).unwrap();
        let mut l = crate::linalg::ComplexMatrix::<f64>::zeros(4, 2);
        for input in 0..2 {
            let joint = Ket::<f64>::basis(2, input).tensor(&Ket::basis(2, 0));
            let image = um.unitary().apply(&joint);
            l.set_column(input, &image);
        }
        let pm = ProbabilisticMasker::new(2, 2, l.clone()).unwrap();
        let report = witness_delta_probabilistic(&pm).unwrap();
        assert!(report.quadratic_slack >= -1e-9);

        // A global scale drops out of the normalized images.
        let scaled = ProbabilisticMasker::new(2, 2, l.scaled(c(0.7, 0.0))).unwrap();
        let report_scaled = witness_delta_probabilistic(&scaled).unwrap();
        assert_abs_diff_eq!(report.delta, report_scaled.delta, epsilon = 1e-10);
    }

    #[test]
    fn epsilon_over_identity_masker_orthogonal_inputs() {
        let m = UnitaryMasker::new(
            2,
            2,
            crate::linalg::ComplexMatrix::<f64>::identity(4),
            Ket::basis(2, 0),
        )
        .unwrap();
        let est =
            epsilon_over_state_set(&m, &[Ket::basis(2, 0), Ket::basis(2, 1)]).unwrap();
        assert_abs_diff_eq!(est.eps_trace, 2.0, epsilon = 1e-9);
        assert_abs_diff_eq!(est.eps_fidelity, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn epsilon_over_exact_masker_family() {
        let m = crate::masking::cnot_phase_masker::<f64>(3).unwrap();
        let inputs: Vec<Ket<f64>> = (0..5)
            .map(|i| {
                let phases = [0.0, 0.9 * i as f64, 1.7 * i as f64];
                crate::masking::phase_state(&phases).unwrap()
            })
            .collect();
        let est = epsilon_over_state_set(&m, &inputs).unwrap();
        assert!(est.eps_trace <= 1e-10);
        assert!(est.eps_fidelity <= 1e-7);
    }

    #[test]
    fn lemma1_closed_form_cases() {
        let sol = lemma1_solve::<f64>(0.0, 0.0, 1.0, 1.0).unwrap();
        assert_abs_diff_eq!(sol.x, 1.0 / 2f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(sol.y, 1.0 / 2f64.sqrt(), epsilon = 1e-12);

        // Circle case: cos θ = 0 reduces the ellipse to x² + y² = 1.
        let sol = lemma1_solve::<f64>(0.9, std::f64::consts::FRAC_PI_2, 5.0, 1.0).unwrap();
        assert_abs_diff_eq!(sol.x, 1.0 / 26f64.sqrt(), epsilon = 1e-9);

        let sol = lemma1_solve::<f64>(0.9, 0.0, 1.0, 1.0).unwrap();
        assert_abs_diff_eq!(sol.x, 1.0 / 3.8f64.sqrt(), epsilon = 1e-12);

        assert!(lemma1_solve::<f64>(1.0, 0.0, 1.0, 1.0).is_err());
        assert!(lemma1_solve::<f64>(0.5, 0.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn claim_step_examples() {
        let psi = BipartitePureState::<f64>::new(
            2,
            2,
            Ket::basis(2, 0).tensor(&Ket::basis(2, 0)),
        )
        .unwrap();
        let same = verify_claim_step(&psi, &psi).unwrap();
        assert!(same.lhs < 1e-14 && same.rhs_trace < 1e-14);

        let phi = BipartitePureState::<f64>::new(
            2,
            2,
            Ket::basis(2, 1).tensor(&Ket::basis(2, 1)),
        )
        .unwrap();
        let check = verify_claim_step(&psi, &phi).unwrap();
        // L = |1⟩⟨1| − |0⟩⟨0|, Tr(M†M L) = −1.
        assert_abs_diff_eq!(check.lhs, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(check.rhs_frobenius, 2f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(check.rhs_trace, 2.0, epsilon = 1e-10);
    }

    #[test]
    fn purity_bound_examples() {
        let product = BipartitePureState::<f64>::new(
            2,
            3,
            Ket::basis(2, 0).tensor(&Ket::basis(3, 1)),
        )
        .unwrap();
        let pb = rank_trace_bound_check(&product);
        assert_abs_diff_eq!(pb.lhs, 1.0, epsilon = 1e-12);

        let h = 1.0 / 2f64.sqrt();
        let bell = BipartitePureState::new(
            2,
            2,
            vec![c(h, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(h, 0.0)],
        )
        .unwrap();
        let pb = rank_trace_bound_check(&bell);
        assert_abs_diff_eq!(pb.lhs, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(pb.rhs, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn quadratic_slack_nonnegative_on_samples() {
        let mut rng = derive_stream(23, 0);
        for trial in 0..50 {
            let (r, s) = ([2, 3][trial % 2], [2, 4][trial / 25]);
            let u = crate::linalg::haar_unitary::<f64, _>(r * s, &mut rng).unwrap();
            let masker = UnitaryMasker::new(r, s, u, Ket::basis(s, 0)).unwrap();
            let report =
                witness_delta_unitary(&masker, &Ket::basis(r, 0), &Ket::basis(r, 1)).unwrap();
            assert!(report.quadratic_slack >= -1e-9, "slack {}", report.quadratic_slack);
            assert!(report.claim_lhs <= report.claim_rhs + 1e-9);
        }
    }

    #[test]
    fn slack_at_zero_delta_is_negative() {
        // δ = 0 forces slack = −1/t < 0: exact universal masking witnesses
        // cannot exist.
        for t in 2..=8 {
            let slack = 9.0 * 0.0 * 0.0 + 0.0 - 1.0 / t as f64;
            assert!(slack < 0.0);
        }
    }

    #[test]
    fn delta_above_root_implies_quadratic() {
        // The quadratic's positive root is δ*: slack ≥ 0 and δ ≥ 0 imply
        // δ ≥ δ*.
        for t in 2..=16 {
            let b = theoretical_bound::<f64>(t, t).unwrap();
            for k in 0..100 {
                let delta = k as f64 * 0.02;
                let slack = 9.0 * delta * delta + delta - 1.0 / t as f64;
                if slack >= 0.0 {
                    assert!(delta >= b.delta_star - 1e-9);
                }
            }
        }
    }

    #[test]
    fn random_state_pair_chain_holds() {
        let mut rng = derive_stream(23, 5);
        for _ in 0..20 {
            let g1 = ginibre::<f64, _>(1, 6, &mut rng);
            let g2 = ginibre::<f64, _>(1, 6, &mut rng);
            let psi1 = BipartitePureState::normalized(2, 3, g1.entries().to_vec()).unwrap();
            let psi2 = BipartitePureState::normalized(2, 3, g2.entries().to_vec()).unwrap();
            let check = verify_claim_step(&psi1, &psi2).unwrap();
            assert!(check.lhs <= check.rhs_frobenius + 1e-9);
            assert!(check.rhs_frobenius <= check.rhs_trace + 1e-9);
            let pb = rank_trace_bound_check(&psi1);
            assert!(pb.lhs >= pb.rhs - 1e-12);
        }
    }
}
