//! Derivative-free search for the least-distinguishable masker: a
//! Hermitian-generator parametrization of the unitary group, witness-δ and
//! state-set objectives, an adaptive Nelder–Mead core, and a multi-restart
//! driver with per-restart reproducible random streams.

use num_complex::Complex;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{epsilon_over_state_set, theoretical_bound, witness_delta_unitary};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, ComplexMatrix};
use crate::masking::UnitaryMasker;
use crate::rng::derive_stream;
use crate::scalar::Scalar;
use crate::states::Ket;

/// Objective value returned when a parameter vector fails to decode into a
/// usable masker; far above any reachable δ (which is at most 2).
const DECODE_PENALTY: f64 = 10.0;

/// Parametrization of `U(n)` by `n²` real numbers through `U = exp(iH)`.
///
/// Layout: the first `n` parameters are the real diagonal of the Hermitian
/// generator `H`; the remaining `n(n−1)` come in `(re, im)` pairs filling
/// the strict upper triangle row by row, with the lower triangle the
/// conjugate. The zero vector decodes to the identity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnitaryParams {
    n: usize,
}

impl UnitaryParams {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDimension { min: 1, got: 0 });
        }
        Ok(Self { n })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Number of real parameters, `n²`.
    pub fn param_count(&self) -> usize {
        self.n * self.n
    }

    /// Assembles the Hermitian generator from the parameter vector.
    pub fn generator<S: Scalar>(&self, params: &[S]) -> Result<ComplexMatrix<S>> {
        if params.len() != self.param_count() {
            return Err(Error::DimensionMismatch {
                expected: self.param_count(),
                got: params.len(),
            });
        }
        let n = self.n;
        let mut h = ComplexMatrix::<S>::zeros(n, n);
        for j in 0..n {
            h[(j, j)] = Complex::new(params[j], S::zero());
        }
        let mut idx = n;
        for p in 0..n {
            for q in p + 1..n {
                let z = Complex::new(params[idx], params[idx + 1]);
                idx += 2;
                h[(p, q)] = z;
                h[(q, p)] = z.conj();
            }
        }
        Ok(h)
    }

    /// Decodes `U = exp(iH)` through the spectral decomposition of `H`.
    pub fn decode<S: Scalar>(&self, params: &[S]) -> Result<ComplexMatrix<S>> {
        let h = self.generator(params)?;
        let eig = hermitian_eigen(&h, S::real(1e-8))?;
        let n = self.n;
        let phases =
            ComplexMatrix::from_fn(n, n, |j, k| {
                if j == k {
                    Complex::from_polar(S::one(), eig.eigenvalues[j])
                } else {
                    Complex::new(S::zero(), S::zero())
                }
            });
        Ok(&(&eig.eigenvectors * &phases) * &eig.eigenvectors.adjoint())
    }
}

/// The fixed problem a witness objective evaluates: subsystem dimensions,
/// the orthonormal input pair, and the ancilla ket.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound(
    serialize = "S: Scalar + Serialize",
    deserialize = "S: Scalar + for<'a> Deserialize<'a>"
))]
pub struct WitnessFixture<S: Scalar> {
    pub dim_a: usize,
    pub dim_b: usize,
    pub input_1: Ket<S>,
    pub input_2: Ket<S>,
    pub ancilla: Ket<S>,
}

impl<S: Scalar> WitnessFixture<S> {
    /// Canonical fixture: inputs `|0⟩`, `|1⟩`, ancilla `|0⟩`.
    pub fn standard(dim_a: usize, dim_b: usize) -> Result<Self> {
        if dim_a < 2 || dim_b < 2 {
            return Err(Error::InvalidDimension { min: 2, got: dim_a.min(dim_b) });
        }
        Ok(Self {
            dim_a,
            dim_b,
            input_1: Ket::basis(dim_a, 0),
            input_2: Ket::basis(dim_a, 1),
            ancilla: Ket::basis(dim_b, 0),
        })
    }

    fn params(&self) -> UnitaryParams {
        UnitaryParams { n: self.dim_a * self.dim_b }
    }
}

/// Which distinguishability scale a state-set objective minimizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ObjectiveMetric {
    /// Max pairwise marginal trace-norm difference.
    TraceNorm,
    /// `1 −` min pairwise marginal fidelity.
    Fidelity,
}

/// Witness δ of the unitary decoded from `params`, with a fixed penalty on
/// decode failure so the search stays total.
pub fn objective_witness<S: Scalar>(fixture: &WitnessFixture<S>, params: &[S]) -> S {
    let value = || -> Result<S> {
        let u = fixture.params().decode(params)?;
        let masker = UnitaryMasker::new(fixture.dim_a, fixture.dim_b, u, fixture.ancilla.clone())?;
        Ok(witness_delta_unitary(&masker, &fixture.input_1, &fixture.input_2)?.delta)
    };
    value().unwrap_or(S::real(DECODE_PENALTY))
}

/// Measured ε of the decoded masker over an explicit input set.
pub fn objective_state_set<S: Scalar>(
    fixture: &WitnessFixture<S>,
    inputs: &[Ket<S>],
    metric: ObjectiveMetric,
    params: &[S],
) -> S {
    let value = || -> Result<S> {
        let u = fixture.params().decode(params)?;
        let masker = UnitaryMasker::new(fixture.dim_a, fixture.dim_b, u, fixture.ancilla.clone())?;
        let est = epsilon_over_state_set(&masker, inputs)?;
        Ok(match metric {
            ObjectiveMetric::TraceNorm => est.eps_trace,
            ObjectiveMetric::Fidelity => est.eps_fidelity,
        })
    };
    value().unwrap_or(S::real(DECODE_PENALTY))
}

/// Nelder–Mead stopping and budget knobs.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct NelderMeadOptions<S> {
    /// Hard cap on objective evaluations.
    pub max_evals: usize,
    /// Terminate when the simplex value spread falls below this.
    pub spread_tol: S,
    /// Offset added per coordinate to build the initial simplex.
    pub initial_step: S,
}

impl<S: Scalar> Default for NelderMeadOptions<S> {
    fn default() -> Self {
        Self { max_evals: 20_000, spread_tol: S::real(1e-10), initial_step: S::real(0.25) }
    }
}

/// Outcome of a single Nelder–Mead descent.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NelderMeadResult<S> {
    pub best_params: Vec<S>,
    pub best_value: S,
    /// Objective evaluations consumed.
    pub evals: usize,
    /// Best value seen after each evaluation; nonincreasing.
    pub trace: Vec<S>,
    /// True if the spread tolerance was reached before the eval cap.
    pub converged: bool,
}

/// Adaptive Nelder–Mead simplex descent.
///
/// Uses the dimension-adaptive coefficients (expansion `1 + 2/d`,
/// contraction `0.75 − 1/2d`, shrink `1 − 1/d`) that behave better than the
/// classic constants in the `d ≳ 10` regime of unitary parameter spaces.
/// Fully deterministic for a fixed starting point.
pub fn nelder_mead<S: Scalar>(
    f: impl Fn(&[S]) -> S,
    x0: &[S],
    options: &NelderMeadOptions<S>,
) -> NelderMeadResult<S> {
    let d = x0.len();
    assert!(d > 0, "empty parameter vector");
    let df = S::real(d as f64);
    let alpha = S::one();
    let beta = S::one() + S::real(2.0) / df;
    let gamma = S::real(0.75) - S::one() / (S::real(2.0) * df);
    let sigma = S::one() - S::one() / df;

    let mut evals = 0usize;
    let mut trace = Vec::with_capacity(options.max_evals.min(1 << 20));
    let mut best = S::infinity();
    let eval = |x: &[S], evals: &mut usize, trace: &mut Vec<S>, best: &mut S| -> S {
        let v = f(x);
        *evals += 1;
        if v < *best {
            *best = v;
        }
        trace.push(*best);
        v
    };

    // Initial simplex: x0 plus one step along each coordinate.
    let mut simplex: Vec<(Vec<S>, S)> = Vec::with_capacity(d + 1);
    let v0 = eval(x0, &mut evals, &mut trace, &mut best);
    simplex.push((x0.to_vec(), v0));
    for j in 0..d {
        if evals >= options.max_evals {
            break;
        }
        let mut x = x0.to_vec();
        x[j] += options.initial_step;
        let v = eval(&x, &mut evals, &mut trace, &mut best);
        simplex.push((x, v));
    }

    let mut converged = false;
    while evals < options.max_evals && simplex.len() == d + 1 {
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
        let spread = simplex[d].1 - simplex[0].1;
        if spread <= options.spread_tol {
            converged = true;
            break;
        }

        // Centroid of all but the worst vertex.
        let mut centroid = vec![S::zero(); d];
        for (x, _) in &simplex[..d] {
            for (c, &xi) in centroid.iter_mut().zip(x) {
                *c += xi;
            }
        }
        for c in &mut centroid {
            *c /= df;
        }

        let worst = simplex[d].clone();
        let reflect: Vec<S> = centroid
            .iter()
            .zip(&worst.0)
            .map(|(&c, &w)| c + alpha * (c - w))
            .collect();
        let fr = eval(&reflect, &mut evals, &mut trace, &mut best);

        if fr < simplex[0].1 {
            // Try to expand past the reflection.
            if evals >= options.max_evals {
                simplex[d] = (reflect, fr);
                break;
            }
            let expand: Vec<S> = centroid
                .iter()
                .zip(&worst.0)
                .map(|(&c, &w)| c + beta * (c - w))
                .collect();
            let fe = eval(&expand, &mut evals, &mut trace, &mut best);
            simplex[d] = if fe < fr { (expand, fe) } else { (reflect, fr) };
        } else if fr < simplex[d - 1].1 {
            simplex[d] = (reflect, fr);
        } else {
            // Contract toward the better of worst/reflection.
            if evals >= options.max_evals {
                break;
            }
            let (anchor, fa) =
                if fr < worst.1 { (&reflect, fr) } else { (&worst.0, worst.1) };
            let contract: Vec<S> = centroid
                .iter()
                .zip(anchor)
                .map(|(&c, &a)| c + gamma * (a - c))
                .collect();
            let fc = eval(&contract, &mut evals, &mut trace, &mut best);
            if fc < fa {
                simplex[d] = (contract, fc);
            } else {
                // Shrink everything toward the best vertex.
                let best_x = simplex[0].0.clone();
                for vertex in simplex.iter_mut().skip(1) {
                    if evals >= options.max_evals {
                        break;
                    }
                    let x: Vec<S> = best_x
                        .iter()
                        .zip(&vertex.0)
                        .map(|(&b, &v)| b + sigma * (v - b))
                        .collect();
                    let fv = eval(&x, &mut evals, &mut trace, &mut best);
                    *vertex = (x, fv);
                }
            }
        }
    }

    simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
    let (best_params, best_value) = simplex.into_iter().next().expect("nonempty simplex");
    NelderMeadResult { best_params, best_value, evals, trace, converged }
}

/// Multi-restart search configuration.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct OptimizerConfig<S> {
    pub restarts: usize,
    pub max_evals_per_restart: usize,
    /// Master seed; restart `k` draws from stream `k`.
    pub seed: u64,
    /// Standard deviation of the Gaussian initial parameters.
    pub init_scale: S,
    pub spread_tol: S,
}

impl<S: Scalar> OptimizerConfig<S> {
    pub fn new(restarts: usize, max_evals_per_restart: usize, seed: u64) -> Self {
        Self {
            restarts,
            max_evals_per_restart,
            seed,
            init_scale: S::real(std::f64::consts::FRAC_PI_4),
            spread_tol: S::real(1e-10),
        }
    }
}

/// Per-restart summary, in restart order regardless of thread scheduling.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RestartRecord<S> {
    pub restart: usize,
    pub best_value: S,
    pub evals: usize,
    pub converged: bool,
    /// Best-so-far value after each evaluation of this restart.
    pub trace: Vec<S>,
}

/// Full record of a multi-restart witness minimization.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound(
    serialize = "S: Scalar + Serialize",
    deserialize = "S: Scalar + for<'a> Deserialize<'a>"
))]
pub struct OptimizationRun<S: Scalar> {
    pub dim_a: usize,
    pub dim_b: usize,
    pub config: OptimizerConfig<S>,
    pub best_delta: S,
    pub best_params: Vec<S>,
    /// `best_delta − δ*`; nonnegative when the bound holds.
    pub gap_to_bound: S,
    pub restarts: Vec<RestartRecord<S>>,
    /// Wall time is environment noise, not part of the reproducible record,
    /// so it is excluded from serialization.
    #[serde(skip)]
    pub wall_time_secs: f64,
}

/// Minimizes the witness δ over the unitary group with parallel restarts.
///
/// Restart `k` draws its Gaussian starting point from the derived stream
/// `mix(seed, k)`, so the result is a pure function of the configuration:
/// thread scheduling cannot change any reported value.
pub fn minimize_witness<S>(
    fixture: &WitnessFixture<S>,
    config: &OptimizerConfig<S>,
) -> Result<OptimizationRun<S>>
where
    S: Scalar,
    StandardNormal: Distribution<S>,
{
    if config.restarts == 0 || config.max_evals_per_restart == 0 {
        return Err(Error::InvalidParameter("restarts and eval budget must be positive".into()));
    }
    let start = std::time::Instant::now();
    let param_count = fixture.params().param_count();
    let options = NelderMeadOptions {
        max_evals: config.max_evals_per_restart,
        spread_tol: config.spread_tol,
        initial_step: S::real(0.25),
    };

    let descents: Vec<(usize, NelderMeadResult<S>)> = (0..config.restarts)
        .into_par_iter()
        .map(|k| {
            let mut rng = derive_stream(config.seed, k as u64);
            let x0: Vec<S> = (0..param_count)
                .map(|_| {
                    let g: S = rng.sample(StandardNormal);
                    g * config.init_scale
                })
                .collect();
            let result = nelder_mead(|p| objective_witness(fixture, p), &x0, &options);
            (k, result)
        })
        .collect();

    let (mut best_delta, mut best_params) = (S::infinity(), Vec::new());
    let mut restarts = Vec::with_capacity(config.restarts);
    for (k, r) in descents {
        if r.best_value < best_delta {
            best_delta = r.best_value;
            best_params = r.best_params.clone();
        }
        restarts.push(RestartRecord {
            restart: k,
            best_value: r.best_value,
            evals: r.evals,
            converged: r.converged,
            trace: r.trace,
        });
    }

    let bound = theoretical_bound::<S>(fixture.dim_a, fixture.dim_b)?;
    Ok(OptimizationRun {
        dim_a: fixture.dim_a,
        dim_b: fixture.dim_b,
        config: *config,
        best_delta,
        best_params,
        gap_to_bound: best_delta - bound.delta_star,
        restarts,
        wall_time_secs: start.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn zero_params_decode_to_identity() {
        let p = UnitaryParams::new(3).unwrap();
        let u = p.decode::<f64>(&vec![0.0; 9]).unwrap();
        assert!((&u - &ComplexMatrix::identity(3)).frobenius_norm() < 1e-12);
    }

    #[test]
    fn diagonal_generator_decodes_to_phases() {
        let p = UnitaryParams::new(2).unwrap();
        let u = p.decode::<f64>(&[std::f64::consts::PI, 0.0, 0.0, 0.0]).unwrap();
        assert_abs_diff_eq!(u[(0, 0)].re, -1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(u[(0, 0)].im, 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!(u[(1, 1)].re, 1.0, epsilon = 1e-12);
        assert!(u[(0, 1)].norm() < 1e-12);
    }

    #[test]
    fn decode_is_always_unitary() {
        let p = UnitaryParams::new(3).unwrap();
        let mut rng = derive_stream(41, 0);
        for _ in 0..20 {
            let params: Vec<f64> =
                (0..9).map(|_| rng.sample::<f64, _>(StandardNormal) * 2.0).collect();
            let u = p.decode(&params).unwrap();
            assert!(u.unitarity_defect() < 1e-9);
        }
    }

    #[test]
    fn decode_rejects_wrong_length() {
        let p = UnitaryParams::new(2).unwrap();
        assert!(p.decode::<f64>(&[0.0; 3]).is_err());
        assert!(UnitaryParams::new(0).is_err());
    }

    #[test]
    fn off_diagonal_generator_matches_pauli_rotation() {
        // H = (π/2) σ_x gives U = exp(i π/2 σ_x) = i σ_x.
        let p = UnitaryParams::new(2).unwrap();
        let u = p
            .decode::<f64>(&[0.0, 0.0, std::f64::consts::FRAC_PI_2, 0.0])
            .unwrap();
        assert!(u[(0, 0)].norm() < 1e-10);
        assert_abs_diff_eq!(u[(0, 1)].im, 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(u[(1, 0)].im, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn nelder_mead_recovers_quadratic_minimum() {
        let target = [1.5, -0.25, 0.75];
        let f = |x: &[f64]| {
            x.iter().zip(&target).map(|(a, b)| (a - b) * (a - b)).sum::<f64>()
        };
        let options = NelderMeadOptions { max_evals: 5_000, spread_tol: 1e-14, initial_step: 0.5 };
        let result = nelder_mead(f, &[0.0, 0.0, 0.0], &options);
        assert!(result.converged);
        for (got, want) in result.best_params.iter().zip(&target) {
            assert_abs_diff_eq!(got, want, epsilon = 1e-4);
        }
    }

    #[test]
    fn nelder_mead_trace_is_monotone_and_capped() {
        let f = |x: &[f64]| x.iter().map(|a| a * a).sum::<f64>() + 1.0;
        let options = NelderMeadOptions { max_evals: 137, spread_tol: 0.0, initial_step: 0.5 };
        let result = nelder_mead(f, &[3.0, -2.0], &options);
        assert!(result.evals <= 137);
        assert_eq!(result.trace.len(), result.evals);
        for pair in result.trace.windows(2) {
            assert!(pair[1] <= pair[0]);
        }
        assert!(result.best_value >= 1.0);
    }

    #[test]
    fn witness_objective_identity_point() {
        let fixture = WitnessFixture::<f64>::standard(2, 2).unwrap();
        let delta = objective_witness(&fixture, &vec![0.0; 16]);
        // Identity masker leaves the inputs fully distinguishable.
        assert_abs_diff_eq!(delta, 2.0, epsilon = 1e-9);
    }

    #[test]
    fn state_set_objective_identity_point() {
        let fixture = WitnessFixture::<f64>::standard(2, 2).unwrap();
        let inputs = [Ket::basis(2, 0), Ket::basis(2, 1)];
        let eps = objective_state_set(&fixture, &inputs, ObjectiveMetric::TraceNorm, &vec![0.0; 16]);
        assert_abs_diff_eq!(eps, 2.0, epsilon = 1e-9);
        let eps = objective_state_set(&fixture, &inputs, ObjectiveMetric::Fidelity, &vec![0.0; 16]);
        assert_abs_diff_eq!(eps, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn minimize_is_bit_reproducible() {
        let fixture = WitnessFixture::<f64>::standard(2, 2).unwrap();
        let config = OptimizerConfig::new(4, 250, 7);
        let a = minimize_witness(&fixture, &config).unwrap();
        let b = minimize_witness(&fixture, &config).unwrap();
        assert_eq!(a.best_delta.to_bits(), b.best_delta.to_bits());
        assert_eq!(a.best_params.len(), b.best_params.len());
        for (x, y) in a.best_params.iter().zip(&b.best_params) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
        for (ra, rb) in a.restarts.iter().zip(&b.restarts) {
            assert_eq!(ra.restart, rb.restart);
            assert_eq!(ra.evals, rb.evals);
            assert_eq!(ra.trace.len(), rb.trace.len());
            for (x, y) in ra.trace.iter().zip(&rb.trace) {
                assert_eq!(x.to_bits(), y.to_bits());
            }
        }
        // Serialized form omits wall time, so it is byte-identical too.
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }

    #[test]
    fn minimize_respects_bound() {
        let fixture = WitnessFixture::<f64>::standard(2, 2).unwrap();
        let run = minimize_witness(&fixture, &OptimizerConfig::new(6, 1_500, 11)).unwrap();
        // δ can never undercut the theoretical root.
        assert!(run.gap_to_bound >= -1e-9, "gap {}", run.gap_to_bound);
        assert!(run.best_delta < 2.0, "search should improve on the identity");
    }

    #[test]
    fn minimize_rejects_empty_budget() {
        let fixture = WitnessFixture::<f64>::standard(2, 2).unwrap();
        assert!(minimize_witness(&fixture, &OptimizerConfig::new(0, 100, 1)).is_err());
        assert!(minimize_witness(&fixture, &OptimizerConfig::new(2, 0, 1)).is_err());
    }
}
