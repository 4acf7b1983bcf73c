//! Experiment harness for the masking-bound toolkit: computes theoretical
//! bounds, runs Monte Carlo certification campaigns over random maskers and
//! co-purifying pairs, exercises the exact masker family and the
//! ellipse-line solver, and launches optimizer studies.
//!
//! Exit codes: 0 success / no violations, 1 an invariant or theorem
//! violation was observed, 2 configuration error.
//!
//! File artifacts (CSV rows, optimizer JSON) are pure functions of the
//! configuration and master seed: identical reruns produce identical bytes.
//! Wall time is therefore reported on stdout only, never in files.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use maskbound_core::bounds::{
    lemma1_solve, theoretical_bound, witness_delta_probabilistic, witness_delta_unitary,
};
use maskbound_core::linalg::{ginibre, haar_unitary, svd, ComplexMatrix};
use maskbound_core::masking::{
    check_exact_masking, cnot_phase_masker, default_witness_pairs, phase_state,
    probabilistic_masking_residual, simultaneous_purification_check, ProbabilisticMasker,
    UnitaryMasker,
};
use maskbound_core::optimizer::{minimize_witness, OptimizerConfig, WitnessFixture};
use maskbound_core::rng::{derive_stream, mix_seed};
use maskbound_core::states::{BipartitePureState, Ket, PurificationSpec};

/// Default output directory when `--out` is a bare file name or absent.
const OUT_DIR_ENV: &str = "MASKBOUND_OUT_DIR";

/// Default violation tolerance for campaign slack checks.
const DEFAULT_TOL: f64 = 1e-9;

#[derive(Parser)]
#[command(
    name = "maskbound",
    version,
    about = "Quantum-information masking bound verification harness"
)]
struct Cli {
    /// Master seed; drawn from entropy (and recorded) when omitted.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Emit the full machine-readable record on stdout.
    #[arg(long, global = true)]
    json: bool,

    /// Output file for the command's artifact (CSV or JSON).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Violation tolerance override.
    #[arg(long, global = true)]
    tol: Option<f64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the theoretical distinguishability bound for dimensions (r, s).
    Bound {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        s: usize,
    },
    /// Monte Carlo witness certification over random maskers.
    Witness {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        s: usize,
        #[arg(long)]
        trials: usize,
        #[arg(long, value_enum, default_value_t = WitnessMode::Unitary)]
        mode: WitnessMode,
    },
    /// Superposition-residual campaign over random co-purifying pairs.
    Residual {
        #[arg(long)]
        trials: usize,
    },
    /// Exactness check of the generalized-CNOT masker on its phase family.
    ExactMasker {
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
    /// Solve the ellipse-line intersection system in closed form.
    Lemma1 {
        #[arg(long)]
        overlap: f64,
        #[arg(long)]
        theta: f64,
        #[arg(long)]
        p1: f64,
        #[arg(long)]
        p2: f64,
    },
    /// Search the unitary group for the smallest witness delta.
    Optimize {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        s: usize,
        #[arg(long, default_value_t = 8)]
        restarts: usize,
        #[arg(long, default_value_t = 5_000)]
        evals: usize,
        /// Optional CSV file for the best-so-far trace.
        #[arg(long)]
        trace_out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum WitnessMode {
    Unitary,
    Probabilistic,
}

/// Machine-readable stdout record framing every command's result.
#[derive(Serialize)]
struct Envelope<T: Serialize> {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    seed: u64,
    config: serde_json::Value,
    wall_time_secs: f64,
    result: T,
}

/// Aggregate of a certification campaign.
#[derive(Serialize)]
struct CampaignSummary {
    trials: usize,
    violations: usize,
    min_slack: f64,
    min_delta: f64,
    max_delta: f64,
    r: usize,
    s: usize,
    tolerance: f64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    let seed = cli.seed.unwrap_or_else(|| rand::thread_rng().gen());
    let tol = cli.tol.unwrap_or(DEFAULT_TOL);
    if !(tol.is_finite() && tol >= 0.0) {
        bail!("tolerance must be a nonnegative finite number");
    }
    let started = Instant::now();
    match &cli.command {
        Command::Bound { r, s } => cmd_bound(&cli, *r, *s, seed, started),
        Command::Witness { r, s, trials, mode } => {
            cmd_witness(&cli, *r, *s, *trials, *mode, seed, tol, started)
        }
        Command::Residual { trials } => cmd_residual(&cli, *trials, seed, tol, started),
        Command::ExactMasker { d, samples } => {
            cmd_exact_masker(&cli, *d, *samples, seed, tol.max(1e-10), started)
        }
        Command::Lemma1 { overlap, theta, p1, p2 } => {
            cmd_lemma1(&cli, *overlap, *theta, *p1, *p2, seed, started)
        }
        Command::Optimize { r, s, restarts, evals, trace_out } => {
            cmd_optimize(&cli, *r, *s, *restarts, *evals, trace_out.clone(), seed, started)
        }
    }
}

/// Resolves an output path against `MASKBOUND_OUT_DIR` when the given path
/// is relative and the variable is set.
fn resolve_out(path: &PathBuf) -> PathBuf {
    if path.is_absolute() {
        return path.clone();
    }
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) => PathBuf::from(dir).join(path),
        None => path.clone(),
    }
}

fn emit<T: Serialize>(cli: &Cli, envelope: &Envelope<T>) -> anyhow::Result<()> {
    if cli.json {
        println!("{}", serde_json::to_string_pretty(envelope)?);
    }
    Ok(())
}

fn cmd_bound(cli: &Cli, r: usize, s: usize, seed: u64, started: Instant) -> anyhow::Result<ExitCode> {
    let bound = theoretical_bound::<f64>(r, s).context("invalid dimensions")?;
    let envelope = Envelope {
        tool: "maskbound",
        version: env!("CARGO_PKG_VERSION"),
        command: "bound",
        seed,
        config: serde_json::json!({ "r": r, "s": s }),
        wall_time_secs: started.elapsed().as_secs_f64(),
        result: serde_json::json!({
            "t": bound.t,
            "delta_star": bound.delta_star,
            "epsilon_star": bound.epsilon_star,
            "max_fidelity": bound.max_fidelity,
        }),
    };
    if cli.json {
        emit(cli, &envelope)?;
    } else {
        println!("t            = {}", bound.t);
        println!("delta_star   = {:.8e}", bound.delta_star);
        println!("epsilon_star = {:.8e}", bound.epsilon_star);
        println!("max_fidelity = {:.8e}", bound.max_fidelity);
        println!("seed         = {seed}");
    }
    Ok(ExitCode::SUCCESS)
}

/// One certification row; column order is fixed:
/// trial, seed, r, s, delta, slack.
#[derive(Serialize)]
struct WitnessRow {
    trial: usize,
    seed: u64,
    r: usize,
    s: usize,
    delta: f64,
    slack: f64,
}

/// Draws a random injective trace-decreasing map by rescaling a Ginibre
/// matrix to unit largest singular value.
fn random_probabilistic_masker(
    r: usize,
    s: usize,
    rng: &mut impl Rng,
) -> anyhow::Result<ProbabilisticMasker<f64>> {
    for _ in 0..64 {
        let g: ComplexMatrix<f64> = ginibre(r * s, r, rng);
        let sigma_max = svd(&g).context("decomposition failed")?.singular_values[0];
        if sigma_max <= 1e-12 {
            continue;
        }
        let l = g.scaled(Complex::new(1.0 / (sigma_max * (1.0 + 1e-9)), 0.0));
        if let Ok(masker) = ProbabilisticMasker::new(r, s, l) {
            return Ok(masker);
        }
    }
    bail!("failed to draw an injective trace-decreasing map after 64 attempts");
}

#[allow(clippy::too_many_arguments)]
fn cmd_witness(
    cli: &Cli,
    r: usize,
    s: usize,
    trials: usize,
    mode: WitnessMode,
    seed: u64,
    tol: f64,
    started: Instant,
) -> anyhow::Result<ExitCode> {
    if r < 2 || s < 2 {
        bail!("dimensions must be at least 2");
    }
    if trials == 0 {
        bail!("trials must be at least 1");
    }
    let rows: Vec<WitnessRow> = (0..trials)
        .into_par_iter()
        .map(|trial| -> anyhow::Result<WitnessRow> {
            let sub_seed = mix_seed(seed, trial as u64);
            let mut rng = derive_stream(seed, trial as u64);
            let report = match mode {
                WitnessMode::Unitary => {
                    let u = haar_unitary::<f64, _>(r * s, &mut rng)?;
                    let masker = UnitaryMasker::new(r, s, u, Ket::basis(s, 0))?;
                    witness_delta_unitary(&masker, &Ket::basis(r, 0), &Ket::basis(r, 1))?
                }
                WitnessMode::Probabilistic => {
                    let masker = random_probabilistic_masker(r, s, &mut rng)?;
                    witness_delta_probabilistic(&masker)?
                }
            };
            Ok(WitnessRow {
                trial,
                seed: sub_seed,
                r,
                s,
                delta: report.delta,
                slack: report.quadratic_slack,
            })
        })
        .collect::<anyhow::Result<_>>()?;

    if let Some(path) = &cli.out {
        let path = resolve_out(path);
        let mut writer = csv::Writer::from_path(&path)
            .with_context(|| format!("cannot write {}", path.display()))?;
        for row in &rows {
            writer.serialize(row)?;
        }
        writer.flush()?;
    }

    let violations = rows.iter().filter(|row| row.slack < -tol).count();
    let min_slack = rows.iter().map(|r| r.slack).fold(f64::INFINITY, f64::min);
    let min_delta = rows.iter().map(|r| r.delta).fold(f64::INFINITY, f64::min);
    let max_delta = rows.iter().map(|r| r.delta).fold(f64::NEG_INFINITY, f64::max);
    let summary =
        CampaignSummary { trials, violations, min_slack, min_delta, max_delta, r, s, tolerance: tol };
    let wall = started.elapsed().as_secs_f64();
    if cli.json {
        emit(
            cli,
            &Envelope {
                tool: "maskbound",
                version: env!("CARGO_PKG_VERSION"),
                command: "witness",
                seed,
                config: serde_json::json!({
                    "r": r, "s": s, "trials": trials, "mode": mode, "tol": tol,
                }),
                wall_time_secs: wall,
                result: &summary,
            },
        )?;
    } else {
        println!("trials     = {trials}");
        println!("violations = {violations}");
        println!("min_slack  = {min_slack:.8e}");
        println!("min_delta  = {min_delta:.8e}");
        println!("seed       = {seed}");
        println!("wall_time  = {wall:.3}s");
    }
    Ok(if violations == 0 { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

/// One co-purifying pair sharing both marginals exactly: a common Schmidt
/// spectrum and bases, with independent phases on the second state.
fn co_purifying_pair(
    rng: &mut impl Rng,
    collinear: bool,
) -> anyhow::Result<(BipartitePureState<f64>, BipartitePureState<f64>)> {
    // Spectrum bounded away from purity so near-collinear pairs cannot
    // arise by accident.
    let lam0 = 0.2 + 0.6 * rng.gen::<f64>();
    let spectrum = vec![lam0, 1.0 - lam0];
    let sys_u = haar_unitary::<f64, _>(2, rng)?;
    let anc_u = haar_unitary::<f64, _>(2, rng)?;
    let sys: Vec<Ket<f64>> = (0..2).map(|j| Ket::new(sys_u.column(j))).collect::<Result<_, _>>()?;
    let anc: Vec<Ket<f64>> = (0..2).map(|j| Ket::new(anc_u.column(j))).collect::<Result<_, _>>()?;
    let psi1 = PurificationSpec::new(spectrum.clone(), sys.clone(), anc.clone())?.build()?;

    // Fold the relative phases into the system basis; the kets stay
    // orthonormal, so the spectrum (and hence both marginals) is unchanged.
    let common = if collinear { rng.gen::<f64>() * std::f64::consts::TAU } else { 0.0 };
    let phased: Vec<Ket<f64>> = sys
        .iter()
        .map(|k| {
            let theta = if collinear {
                common
            } else {
                rng.gen::<f64>() * std::f64::consts::TAU
            };
            Ket::new(
                k.amplitudes()
                    .iter()
                    .map(|z| z * Complex::from_polar(1.0, theta))
                    .collect(),
            )
        })
        .collect::<Result<_, _>>()?;
    let psi2 = PurificationSpec::new(spectrum, phased, anc)?.build()?;
    Ok((psi1, psi2))
}

#[derive(Serialize)]
struct ResidualSummary {
    trials: usize,
    violations: usize,
    min_independent_residual: f64,
    max_control_residual: f64,
    tolerance: f64,
}

fn cmd_residual(
    cli: &Cli,
    trials: usize,
    seed: u64,
    tol: f64,
    started: Instant,
) -> anyhow::Result<ExitCode> {
    if trials == 0 {
        bail!("trials must be at least 1");
    }
    let consistency_tol = tol.max(1e-10);
    let outcomes: Vec<(f64, f64, bool)> = (0..trials)
        .into_par_iter()
        .map(|trial| -> anyhow::Result<(f64, f64, bool)> {
            let mut rng = derive_stream(seed, trial as u64);
            let (psi1, psi2) = co_purifying_pair(&mut rng, false)?;
            let report = simultaneous_purification_check(
                &psi1,
                &psi2,
                &default_witness_pairs(),
                consistency_tol,
            )?;
            let violation = report.is_consistent && !report.forced_phase_collinear;

            // Phase-collinear control: superpositions of a pair equal up to
            // a global phase must still mask exactly.
            let (c1, c2) = co_purifying_pair(&mut rng, true)?;
            let mut control = 0.0f64;
            for (u, v) in default_witness_pairs::<f64>() {
                control =
                    control.max(probabilistic_masking_residual(&c1, &c2, 1.0, 1.0, u, v)?);
            }
            Ok((report.max_deviation, control, violation))
        })
        .collect::<anyhow::Result<_>>()?;

    let violations = outcomes.iter().filter(|(_, _, bad)| *bad).count();
    let min_independent_residual =
        outcomes.iter().map(|(r, _, _)| *r).fold(f64::INFINITY, f64::min);
    let max_control_residual =
        outcomes.iter().map(|(_, c, _)| *c).fold(f64::NEG_INFINITY, f64::max);
    let control_bad = max_control_residual > 1e-10;
    let summary = ResidualSummary {
        trials,
        violations,
        min_independent_residual,
        max_control_residual,
        tolerance: consistency_tol,
    };
    let wall = started.elapsed().as_secs_f64();
    if cli.json {
        emit(
            cli,
            &Envelope {
                tool: "maskbound",
                version: env!("CARGO_PKG_VERSION"),
                command: "residual",
                seed,
                config: serde_json::json!({ "trials": trials, "tol": consistency_tol }),
                wall_time_secs: wall,
                result: &summary,
            },
        )?;
    } else {
        println!("trials                   = {trials}");
        println!("violations               = {violations}");
        println!("min_independent_residual = {min_independent_residual:.8e}");
        println!("max_control_residual     = {max_control_residual:.8e}");
        println!("seed                     = {seed}");
        println!("wall_time                = {wall:.3}s");
    }
    Ok(if violations == 0 && !control_bad { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

#[derive(Serialize)]
struct ExactMaskerReport {
    d: usize,
    samples: usize,
    max_deviation_a: f64,
    max_deviation_b: f64,
    out_of_family_deviation_b: f64,
}

fn cmd_exact_masker(
    cli: &Cli,
    d: usize,
    samples: usize,
    seed: u64,
    tol: f64,
    started: Instant,
) -> anyhow::Result<ExitCode> {
    if samples == 0 {
        bail!("samples must be at least 1");
    }
    let masker = cnot_phase_masker::<f64>(d).context("invalid masker dimension")?;
    let inputs: Vec<Ket<f64>> = (0..samples.max(2))
        .map(|k| {
            let mut rng = derive_stream(seed, k as u64);
            let phases: Vec<f64> =
                (0..d).map(|_| rng.gen::<f64>() * std::f64::consts::TAU).collect();
            phase_state(&phases)
        })
        .collect::<Result<_, _>>()?;
    let family = check_exact_masking(&masker, &inputs)?;

    // Out-of-family probe: a basis state leaves its A-marginal pure, so the
    // B-side output marginal reveals it.
    let mut probe_inputs = vec![inputs[0].clone(), Ket::basis(d, 0)];
    let probe = check_exact_masking(&masker, &mut probe_inputs)?;

    let report = ExactMaskerReport {
        d,
        samples,
        max_deviation_a: family.max_marginal_deviation_a,
        max_deviation_b: family.max_marginal_deviation_b,
        out_of_family_deviation_b: probe.max_marginal_deviation_b,
    };
    let wall = started.elapsed().as_secs_f64();
    if cli.json {
        emit(
            cli,
            &Envelope {
                tool: "maskbound",
                version: env!("CARGO_PKG_VERSION"),
                command: "exact-masker",
                seed,
                config: serde_json::json!({ "d": d, "samples": samples, "tol": tol }),
                wall_time_secs: wall,
                result: &report,
            },
        )?;
    } else {
        println!("d                  = {d}");
        println!("max_deviation_a    = {:.8e}", report.max_deviation_a);
        println!("max_deviation_b    = {:.8e}", report.max_deviation_b);
        println!("out_of_family_dev  = {:.8e}", report.out_of_family_deviation_b);
        println!("seed               = {seed}");
        println!("wall_time          = {wall:.3}s");
    }
    let exact = report.max_deviation_a <= tol && report.max_deviation_b <= tol;
    Ok(if exact { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_lemma1(
    cli: &Cli,
    overlap: f64,
    theta: f64,
    p1: f64,
    p2: f64,
    seed: u64,
    started: Instant,
) -> anyhow::Result<ExitCode> {
    let solution = lemma1_solve(overlap, theta, p1, p2).context("invalid parameters")?;
    if cli.json {
        emit(
            cli,
            &Envelope {
                tool: "maskbound",
                version: env!("CARGO_PKG_VERSION"),
                command: "lemma1",
                seed,
                config: serde_json::json!({
                    "overlap": overlap, "theta": theta, "p1": p1, "p2": p2,
                }),
                wall_time_secs: started.elapsed().as_secs_f64(),
                result: serde_json::json!({
                    "x": solution.x,
                    "y": solution.y,
                    "ellipse_residual": solution.ellipse_residual(),
                    "line_residual": solution.line_residual(),
                }),
            },
        )?;
    } else {
        println!("x                = {:.8e}", solution.x);
        println!("y                = {:.8e}", solution.y);
        println!("ellipse_residual = {:.8e}", solution.ellipse_residual());
        println!("line_residual    = {:.8e}", solution.line_residual());
    }
    Ok(ExitCode::SUCCESS)
}

#[allow(clippy::too_many_arguments)]
fn cmd_optimize(
    cli: &Cli,
    r: usize,
    s: usize,
    restarts: usize,
    evals: usize,
    trace_out: Option<PathBuf>,
    seed: u64,
    started: Instant,
) -> anyhow::Result<ExitCode> {
    let fixture = WitnessFixture::<f64>::standard(r, s).context("invalid dimensions")?;
    let config = OptimizerConfig::new(restarts, evals, seed);
    let run = minimize_witness(&fixture, &config).context("invalid optimizer budget")?;

    if let Some(path) = &cli.out {
        let path = resolve_out(path);
        // The run record excludes wall time, so the file is reproducible.
        std::fs::write(&path, serde_json::to_string_pretty(&run)?)
            .with_context(|| format!("cannot write {}", path.display()))?;
    }
    if let Some(path) = &trace_out {
        let path = resolve_out(path);
        let mut writer = csv::Writer::from_path(&path)
            .with_context(|| format!("cannot write {}", path.display()))?;
        writer.write_record(["restart", "eval_index", "best_so_far"])?;
        for record in &run.restarts {
            for (eval_index, best) in record.trace.iter().enumerate() {
                writer.write_record([
                    record.restart.to_string(),
                    eval_index.to_string(),
                    format!("{best:e}"),
                ])?;
            }
        }
        writer.flush()?;
    }

    let wall = started.elapsed().as_secs_f64();
    if cli.json {
        emit(
            cli,
            &Envelope {
                tool: "maskbound",
                version: env!("CARGO_PKG_VERSION"),
                command: "optimize",
                seed,
                config: serde_json::json!({
                    "r": r, "s": s, "restarts": restarts, "evals": evals,
                }),
                wall_time_secs: wall,
                result: &run,
            },
        )?;
    } else {
        println!("best_delta   = {:.8e}", run.best_delta);
        println!("gap_to_bound = {:.8e}", run.gap_to_bound);
        println!("restarts     = {restarts}");
        println!("seed         = {seed}");
        println!("wall_time    = {wall:.3}s");
    }
    Ok(if run.gap_to_bound >= -1e-9 { ExitCode::SUCCESS } else { ExitCode::from(1) })
}
