//! Subcommand implementations.
//!
//! Each command returns `Ok(())` or a [`CliError`] that maps onto the exit
//! code contract: 1 for pipeline or verification failures, 2 for parse and
//! validation errors, 3 for I/O errors.

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;

use polyfact::eigenstructure::{classify_spectrum, JordanBlockKind, SpectrumCluster, SpectrumVerdict};
use polyfact::factorizer::{
    choose_x0, factorize, normalize, FactorizationOptions, FactorizationReport, JordanSource,
    Tolerances, X0Mode,
};
use polyfact::riccati::{build_pencil, build_riccati_data};
use polyfact::sampling::{random_gram_instance, trial_rng};
use polyfact::MatPoly;

use crate::files::{parse_jordan, parse_poly, write_poly, PolyKind};

/// Worst-error gate for the trial harness.
pub const TRIALS_ERROR_GATE: f64 = 1e-4;

#[derive(Debug)]
pub enum CliError {
    /// Factorization or verification failure (exit 1).
    Pipeline(String),
    /// Parse or validation error (exit 2).
    Parse(String),
    /// File system error (exit 3).
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Pipeline(_) => 1,
            CliError::Parse(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Pipeline(msg) => write!(f, "{msg}"),
            CliError::Parse(msg) => write!(f, "parse: {msg}"),
            CliError::Io(msg) => write!(f, "io: {msg}"),
        }
    }
}

fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn load_q(path: &Path) -> Result<MatPoly, CliError> {
    let file = parse_poly(&read_file(path)?).map_err(CliError::Parse)?;
    if file.kind == Some(PolyKind::G) {
        return Err(CliError::Parse(format!(
            "{} is marked kind G, expected a Q polynomial",
            path.display()
        )));
    }
    Ok(file.poly)
}

/// Render the report as one metric per line.
pub fn format_report(report: &FactorizationReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "x0 {}", report.x0);
    let _ = writeln!(out, "residual {:e}", report.residual);
    let _ = writeln!(out, "fx_rank {}", report.fx_rank);
    let _ = writeln!(out, "fx_min_eig {:e}", report.fx_min_eig);
    let _ = writeln!(out, "skew_defect {:e}", report.skew_defect);
    let _ = writeln!(out, "riccati_residual {:e}", report.riccati_residual);
    let _ = writeln!(out, "neutrality_defect {:e}", report.neutrality_defect);
    for b in &report.eigen_summary {
        match b.kind {
            JordanBlockKind::Real { lambda } => {
                let _ = writeln!(out, "eigen_block real lambda={lambda:.12} size={}", b.size);
            }
            JordanBlockKind::ComplexPair { alpha, beta } => {
                let _ = writeln!(
                    out,
                    "eigen_block complex alpha={alpha:.12} beta={beta:.12} size={}",
                    b.size
                );
            }
        }
    }
    out
}

/// `factor <in> <out>`: factorize the polynomial in `input` and write `G`.
pub fn cmd_factor(
    input: &Path,
    output: &Path,
    x0: X0Mode,
    tol: Option<f64>,
    jordan: Option<&Path>,
) -> Result<(), CliError> {
    let q = load_q(input)?;
    let jordan_source = match jordan {
        Some(path) => {
            JordanSource::Supplied(parse_jordan(&read_file(path)?).map_err(CliError::Parse)?)
        }
        None => JordanSource::Generic,
    };
    let tolerances = Tolerances {
        residual_tol: tol.unwrap_or(Tolerances::default().residual_tol),
        ..Tolerances::default()
    };
    let opts = FactorizationOptions {
        x0_mode: x0,
        tolerances,
        jordan_source,
    };
    let report = factorize(&q, &opts)
        .map_err(|e| CliError::Pipeline(format!("stage {}: {e}", e.stage())))?;
    print!("{}", format_report(&report));
    std::fs::write(output, write_poly(&report.g, Some(PolyKind::G)))
        .map_err(|e| CliError::Io(format!("{}: {e}", output.display())))?;
    Ok(())
}

/// Outcome of a verification: the two residuals that were compared to `tol`.
pub struct VerifyOutcome {
    pub coeff_residual: f64,
    pub eval_residual: f64,
}

/// Compare `Q` against `G^T G` coefficient-wise and on an evaluation grid.
pub fn verify_polys(q: &MatPoly, g: &MatPoly, grid_points: usize) -> Result<VerifyOutcome, CliError> {
    if q.dim() != g.dim() {
        return Err(CliError::Parse(format!(
            "dimension mismatch: Q is {}x{}, G is {}x{}",
            q.dim(),
            q.dim(),
            g.dim(),
            g.dim()
        )));
    }
    let gram = g.gram();
    let coeff_residual = q.max_coeff_diff(&gram);
    let mut eval_residual = 0.0f64;
    let k = grid_points.max(1);
    for i in 0..k {
        let x = if k == 1 {
            0.0
        } else {
            -5.0 + 10.0 * (i as f64) / ((k - 1) as f64)
        };
        eval_residual = eval_residual.max((q.eval(x) - gram.eval(x)).amax());
    }
    Ok(VerifyOutcome {
        coeff_residual,
        eval_residual,
    })
}

/// `verify <q> <g>`: exit 0 iff both residuals are within `tol`.
pub fn cmd_verify(
    q_path: &Path,
    g_path: &Path,
    tol: f64,
    grid_points: usize,
) -> Result<(), CliError> {
    let q = load_q(q_path)?;
    let g_file = parse_poly(&read_file(g_path)?).map_err(CliError::Parse)?;
    let outcome = verify_polys(&q, &g_file.poly, grid_points)?;
    println!("coeff_residual {:e}", outcome.coeff_residual);
    println!("eval_residual {:e}", outcome.eval_residual);
    if outcome.coeff_residual <= tol && outcome.eval_residual <= tol {
        println!("verified true");
        Ok(())
    } else {
        println!("verified false");
        Err(CliError::Pipeline(format!(
            "residual exceeds tolerance {tol:e}"
        )))
    }
}

/// The analysis printed by `analyze`: spectrum, clusters and verdict.
pub struct Analysis {
    pub eigenvalues: Vec<(f64, f64)>,
    pub clusters: Vec<SpectrumCluster>,
    pub verdict: SpectrumVerdict,
}

/// Build the pencil for `q` and classify its spectrum.
pub fn analyze_poly(q: &MatPoly) -> Result<Analysis, CliError> {
    let tols = Tolerances::default();
    let stage = |e: polyfact::FactorizeError| CliError::Pipeline(format!("stage {}: {e}", e.stage()));
    if q.degree() == 0 || q.degree() % 2 != 0 {
        return Err(CliError::Parse(format!(
            "analyze needs a positive even degree, got {}",
            q.degree()
        )));
    }
    let x0 = choose_x0(q, tols.psd_tol).map_err(stage)?;
    let (p, _) = normalize(q, x0, tols.psd_tol).map_err(stage)?;
    let rd = build_riccati_data(&p)
        .map_err(|e| CliError::Parse(format!("invalid polynomial: {e}")))?;
    let pencil = build_pencil(&rd);
    let mut eigenvalues: Vec<(f64, f64)> = pencil
        .mr()
        .clone()
        .complex_eigenvalues()
        .iter()
        .map(|c| (c.re, c.im))
        .collect();
    eigenvalues.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let scaled_tol = tols.cluster_tol * (1.0 + pencil.mr().norm());
    let (clusters, verdict) = classify_spectrum(pencil.mr(), scaled_tol);
    Ok(Analysis {
        eigenvalues,
        clusters,
        verdict,
    })
}

pub fn format_analysis(a: &Analysis) -> String {
    let mut out = String::new();
    for (re, im) in &a.eigenvalues {
        let _ = writeln!(out, "eigenvalue {re:.12e} {im:.12e}");
    }
    for c in &a.clusters {
        match *c {
            SpectrumCluster::Real {
                lambda,
                multiplicity,
            } => {
                let _ = writeln!(out, "cluster real lambda={lambda:.12} multiplicity={multiplicity}");
            }
            SpectrumCluster::ComplexPair {
                alpha,
                beta,
                multiplicity,
            } => {
                let _ = writeln!(
                    out,
                    "cluster complex alpha={alpha:.12} beta={beta:.12} multiplicity={multiplicity}"
                );
            }
        }
    }
    let verdict = match a.verdict {
        SpectrumVerdict::FactorizableGeneric => "FACTORIZABLE-GENERIC",
        SpectrumVerdict::NeedsExactJordan => "NEEDS-EXACT-JORDAN",
        SpectrumVerdict::NotFactorizable => "NOT-FACTORIZABLE",
    };
    let _ = writeln!(out, "verdict {verdict}");
    out
}

/// `analyze <in>`: print the spectrum diagnosis.
pub fn cmd_analyze(input: &Path) -> Result<(), CliError> {
    let q = load_q(input)?;
    let analysis = analyze_poly(&q)?;
    print!("{}", format_analysis(&analysis));
    Ok(())
}

/// One trial of the randomized harness.
pub struct TrialOutcome {
    pub index: u64,
    pub n: usize,
    pub m: usize,
    /// Max-entry coefficient error, or the pipeline failure message.
    pub result: Result<f64, String>,
}

/// Aggregated trial results.
pub struct TrialsReport {
    pub outcomes: Vec<TrialOutcome>,
    pub worst_error: f64,
    pub failures: usize,
}

/// Run `count` seeded trials: draw `n`, `m` uniformly in `[2, nmax] x
/// [2, mmax]`, build a random factor `G` (identity constant term, entries
/// uniform in `[-1, 1]`), factor `Q = G^T G`, and measure the max-entry
/// error between `Q` and the Gram square of the output.
///
/// Trials run in parallel; outcome order and content are independent of the
/// schedule because every trial has its own generator stream.
pub fn run_trials(count: u64, seed: u64, nmax: usize, mmax: usize) -> TrialsReport {
    let outcomes: Vec<TrialOutcome> = (0..count)
        .into_par_iter()
        .map(|index| {
            let mut rng = trial_rng(seed, index);
            let n = rng.random_range(2..=nmax.max(2));
            let m = rng.random_range(2..=mmax.max(2));
            let (_, q) = random_gram_instance(n, m, &mut rng);
            let result = factorize(&q, &FactorizationOptions::default())
                .map(|report| report.residual)
                .map_err(|e| format!("stage {}: {e}", e.stage()));
            TrialOutcome {
                index,
                n,
                m,
                result,
            }
        })
        .collect();
    let worst_error = outcomes
        .iter()
        .filter_map(|t| t.result.as_ref().ok().copied())
        .fold(0.0f64, f64::max);
    let failures = outcomes.iter().filter(|t| t.result.is_err()).count();
    TrialsReport {
        outcomes,
        worst_error,
        failures,
    }
}

pub fn format_trials(report: &TrialsReport) -> String {
    let mut out = String::new();
    for t in &report.outcomes {
        match &t.result {
            Ok(err) => {
                let _ = writeln!(out, "trial {} n={} m={} error {:e}", t.index, t.n, t.m, err);
            }
            Err(msg) => {
                let _ = writeln!(out, "trial {} n={} m={} FAILED {}", t.index, t.n, t.m, msg);
            }
        }
    }
    let _ = writeln!(out, "trials {}", report.outcomes.len());
    let _ = writeln!(out, "failures {}", report.failures);
    let _ = writeln!(out, "worst_error {:e}", report.worst_error);
    out
}

/// `trials`: exit 0 iff no trial failed and the worst error is within the
/// fixed gate.
pub fn cmd_trials(count: u64, seed: u64, nmax: usize, mmax: usize) -> Result<(), CliError> {
    let report = run_trials(count, seed, nmax, mmax);
    print!("{}", format_trials(&report));
    if report.failures > 0 {
        return Err(CliError::Pipeline(format!(
            "{} of {} trials failed",
            report.failures,
            report.outcomes.len()
        )));
    }
    if report.worst_error > TRIALS_ERROR_GATE {
        return Err(CliError::Pipeline(format!(
            "worst error {:e} exceeds {:e}",
            report.worst_error, TRIALS_ERROR_GATE
        )));
    }
    Ok(())
}
