//! Subcommand implementations.
//!
//! Exit-code contract: 0 = lipschitz_like, 1 = not_lipschitz_like,
//! 2 = inconclusive for `check`; 0 = converged, 1 = not converged for
//! `solve`; 0 = success for `probe`. Argument errors exit 3 and every other
//! failure exits 4, always with diagnostic text on stderr.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Deserialize;
use splitstab::certify::{certify_with, CertifyOptions, Verdict};
use splitstab::numerics::Vector;
use splitstab::probe::{run_probe, ProbeConfig};
use splitstab::solve::{default_step_sep, default_step_sfp, solve_sep, solve_sfp, SolveResult};

use crate::report::{CertificateJson, ProbeJson, RunReport, SolveJson};
use crate::spec_file::{CliError, ParsedSpec, ProblemKind};

const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

pub struct CheckArgs {
    pub spec: PathBuf,
    pub tol: f64,
    pub debug_both: bool,
    pub out: Option<PathBuf>,
}

pub struct ProbeArgs {
    pub spec: PathBuf,
    pub tol: f64,
    pub seed: u64,
    pub samples: usize,
    pub r0: f64,
    pub out: Option<PathBuf>,
}

pub struct SolveArgs {
    pub spec: PathBuf,
    pub tol: f64,
    pub start: Option<PathBuf>,
    pub max_iters: usize,
    pub out: Option<PathBuf>,
}

fn out_path(input: &Path, explicit: &Option<PathBuf>, suffix: &str) -> PathBuf {
    if let Some(p) = explicit {
        return p.clone();
    }
    let stem = input
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "report".into());
    input.with_file_name(format!("{stem}.{suffix}.json"))
}

fn write_report(report: &RunReport, path: &Path) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(report)
        .map_err(|e| CliError::new(format!("report serialization failed: {e}")))?;
    std::fs::write(path, &text)
        .map_err(|e| CliError::new(format!("cannot write {}: {e}", path.display())))?;
    println!("{text}");
    Ok(())
}

pub fn cmd_check(args: &CheckArgs) -> Result<i32, CliError> {
    let start = Instant::now();
    let parsed = ParsedSpec::parse_file(&args.spec)?;
    let problem = parsed.to_problem(args.tol)?;
    let cert = certify_with(
        &problem,
        args.tol,
        CertifyOptions {
            verify_shortcuts: args.debug_both,
        },
    )?;
    let exit = match cert.verdict {
        Verdict::LipschitzLike => 0,
        Verdict::NotLipschitzLike => 1,
        Verdict::Inconclusive => 2,
    };
    let report = RunReport {
        spec_digest: parsed.digest(),
        tool_version: TOOL_VERSION.into(),
        tolerance: args.tol,
        wall_time_seconds: start.elapsed().as_secs_f64(),
        certificate: Some(CertificateJson::from(&cert)),
        probe: None,
        solve: None,
    };
    write_report(&report, &out_path(&args.spec, &args.out, "cert"))?;
    eprintln!(
        "verdict: {} (exit {exit})",
        crate::report::verdict_name(cert.verdict)
    );
    Ok(exit)
}

pub fn cmd_probe(args: &ProbeArgs) -> Result<i32, CliError> {
    let start = Instant::now();
    let parsed = ParsedSpec::parse_file(&args.spec)?;
    let problem = parsed.to_problem(args.tol)?;
    let cert = certify_with(&problem, args.tol, CertifyOptions::default())?;
    if args.r0 <= 0.0 {
        return Err(CliError::new("--r0 must be positive"));
    }
    let cfg = ProbeConfig {
        radii: (0..6).map(|k| args.r0 * 0.5f64.powi(k)).collect(),
        samples_per_radius: args.samples,
        neighborhood: 1.0,
        seed: args.seed,
    };
    let probe = run_probe(&problem, &cfg)?;
    let report = RunReport {
        spec_digest: parsed.digest(),
        tool_version: TOOL_VERSION.into(),
        tolerance: args.tol,
        wall_time_seconds: start.elapsed().as_secs_f64(),
        certificate: Some(CertificateJson::from(&cert)),
        probe: Some(ProbeJson::new(&probe, &cfg)),
        solve: None,
    };
    write_report(&report, &out_path(&args.spec, &args.out, "probe"))?;
    eprintln!(
        "probe: modulus estimate {:.6e}, diverging: {}",
        probe.modulus_estimate, probe.diverging
    );
    Ok(0)
}

#[derive(Deserialize)]
struct StartFile {
    x: Vec<f64>,
    #[serde(default)]
    y: Option<Vec<f64>>,
}

fn load_start(path: &Path) -> Result<StartFile, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::new(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::new(format!("start point parse error: {e}")))
}

pub fn cmd_solve(args: &SolveArgs) -> Result<i32, CliError> {
    let start = Instant::now();
    let parsed = ParsedSpec::parse_file(&args.spec)?;

    let start_file = args.start.as_deref().map(load_start).transpose()?;
    let x0 = match (&start_file, &parsed.xbar) {
        (Some(s), _) => Vector::new(s.x.clone()).map_err(CliError::from)?,
        (None, Some(x)) => x.clone(),
        (None, None) => Vector::zeros(parsed.a.cols()),
    };

    let result: SolveResult = match parsed.kind {
        ProblemKind::Sfp => {
            let step = default_step_sfp(&parsed.a);
            solve_sfp(
                &parsed.a, &parsed.c, &parsed.q, &x0, step, args.max_iters, args.tol,
            )?
        }
        ProblemKind::Sep => {
            let b = parsed.b.as_ref().expect("parser guarantees B for SEP");
            let y0 = match (&start_file, &parsed.ybar) {
                (Some(StartFile { y: Some(y), .. }), _) => {
                    Vector::new(y.clone()).map_err(CliError::from)?
                }
                (_, Some(y)) => y.clone(),
                _ => Vector::zeros(b.cols()),
            };
            let step = default_step_sep(&parsed.a, b);
            solve_sep(
                &parsed.a, b, &parsed.c, &parsed.q, &x0, &y0, step, args.max_iters, args.tol,
            )?
        }
    };

    // Certify when the file carries a reference point; solving does not
    // need one, so its absence is fine here.
    let certificate = match parsed.to_problem(args.tol) {
        Ok(problem) => Some(CertificateJson::from(&certify_with(
            &problem,
            args.tol,
            CertifyOptions::default(),
        )?)),
        Err(_) => None,
    };

    let exit = if result.converged { 0 } else { 1 };
    let report = RunReport {
        spec_digest: parsed.digest(),
        tool_version: TOOL_VERSION.into(),
        tolerance: args.tol,
        wall_time_seconds: start.elapsed().as_secs_f64(),
        certificate,
        probe: None,
        solve: Some(SolveJson::from(&result)),
    };
    write_report(&report, &out_path(&args.spec, &args.out, "solve"))?;
    eprintln!(
        "solve: converged = {}, residual = {:.3e}, iterations = {}",
        result.converged, result.residual, result.iterations
    );
    Ok(exit)
}
