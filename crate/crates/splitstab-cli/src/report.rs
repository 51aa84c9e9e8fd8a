//! Serializable run reports.

use serde::Serialize;
use splitstab::certify::{Certificate, Shortcut, Verdict};
use splitstab::probe::ProbeReport;
use splitstab::solve::SolveResult;

/// Top-level output of every subcommand. Effective settings (tolerance,
/// seed, sampling plan) are echoed so a report is reproducible on its own.
#[derive(Debug, Serialize)]
pub struct RunReport {
    pub spec_digest: String,
    pub tool_version: String,
    pub tolerance: f64,
    pub wall_time_seconds: f64,
    /// Absent only for solve runs on files without a reference point.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probe: Option<ProbeJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solve: Option<SolveJson>,
}

#[derive(Debug, Serialize)]
pub struct CertificateJson {
    pub condition_holds: bool,
    pub verdict: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shortcut: Option<String>,
    pub marginal: bool,
    pub details: DetailsJson,
}

#[derive(Debug, Serialize)]
pub struct DetailsJson {
    pub lp_calls: usize,
    pub cone_c_rays: usize,
    pub cone_c_lineality: usize,
    pub cone_q_rays: usize,
    pub cone_q_lineality: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub battery_max_optimum: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_residual: Option<f64>,
    pub solution_inf_norm: f64,
}

pub fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::LipschitzLike => "lipschitz_like",
        Verdict::NotLipschitzLike => "not_lipschitz_like",
        Verdict::Inconclusive => "inconclusive",
    }
}

fn shortcut_name(s: Shortcut) -> &'static str {
    match s {
        Shortcut::InteriorKernelC => "interior_kernel_C",
        Shortcut::InteriorKernelQ => "interior_kernel_Q",
        Shortcut::InteriorQImage => "interior_Q_image",
    }
}

impl From<&Certificate> for CertificateJson {
    fn from(c: &Certificate) -> Self {
        CertificateJson {
            condition_holds: c.condition_holds,
            verdict: verdict_name(c.verdict).to_string(),
            witness: c.witness.as_ref().map(|w| w.entries().to_vec()),
            shortcut: c.shortcut.map(|s| shortcut_name(s).to_string()),
            marginal: c.marginal,
            details: DetailsJson {
                lp_calls: c.details.lp_calls,
                cone_c_rays: c.details.cone_c_rays,
                cone_c_lineality: c.details.cone_c_lineality,
                cone_q_rays: c.details.cone_q_rays,
                cone_q_lineality: c.details.cone_q_lineality,
                battery_max_optimum: c.details.battery_max_optimum,
                witness_residual: c.details.witness_residual,
                solution_inf_norm: c.details.solution_inf_norm,
            },
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ProbeJson {
    pub seed: u64,
    pub samples_per_radius: usize,
    pub neighborhood: f64,
    pub per_radius: Vec<RadiusJson>,
    pub modulus_estimate: f64,
    pub diverging: bool,
}

#[derive(Debug, Serialize)]
pub struct RadiusJson {
    pub radius: f64,
    pub max_ratio: f64,
    pub mean_ratio: f64,
    pub failures: usize,
    pub samples: Vec<SampleJson>,
}

#[derive(Debug, Serialize)]
pub struct SampleJson {
    pub numerator: f64,
    pub denominator: f64,
    pub ratio: f64,
}

impl ProbeJson {
    pub fn new(r: &ProbeReport, cfg: &splitstab::probe::ProbeConfig) -> Self {
        ProbeJson {
            seed: cfg.seed,
            samples_per_radius: cfg.samples_per_radius,
            neighborhood: cfg.neighborhood,
            per_radius: r
                .per_radius
                .iter()
                .map(|lvl| RadiusJson {
                    radius: lvl.radius,
                    max_ratio: lvl.max_ratio,
                    mean_ratio: lvl.mean_ratio,
                    failures: lvl.failures,
                    samples: lvl
                        .samples
                        .iter()
                        .map(|s| SampleJson {
                            numerator: s.numerator,
                            denominator: s.denominator,
                            ratio: s.ratio,
                        })
                        .collect(),
                })
                .collect(),
            modulus_estimate: r.modulus_estimate,
            diverging: r.diverging,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SolveJson {
    pub x: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y: Option<Vec<f64>>,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl From<&SolveResult> for SolveJson {
    fn from(r: &SolveResult) -> Self {
        SolveJson {
            x: r.x.entries().to_vec(),
            y: r.y.as_ref().map(|v| v.entries().to_vec()),
            residual: r.residual,
            iterations: r.iterations,
            converged: r.converged,
        }
    }
}
