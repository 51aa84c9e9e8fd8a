//! Empirical perturbation probe.
//!
//! The probe samples matrix perturbations at a schedule of shrinking radii,
//! finds a solution of the perturbed problem near the reference point, and
//! measures how far that solution is from the solution set of a second
//! independently perturbed problem. The ratio of that distance to the matrix
//! distance is a finite-sample surrogate for the Lipschitz modulus of the
//! solution map; ratios that blow up as the radius shrinks are strong
//! evidence against stability.
//!
//! Norm conventions: matrix space distances are Frobenius (over the
//! concatenated pair `(A, B)` for equality problems), solution space
//! distances are Euclidean (on the concatenated pair `(x, y)`).
//!
//! The probe is a heuristic. It can neither prove nor refute the Aubin
//! property and its output is meant to be read next to a certificate, never
//! instead of one.

use crate::certify::ProblemSpec;
use crate::error::{Error, Result};
use crate::numerics::Matrix;
use crate::solve::nearest_solution;

/// Tolerance and budget for the inner solves. The budget is large because
/// fixed-step projection iterations converge at a rate governed by the
/// squared smallest relevant singular value, which for perturbations of a
/// zero matrix is the squared radius; hopeless solves are cut early by the
/// solver's rate forecast rather than by this cap.
const SOLVE_TOL: f64 = 1e-9;
const SOLVE_ITERS: usize = 3_000_000;
/// Ratios below this floor never count as divergence evidence.
const DIVERGENCE_FLOOR: f64 = 1e-6;
/// Growth factor of the worst ratio that flags divergence.
const DIVERGENCE_FACTOR: f64 = 10.0;

/// Sampling plan for [`run_probe`].
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeConfig {
    /// Strictly decreasing positive perturbation radii.
    pub radii: Vec<f64>,
    pub samples_per_radius: usize,
    /// Perturbed-problem solutions farther than this from the reference
    /// point are discarded (counted under `failures`).
    pub neighborhood: f64,
    pub seed: u64,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        Self {
            radii: (0..6).map(|k| 0.1 * 0.5f64.powi(k)).collect(),
            samples_per_radius: 64,
            neighborhood: 1.0,
            seed: 0,
        }
    }
}

impl ProbeConfig {
    fn validate(&self) -> Result<()> {
        if self.radii.is_empty() {
            return Err(Error::InvalidInput {
                context: "probe needs at least one radius".into(),
            });
        }
        for w in self.radii.windows(2) {
            if !(w[1] < w[0]) {
                return Err(Error::InvalidInput {
                    context: "probe radii must be strictly decreasing".into(),
                });
            }
        }
        if !(self.radii[self.radii.len() - 1] > 0.0) {
            return Err(Error::InvalidInput {
                context: "probe radii must be positive".into(),
            });
        }
        if self.samples_per_radius == 0 {
            return Err(Error::InvalidInput {
                context: "probe needs at least one sample per radius".into(),
            });
        }
        if !(self.neighborhood > 0.0) {
            return Err(Error::InvalidInput {
                context: "probe neighborhood must be positive".into(),
            });
        }
        Ok(())
    }
}

/// One recorded drift measurement, kept for audit.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioSample {
    /// Distance from the perturbed solution to the second solution set.
    pub numerator: f64,
    /// Frobenius distance between the two sampled matrix tuples.
    pub denominator: f64,
    pub ratio: f64,
}

/// Aggregates for one radius level.
#[derive(Debug, Clone, PartialEq)]
pub struct RadiusReport {
    pub radius: f64,
    pub max_ratio: f64,
    pub mean_ratio: f64,
    /// Samples that produced no ratio: non-converged solves, solutions
    /// outside the neighborhood, or coincident matrix draws.
    pub failures: usize,
    pub samples: Vec<RatioSample>,
}

/// Full probe output.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeReport {
    pub per_radius: Vec<RadiusReport>,
    /// Worst ratio over the whole schedule; a finite-sample lower estimate
    /// of the Lipschitz modulus.
    pub modulus_estimate: f64,
    /// Whether the worst ratio grew by more than a factor of ten from the
    /// largest radius to some smaller radius (above a small absolute floor).
    pub diverging: bool,
}

/// Run the perturbation probe. Deterministic: the same spec and config
/// produce a bit-identical report; each (radius, sample) pair owns an
/// independent RNG stream derived from the seed, so the sampling order does
/// not matter.
pub fn run_probe(spec: &ProblemSpec, cfg: &ProbeConfig) -> Result<ProbeReport> {
    cfg.validate()?;
    spec.validate(crate::DEFAULT_TOL)?;

    let mut per_radius = Vec::with_capacity(cfg.radii.len());
    for (radius_idx, &radius) in cfg.radii.iter().enumerate() {
        let mut samples = Vec::new();
        let mut failures = 0usize;
        for sample_idx in 0..cfg.samples_per_radius {
            let mut rng = SplitMix64::stream(cfg.seed, radius_idx, sample_idx);
            match probe_sample(spec, radius, &mut rng, cfg.neighborhood)? {
                Some(s) => samples.push(s),
                None => failures += 1,
            }
        }
        let max_ratio = samples.iter().fold(0.0f64, |m, s| m.max(s.ratio));
        let mean_ratio = if samples.is_empty() {
            0.0
        } else {
            samples.iter().map(|s| s.ratio).sum::<f64>() / samples.len() as f64
        };
        per_radius.push(RadiusReport {
            radius,
            max_ratio,
            mean_ratio,
            failures,
            samples,
        });
    }

    let modulus_estimate = per_radius.iter().fold(0.0f64, |m, r| m.max(r.max_ratio));
    let base = per_radius[0].max_ratio;
    let diverging =
        modulus_estimate > DIVERGENCE_FACTOR * base && modulus_estimate > DIVERGENCE_FLOOR;

    Ok(ProbeReport {
        per_radius,
        modulus_estimate,
        diverging,
    })
}

/// One drift measurement: draw two matrix tuples in the radius ball, chase a
/// solution of the first near the reference point, measure its distance to
/// the solution set of the second.
fn probe_sample(
    spec: &ProblemSpec,
    radius: f64,
    rng: &mut SplitMix64,
    neighborhood: f64,
) -> Result<Option<RatioSample>> {
    let (primed, delta1) = perturb(spec, radius, rng)?;
    let (other, delta2) = perturb(spec, radius, rng)?;

    let denominator = delta1
        .iter()
        .zip(&delta2)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    if denominator == 0.0 {
        return Ok(None);
    }

    let (anchor_x, anchor_y) = match spec {
        ProblemSpec::Sep { xbar, ybar, .. } => (xbar, Some(ybar)),
        ProblemSpec::Sfp { xbar, .. } => (xbar, None),
    };
    let near = nearest_solution(&primed, anchor_x, anchor_y, SOLVE_TOL, SOLVE_ITERS)?;
    if !near.result.converged || near.distance > neighborhood {
        return Ok(None);
    }

    let drift = nearest_solution(
        &other,
        &near.result.x,
        near.result.y.as_ref(),
        SOLVE_TOL,
        SOLVE_ITERS,
    )?;
    if !drift.result.converged {
        return Ok(None);
    }

    let numerator = drift.distance;
    Ok(Some(RatioSample {
        numerator,
        denominator,
        ratio: numerator / denominator,
    }))
}

/// Replace the instance's matrices with a uniform draw from the Frobenius
/// ball of the given radius around them; returns the new instance and the
/// flat perturbation vector.
fn perturb(spec: &ProblemSpec, radius: f64, rng: &mut SplitMix64) -> Result<(ProblemSpec, Vec<f64>)> {
    match spec {
        ProblemSpec::Sep {
            a,
            b,
            c,
            q,
            xbar,
            ybar,
        } => {
            let na = a.rows() * a.cols();
            let nb = b.rows() * b.cols();
            let delta = rng.ball(na + nb, radius);
            let a2 = add_flat(a, &delta[..na])?;
            let b2 = add_flat(b, &delta[na..])?;
            Ok((
                ProblemSpec::sep(a2, b2, c.clone(), q.clone(), xbar.clone(), ybar.clone())?,
                delta,
            ))
        }
        ProblemSpec::Sfp { a, c, q, xbar } => {
            let na = a.rows() * a.cols();
            let delta = rng.ball(na, radius);
            let a2 = add_flat(a, &delta)?;
            Ok((
                ProblemSpec::sfp(a2, c.clone(), q.clone(), xbar.clone())?,
                delta,
            ))
        }
    }
}

fn add_flat(m: &Matrix, delta: &[f64]) -> Result<Matrix> {
    let entries: Vec<f64> = m.entries().iter().zip(delta).map(|(a, d)| a + d).collect();
    Matrix::new(m.rows(), m.cols(), entries)
}

/// SplitMix64 generator: tiny, seedable, and stable across platforms, which
/// is what the bit-reproducibility contract of the probe needs.
struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    fn scramble(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Independent stream for one (radius, sample) cell.
    fn stream(seed: u64, radius_idx: usize, sample_idx: usize) -> Self {
        let mut s = Self::scramble(seed);
        s = Self::scramble(s ^ (radius_idx as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        s = Self::scramble(s ^ (sample_idx as u64).wrapping_mul(0xBF58_476D_1CE4_E5B9));
        SplitMix64 { state: s }
    }

    fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in the open interval (0, 1).
    fn next_f64(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / 9_007_199_254_740_992.0)
    }

    fn next_gaussian_pair(&mut self) -> (f64, f64) {
        let u1 = self.next_f64();
        let u2 = self.next_f64();
        let r = (-2.0 * u1.ln()).sqrt();
        let t = 2.0 * std::f64::consts::PI * u2;
        (r * t.cos(), r * t.sin())
    }

    /// Uniform draw from the Euclidean ball of the given radius: Gaussian
    /// direction times `radius * u^(1/dim)`.
    fn ball(&mut self, dim: usize, radius: f64) -> Vec<f64> {
        let mut dir = Vec::with_capacity(dim + 1);
        while dir.len() < dim {
            let (a, b) = self.next_gaussian_pair();
            dir.push(a);
            dir.push(b);
        }
        dir.truncate(dim);
        let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return vec![0.0; dim];
        }
        let scale = radius * self.next_f64().powf(1.0 / dim as f64) / norm;
        dir.iter().map(|v| v * scale).collect()
    }
}
