//! Projection solvers for split problems.
//!
//! `solve_sfp` is the classical projected-gradient iteration
//! `x ← P_C(x − γ Aᵀ(Ax − P_Q(Ax)))`; `solve_sep` is its simultaneous
//! two-block variant. Both are Fejér monotone toward the solution set for
//! step sizes below `2 / L` (`L` the squared operator norm, respectively the
//! sum of the two squared norms), which is what makes [`nearest_solution`] a
//! usable distance-to-solution-set estimator: started at an anchor, the
//! iteration cannot move away from any solution, so its limit is a
//! near-nearest solution and the traveled distance an upper bound on the true
//! distance.

use crate::certify::ProblemSpec;
use crate::error::{Error, Result};
use crate::numerics::{Matrix, Vector};
use crate::sets::ConvexSet;

/// Iterations of the power method used for operator-norm estimates.
const POWER_ITERATIONS: usize = 50;
/// Window for the residual-floor stall detector.
const STALL_WINDOW: usize = 100;
/// Residual change below which the iteration is declared stalled.
const STALL_DELTA: f64 = 1e-14;

/// Periodic give-up checks for the fixed-step iterations: a residual floor
/// (apparent infeasibility) and a linear-rate forecast that cuts solves whose
/// extrapolated iteration need exceeds the remaining budget by a wide margin.
/// Both report through `converged = false`.
struct ConvergenceGuard {
    anchor: Option<f64>,
}

impl ConvergenceGuard {
    fn new() -> Self {
        Self { anchor: None }
    }

    /// Returns true when the iteration should give up.
    fn should_stop(&mut self, iterations: usize, max_iters: usize, residual: f64, tol: f64) -> bool {
        if iterations % STALL_WINDOW != 0 {
            return false;
        }
        let stop = if let Some(prev) = self.anchor {
            if (prev - residual).abs() < STALL_DELTA {
                true
            } else if residual > tol && residual < prev {
                let rho = (residual / prev).powf(1.0 / STALL_WINDOW as f64);
                let needed = (tol / residual).ln() / rho.ln();
                // Factor of three pads against rate underestimates.
                needed > 3.0 * (max_iters - iterations) as f64
            } else {
                false
            }
        } else {
            false
        };
        self.anchor = Some(residual);
        stop
    }
}

/// Outcome of a projection solve.
///
/// `converged` means the equality residual dropped below the requested
/// tolerance *and* the point(s) lie in their sets within that tolerance.
/// `y` is present for equality problems only.
#[derive(Debug, Clone)]
pub struct SolveResult {
    pub x: Vector,
    pub y: Option<Vector>,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// A solve started from an anchor, with the distance traveled to its limit.
#[derive(Debug, Clone)]
pub struct NearestSolution {
    pub result: SolveResult,
    /// Euclidean distance from the anchor to the limit (concatenated over
    /// the pair for equality problems). An upper bound on the distance from
    /// the anchor to the solution set; meaningless unless `converged`.
    pub distance: f64,
}

/// Largest singular value, estimated by `POWER_ITERATIONS` rounds of the
/// power method on `AᵀA`. Deterministic (fixed start vector, fixed restart
/// sequence on degenerate starts).
pub fn operator_norm(a: &Matrix) -> f64 {
    let n = a.cols();
    if a.frobenius_norm() == 0.0 || n == 0 {
        return 0.0;
    }
    let mut v = Vector::from_raw(vec![1.0 / (n as f64).sqrt(); n]);
    let mut restart = 0usize;
    for _ in 0..POWER_ITERATIONS {
        let w = a.tmatvec(&a.matvec(&v).expect("shape")).expect("shape");
        let nw = w.norm();
        if nw < 1e-300 {
            // Start vector happened to lie in the kernel; walk the basis.
            if restart >= n {
                return 0.0;
            }
            v = Vector::basis(n, restart);
            restart += 1;
            continue;
        }
        v = w.scale(1.0 / nw);
    }
    a.matvec(&v).expect("shape").norm()
}

/// Default step size for the feasibility iteration, `1 / ‖A‖²`.
pub fn default_step_sfp(a: &Matrix) -> f64 {
    let s = operator_norm(a);
    if s == 0.0 {
        1.0
    } else {
        1.0 / (s * s)
    }
}

/// Default step size for the equality iteration, `1 / (‖A‖² + ‖B‖²)`.
pub fn default_step_sep(a: &Matrix, b: &Matrix) -> f64 {
    let s = operator_norm(a);
    let t = operator_norm(b);
    let sum = s * s + t * t;
    if sum == 0.0 {
        1.0
    } else {
        1.0 / sum
    }
}

fn check_step(step: f64, limit: f64) -> Result<()> {
    if !(step > 0.0) || !step.is_finite() || step >= limit {
        return Err(Error::StepOutOfRange { step, limit });
    }
    Ok(())
}

/// Projected-gradient iteration for `x ∈ C`, `Ax ∈ Q`.
///
/// Requires `0 < step < 2/‖A‖²` (operator norm estimated by power
/// iteration). The residual `‖Ax − P_Q(Ax)‖` is nonincreasing along the
/// iteration; an apparently infeasible instance shows up as a residual floor
/// (change below 1e-14 over 100 iterations), reported as non-convergence.
pub fn solve_sfp(
    a: &Matrix,
    c: &ConvexSet,
    q: &ConvexSet,
    x0: &Vector,
    step: f64,
    max_iters: usize,
    tol: f64,
) -> Result<SolveResult> {
    if c.dim() != a.cols() || x0.dim() != a.cols() || q.dim() != a.rows() {
        return Err(Error::DimensionMismatch {
            context: "solve_sfp shapes",
            expected: a.cols(),
            found: x0.dim(),
        });
    }
    let norm = operator_norm(a);
    let limit = if norm == 0.0 { f64::INFINITY } else { 2.0 / (norm * norm) };
    check_step(step, limit)?;

    let n = a.cols();
    let m = a.rows();
    let mut x = x0.entries().to_vec();
    let mut ax = vec![0.0; m];
    let mut r = vec![0.0; m];
    let mut pq = Vec::with_capacity(m);
    let mut grad = vec![0.0; n];
    let mut trial = vec![0.0; n];
    let mut next = Vec::with_capacity(n);
    let mut iterations = 0usize;
    let mut guard = ConvergenceGuard::new();
    loop {
        a.matvec_into(&x, &mut ax);
        q.project_slice(&ax, &mut pq)?;
        for i in 0..m {
            r[i] = ax[i] - pq[i];
        }
        let residual = r.iter().map(|v| v * v).sum::<f64>().sqrt();
        let done = residual <= tol && c.distance_slice(&x) <= tol;
        if done
            || iterations >= max_iters
            || guard.should_stop(iterations, max_iters, residual, tol)
        {
            return Ok(SolveResult {
                x: Vector::from_raw(x),
                y: None,
                residual,
                iterations,
                converged: done,
            });
        }
        a.tmatvec_into(&r, &mut grad);
        for j in 0..n {
            trial[j] = x[j] - step * grad[j];
        }
        c.project_slice(&trial, &mut next)?;
        std::mem::swap(&mut x, &mut next);
        iterations += 1;
    }
}

/// Simultaneous projection iteration for `x ∈ C`, `y ∈ Q`, `Ax = By`.
///
/// Requires `0 < step < 2/(‖A‖² + ‖B‖²)`.
#[allow(clippy::too_many_arguments)]
pub fn solve_sep(
    a: &Matrix,
    b: &Matrix,
    c: &ConvexSet,
    q: &ConvexSet,
    x0: &Vector,
    y0: &Vector,
    step: f64,
    max_iters: usize,
    tol: f64,
) -> Result<SolveResult> {
    if a.rows() != b.rows() {
        return Err(Error::DimensionMismatch {
            context: "solve_sep row counts",
            expected: a.rows(),
            found: b.rows(),
        });
    }
    if c.dim() != a.cols() || x0.dim() != a.cols() || q.dim() != b.cols() || y0.dim() != b.cols()
    {
        return Err(Error::DimensionMismatch {
            context: "solve_sep shapes",
            expected: a.cols(),
            found: x0.dim(),
        });
    }
    let (na, nb) = (operator_norm(a), operator_norm(b));
    let sum = na * na + nb * nb;
    let limit = if sum == 0.0 { f64::INFINITY } else { 2.0 / sum };
    check_step(step, limit)?;

    let n = a.cols();
    let m = b.cols();
    let l = a.rows();
    let mut x = x0.entries().to_vec();
    let mut y = y0.entries().to_vec();
    let mut ax = vec![0.0; l];
    let mut by = vec![0.0; l];
    let mut r = vec![0.0; l];
    let mut gx = vec![0.0; n];
    let mut gy = vec![0.0; m];
    let mut trial_x = vec![0.0; n];
    let mut trial_y = vec![0.0; m];
    let mut next_x = Vec::with_capacity(n);
    let mut next_y = Vec::with_capacity(m);
    let mut iterations = 0usize;
    let mut guard = ConvergenceGuard::new();
    loop {
        a.matvec_into(&x, &mut ax);
        b.matvec_into(&y, &mut by);
        for i in 0..l {
            r[i] = ax[i] - by[i];
        }
        let residual = r.iter().map(|v| v * v).sum::<f64>().sqrt();
        let done =
            residual <= tol && c.distance_slice(&x) <= tol && q.distance_slice(&y) <= tol;
        if done
            || iterations >= max_iters
            || guard.should_stop(iterations, max_iters, residual, tol)
        {
            return Ok(SolveResult {
                x: Vector::from_raw(x),
                y: Some(Vector::from_raw(y)),
                residual,
                iterations,
                converged: done,
            });
        }
        a.tmatvec_into(&r, &mut gx);
        b.tmatvec_into(&r, &mut gy);
        for j in 0..n {
            trial_x[j] = x[j] - step * gx[j];
        }
        for j in 0..m {
            trial_y[j] = y[j] + step * gy[j];
        }
        c.project_slice(&trial_x, &mut next_x)?;
        q.project_slice(&trial_y, &mut next_y)?;
        std::mem::swap(&mut x, &mut next_x);
        std::mem::swap(&mut y, &mut next_y);
        iterations += 1;
    }
}

/// Run the matching projection solver from an anchor point and report the
/// limit together with the distance traveled.
///
/// The instance's matrices are taken from `spec` but the anchor need not be
/// the reference solution (and for perturbed matrices the reference usually
/// is not a solution), so no solution-membership validation happens here.
/// Non-convergence is reported through the embedded [`SolveResult`]; the
/// distance is then unreliable and callers must treat it as such.
pub fn nearest_solution(
    spec: &ProblemSpec,
    anchor_x: &Vector,
    anchor_y: Option<&Vector>,
    tol: f64,
    max_iters: usize,
) -> Result<NearestSolution> {
    match spec {
        ProblemSpec::Sfp { a, c, q, .. } => {
            let step = default_step_sfp(a);
            let result = solve_sfp(a, c, q, anchor_x, step, max_iters, tol)?;
            let distance = result.x.sub(anchor_x)?.norm();
            Ok(NearestSolution { result, distance })
        }
        ProblemSpec::Sep { a, b, c, q, .. } => {
            let ay = anchor_y.ok_or(Error::InvalidInput {
                context: "equality instances need a y anchor".into(),
            })?;
            let step = default_step_sep(a, b);
            let result = solve_sep(a, b, c, q, anchor_x, ay, step, max_iters, tol)?;
            let dx = result.x.sub(anchor_x)?.norm();
            let dy = result
                .y
                .as_ref()
                .expect("sep solve returns y")
                .sub(ay)?
                .norm();
            let distance = (dx * dx + dy * dy).sqrt();
            Ok(NearestSolution { result, distance })
        }
    }
}
