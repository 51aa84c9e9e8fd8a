//! Stability certificates for split problems.
//!
//! For a split equality problem with matrices `A`, `B` and a reference
//! solution `(x̄, ȳ)`, the solution map `(A, B) ↦ {(x, y) ∈ C × Q : Ax = By}`
//! is Lipschitz-like at the reference point exactly when
//!
//! ```text
//! (Aᵀ)⁻¹(−N(x̄; C)) ∩ (Bᵀ)⁻¹(N(ȳ; Q)) = {0}
//! ```
//!
//! — with the caveat that at the zero solution only the sufficient direction
//! applies. The split feasibility condition replaces the second cone with
//! `N(Ax̄; Q)`. [`certify`] evaluates the relevant condition and issues one of
//! three verdicts:
//!
//! - `LipschitzLike`: the condition holds (stability certified);
//! - `NotLipschitzLike`: the condition fails at a nonzero solution, with a
//!   nonzero dual witness `z`;
//! - `Inconclusive`: the condition fails at the zero solution, where failure
//!   proves nothing in either direction.
//!
//! Two cheap sufficient shortcuts are tried before any LP: an interior
//! reference point paired with a trivial kernel of the matching transpose,
//! and (for feasibility problems) an interior image point.

use crate::cones::{build_preimage, intersection_trivial, PreimageCone, TrivialityResult};
use crate::error::{Error, Result};
use crate::numerics::{Matrix, Vector};
use crate::sets::ConvexSet;

/// A split problem instance anchored at a reference solution.
#[derive(Debug, Clone)]
pub enum ProblemSpec {
    /// Find `x ∈ C`, `y ∈ Q` with `Ax = By`; `A` is `l×n`, `B` is `l×m`.
    Sep {
        a: Matrix,
        b: Matrix,
        c: ConvexSet,
        q: ConvexSet,
        xbar: Vector,
        ybar: Vector,
    },
    /// Find `x ∈ C` with `Ax ∈ Q`; `A` is `m×n`.
    Sfp {
        a: Matrix,
        c: ConvexSet,
        q: ConvexSet,
        xbar: Vector,
    },
}

impl ProblemSpec {
    /// Split-equality instance; checks shapes only. Solution membership is
    /// verified by [`ProblemSpec::validate`].
    pub fn sep(
        a: Matrix,
        b: Matrix,
        c: ConvexSet,
        q: ConvexSet,
        xbar: Vector,
        ybar: Vector,
    ) -> Result<Self> {
        if a.rows() == 0 || a.cols() == 0 {
            return Err(Error::InvalidInput {
                context: "matrix A needs positive dimensions".into(),
            });
        }
        if b.rows() != a.rows() {
            return Err(Error::DimensionMismatch {
                context: "B row count (must match A)",
                expected: a.rows(),
                found: b.rows(),
            });
        }
        if b.cols() == 0 {
            return Err(Error::InvalidInput {
                context: "matrix B needs positive dimensions".into(),
            });
        }
        check_dim(c.dim(), a.cols(), "set C vs columns of A")?;
        check_dim(q.dim(), b.cols(), "set Q vs columns of B")?;
        check_dim(xbar.dim(), a.cols(), "xbar vs columns of A")?;
        check_dim(ybar.dim(), b.cols(), "ybar vs columns of B")?;
        Ok(ProblemSpec::Sep {
            a,
            b,
            c,
            q,
            xbar,
            ybar,
        })
    }

    /// Split-feasibility instance; checks shapes only.
    pub fn sfp(a: Matrix, c: ConvexSet, q: ConvexSet, xbar: Vector) -> Result<Self> {
        if a.rows() == 0 || a.cols() == 0 {
            return Err(Error::InvalidInput {
                context: "matrix A needs positive dimensions".into(),
            });
        }
        check_dim(c.dim(), a.cols(), "set C vs columns of A")?;
        check_dim(q.dim(), a.rows(), "set Q vs rows of A")?;
        check_dim(xbar.dim(), a.cols(), "xbar vs columns of A")?;
        Ok(ProblemSpec::Sfp { a, c, q, xbar })
    }

    pub fn is_sep(&self) -> bool {
        matches!(self, ProblemSpec::Sep { .. })
    }

    pub fn a(&self) -> &Matrix {
        match self {
            ProblemSpec::Sep { a, .. } | ProblemSpec::Sfp { a, .. } => a,
        }
    }

    pub fn c_set(&self) -> &ConvexSet {
        match self {
            ProblemSpec::Sep { c, .. } | ProblemSpec::Sfp { c, .. } => c,
        }
    }

    pub fn q_set(&self) -> &ConvexSet {
        match self {
            ProblemSpec::Sep { q, .. } | ProblemSpec::Sfp { q, .. } => q,
        }
    }

    pub fn xbar(&self) -> &Vector {
        match self {
            ProblemSpec::Sep { xbar, .. } | ProblemSpec::Sfp { xbar, .. } => xbar,
        }
    }

    /// Verify that the reference point actually solves the instance within
    /// `tol`. Violations report the offending residual by name.
    pub fn validate(&self, tol: f64) -> Result<()> {
        match self {
            ProblemSpec::Sep {
                a,
                b,
                c,
                q,
                xbar,
                ybar,
            } => {
                let dc = c.distance(xbar)?;
                if dc > tol {
                    return Err(Error::NotASolution {
                        what: "dist(xbar, C)".into(),
                        residual: dc,
                    });
                }
                let dq = q.distance(ybar)?;
                if dq > tol {
                    return Err(Error::NotASolution {
                        what: "dist(ybar, Q)".into(),
                        residual: dq,
                    });
                }
                let ax = a.matvec(xbar)?;
                let by = b.matvec(ybar)?;
                let residual = ax.sub(&by)?.norm();
                let scale = 1.0 + ax.norm() + by.norm();
                if residual > tol * scale {
                    return Err(Error::NotASolution {
                        what: "||A xbar - B ybar||".into(),
                        residual,
                    });
                }
            }
            ProblemSpec::Sfp { a, c, q, xbar } => {
                let dc = c.distance(xbar)?;
                if dc > tol {
                    return Err(Error::NotASolution {
                        what: "dist(xbar, C)".into(),
                        residual: dc,
                    });
                }
                let ax = a.matvec(xbar)?;
                let dq = q.distance(&ax)?;
                let scale = 1.0 + ax.norm();
                if dq > tol * scale {
                    return Err(Error::NotASolution {
                        what: "dist(A xbar, Q)".into(),
                        residual: dq,
                    });
                }
            }
        }
        Ok(())
    }

    /// Max-norm of the reference solution (over the pair for equality
    /// problems); the nonzero-solution test of the necessity direction.
    pub fn solution_inf_norm(&self) -> f64 {
        match self {
            ProblemSpec::Sep { xbar, ybar, .. } => xbar.norm_inf().max(ybar.norm_inf()),
            ProblemSpec::Sfp { xbar, .. } => xbar.norm_inf(),
        }
    }
}

fn check_dim(found: usize, expected: usize, context: &'static str) -> Result<()> {
    if found != expected {
        return Err(Error::DimensionMismatch {
            context,
            expected,
            found,
        });
    }
    Ok(())
}

/// The two dual cones whose intersection decides stability for this
/// instance. Exposed so independent checkers (the sphere scan, external
/// audits) can consume exactly the cones the certificate used.
pub fn condition_cones(spec: &ProblemSpec, tol: f64) -> Result<(PreimageCone, PreimageCone)> {
    match spec {
        ProblemSpec::Sep {
            a,
            b,
            c,
            q,
            xbar,
            ybar,
        } => {
            let n_c = c.normal_cone(xbar, tol)?;
            let n_q = q.normal_cone(ybar, tol)?;
            Ok((
                build_preimage(a.clone(), n_c.negate())?,
                build_preimage(b.clone(), n_q)?,
            ))
        }
        ProblemSpec::Sfp { a, c, q, xbar } => {
            let n_c = c.normal_cone(xbar, tol)?;
            let image = a.matvec(xbar)?;
            let n_q = q.normal_cone(&clamp_into(q, &image)?, tol)?;
            Ok((
                build_preimage(a.clone(), n_c.negate())?,
                build_preimage(Matrix::identity(a.rows()), n_q)?,
            ))
        }
    }
}

// The image A x̄ may sit a rounding error outside Q even for a valid
// instance; project it in before taking the normal cone.
fn clamp_into(q: &ConvexSet, image: &Vector) -> Result<Vector> {
    if q.contains(image, 0.0)? {
        Ok(image.clone())
    } else {
        q.project(image)
    }
}

/// Evaluate the split-equality stability condition
/// `(Aᵀ)⁻¹(−N(x̄;C)) ∩ (Bᵀ)⁻¹(N(ȳ;Q)) = {0}` by the LP battery.
pub fn check_sep_condition(spec: &ProblemSpec, tol: f64) -> Result<TrivialityResult> {
    if !spec.is_sep() {
        return Err(Error::InvalidInput {
            context: "check_sep_condition needs a split-equality instance".into(),
        });
    }
    spec.validate(tol)?;
    let (p1, p2) = condition_cones(spec, tol)?;
    intersection_trivial(&p1, &p2, tol)
}

/// Evaluate the split-feasibility stability condition
/// `(Aᵀ)⁻¹(−N(x̄;C)) ∩ N(Ax̄;Q) = {0}` by the LP battery.
pub fn check_sfp_condition(spec: &ProblemSpec, tol: f64) -> Result<TrivialityResult> {
    if spec.is_sep() {
        return Err(Error::InvalidInput {
            context: "check_sfp_condition needs a split-feasibility instance".into(),
        });
    }
    spec.validate(tol)?;
    let (p1, p2) = condition_cones(spec, tol)?;
    intersection_trivial(&p1, &p2, tol)
}

/// Cheap sufficient conditions that certify stability without any LP call.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shortcut {
    /// `x̄ ∈ int C` and `ker Aᵀ = {0}`: the first cone is already `{0}`.
    InteriorKernelC,
    /// `ȳ ∈ int Q` and `ker Bᵀ = {0}` (equality problems only).
    InteriorKernelQ,
    /// `Ax̄ ∈ int Q` (feasibility problems only): the second cone is `{0}`.
    InteriorQImage,
}

/// Try the interior/kernel shortcuts; a returned tag guarantees the dual
/// condition holds.
pub fn shortcut(spec: &ProblemSpec, tol: f64) -> Result<Option<Shortcut>> {
    spec.validate(tol)?;
    match spec {
        ProblemSpec::Sep {
            a,
            b,
            c,
            q,
            xbar,
            ybar,
        } => {
            if c.is_interior(xbar, tol)? && a.transpose().kernel_is_trivial(tol) {
                return Ok(Some(Shortcut::InteriorKernelC));
            }
            if q.is_interior(ybar, tol)? && b.transpose().kernel_is_trivial(tol) {
                return Ok(Some(Shortcut::InteriorKernelQ));
            }
        }
        ProblemSpec::Sfp { a, c, q, xbar } => {
            if c.is_interior(xbar, tol)? && a.transpose().kernel_is_trivial(tol) {
                return Ok(Some(Shortcut::InteriorKernelC));
            }
            if q.is_interior(&a.matvec(xbar)?, tol)? {
                return Ok(Some(Shortcut::InteriorQImage));
            }
        }
    }
    Ok(None)
}

/// Three-way stability verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// The dual condition holds: the solution map is Lipschitz-like here.
    LipschitzLike,
    /// The condition fails at a nonzero solution: provably not
    /// Lipschitz-like.
    NotLipschitzLike,
    /// The condition fails at the zero solution, where it is only
    /// sufficient; both outcomes remain possible.
    Inconclusive,
}

/// Diagnostic counters recorded alongside a verdict.
#[derive(Debug, Clone, Default)]
pub struct CertificateDetails {
    pub lp_calls: usize,
    pub cone_c_rays: usize,
    pub cone_c_lineality: usize,
    pub cone_q_rays: usize,
    pub cone_q_lineality: usize,
    pub battery_max_optimum: Option<f64>,
    pub witness_residual: Option<f64>,
    pub solution_inf_norm: f64,
}

/// The product of [`certify`].
#[derive(Debug, Clone)]
pub struct Certificate {
    /// Whether the dual condition holds at the reference solution.
    pub condition_holds: bool,
    pub verdict: Verdict,
    /// Nonzero dual vector (max-norm one) lying in both condition cones;
    /// always present when the verdict is `NotLipschitzLike`.
    pub witness: Option<Vector>,
    /// Which sufficient shortcut fired, if any.
    pub shortcut: Option<Shortcut>,
    /// Set when the deciding quantity (battery optimum or solution norm) fell
    /// into the band where floating point cannot certify the boundary.
    pub marginal: bool,
    pub details: CertificateDetails,
}

/// Knobs for [`certify_with`].
#[derive(Debug, Clone, Copy, Default)]
pub struct CertifyOptions {
    /// Run the LP battery even when a shortcut fires and fail loudly on
    /// disagreement. Shortcuts are exact, so a mismatch means a bug.
    pub verify_shortcuts: bool,
}

/// Certify with default options.
pub fn certify(spec: &ProblemSpec, tol: f64) -> Result<Certificate> {
    certify_with(spec, tol, CertifyOptions::default())
}

/// Evaluate the stability condition and issue the verdict.
///
/// Shortcuts run first; if none fires, the LP battery decides the condition.
/// When the condition fails, the verdict depends on whether the reference
/// solution is nonzero (`‖·‖∞ > tol`): nonzero means provably unstable,
/// zero means neither direction applies and the verdict is `Inconclusive`.
pub fn certify_with(spec: &ProblemSpec, tol: f64, opts: CertifyOptions) -> Result<Certificate> {
    spec.validate(tol)?;
    let sc = shortcut(spec, tol)?;
    let solution_norm = spec.solution_inf_norm();

    let mut details = CertificateDetails {
        solution_inf_norm: solution_norm,
        ..CertificateDetails::default()
    };

    // The cones themselves are cheap (no LP involved) and worth reporting
    // even when a shortcut settles the verdict.
    let (p1, p2) = condition_cones(spec, tol)?;
    details.cone_c_rays = p1.target().rays().len();
    details.cone_c_lineality = p1.target().lineality().len();
    details.cone_q_rays = p2.target().rays().len();
    details.cone_q_lineality = p2.target().lineality().len();

    let run_battery = sc.is_none() || opts.verify_shortcuts;
    let battery = if run_battery {
        let result = intersection_trivial(&p1, &p2, tol)?;
        details.lp_calls = result.lp_calls;
        details.battery_max_optimum = Some(result.max_optimum);
        Some(result)
    } else {
        None
    };

    if let Some(tag) = sc {
        if let Some(b) = &battery {
            if !b.trivial {
                return Err(Error::ShortcutMismatch);
            }
        }
        return Ok(Certificate {
            condition_holds: true,
            verdict: Verdict::LipschitzLike,
            witness: None,
            shortcut: Some(tag),
            marginal: false,
            details,
        });
    }

    let result = battery.expect("battery ran when no shortcut fired");
    if result.trivial {
        return Ok(Certificate {
            condition_holds: true,
            verdict: Verdict::LipschitzLike,
            witness: None,
            shortcut: None,
            marginal: result.marginal,
            details,
        });
    }

    details.witness_residual = Some(result.max_violation);
    // The exact test is "solution != 0"; near the tolerance the answer
    // is genuinely ambiguous in floating point and gets flagged.
    let solution_marginal = solution_norm > tol / 10.0 && solution_norm < 10.0 * tol;
    if solution_norm > tol {
        Ok(Certificate {
            condition_holds: false,
            verdict: Verdict::NotLipschitzLike,
            witness: result.witness,
            shortcut: None,
            marginal: result.marginal || solution_marginal,
            details,
        })
    } else {
        Ok(Certificate {
            condition_holds: false,
            verdict: Verdict::Inconclusive,
            witness: result.witness,
            shortcut: None,
            marginal: result.marginal || solution_marginal,
            details,
        })
    }
}

/// Recast a feasibility instance as the equality instance with `B` the
/// identity and `ȳ = Ax̄`. The stability conditions of the two forms agree.
pub fn sfp_as_sep(spec: &ProblemSpec) -> Result<ProblemSpec> {
    match spec {
        ProblemSpec::Sfp { a, c, q, xbar } => {
            let ybar = a.matvec(xbar)?;
            ProblemSpec::sep(
                a.clone(),
                Matrix::identity(a.rows()),
                c.clone(),
                q.clone(),
                xbar.clone(),
                ybar,
            )
        }
        ProblemSpec::Sep { .. } => Err(Error::InvalidInput {
            context: "sfp_as_sep needs a split-feasibility instance".into(),
        }),
    }
}
