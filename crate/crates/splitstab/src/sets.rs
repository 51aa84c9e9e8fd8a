//! Structured convex sets and their normal cones.
//!
//! The vocabulary is deliberately restricted to shapes whose normal cone at
//! every point is finitely generated: boxes (with infinite bounds allowed, so
//! orthants are boxes), H-polyhedra, singletons, Euclidean balls, and the
//! whole space. That is what makes the certificate machinery in
//! [`crate::cones`] and [`crate::certify`] computable.

use crate::error::{Error, Result};
use crate::numerics::{lp_solve, LinearProgram, LpStatus, Matrix, Vector};

/// Cap on cyclic-projection sweeps for polyhedra.
const MAX_DYKSTRA_SWEEPS: usize = 10_000;
/// Residual at which cyclic projection is accepted as converged.
const DYKSTRA_RESIDUAL: f64 = 1e-10;

/// Shape variants of a [`ConvexSet`].
#[derive(Debug, Clone, PartialEq)]
pub enum SetKind {
    /// `{x : lower <= x <= upper}` componentwise; bounds may be infinite,
    /// and `lower[i] == upper[i]` pins a coordinate.
    Box { lower: Vec<f64>, upper: Vec<f64> },
    /// `{x : normals · x <= offsets}` rowwise; nonempty by construction.
    Polyhedron { normals: Matrix, offsets: Vector },
    /// A single point.
    Singleton { point: Vector },
    /// Closed Euclidean ball.
    Ball { center: Vector, radius: f64 },
    /// All of the ambient space.
    WholeSpace,
}

/// A nonempty closed convex set with computable projection and normal cones.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexSet {
    dim: usize,
    kind: SetKind,
}

impl ConvexSet {
    /// Axis-aligned box. Infinite bounds are written as the IEEE infinities;
    /// `lower[i] == upper[i]` produces a degenerate (pinned) coordinate.
    pub fn box_set(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(Error::InvalidInput {
                context: format!(
                    "box bounds must be nonempty and equal length, got {} and {}",
                    lower.len(),
                    upper.len()
                ),
            });
        }
        for (i, (&l, &u)) in lower.iter().zip(&upper).enumerate() {
            if l.is_nan() || u.is_nan() || l == f64::INFINITY || u == f64::NEG_INFINITY {
                return Err(Error::NonFinite {
                    context: "box bounds",
                });
            }
            if l > u {
                return Err(Error::InvalidInput {
                    context: format!("box coordinate {i}: lower {l} > upper {u}"),
                });
            }
        }
        Ok(Self {
            dim: lower.len(),
            kind: SetKind::Box { lower, upper },
        })
    }

    /// H-polyhedron `{x : Gx <= g}`. Emptiness is rejected here (one LP
    /// feasibility solve), so every constructed set is nonempty.
    pub fn polyhedron(normals: Matrix, offsets: Vector) -> Result<Self> {
        if normals.rows() == 0 || normals.cols() == 0 {
            return Err(Error::InvalidInput {
                context: "polyhedron needs at least one row and one column".into(),
            });
        }
        if offsets.dim() != normals.rows() {
            return Err(Error::DimensionMismatch {
                context: "polyhedron offsets",
                expected: normals.rows(),
                found: offsets.dim(),
            });
        }
        let dim = normals.cols();
        // Feasibility: G x + s = g with s >= 0, x free.
        let m = normals.rows();
        let mut entries = vec![0.0; m * (dim + m)];
        for i in 0..m {
            for j in 0..dim {
                entries[i * (dim + m) + j] = normals.get(i, j);
            }
            entries[i * (dim + m) + dim + i] = 1.0;
        }
        let lhs = Matrix::new(m, dim + m, entries)?;
        let mut lower = vec![f64::NEG_INFINITY; dim];
        lower.extend(vec![0.0; m]);
        let lp = LinearProgram {
            objective: Vector::zeros(dim + m),
            eq_lhs: lhs,
            eq_rhs: offsets.clone(),
            var_lower: lower,
            var_upper: vec![f64::INFINITY; dim + m],
        };
        match lp_solve(&lp, crate::DEFAULT_TOL)?.status {
            LpStatus::Optimal => Ok(Self {
                dim,
                kind: SetKind::Polyhedron { normals, offsets },
            }),
            _ => Err(Error::EmptySet),
        }
    }

    pub fn singleton(point: Vector) -> Result<Self> {
        if point.dim() == 0 {
            return Err(Error::InvalidInput {
                context: "singleton needs a positive dimension".into(),
            });
        }
        Ok(Self {
            dim: point.dim(),
            kind: SetKind::Singleton { point },
        })
    }

    pub fn ball(center: Vector, radius: f64) -> Result<Self> {
        if center.dim() == 0 {
            return Err(Error::InvalidInput {
                context: "ball needs a positive dimension".into(),
            });
        }
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidInput {
                context: format!("ball radius must be positive and finite, got {radius}"),
            });
        }
        Ok(Self {
            dim: center.dim(),
            kind: SetKind::Ball { center, radius },
        })
    }

    pub fn whole_space(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput {
                context: "whole space needs a positive dimension".into(),
            });
        }
        Ok(Self {
            dim,
            kind: SetKind::WholeSpace,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &SetKind {
        &self.kind
    }

    fn check_dim(&self, x: &Vector, context: &'static str) -> Result<()> {
        if x.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                context,
                expected: self.dim,
                found: x.dim(),
            });
        }
        Ok(())
    }

    /// Distance from `x` to the set: exact for boxes, balls, singletons and
    /// the whole space; for polyhedra it is the largest distance to a
    /// violated halfspace (a lower bound on the true distance, exact when a
    /// single constraint is violated).
    pub fn distance(&self, x: &Vector) -> Result<f64> {
        self.check_dim(x, "set distance")?;
        Ok(self.distance_slice(x.entries()))
    }

    pub(crate) fn distance_slice(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim);
        match &self.kind {
            SetKind::Box { lower, upper } => x
                .iter()
                .zip(lower.iter().zip(upper))
                .map(|(&v, (&l, &u))| {
                    let d = (l - v).max(0.0).max(v - u);
                    d * d
                })
                .sum::<f64>()
                .sqrt(),
            SetKind::Polyhedron { normals, offsets } => {
                let mut worst = 0.0f64;
                for i in 0..normals.rows() {
                    let row = normals.row(i);
                    let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
                    if norm == 0.0 {
                        continue;
                    }
                    let viol =
                        row.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() - offsets[i];
                    worst = worst.max(viol / norm);
                }
                worst
            }
            SetKind::Singleton { point } => x
                .iter()
                .zip(point.entries())
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt(),
            SetKind::Ball { center, radius } => {
                let d = x
                    .iter()
                    .zip(center.entries())
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                (d - radius).max(0.0)
            }
            SetKind::WholeSpace => 0.0,
        }
    }

    /// Membership within tolerance `tol >= 0` (distance semantics of
    /// [`ConvexSet::distance`]).
    pub fn contains(&self, x: &Vector, tol: f64) -> Result<bool> {
        if tol < 0.0 {
            return Err(Error::InvalidInput {
                context: format!("membership tolerance must be nonnegative, got {tol}"),
            });
        }
        Ok(self.distance(x)? <= tol)
    }

    /// Whether the ball of radius `tol > 0` around `x` lies inside the set.
    pub fn is_interior(&self, x: &Vector, tol: f64) -> Result<bool> {
        if !(tol > 0.0) {
            return Err(Error::InvalidInput {
                context: format!("interiority tolerance must be positive, got {tol}"),
            });
        }
        self.check_dim(x, "interior test")?;
        Ok(match &self.kind {
            SetKind::Box { lower, upper } => {
                x.entries()
                    .iter()
                    .zip(lower.iter().zip(upper))
                    .all(|(&v, (&l, &u))| v - l >= tol && u - v >= tol)
            }
            SetKind::Polyhedron { normals, offsets } => (0..normals.rows()).all(|i| {
                let row = normals.row(i);
                let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
                let slack = offsets[i]
                    - row
                        .iter()
                        .zip(x.entries())
                        .map(|(a, b)| a * b)
                        .sum::<f64>();
                slack >= tol * norm
            }),
            SetKind::Singleton { .. } => false,
            SetKind::Ball { center, radius } => {
                // Infallible: dimensions were checked above.
                x.sub(center).map(|d| d.norm() + tol <= *radius).unwrap_or(false)
            }
            SetKind::WholeSpace => true,
        })
    }

    /// Euclidean projection onto the set.
    ///
    /// Closed forms cover every variant except general polyhedra, which use
    /// cyclic (Dykstra) projection over the halfspaces, capped at
    /// 10 000 sweeps with residual 1e-10. Non-convergence is an error
    /// carrying the last iterate and residual.
    pub fn project(&self, x: &Vector) -> Result<Vector> {
        self.check_dim(x, "projection")?;
        let mut out = Vec::with_capacity(self.dim);
        self.project_slice(x.entries(), &mut out)?;
        Ok(Vector::from_raw(out))
    }

    /// Allocation-free projection used by solver hot loops; `out` is cleared
    /// and refilled.
    pub(crate) fn project_slice(&self, x: &[f64], out: &mut Vec<f64>) -> Result<()> {
        debug_assert_eq!(x.len(), self.dim);
        out.clear();
        match &self.kind {
            SetKind::Box { lower, upper } => {
                out.extend(
                    x.iter()
                        .zip(lower.iter().zip(upper))
                        .map(|(&v, (&l, &u))| v.max(l).min(u)),
                );
            }
            SetKind::Polyhedron { normals, offsets } => {
                let projected = project_polyhedron(normals, offsets, x)?;
                out.extend_from_slice(&projected);
            }
            SetKind::Singleton { point } => out.extend_from_slice(point.entries()),
            SetKind::Ball { center, radius } => {
                let n = x
                    .iter()
                    .zip(center.entries())
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                if n <= *radius {
                    out.extend_from_slice(x);
                } else {
                    let f = radius / n;
                    out.extend(
                        x.iter()
                            .zip(center.entries())
                            .map(|(a, c)| c + (a - c) * f),
                    );
                }
            }
            SetKind::WholeSpace => out.extend_from_slice(x),
        }
        Ok(())
    }

    /// Normal cone (in the sense of convex analysis) at a point of the set.
    ///
    /// Activity of a bound or halfspace is decided with the relative
    /// tolerance `tol * (1 + |offset|)`. The point must lie in the set within
    /// `tol`, otherwise [`Error::PointNotInSet`] is returned.
    pub fn normal_cone(&self, x: &Vector, tol: f64) -> Result<FGCone> {
        if !(tol > 0.0) {
            return Err(Error::InvalidInput {
                context: format!("normal cone tolerance must be positive, got {tol}"),
            });
        }
        let dist = self.distance(x)?;
        if dist > tol {
            return Err(Error::PointNotInSet {
                distance: dist,
                tol,
            });
        }
        let n = self.dim;
        match &self.kind {
            SetKind::Box { lower, upper } => {
                let mut rays = Vec::new();
                let mut lineality = Vec::new();
                for i in 0..n {
                    let (l, u, v) = (lower[i], upper[i], x[i]);
                    if l == u {
                        lineality.push(Vector::basis(n, i));
                        continue;
                    }
                    if l.is_finite() && v - l <= tol * (1.0 + l.abs()) {
                        rays.push(Vector::basis(n, i).scale(-1.0));
                    }
                    if u.is_finite() && u - v <= tol * (1.0 + u.abs()) {
                        rays.push(Vector::basis(n, i));
                    }
                }
                FGCone::new(n, rays, lineality)
            }
            SetKind::Polyhedron { normals, offsets } => {
                let mut rays = Vec::new();
                for i in 0..normals.rows() {
                    let row = normals.row(i);
                    if row.iter().all(|&v| v == 0.0) {
                        continue;
                    }
                    let slack = offsets[i]
                        - row
                            .iter()
                            .zip(x.entries())
                            .map(|(a, b)| a * b)
                            .sum::<f64>();
                    if slack <= tol * (1.0 + offsets[i].abs()) {
                        rays.push(Vector::from_raw(row.to_vec()));
                    }
                }
                FGCone::new(n, rays, Vec::new())
            }
            SetKind::Singleton { .. } => Ok(FGCone::full_space(n)),
            SetKind::Ball { center, radius } => {
                let d = x.sub(center)?;
                let norm = d.norm();
                if norm >= radius - tol * (1.0 + radius) && norm > tol {
                    FGCone::new(n, vec![d], Vec::new())
                } else {
                    Ok(FGCone::trivial(n))
                }
            }
            SetKind::WholeSpace => Ok(FGCone::trivial(n)),
        }
    }
}

/// Cyclic projection (Dykstra) onto an intersection of halfspaces.
fn project_polyhedron(normals: &Matrix, offsets: &Vector, x: &[f64]) -> Result<Vec<f64>> {
    let m = normals.rows();
    let n = normals.cols();
    let row_sq: Vec<f64> = (0..m)
        .map(|i| normals.row(i).iter().map(|v| v * v).sum())
        .collect();

    let violation = |p: &[f64]| -> f64 {
        let mut worst = 0.0f64;
        for i in 0..m {
            if row_sq[i] == 0.0 {
                continue;
            }
            let v = normals
                .row(i)
                .iter()
                .zip(p)
                .map(|(a, b)| a * b)
                .sum::<f64>()
                - offsets[i];
            worst = worst.max(v / row_sq[i].sqrt());
        }
        worst
    };

    let mut point: Vec<f64> = x.to_vec();
    if violation(&point) <= 0.0 {
        return Ok(point);
    }
    let mut corrections = vec![vec![0.0; n]; m];
    let scale = 1.0 + x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut residual = f64::INFINITY;
    for _sweep in 0..MAX_DYKSTRA_SWEEPS {
        let before = point.clone();
        for i in 0..m {
            if row_sq[i] == 0.0 {
                continue;
            }
            // Re-add this halfspace's correction, project, store the new one.
            let mut work = vec![0.0; n];
            for j in 0..n {
                work[j] = point[j] + corrections[i][j];
            }
            let excess = normals
                .row(i)
                .iter()
                .zip(&work)
                .map(|(a, b)| a * b)
                .sum::<f64>()
                - offsets[i];
            let step = (excess / row_sq[i]).max(0.0);
            for j in 0..n {
                let projected = work[j] - step * normals.get(i, j);
                corrections[i][j] = work[j] - projected;
                point[j] = projected;
            }
        }
        let movement = point
            .iter()
            .zip(&before)
            .fold(0.0f64, |mx, (a, b)| mx.max((a - b).abs()));
        residual = (movement / scale).max(violation(&point));
        if residual <= DYKSTRA_RESIDUAL {
            polish_into_polyhedron(normals, offsets, &row_sq, &mut point);
            return Ok(point);
        }
    }
    Err(Error::ProjectionStalled {
        residual,
        sweeps: MAX_DYKSTRA_SWEEPS,
        last_iterate: point,
    })
}

/// Push a near-feasible point the last stretch into the polyhedron, so
/// projecting twice is exactly idempotent (a feasible input returns
/// unchanged). The slight overshoot makes the remaining violation strictly
/// nonpositive instead of decaying forever.
fn polish_into_polyhedron(normals: &Matrix, offsets: &Vector, row_sq: &[f64], point: &mut [f64]) {
    let n = normals.cols();
    // Near a vertex the single-constraint steps contract slowly, so the
    // budget is generous; each step is a handful of flops.
    for _ in 0..4096 {
        let mut worst = 0.0f64;
        let mut worst_row = usize::MAX;
        for i in 0..normals.rows() {
            if row_sq[i] == 0.0 {
                continue;
            }
            let excess = normals
                .row(i)
                .iter()
                .zip(point.iter())
                .map(|(a, b)| a * b)
                .sum::<f64>()
                - offsets[i];
            if excess > worst {
                worst = excess;
                worst_row = i;
            }
        }
        if worst_row == usize::MAX {
            return;
        }
        let step = worst / row_sq[worst_row] * (1.0 + 1e-12);
        for j in 0..n {
            point[j] -= step * normals.get(worst_row, j);
        }
    }
}

/// Finitely generated convex cone
/// `{Σ λ_i r_i + Σ μ_j l_j : λ >= 0, μ free}` given by ray generators `r_i`
/// and lineality generators `l_j`, all stored with unit Euclidean norm.
///
/// The empty generator lists encode the trivial cone `{0}`.
#[derive(Debug, Clone, PartialEq)]
pub struct FGCone {
    dim: usize,
    rays: Vec<Vector>,
    lineality: Vec<Vector>,
}

impl FGCone {
    /// Build a cone from generators; they are normalized here. Zero (or
    /// non-finite-norm) generators are rejected.
    pub fn new(dim: usize, rays: Vec<Vector>, lineality: Vec<Vector>) -> Result<Self> {
        let normalize = |v: Vector, what: &'static str| -> Result<Vector> {
            if v.dim() != dim {
                return Err(Error::DimensionMismatch {
                    context: "cone generator",
                    expected: dim,
                    found: v.dim(),
                });
            }
            let n = v.norm();
            if n == 0.0 || !n.is_finite() {
                return Err(Error::InvalidInput {
                    context: format!("{what} generator must be nonzero"),
                });
            }
            Ok(v.scale(1.0 / n))
        };
        Ok(Self {
            dim,
            rays: rays
                .into_iter()
                .map(|v| normalize(v, "ray"))
                .collect::<Result<_>>()?,
            lineality: lineality
                .into_iter()
                .map(|v| normalize(v, "lineality"))
                .collect::<Result<_>>()?,
        })
    }

    /// The cone `{0}`.
    pub fn trivial(dim: usize) -> Self {
        Self {
            dim,
            rays: Vec::new(),
            lineality: Vec::new(),
        }
    }

    /// The cone that is all of the space (lineality = standard basis).
    pub fn full_space(dim: usize) -> Self {
        Self {
            dim,
            rays: Vec::new(),
            lineality: (0..dim).map(|i| Vector::basis(dim, i)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rays(&self) -> &[Vector] {
        &self.rays
    }

    pub fn lineality(&self) -> &[Vector] {
        &self.lineality
    }

    pub fn is_trivial(&self) -> bool {
        self.rays.is_empty() && self.lineality.is_empty()
    }

    /// The cone `-K`: rays are negated, lineality generators are unchanged
    /// (a subspace equals its own negative).
    pub fn negate(&self) -> FGCone {
        FGCone {
            dim: self.dim,
            rays: self.rays.iter().map(|r| r.scale(-1.0)).collect(),
            lineality: self.lineality.clone(),
        }
    }
}
