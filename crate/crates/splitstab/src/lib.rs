//! Stability certificates for split equality and split feasibility problems.
//!
//! A *split feasibility problem* (SFP) asks for a point `x` in a closed convex
//! set `C` whose image `Ax` lands in a second closed convex set `Q`. A *split
//! equality problem* (SEP) asks for a pair `x ∈ C`, `y ∈ Q` with `Ax = By`.
//! This crate answers a different question about such problems: if the
//! matrices are perturbed a little, does the solution set move in a
//! Lipschitz-controlled way around a given solution? That local property of
//! the solution map is the *Aubin property* (also called Lipschitz-likeness).
//!
//! The decision procedure evaluates a dual condition: the solution map is
//! Lipschitz-like at a solution exactly when two transpose-preimage cones
//! built from the normal cones of `C` and `Q` intersect only at the origin
//! (for solutions that are nonzero; at the zero solution the condition is
//! only sufficient and failure is reported as `inconclusive`). The
//! intersection test is decided by a small battery of linear programs, and a
//! nonzero intersection point is returned as a checkable *witness* of
//! instability.
//!
//! The crate is organized along the pipeline:
//!
//! - [`numerics`]: dense vectors/matrices, a rank test, and a self-contained
//!   simplex solver.
//! - [`sets`]: structured convex sets with membership, interior, projection,
//!   and normal-cone operations.
//! - [`cones`]: finitely generated cones, transpose-preimage cones, the LP
//!   triviality battery, and an independent sphere-scan oracle.
//! - [`certify`]: problem descriptions, the dual-condition checks, interior
//!   shortcuts, and the three-way verdict.
//! - [`solve`]: projection solvers producing feasible points and
//!   distance-to-solution estimates.
//! - [`probe`]: an empirical perturbation probe that corroborates (but never
//!   overrides) certificates.

pub mod cones;
pub mod certify;
mod error;
pub mod numerics;
pub mod probe;
pub mod sets;
pub mod solve;

pub use error::{Error, Result};

/// Default feasibility/optimality tolerance used across the crate.
pub const DEFAULT_TOL: f64 = 1e-9;

// The guide's code samples compile and run under `cargo test --doc`, which
// keeps the book in sync with the library.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub struct Introduction;
    #[doc = include_str!("../../../book/src/problems.md")]
    pub struct Problems;
    #[doc = include_str!("../../../book/src/sets-and-cones.md")]
    pub struct SetsAndCones;
    #[doc = include_str!("../../../book/src/certificates.md")]
    pub struct Certificates;
    #[doc = include_str!("../../../book/src/solvers.md")]
    pub struct Solvers;
    #[doc = include_str!("../../../book/src/probe.md")]
    pub struct Probe;
    #[doc = include_str!("../../../book/src/cli.md")]
    pub struct Cli;
}
