use std::fmt;

/// Crate-wide error type.
///
/// Every fallible operation in this crate reports through this enum; there is
/// no panicking path for bad user data.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Shapes of two operands do not line up.
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },
    /// An input contained NaN or an unexpected infinity.
    NonFinite { context: &'static str },
    /// A bound pair, radius, or similar parameter is out of range.
    InvalidInput { context: String },
    /// A polyhedron `{x : Gx <= g}` turned out to be empty at construction.
    EmptySet,
    /// A point handed to a normal-cone query lies outside the set.
    PointNotInSet { distance: f64, tol: f64 },
    /// The simplex method hit its iteration cap without concluding.
    LpStalled { iterations: usize },
    /// The LP solver produced something that failed its own recheck.
    LpInternal { context: &'static str },
    /// Cyclic projection onto a polyhedron did not converge; carries the last
    /// iterate and the final residual.
    ProjectionStalled {
        residual: f64,
        sweeps: usize,
        last_iterate: Vec<f64>,
    },
    /// A reference point fails the solution-set membership it was claimed to
    /// satisfy; `what` names the violated quantity.
    NotASolution { what: String, residual: f64 },
    /// The sphere scan only supports low ambient dimensions.
    UnsupportedDimension { dim: usize, max: usize },
    /// A solver step size lies outside its admissible open interval.
    StepOutOfRange { step: f64, limit: f64 },
    /// Debug cross-check: a sufficient-condition shortcut fired but the LP
    /// battery disagreed.
    ShortcutMismatch,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch {
                context,
                expected,
                found,
            } => write!(f, "dimension mismatch in {context}: expected {expected}, found {found}"),
            Error::NonFinite { context } => write!(f, "non-finite value in {context}"),
            Error::InvalidInput { context } => write!(f, "invalid input: {context}"),
            Error::EmptySet => write!(f, "polyhedron is empty"),
            Error::PointNotInSet { distance, tol } => write!(
                f,
                "point not in set: distance {distance:.3e} exceeds tolerance {tol:.3e}"
            ),
            Error::LpStalled { iterations } => {
                write!(f, "LP solver stalled after {iterations} iterations")
            }
            Error::LpInternal { context } => write!(f, "LP solver internal error: {context}"),
            Error::ProjectionStalled {
                residual, sweeps, ..
            } => write!(
                f,
                "polyhedron projection did not converge after {sweeps} sweeps (residual {residual:.3e})"
            ),
            Error::NotASolution { what, residual } => {
                write!(f, "not a solution: {what} = {residual:.3e}")
            }
            Error::UnsupportedDimension { dim, max } => {
                write!(f, "unsupported dimension {dim} (max {max})")
            }
            Error::StepOutOfRange { step, limit } => {
                write!(f, "step size {step} outside (0, {limit})")
            }
            Error::ShortcutMismatch => write!(
                f,
                "shortcut claimed the condition holds but the LP battery disagreed"
            ),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
