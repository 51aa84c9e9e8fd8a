//! The JSON problem-spec file format.
//!
//! ```json
//! {
//!   "kind": "SEP",
//!   "A": [[1.0]],
//!   "B": [[1.0]],
//!   "C": {"type": "box", "lower": [-1.0], "upper": [1.0]},
//!   "Q": {"type": "box", "lower": [0.0], "upper": ["inf"]},
//!   "xbar": [0.5],
//!   "ybar": [0.5],
//!   "comment": "optional free text"
//! }
//! ```
//!
//! Set objects are tagged by `"type"`: `box` (bounds are numbers or the
//! strings `"inf"`/`"-inf"`), `polyhedron` (`G`, `g` for `Gx <= g`),
//! `singleton` (`point`), `ball` (`center`, `radius`), `whole_space`
//! (`dim`). `B` and `ybar` belong to SEP instances only. `xbar`/`ybar` may
//! be omitted for instances that are only ever solved, not certified (an
//! infeasible instance has no reference solution to validate).

use std::fmt;
use std::path::Path;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use splitstab::certify::ProblemSpec;
use splitstab::numerics::{Matrix, Vector};
use splitstab::sets::{ConvexSet, SetKind};

/// Errors surfaced to the command line with file/field context.
#[derive(Debug)]
pub struct CliError {
    pub message: String,
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl CliError {
    pub fn new(message: impl Into<String>) -> Self {
        Self {
            message: message.into(),
        }
    }
}

impl From<splitstab::Error> for CliError {
    fn from(e: splitstab::Error) -> Self {
        CliError::new(e.to_string())
    }
}

/// A bound entry: a finite number or an explicit infinity sentinel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bound(pub f64);

impl<'de> Deserialize<'de> for Bound {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Word(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) if v.is_finite() => Ok(Bound(v)),
            Raw::Num(v) => Err(D::Error::custom(format!(
                "bound {v} must be finite or the string \"inf\"/\"-inf\""
            ))),
            Raw::Word(w) => match w.as_str() {
                "inf" | "+inf" => Ok(Bound(f64::INFINITY)),
                "-inf" => Ok(Bound(f64::NEG_INFINITY)),
                other => Err(D::Error::custom(format!(
                    "unknown bound sentinel {other:?}; use \"inf\" or \"-inf\""
                ))),
            },
        }
    }
}

impl Serialize for Bound {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0 == f64::INFINITY {
            s.serialize_str("inf")
        } else if self.0 == f64::NEG_INFINITY {
            s.serialize_str("-inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum SetFile {
    Box {
        lower: Vec<Bound>,
        upper: Vec<Bound>,
    },
    Polyhedron {
        #[serde(rename = "G")]
        normals: Vec<Vec<f64>>,
        #[serde(rename = "g")]
        offsets: Vec<f64>,
    },
    Singleton {
        point: Vec<f64>,
    },
    Ball {
        center: Vec<f64>,
        radius: f64,
    },
    WholeSpace {
        dim: usize,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
struct SpecFile {
    kind: String,
    #[serde(rename = "A")]
    a: Vec<Vec<f64>>,
    #[serde(rename = "B", default, skip_serializing_if = "Option::is_none")]
    b: Option<Vec<Vec<f64>>>,
    #[serde(rename = "C")]
    c: SetFile,
    #[serde(rename = "Q")]
    q: SetFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    xbar: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ybar: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    comment: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemKind {
    Sep,
    Sfp,
}

/// A parsed and structurally validated instance file.
///
/// The reference point is optional here: certification requires it, the
/// plain solver does not.
#[derive(Debug, Clone)]
pub struct ParsedSpec {
    pub kind: ProblemKind,
    pub a: Matrix,
    pub b: Option<Matrix>,
    pub c: ConvexSet,
    pub q: ConvexSet,
    pub xbar: Option<Vector>,
    pub ybar: Option<Vector>,
    pub comment: Option<String>,
}

fn matrix_from_rows(rows: &[Vec<f64>], name: &str) -> Result<Matrix, CliError> {
    Matrix::from_rows(rows).map_err(|e| CliError::new(format!("{name}: {e}")))
}

fn set_from_file(raw: &SetFile, name: &str) -> Result<ConvexSet, CliError> {
    let wrap = |e: splitstab::Error| CliError::new(format!("{name}: {e}"));
    match raw {
        SetFile::Box { lower, upper } => ConvexSet::box_set(
            lower.iter().map(|b| b.0).collect(),
            upper.iter().map(|b| b.0).collect(),
        )
        .map_err(wrap),
        SetFile::Polyhedron { normals, offsets } => {
            let g = matrix_from_rows(normals, name)?;
            let v = Vector::new(offsets.clone()).map_err(wrap)?;
            ConvexSet::polyhedron(g, v).map_err(wrap)
        }
        SetFile::Singleton { point } => {
            ConvexSet::singleton(Vector::new(point.clone()).map_err(wrap)?).map_err(wrap)
        }
        SetFile::Ball { center, radius } => {
            ConvexSet::ball(Vector::new(center.clone()).map_err(wrap)?, *radius).map_err(wrap)
        }
        SetFile::WholeSpace { dim } => ConvexSet::whole_space(*dim).map_err(wrap),
    }
}

fn set_to_file(set: &ConvexSet) -> SetFile {
    match set.kind() {
        SetKind::Box { lower, upper } => SetFile::Box {
            lower: lower.iter().map(|&v| Bound(v)).collect(),
            upper: upper.iter().map(|&v| Bound(v)).collect(),
        },
        SetKind::Polyhedron { normals, offsets } => SetFile::Polyhedron {
            normals: (0..normals.rows()).map(|i| normals.row(i).to_vec()).collect(),
            offsets: offsets.entries().to_vec(),
        },
        SetKind::Singleton { point } => SetFile::Singleton {
            point: point.entries().to_vec(),
        },
        SetKind::Ball { center, radius } => SetFile::Ball {
            center: center.entries().to_vec(),
            radius: *radius,
        },
        SetKind::WholeSpace => SetFile::WholeSpace { dim: set.dim() },
    }
}

impl ParsedSpec {
    pub fn parse_str(text: &str) -> Result<Self, CliError> {
        let raw: SpecFile = serde_json::from_str(text).map_err(|e| {
            CliError::new(format!(
                "spec parse error at line {}, column {}: {e}",
                e.line(),
                e.column()
            ))
        })?;
        Self::from_raw(raw)
    }

    pub fn parse_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::new(format!("cannot read {}: {e}", path.display())))?;
        Self::parse_str(&text)
    }

    fn from_raw(raw: SpecFile) -> Result<Self, CliError> {
        let kind = match raw.kind.as_str() {
            "SEP" => ProblemKind::Sep,
            "SFP" => ProblemKind::Sfp,
            other => {
                return Err(CliError::new(format!(
                    "kind must be \"SEP\" or \"SFP\", got {other:?}"
                )))
            }
        };
        let a = matrix_from_rows(&raw.a, "A")?;
        let b = match (&kind, &raw.b) {
            (ProblemKind::Sep, Some(rows)) => Some(matrix_from_rows(rows, "B")?),
            (ProblemKind::Sep, None) => {
                return Err(CliError::new("SEP instances require the matrix B"))
            }
            (ProblemKind::Sfp, Some(_)) => {
                return Err(CliError::new("SFP instances do not take a matrix B"))
            }
            (ProblemKind::Sfp, None) => None,
        };
        if kind == ProblemKind::Sfp && raw.ybar.is_some() {
            return Err(CliError::new("SFP instances do not take ybar"));
        }
        let c = set_from_file(&raw.c, "C")?;
        let q = set_from_file(&raw.q, "Q")?;
        let xbar = raw
            .xbar
            .map(|v| Vector::new(v).map_err(|e| CliError::new(format!("xbar: {e}"))))
            .transpose()?;
        let ybar = raw
            .ybar
            .map(|v| Vector::new(v).map_err(|e| CliError::new(format!("ybar: {e}"))))
            .transpose()?;
        Ok(ParsedSpec {
            kind,
            a,
            b,
            c,
            q,
            xbar,
            ybar,
            comment: raw.comment,
        })
    }

    fn to_raw(&self) -> SpecFile {
        SpecFile {
            kind: match self.kind {
                ProblemKind::Sep => "SEP".into(),
                ProblemKind::Sfp => "SFP".into(),
            },
            a: (0..self.a.rows()).map(|i| self.a.row(i).to_vec()).collect(),
            b: self
                .b
                .as_ref()
                .map(|b| (0..b.rows()).map(|i| b.row(i).to_vec()).collect()),
            c: set_to_file(&self.c),
            q: set_to_file(&self.q),
            xbar: self.xbar.as_ref().map(|v| v.entries().to_vec()),
            ybar: self.ybar.as_ref().map(|v| v.entries().to_vec()),
            comment: self.comment.clone(),
        }
    }

    /// Canonical serialized form: fixed structure, sorted keys, shortest
    /// round-trip float formatting. Whitespace or key-order differences in
    /// the input cannot change it.
    pub fn canonical_json(&self) -> String {
        let value = serde_json::to_value(self.to_raw()).expect("spec serializes");
        serde_json::to_string(&value).expect("canonical form serializes")
    }

    /// FNV-1a hash of the canonical form, as 16 hex digits.
    pub fn digest(&self) -> String {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in self.canonical_json().bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
        format!("{h:016x}")
    }

    /// Build the certifiable problem; requires the reference point and
    /// validates it at `tol`.
    pub fn to_problem(&self, tol: f64) -> Result<ProblemSpec, CliError> {
        let xbar = self
            .xbar
            .clone()
            .ok_or_else(|| CliError::new("this command needs xbar in the spec file"))?;
        let problem = match self.kind {
            ProblemKind::Sep => {
                let ybar = self
                    .ybar
                    .clone()
                    .ok_or_else(|| CliError::new("SEP certification needs ybar"))?;
                ProblemSpec::sep(
                    self.a.clone(),
                    self.b.clone().expect("parser guarantees B for SEP"),
                    self.c.clone(),
                    self.q.clone(),
                    xbar,
                    ybar,
                )?
            }
            ProblemKind::Sfp => {
                ProblemSpec::sfp(self.a.clone(), self.c.clone(), self.q.clone(), xbar)?
            }
        };
        problem.validate(tol)?;
        Ok(problem)
    }
}
