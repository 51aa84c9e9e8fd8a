//! Dense vector/matrix arithmetic, a numerical rank test, and a small
//! self-contained simplex solver.
//!
//! Everything here is plain `f64` row-major storage. Problem sizes in this
//! crate are tiny (a handful of rows and columns), so the implementations
//! favour robustness and determinism over speed.

mod lp;

pub use lp::{lp_solve, LinearProgram, LpOutcome, LpStatus};

use crate::error::{Error, Result};

/// Dense real vector.
///
/// Entries are always finite; the checked constructor rejects NaN and
/// infinities.
#[derive(Debug, Clone, PartialEq)]
pub struct Vector {
    entries: Vec<f64>,
}

impl Vector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                context: "vector entries",
            });
        }
        Ok(Self { entries })
    }

    /// Construct without the finiteness scan. Internal use on values that are
    /// products of already-validated data.
    pub(crate) fn from_raw(entries: Vec<f64>) -> Self {
        debug_assert!(entries.iter().all(|v| v.is_finite()));
        Self { entries }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            entries: vec![0.0; dim],
        }
    }

    /// Standard basis vector `e_i`.
    pub fn basis(dim: usize, i: usize) -> Self {
        let mut entries = vec![0.0; dim];
        entries[i] = 1.0;
        Self { entries }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn dot(&self, other: &Vector) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                context: "dot product",
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a * b)
            .sum())
    }

    /// Euclidean norm.
    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Max-magnitude norm.
    pub fn norm_inf(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn add(&self, other: &Vector) -> Result<Vector> {
        self.zip_with(other, |a, b| a + b, "vector addition")
    }

    pub fn sub(&self, other: &Vector) -> Result<Vector> {
        self.zip_with(other, |a, b| a - b, "vector subtraction")
    }

    pub fn scale(&self, s: f64) -> Vector {
        Vector::from_raw(self.entries.iter().map(|v| v * s).collect())
    }

    fn zip_with(
        &self,
        other: &Vector,
        f: impl Fn(f64, f64) -> f64,
        context: &'static str,
    ) -> Result<Vector> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                context,
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(Vector::from_raw(
            self.entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        ))
    }
}

impl std::ops::Index<usize> for Vector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.entries[i]
    }
}

/// Dense matrix, row-major.
///
/// Entries are finite. Zero rows or columns are permitted structurally (an
/// equality system with no rows is a valid linear program); problem-level
/// types enforce positive dimensions where the mathematics requires them.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                context: "matrix entry count",
                expected: rows * cols,
                found: entries.len(),
            });
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                context: "matrix entries",
            });
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    /// Build from a row-of-rows description; all rows must share a length.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    context: "matrix row length",
                    expected: cols,
                    found: r.len(),
                });
            }
        }
        Matrix::new(rows.len(), cols, rows.concat())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = 1.0;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// Matrix-vector product `M v`.
    pub fn matvec(&self, v: &Vector) -> Result<Vector> {
        if v.dim() != self.cols {
            return Err(Error::DimensionMismatch {
                context: "matvec",
                expected: self.cols,
                found: v.dim(),
            });
        }
        let mut out = vec![0.0; self.rows];
        self.matvec_into(v.entries(), &mut out);
        Ok(Vector::from_raw(out))
    }

    /// Allocation-free product used by solver hot loops.
    pub(crate) fn matvec_into(&self, v: &[f64], out: &mut [f64]) {
        debug_assert_eq!(v.len(), self.cols);
        debug_assert_eq!(out.len(), self.rows);
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.row(i).iter().zip(v).map(|(a, b)| a * b).sum();
        }
    }

    /// Adjoint product `Mᵀ v` without materializing the transpose.
    pub fn tmatvec(&self, v: &Vector) -> Result<Vector> {
        if v.dim() != self.rows {
            return Err(Error::DimensionMismatch {
                context: "tmatvec",
                expected: self.rows,
                found: v.dim(),
            });
        }
        let mut out = vec![0.0; self.cols];
        self.tmatvec_into(v.entries(), &mut out);
        Ok(Vector::from_raw(out))
    }

    pub(crate) fn tmatvec_into(&self, v: &[f64], out: &mut [f64]) {
        debug_assert_eq!(v.len(), self.rows);
        debug_assert_eq!(out.len(), self.cols);
        out.fill(0.0);
        for (i, &vi) in v.iter().enumerate() {
            for (j, o) in out.iter_mut().enumerate() {
                *o += self.get(i, j) * vi;
            }
        }
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = vec![0.0; self.entries.len()];
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[j * self.rows + i] = self.get(i, j);
            }
        }
        Matrix {
            rows: self.cols,
            cols: self.rows,
            entries: out,
        }
    }

    pub fn scale(&self, s: f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|v| v * s).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Numerical rank by Gaussian elimination with partial pivoting; a pivot
    /// counts when its magnitude exceeds `tol` times the largest entry of the
    /// original matrix.
    pub fn rank(&self, tol: f64) -> usize {
        let m = self.rows;
        let n = self.cols;
        let mut a = self.entries.clone();
        let scale = a.iter().fold(0.0f64, |s, v| s.max(v.abs()));
        if scale == 0.0 {
            return 0;
        }
        let thresh = tol * scale;
        let mut rank = 0;
        let mut row = 0;
        for col in 0..n {
            if row == m {
                break;
            }
            let (piv, best) = (row..m)
                .map(|r| (r, a[r * n + col].abs()))
                .fold((row, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if best <= thresh {
                continue;
            }
            if piv != row {
                for j in 0..n {
                    a.swap(row * n + j, piv * n + j);
                }
            }
            let p = a[row * n + col];
            for r in (row + 1)..m {
                let f = a[r * n + col] / p;
                if f != 0.0 {
                    for j in col..n {
                        a[r * n + j] -= f * a[row * n + j];
                    }
                }
            }
            rank += 1;
            row += 1;
        }
        rank
    }

    /// Whether `{x : Mx = 0}` reduces to the origin, i.e. the numerical rank
    /// equals the column count. Scale-invariant: multiplying the matrix by a
    /// positive scalar does not change the answer.
    pub fn kernel_is_trivial(&self, tol: f64) -> bool {
        self.rank(tol) == self.cols
    }
}
