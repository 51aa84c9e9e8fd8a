//! Dense two-phase simplex on the standard-form tableau.
//!
//! Bland's anti-cycling rule keeps the pivot sequence deterministic and
//! finite. Rows are equilibrated before solving; tolerances are therefore
//! applied to unit-scaled data. Variable bounds may be infinite, encoded as
//! the IEEE infinities, never as large finite numbers.

use super::{Matrix, Vector};
use crate::error::{Error, Result};

/// A linear program in the form
/// `maximize objective · x  subject to  eq_lhs x = eq_rhs, var_lower <= x <= var_upper`.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub objective: Vector,
    pub eq_lhs: Matrix,
    pub eq_rhs: Vector,
    pub var_lower: Vec<f64>,
    pub var_upper: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Outcome of a solve. `solution` and `objective_value` are present exactly
/// when the status is `Optimal`. For infeasible programs, `infeasibility`
/// carries the least total constraint violation (in row-equilibrated units),
/// a convex distance-to-feasibility surrogate.
#[derive(Debug, Clone)]
pub struct LpOutcome {
    pub status: LpStatus,
    pub solution: Option<Vector>,
    pub objective_value: Option<f64>,
    pub infeasibility: Option<f64>,
}

impl LinearProgram {
    fn validate(&self) -> Result<()> {
        let n = self.objective.dim();
        if self.eq_lhs.cols() != n {
            return Err(Error::DimensionMismatch {
                context: "lp constraint columns",
                expected: n,
                found: self.eq_lhs.cols(),
            });
        }
        if self.eq_rhs.dim() != self.eq_lhs.rows() {
            return Err(Error::DimensionMismatch {
                context: "lp right-hand side",
                expected: self.eq_lhs.rows(),
                found: self.eq_rhs.dim(),
            });
        }
        if self.var_lower.len() != n || self.var_upper.len() != n {
            return Err(Error::DimensionMismatch {
                context: "lp bound arrays",
                expected: n,
                found: self.var_lower.len().min(self.var_upper.len()),
            });
        }
        for j in 0..n {
            let (l, u) = (self.var_lower[j], self.var_upper[j]);
            if l.is_nan() || u.is_nan() || l == f64::INFINITY || u == f64::NEG_INFINITY {
                return Err(Error::NonFinite {
                    context: "lp variable bounds",
                });
            }
            if l > u {
                return Err(Error::InvalidInput {
                    context: format!("lp bounds for variable {j}: lower {l} > upper {u}"),
                });
            }
        }
        Ok(())
    }
}

// How an original variable is recovered from standard-form columns.
#[derive(Debug, Clone, Copy)]
enum VarMap {
    Fixed { value: f64 },
    Shifted { col: usize, offset: f64 },
    Flipped { col: usize, offset: f64 },
    Split { pos: usize, neg: usize },
}

struct StandardForm {
    ncols: usize,
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    cost: Vec<f64>,
    recover: Vec<VarMap>,
}

fn to_standard_form(lp: &LinearProgram) -> StandardForm {
    let n = lp.objective.dim();
    let mut recover = Vec::with_capacity(n);
    let mut ncols = 0usize;
    // (column, upper bound) pairs that become extra rows.
    let mut bound_rows: Vec<(usize, f64)> = Vec::new();

    for j in 0..n {
        let (l, u) = (lp.var_lower[j], lp.var_upper[j]);
        if l == u {
            recover.push(VarMap::Fixed { value: l });
        } else if l.is_finite() {
            let col = ncols;
            ncols += 1;
            recover.push(VarMap::Shifted { col, offset: l });
            if u.is_finite() {
                bound_rows.push((col, u - l));
            }
        } else if u.is_finite() {
            let col = ncols;
            ncols += 1;
            recover.push(VarMap::Flipped { col, offset: u });
        } else {
            let pos = ncols;
            let neg = ncols + 1;
            ncols += 2;
            recover.push(VarMap::Split { pos, neg });
        }
    }
    // Slack column per bound row.
    let nslack = bound_rows.len();
    let total_cols = ncols + nslack;

    let m_eq = lp.eq_lhs.rows();
    let mut rows = Vec::with_capacity(m_eq + nslack);
    let mut rhs = Vec::with_capacity(m_eq + nslack);

    for i in 0..m_eq {
        let mut row = vec![0.0; total_cols];
        let mut b = lp.eq_rhs[i];
        for j in 0..n {
            let a = lp.eq_lhs.get(i, j);
            if a == 0.0 {
                continue;
            }
            match recover[j] {
                VarMap::Fixed { value } => b -= a * value,
                VarMap::Shifted { col, offset } => {
                    row[col] += a;
                    b -= a * offset;
                }
                VarMap::Flipped { col, offset } => {
                    row[col] -= a;
                    b -= a * offset;
                }
                VarMap::Split { pos, neg } => {
                    row[pos] += a;
                    row[neg] -= a;
                }
            }
        }
        rows.push(row);
        rhs.push(b);
    }
    for (k, &(col, ub)) in bound_rows.iter().enumerate() {
        let mut row = vec![0.0; total_cols];
        row[col] = 1.0;
        row[ncols + k] = 1.0;
        rows.push(row);
        rhs.push(ub);
    }

    // Equilibrate rows, then flip signs so every right-hand side is >= 0.
    for (i, row) in rows.iter_mut().enumerate() {
        let s = row.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if s > 0.0 {
            for v in row.iter_mut() {
                *v /= s;
            }
            rhs[i] /= s;
        }
        if rhs[i] < 0.0 {
            for v in row.iter_mut() {
                *v = -*v;
            }
            rhs[i] = -rhs[i];
        }
    }

    // Objective over standard columns (constant offset dropped; the final
    // objective value is recomputed from the recovered point).
    let mut cost = vec![0.0; total_cols];
    for j in 0..n {
        let c = lp.objective[j];
        match recover[j] {
            VarMap::Fixed { .. } => {}
            VarMap::Shifted { col, .. } => cost[col] += c,
            VarMap::Flipped { col, .. } => cost[col] -= c,
            VarMap::Split { pos, neg } => {
                cost[pos] += c;
                cost[neg] -= c;
            }
        }
    }

    StandardForm {
        ncols: total_cols,
        rows,
        rhs,
        cost,
        recover,
    }
}

/// Solve a linear program with the two-phase simplex method.
///
/// The status classification is deterministic (Bland's rule). Hitting the
/// iteration cap is reported as [`Error::LpStalled`], never as a status.
pub fn lp_solve(lp: &LinearProgram, tol: f64) -> Result<LpOutcome> {
    if !(tol > 0.0) {
        return Err(Error::InvalidInput {
            context: format!("lp tolerance must be positive, got {tol}"),
        });
    }
    lp.validate()?;
    let sf = to_standard_form(lp);
    let m = sf.rows.len();
    let ncols = sf.ncols;
    let width = ncols + m; // artificial column per row

    // Tableau rows: [standard columns | artificials | rhs].
    let mut t: Vec<Vec<f64>> = Vec::with_capacity(m);
    for i in 0..m {
        let mut row = vec![0.0; width + 1];
        row[..ncols].copy_from_slice(&sf.rows[i]);
        row[ncols + i] = 1.0;
        row[width] = sf.rhs[i];
        t.push(row);
    }
    let mut basis: Vec<usize> = (0..m).map(|i| ncols + i).collect();

    let cap = 500 + 100 * (m + ncols);
    let mut iterations = 0usize;

    // Phase 1: minimize the sum of artificials. Reduced costs for the
    // all-artificial basis are the column sums over rows with artificial
    // basic variables.
    let mut w: Vec<f64> = (0..width)
        .map(|j| t.iter().map(|row| row[j]).sum::<f64>())
        .collect();
    // Zero out the artificial entries of w (each is basic in its own row).
    for j in ncols..width {
        w[j] = 0.0;
    }

    loop {
        let entering = (0..ncols).find(|&j| w[j] > tol);
        let Some(e) = entering else { break };
        let Some(r) = ratio_test(&t, &basis, e, width, tol) else {
            // The phase-1 objective is bounded below by zero, so an
            // apparently unbounded improving column is numerical dust.
            w[e] = 0.0;
            continue;
        };
        pivot(&mut t, &mut basis, r, e, width, Some(&mut w));
        iterations += 1;
        if iterations > cap {
            return Err(Error::LpStalled { iterations });
        }
    }

    let phase1_value: f64 = basis
        .iter()
        .enumerate()
        .filter(|&(_, b)| *b >= ncols)
        .map(|(i, _)| t[i][width])
        .sum();

    if phase1_value > tol {
        // The optimal artificial sum is the least total violation of the
        // row-equilibrated system: a convex, continuous function of the
        // right-hand side, which downstream distance surrogates rely on.
        return Ok(LpOutcome {
            status: LpStatus::Infeasible,
            solution: None,
            objective_value: None,
            infeasibility: Some(phase1_value),
        });
    }

    // Drive artificials out of the basis where possible; rows that cannot be
    // cleared are redundant and stay inert.
    for i in 0..m {
        if basis[i] >= ncols {
            if let Some(e) = (0..ncols).find(|&j| t[i][j].abs() > tol) {
                pivot(&mut t, &mut basis, i, e, width, None);
            }
        }
    }

    // Phase 2 reduced costs for the real objective (maximization): column j
    // improves while d_j < 0.
    let mut d: Vec<f64> = (0..width)
        .map(|j| {
            let zb: f64 = (0..m)
                .map(|i| {
                    let cb = if basis[i] < ncols {
                        sf.cost[basis[i]]
                    } else {
                        0.0
                    };
                    cb * t[i][j]
                })
                .sum();
            let cj = if j < ncols { sf.cost[j] } else { 0.0 };
            zb - cj
        })
        .collect();

    loop {
        let entering = (0..ncols).find(|&j| d[j] < -tol);
        let Some(e) = entering else { break };
        let Some(r) = ratio_test(&t, &basis, e, width, tol) else {
            return Ok(LpOutcome {
                status: LpStatus::Unbounded,
                solution: None,
                objective_value: None,
                infeasibility: None,
            });
        };
        pivot(&mut t, &mut basis, r, e, width, Some(&mut d));
        iterations += 1;
        if iterations > cap {
            return Err(Error::LpStalled { iterations });
        }
    }

    let x = recover_point(&t, &basis, &sf, width);
    let residual = original_residual(lp, &x);
    let scale = 1.0
        + lp.eq_rhs.entries().iter().fold(0.0f64, |s, v| s.max(v.abs()))
        + x.norm_inf();
    if residual > 1e4 * tol * scale {
        return Err(Error::LpInternal {
            context: "optimal point failed the feasibility recheck",
        });
    }
    let objective_value = lp.objective.dot(&x)?;
    Ok(LpOutcome {
        status: LpStatus::Optimal,
        solution: Some(x),
        objective_value: Some(objective_value),
        infeasibility: None,
    })
}

/// Bland leaving rule: smallest ratio, ties broken by smallest basic index.
fn ratio_test(
    t: &[Vec<f64>],
    basis: &[usize],
    entering: usize,
    width: usize,
    tol: f64,
) -> Option<usize> {
    let mut best: Option<(f64, usize, usize)> = None; // (ratio, basic var, row)
    for (i, row) in t.iter().enumerate() {
        let a = row[entering];
        if a > tol {
            let ratio = row[width] / a;
            let key = (ratio, basis[i], i);
            best = match best {
                None => Some(key),
                Some(cur) if key.0 < cur.0 - 1e-12 || (key.0 <= cur.0 + 1e-12 && key.1 < cur.1) => {
                    Some(key)
                }
                Some(cur) => Some(cur),
            };
        }
    }
    best.map(|(_, _, i)| i)
}

fn pivot(
    t: &mut [Vec<f64>],
    basis: &mut [usize],
    r: usize,
    e: usize,
    width: usize,
    cost_row: Option<&mut Vec<f64>>,
) {
    let p = t[r][e];
    for v in t[r].iter_mut() {
        *v /= p;
    }
    t[r][e] = 1.0;
    for i in 0..t.len() {
        if i == r {
            continue;
        }
        let f = t[i][e];
        if f != 0.0 {
            for j in 0..=width {
                t[i][j] -= f * t[r][j];
            }
            t[i][e] = 0.0;
        }
    }
    if let Some(c) = cost_row {
        let f = c[e];
        if f != 0.0 {
            for j in 0..width {
                c[j] -= f * t[r][j];
            }
            c[e] = 0.0;
        }
    }
    basis[r] = e;
}

fn recover_point(t: &[Vec<f64>], basis: &[usize], sf: &StandardForm, width: usize) -> Vector {
    let mut xs = vec![0.0; sf.ncols];
    for (i, &b) in basis.iter().enumerate() {
        if b < sf.ncols {
            xs[b] = t[i][width].max(0.0);
        }
    }
    let x: Vec<f64> = sf
        .recover
        .iter()
        .map(|m| match *m {
            VarMap::Fixed { value } => value,
            VarMap::Shifted { col, offset } => offset + xs[col],
            VarMap::Flipped { col, offset } => offset - xs[col],
            VarMap::Split { pos, neg } => xs[pos] - xs[neg],
        })
        .collect();
    Vector::from_raw(x)
}

/// Total absolute violation of the original equality system at `x`.
fn original_residual(lp: &LinearProgram, x: &Vector) -> f64 {
    let mut total = 0.0;
    for i in 0..lp.eq_lhs.rows() {
        let ax: f64 = lp
            .eq_lhs
            .row(i)
            .iter()
            .zip(x.entries())
            .map(|(a, b)| a * b)
            .sum();
        total += (ax - lp.eq_rhs[i]).abs();
    }
    // Bound violations count too; phase 1 keeps standard variables
    // nonnegative so these are normally zero.
    for j in 0..x.dim() {
        total += (lp.var_lower[j] - x[j]).max(0.0);
        total += (x[j] - lp.var_upper[j]).max(0.0);
    }
    total
}
