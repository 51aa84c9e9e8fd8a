//! Transpose-preimage cones and the triviality test at the heart of the
//! stability certificates.
//!
//! Both certificate conditions ask whether an intersection of two cones of
//! the form `{z : Mᵀz ∈ K}` (with `K` finitely generated) contains a nonzero
//! point. Deciding that with a single feasibility LP is impossible — `z = 0`
//! is always feasible — so [`intersection_trivial`] runs a battery of `2l`
//! bounded LPs, one per coordinate and sign. Any nonzero cone point scales
//! into the unit box with some coordinate at magnitude one, so the battery is
//! exact for polyhedral data.
//!
//! [`sphere_oracle`] answers the same question by brute force over a grid of
//! unit directions (dimensions up to three), giving an independent
//! cross-check on the battery.

use crate::error::{Error, Result};
use crate::numerics::{lp_solve, LinearProgram, LpStatus, Matrix, Vector};
use crate::sets::FGCone;

/// The cone `{z : Mᵀz ∈ cone(K)}`, kept implicit as a linear feasibility
/// system `{(z, λ >= 0, μ) : Mᵀz - Rλ - Lμ = 0}` where `R`, `L` stack the ray
/// and lineality generators of `K` as columns.
///
/// With `M` the identity this encodes plain membership `z ∈ cone(K)`.
#[derive(Debug, Clone)]
pub struct PreimageCone {
    map: Matrix,
    target: FGCone,
}

impl PreimageCone {
    pub fn map(&self) -> &Matrix {
        &self.map
    }

    pub fn target(&self) -> &FGCone {
        &self.target
    }

    /// Dimension of the preimage variable `z`.
    pub fn z_dim(&self) -> usize {
        self.map.rows()
    }
}

/// Build the preimage cone `{z : Mᵀz ∈ cone(K)}`.
pub fn build_preimage(map: Matrix, target: FGCone) -> Result<PreimageCone> {
    if target.dim() != map.cols() {
        return Err(Error::DimensionMismatch {
            context: "preimage target cone",
            expected: map.cols(),
            found: target.dim(),
        });
    }
    Ok(PreimageCone { map, target })
}

/// Result of the triviality battery.
#[derive(Debug, Clone)]
pub struct TrivialityResult {
    /// Whether the intersection is `{0}` (up to tolerance).
    pub trivial: bool,
    /// A nonzero intersection point with `‖z‖∞ = 1`, present exactly when
    /// `trivial` is false.
    pub witness: Option<Vector>,
    /// Number of LP solves spent.
    pub lp_calls: usize,
    /// Largest equality residual of the witness in both membership systems
    /// (zero when there is no witness).
    pub max_violation: f64,
    /// Largest optimum seen across the battery.
    pub max_optimum: f64,
    /// True when the deciding optimum fell inside the ambiguous band
    /// `(tol/10, 10·tol)` where floating point cannot certify the boundary.
    pub marginal: bool,
}

/// Membership of `v` in the finitely generated cone `K`, decided by one LP
/// feasibility solve (`∃ λ >= 0, μ: Rλ + Lμ = v` within `tol`). A cone with
/// no generators is `{0}`, where membership means `‖v‖∞ <= tol`.
pub fn cone_membership(cone: &FGCone, v: &Vector, tol: f64) -> Result<bool> {
    if v.dim() != cone.dim() {
        return Err(Error::DimensionMismatch {
            context: "cone membership point",
            expected: cone.dim(),
            found: v.dim(),
        });
    }
    if cone.is_trivial() {
        return Ok(v.norm_inf() <= tol);
    }
    let lp = membership_lp(cone, v);
    Ok(lp_solve(&lp, tol)?.status == LpStatus::Optimal)
}

/// How far `v` is from the cone: the least sum of absolute equality
/// violations over generator combinations, computed by an elastic LP
/// (`min Σ e⁺+e⁻` subject to `Rλ + Lμ + e⁺ − e⁻ = v`). Exactly zero for
/// members; convex and positively homogeneous in `v`. The unit elastic
/// columns pin the solver's row equilibration, so the measure's gradient
/// with respect to `v` has unit rows — the sphere scan's descent depends on
/// that isotropy.
fn cone_violation(cone: &FGCone, v: &Vector, tol: f64) -> Result<f64> {
    if cone.is_trivial() {
        return Ok(v.entries().iter().map(|x| x.abs()).sum());
    }
    let dim = cone.dim();
    let nr = cone.rays().len();
    let nl = cone.lineality().len();
    let ncols = nr + nl + 2 * dim;
    let mut entries = vec![0.0; dim * ncols];
    for (j, r) in cone.rays().iter().enumerate() {
        for i in 0..dim {
            entries[i * ncols + j] = r[i];
        }
    }
    for (j, l) in cone.lineality().iter().enumerate() {
        for i in 0..dim {
            entries[i * ncols + nr + j] = l[i];
        }
    }
    for i in 0..dim {
        entries[i * ncols + nr + nl + i] = 1.0;
        entries[i * ncols + nr + nl + dim + i] = -1.0;
    }
    let mut objective = vec![0.0; ncols];
    for c in objective.iter_mut().skip(nr + nl) {
        *c = -1.0;
    }
    let mut lower = vec![0.0; nr];
    lower.extend(vec![f64::NEG_INFINITY; nl]);
    lower.extend(vec![0.0; 2 * dim]);
    let lp = LinearProgram {
        objective: Vector::new(objective)?,
        eq_lhs: Matrix::new(dim, ncols, entries)?,
        eq_rhs: v.clone(),
        var_lower: lower,
        var_upper: vec![f64::INFINITY; ncols],
    };
    let out = lp_solve(&lp, tol)?;
    match out.status {
        LpStatus::Optimal => Ok((-out.objective_value.unwrap_or(0.0)).max(0.0)),
        _ => Err(Error::LpInternal {
            context: "elastic violation LP is always feasible and bounded",
        }),
    }
}

fn membership_lp(cone: &FGCone, v: &Vector) -> LinearProgram {
    let dim = cone.dim();
    let nr = cone.rays().len();
    let nl = cone.lineality().len();
    let ncols = nr + nl;
    let mut entries = vec![0.0; dim * ncols];
    for (j, r) in cone.rays().iter().enumerate() {
        for i in 0..dim {
            entries[i * ncols + j] = r[i];
        }
    }
    for (j, l) in cone.lineality().iter().enumerate() {
        for i in 0..dim {
            entries[i * ncols + nr + j] = l[i];
        }
    }
    let mut lower = vec![0.0; nr];
    lower.extend(vec![f64::NEG_INFINITY; nl]);
    LinearProgram {
        objective: Vector::zeros(ncols),
        eq_lhs: Matrix::new(dim, ncols, entries).expect("generator matrix shape"),
        eq_rhs: v.clone(),
        var_lower: lower,
        var_upper: vec![f64::INFINITY; ncols],
    }
}

// Column layout of the joint feasibility system for two preimage cones.
struct JointSystem {
    lp_template: LinearProgram,
    z_dim: usize,
}

fn joint_system(p1: &PreimageCone, p2: &PreimageCone) -> Result<JointSystem> {
    let l = p1.z_dim();
    if p2.z_dim() != l {
        return Err(Error::DimensionMismatch {
            context: "preimage cones ambient dimension",
            expected: l,
            found: p2.z_dim(),
        });
    }
    let (n1, n2) = (p1.map.cols(), p2.map.cols());
    let (r1, s1) = (p1.target.rays().len(), p1.target.lineality().len());
    let (r2, s2) = (p2.target.rays().len(), p2.target.lineality().len());
    let ncols = l + r1 + s1 + r2 + s2;
    let nrows = n1 + n2;
    let mut entries = vec![0.0; nrows * ncols];

    let mut fill =
        |row0: usize, map: &Matrix, cone: &FGCone, col0: usize| {
            let n = map.cols();
            for i in 0..n {
                let row = row0 + i;
                for k in 0..l {
                    entries[row * ncols + k] = map.get(k, i);
                }
                for (j, r) in cone.rays().iter().enumerate() {
                    entries[row * ncols + col0 + j] = -r[i];
                }
                for (j, lin) in cone.lineality().iter().enumerate() {
                    entries[row * ncols + col0 + cone.rays().len() + j] = -lin[i];
                }
            }
        };
    fill(0, &p1.map, &p1.target, l);
    fill(n1, &p2.map, &p2.target, l + r1 + s1);

    let mut lower = vec![-1.0; l];
    lower.extend(vec![0.0; r1]);
    lower.extend(vec![f64::NEG_INFINITY; s1]);
    lower.extend(vec![0.0; r2]);
    lower.extend(vec![f64::NEG_INFINITY; s2]);
    let mut upper = vec![1.0; l];
    upper.extend(vec![f64::INFINITY; r1 + s1 + r2 + s2]);

    Ok(JointSystem {
        lp_template: LinearProgram {
            objective: Vector::zeros(ncols),
            eq_lhs: Matrix::new(nrows, ncols, entries)?,
            eq_rhs: Vector::zeros(nrows),
            var_lower: lower,
            var_upper: upper,
        },
        z_dim: l,
    })
}

/// Decide whether `P1 ∩ P2 = {0}` by the LP battery: for every coordinate
/// `k` and sign, maximize `±z_k` over both membership systems intersected
/// with the unit box `-1 <= z <= 1`. The intersection is trivial exactly when
/// every optimum stays below `tol`; otherwise an optimizer rescaled to
/// `‖z‖∞ = 1` is returned as the witness.
pub fn intersection_trivial(
    p1: &PreimageCone,
    p2: &PreimageCone,
    tol: f64,
) -> Result<TrivialityResult> {
    if !(tol > 0.0) {
        return Err(Error::InvalidInput {
            context: format!("triviality tolerance must be positive, got {tol}"),
        });
    }
    let sys = joint_system(p1, p2)?;
    let l = sys.z_dim;
    let mut lp = sys.lp_template;
    let ncols = lp.objective.dim();

    let mut lp_calls = 0usize;
    let mut max_optimum = 0.0f64;
    let mut best: Option<Vector> = None; // full LP point of the best optimum
    'battery: for k in 0..l {
        for sign in [1.0, -1.0] {
            let mut obj = vec![0.0; ncols];
            obj[k] = sign;
            lp.objective = Vector::new(obj)?;
            let out = lp_solve(&lp, tol)?;
            lp_calls += 1;
            if out.status != LpStatus::Optimal {
                return Err(Error::LpInternal {
                    context: "battery LP must have an optimum (z is boxed)",
                });
            }
            let opt = out.objective_value.unwrap_or(0.0);
            if opt > max_optimum {
                max_optimum = opt;
                best = out.solution;
            }
            // A solidly nonzero point settles the question; later solves
            // could only confirm it.
            if max_optimum >= 10.0 * tol {
                break 'battery;
            }
        }
    }

    let trivial = max_optimum <= tol;
    let marginal = max_optimum > tol / 10.0 && max_optimum < 10.0 * tol;

    if trivial {
        return Ok(TrivialityResult {
            trivial: true,
            witness: None,
            lp_calls,
            max_violation: 0.0,
            max_optimum,
            marginal,
        });
    }

    let point = best.ok_or(Error::LpInternal {
        context: "nontrivial battery without an optimizer",
    })?;
    let z = Vector::from_raw(point.entries()[..l].to_vec());
    let z_inf = z.norm_inf();
    if z_inf == 0.0 {
        return Err(Error::LpInternal {
            context: "nontrivial battery produced a zero optimizer",
        });
    }
    // Positive rescaling keeps the point in both cones; scale the generator
    // multipliers along with z so the residual can be evaluated directly.
    let scaled = point.scale(1.0 / z_inf);
    let witness = Vector::from_raw(scaled.entries()[..l].to_vec());
    let residual = joint_residual(p1, p2, &scaled)?;

    Ok(TrivialityResult {
        trivial: false,
        witness: Some(witness),
        lp_calls,
        max_violation: residual,
        max_optimum,
        marginal,
    })
}

/// Largest equality residual of a joint-system point (z, λ1, μ1, λ2, μ2).
fn joint_residual(p1: &PreimageCone, p2: &PreimageCone, point: &Vector) -> Result<f64> {
    let l = p1.z_dim();
    let z = Vector::from_raw(point.entries()[..l].to_vec());
    let mut offset = l;
    let mut worst = 0.0f64;
    for p in [p1, p2] {
        let mapped = p.map.tmatvec(&z)?;
        let nr = p.target.rays().len();
        let nl = p.target.lineality().len();
        for i in 0..p.map.cols() {
            let mut combo = 0.0;
            for (j, r) in p.target.rays().iter().enumerate() {
                combo += point[offset + j] * r[i];
            }
            for (j, lin) in p.target.lineality().iter().enumerate() {
                combo += point[offset + nr + j] * lin[i];
            }
            worst = worst.max((mapped[i] - combo).abs());
        }
        offset += nr + nl;
    }
    Ok(worst)
}

/// Brute-force triviality check over a grid of unit directions, for ambient
/// dimension at most three.
///
/// The scan looks for a unit `z` passing both cone membership tests on
/// `Mᵀz`. Because a fine grid still misses one-dimensional intersections, a
/// promising direction (best total violation within the grid's own
/// resolution) is refined by a local pattern search on the sphere before the
/// strict tolerance is applied, so a returned direction is always a
/// membership-certified witness at `tol`.
pub fn sphere_oracle(
    p1: &PreimageCone,
    p2: &PreimageCone,
    resolution: usize,
    tol: f64,
) -> Result<Option<Vector>> {
    let l = p1.z_dim();
    if p2.z_dim() != l {
        return Err(Error::DimensionMismatch {
            context: "sphere oracle ambient dimension",
            expected: l,
            found: p2.z_dim(),
        });
    }
    if l == 0 || l > 3 {
        return Err(Error::UnsupportedDimension { dim: l, max: 3 });
    }
    if resolution < 16 {
        return Err(Error::InvalidInput {
            context: format!("sphere resolution must be at least 16, got {resolution}"),
        });
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidInput {
            context: format!("sphere oracle tolerance must be positive, got {tol}"),
        });
    }

    // The scan descends a violation surface, so equilibrate both membership
    // systems first: unit per-row gradients keep the kink valleys isotropic
    // enough for a compass search. The zero sets are unchanged.
    let t1 = equilibrate_for_scan(p1);
    let t2 = equilibrate_for_scan(p2);
    // The plain membership test can weigh residual rows more harshly than
    // the scan's isotropic measure does; the scan must descend beneath the
    // caller's tolerance divided by that amplification before a candidate
    // has a chance to certify.
    let amplification = certify_amplification(p1) + certify_amplification(p2);
    let scan_tol = (0.25 * tol / amplification).min(1e-2 * tol).max(2e-13);
    let lp_tol = (tol * 1e-3).clamp(1e-13, 1e-9);
    let violation = |d: &Vector| -> Result<f64> {
        let v1 = cone_violation(t1.target(), &t1.map.tmatvec(d)?, lp_tol)?;
        let v2 = cone_violation(t2.target(), &t2.map.tmatvec(d)?, lp_tol)?;
        Ok(v1 + v2)
    };
    // A direction only counts as a witness when the original membership
    // tests pass at the caller's tolerance.
    let certify = |d: &Vector| -> Result<bool> {
        Ok(
            cone_membership(p1.target(), &p1.map.tmatvec(d)?, tol)?
                && cone_membership(p2.target(), &p2.map.tmatvec(d)?, tol)?,
        )
    };

    let grid = sphere_grid(l, resolution);
    let mut scored: Vec<(f64, usize)> = Vec::with_capacity(grid.len());
    for (i, d) in grid.iter().enumerate() {
        let v = violation(d)?;
        if v <= scan_tol && certify(d)? {
            return Ok(Some(d.clone()));
        }
        scored.push((v, i));
    }

    if l == 1 {
        // The grid {+1, -1} is exhaustive in one dimension.
        return Ok(None);
    }

    // Worst angular distance from any sphere point to the grid, padded; the
    // equilibrated systems have at most one unit of slope per row.
    let spacing = 1.2 * std::f64::consts::PI / resolution as f64;
    let rows = (p1.map.cols() + p2.map.cols()) as f64;
    let relaxed = tol + 3.0 * spacing * rows;
    scored.sort_by(|a, b| a.0.total_cmp(&b.0));
    if scored[0].0 > relaxed {
        return Ok(None);
    }

    // Refine the best few well-separated candidates; thin intersections
    // (single rays, kernel lines) are reachable from a grid point but only
    // by descending a kinked valley, hence the pattern search.
    let min_sep = (2.5 * spacing).cos();
    let mut starts: Vec<usize> = Vec::new();
    for &(v, i) in &scored {
        if v > relaxed || starts.len() == 3 {
            break;
        }
        if starts
            .iter()
            .all(|&j| grid[i].dot(&grid[j]).expect("dims match") < min_sep)
        {
            starts.push(i);
        }
    }

    for &i in &starts {
        let (d, v) = refine_on_sphere(
            &violation,
            grid[i].clone(),
            scored.iter().find(|s| s.1 == i).expect("scored").0,
            spacing,
            scan_tol,
        )?;
        if v <= scan_tol {
            if certify(&d)? {
                return Ok(Some(d));
            }
            // Near-miss: descend another two decades and re-check.
            let (d2, v2) = refine_on_sphere(&violation, d, v, 1e-6, scan_tol * 1e-2)?;
            if v2 <= scan_tol && certify(&d2)? {
                return Ok(Some(d2));
            }
        }
    }
    Ok(None)
}

/// Worst-case factor by which the plain membership test can magnify an
/// equilibrated scan residual: column norm of the map over the generator
/// row scale, maxed over rows (plain column norms for the trivial cone,
/// whose membership test reads raw coordinates).
fn certify_amplification(p: &PreimageCone) -> f64 {
    let m = &p.map;
    let k = &p.target;
    (0..m.cols())
        .map(|i| {
            let col_norm = (0..m.rows())
                .map(|r| m.get(r, i) * m.get(r, i))
                .sum::<f64>()
                .sqrt()
                .max(f64::MIN_POSITIVE);
            if k.is_trivial() {
                return col_norm;
            }
            let mut scale = 0.0f64;
            for r in k.rays() {
                scale = scale.max(r[i].abs());
            }
            for l in k.lineality() {
                scale = scale.max(l[i].abs());
            }
            if scale == 0.0 {
                scale = 1.0;
            }
            col_norm / scale
        })
        .fold(1.0, f64::max)
}

/// Rescale a preimage system so every membership row has a unit-norm
/// gradient with respect to the probed direction: column `i` of the map and
/// coordinate `i` of every generator are divided by the column norm. The
/// represented cone `{z : Mᵀz ∈ cone(K)}` is unchanged.
fn equilibrate_for_scan(p: &PreimageCone) -> PreimageCone {
    let m = &p.map;
    let (rows, cols) = (m.rows(), m.cols());
    let col_norms: Vec<f64> = (0..cols)
        .map(|i| {
            let n = (0..rows).map(|r| m.get(r, i) * m.get(r, i)).sum::<f64>().sqrt();
            if n == 0.0 {
                1.0
            } else {
                n
            }
        })
        .collect();
    let mut entries = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        for (i, cn) in col_norms.iter().enumerate() {
            entries.push(m.get(r, i) / cn);
        }
    }
    let map = Matrix::new(rows, cols, entries).expect("scaled map");
    let rescale = |g: &Vector| {
        Vector::new(
            g.entries()
                .iter()
                .zip(&col_norms)
                .map(|(v, cn)| v / cn)
                .collect(),
        )
        .expect("scaled generator")
    };
    let target = FGCone::new(
        p.target.dim(),
        p.target.rays().iter().map(rescale).collect(),
        p.target.lineality().iter().map(rescale).collect(),
    )
    .expect("generators stay nonzero under positive diagonal scaling");
    PreimageCone { map, target }
}

/// Hooke-Jeeves pattern search on the unit sphere: exploratory moves in a
/// rotated tangent compass plus doubled-step pattern moves along the last
/// successful direction. Steps grow on success and shrink on failure; the
/// rotation on shrink keeps kinked valleys from pinning the compass.
///
/// Acceptance uses the classical sufficient-decrease rule `cv < v − h²`.
/// Plain improvement is not enough: when the zero set traces an arc on the
/// sphere, any move along the arc trims the violation by a cosine factor
/// (second order in `h`), and chasing those phantom gains keeps the step
/// large while the budget burns. The forcing term rejects them, so the step
/// contracts onto the valley and real transverse progress (first order in
/// `h`) resumes.
fn refine_on_sphere(
    violation: &dyn Fn(&Vector) -> Result<f64>,
    start: Vector,
    start_v: f64,
    h0: f64,
    tol: f64,
) -> Result<(Vector, f64)> {
    let mut d = start;
    let mut v = start_v;
    let mut h = h0;
    let mut rotation = 0.0f64;
    let mut momentum: Option<Vector> = None;
    let mut evals = 0usize;
    while h > 1e-13 && v > tol && evals < 8000 {
        if let Some(m) = &momentum {
            let step = 2.0 * h;
            let cand = rotate_towards(&d, m, step);
            let cv = violation(&cand)?;
            evals += 1;
            if cv < v - step * step {
                momentum = forward_tangent(&d, &cand);
                d = cand;
                v = cv;
                h = (h * 2.0).min(h0);
                continue;
            }
        }
        let basis = tangent_basis(&d);
        let mut improved = false;
        for t in tangent_directions(&basis, rotation) {
            let cand = rotate_towards(&d, &t, h);
            let cv = violation(&cand)?;
            evals += 1;
            if cv < v - h * h {
                momentum = forward_tangent(&d, &cand);
                d = cand;
                v = cv;
                improved = true;
                break;
            }
        }
        if improved {
            h = (h * 1.5).min(h0);
        } else {
            h *= 0.5;
            rotation += 0.754_877_666; // irrational fraction of a turn
            momentum = None;
        }
    }
    Ok((d, v))
}

/// Unit tangent at `to` pointing away from `from`.
fn forward_tangent(from: &Vector, to: &Vector) -> Option<Vector> {
    let raw = to.sub(from).ok()?;
    let along = raw.dot(to).ok()?;
    let t = raw.sub(&to.scale(along)).ok()?;
    let n = t.norm();
    if n < 1e-14 {
        None
    } else {
        Some(t.scale(1.0 / n))
    }
}

fn sphere_grid(dim: usize, resolution: usize) -> Vec<Vector> {
    match dim {
        1 => vec![
            Vector::from_raw(vec![1.0]),
            Vector::from_raw(vec![-1.0]),
        ],
        2 => (0..resolution)
            .map(|i| {
                let theta = 2.0 * std::f64::consts::PI * i as f64 / resolution as f64;
                Vector::from_raw(vec![theta.cos(), theta.sin()])
            })
            .collect(),
        3 => {
            let mut out = Vec::with_capacity(resolution * resolution);
            for j in 0..resolution {
                let phi = std::f64::consts::PI * (j as f64 + 0.5) / resolution as f64;
                for i in 0..resolution {
                    let theta = 2.0 * std::f64::consts::PI * i as f64 / resolution as f64;
                    out.push(Vector::from_raw(vec![
                        phi.sin() * theta.cos(),
                        phi.sin() * theta.sin(),
                        phi.cos(),
                    ]));
                }
            }
            out
        }
        _ => unreachable!("dimension checked by caller"),
    }
}

/// Orthonormal tangent vectors at a unit direction.
fn tangent_basis(d: &Vector) -> Vec<Vector> {
    let n = d.dim();
    // Seed with the basis vector least aligned with d.
    let (seed, _) = (0..n)
        .map(|i| (i, d[i].abs()))
        .fold((0, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
    let e = Vector::basis(n, seed);
    let proj = d.scale(e.dot(d).expect("dims match"));
    let t1 = {
        let raw = e.sub(&proj).expect("dims match");
        raw.scale(1.0 / raw.norm())
    };
    if n == 2 {
        return vec![t1];
    }
    // Cross product completes the frame in three dimensions.
    let t2 = Vector::from_raw(vec![
        d[1] * t1[2] - d[2] * t1[1],
        d[2] * t1[0] - d[0] * t1[2],
        d[0] * t1[1] - d[1] * t1[0],
    ]);
    vec![t1, t2]
}

/// Compass directions in the tangent plane, rotated by `angle` (two
/// directions on a circle, sixteen on a sphere).
fn tangent_directions(basis: &[Vector], angle: f64) -> Vec<Vector> {
    match basis {
        [t] => vec![t.clone(), t.scale(-1.0)],
        [t1, t2] => (0..16)
            .map(|k| {
                let a = angle + k as f64 * std::f64::consts::FRAC_PI_8;
                t1.scale(a.cos()).add(&t2.scale(a.sin())).expect("dims match")
            })
            .collect(),
        _ => unreachable!("tangent basis has one or two vectors"),
    }
}

/// Move angle `h` along a unit tangent, staying on the sphere.
fn rotate_towards(d: &Vector, tangent: &Vector, h: f64) -> Vector {
    let raw = d
        .scale(h.cos())
        .add(&tangent.scale(h.sin()))
        .expect("dims match");
    raw.scale(1.0 / raw.norm())
}
