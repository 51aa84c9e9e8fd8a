//! Acceptance suite: one test per criterion, each ending in a printed
//! pass line. Run with `cargo test --test acceptance -- --nocapture` to see
//! the lines.

use std::path::{Path, PathBuf};
use std::time::Instant;

use splitstab::certify::{
    certify, check_sep_condition, check_sfp_condition, condition_cones, sfp_as_sep, ProblemSpec,
    Verdict,
};
use splitstab::cones::{cone_membership, intersection_trivial, sphere_oracle};
use splitstab::numerics::{Matrix, Vector};
use splitstab::probe::{run_probe, ProbeConfig};
use splitstab::sets::ConvexSet;
use splitstab::solve::{default_step_sep, default_step_sfp, solve_sep, solve_sfp};
use splitstab_cli::spec_file::ParsedSpec;

const TOL: f64 = 1e-9;

fn corpus(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("corpus")
        .join(name)
}

fn load(name: &str) -> ProblemSpec {
    ParsedSpec::parse_file(&corpus(name))
        .unwrap_or_else(|e| panic!("{name}: {e}"))
        .to_problem(TOL)
        .unwrap_or_else(|e| panic!("{name}: {e}"))
}

// ---------------------------------------------------------------------------
// Seeded generator shared by the randomized criteria.
// ---------------------------------------------------------------------------

struct Rng(u64);

impl Rng {
    fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    fn f(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.f()
    }

    fn int(&mut self, lo: usize, hi: usize) -> usize {
        lo + (self.next_u64() as usize) % (hi - lo + 1)
    }

    fn chance(&mut self, p: f64) -> bool {
        self.f() < p
    }

    fn matrix(&mut self, rows: usize, cols: usize, amp: f64) -> Matrix {
        Matrix::new(
            rows,
            cols,
            (0..rows * cols).map(|_| self.range(-amp, amp)).collect(),
        )
        .unwrap()
    }

    fn point(&mut self, dim: usize, amp: f64) -> Vector {
        Vector::new((0..dim).map(|_| self.range(-amp, amp)).collect()).unwrap()
    }

    /// A nonzero point (max-norm at least 0.3).
    fn nonzero_point(&mut self, dim: usize) -> Vector {
        loop {
            let v = self.point(dim, 1.0);
            if v.norm_inf() >= 0.3 {
                return v;
            }
        }
    }

    /// Box or polyhedron containing `anchor`, with a mix of active and slack
    /// constraints so nontrivial normal cones occur often.
    fn set_around(&mut self, anchor: &Vector) -> ConvexSet {
        let dim = anchor.dim();
        if self.chance(0.5) {
            let mut lower = Vec::with_capacity(dim);
            let mut upper = Vec::with_capacity(dim);
            for i in 0..dim {
                let l = match self.int(0, 3) {
                    0 => anchor[i], // active lower bound
                    1 => f64::NEG_INFINITY,
                    _ => anchor[i] - self.range(0.1, 1.2),
                };
                let u = match self.int(0, 3) {
                    0 => anchor[i], // active upper bound
                    1 => f64::INFINITY,
                    _ => anchor[i] + self.range(0.1, 1.2),
                };
                // Both-active collapses to a pinned coordinate, which is a
                // legal degenerate box.
                lower.push(l.min(u));
                upper.push(u.max(l));
            }
            ConvexSet::box_set(lower, upper).unwrap()
        } else {
            // Near-parallel halfspace pairs are rejected: they slow cyclic
            // projection past its sweep cap without adding cone variety.
            let rows = self.int(1, dim + 1);
            let mut g: Vec<Vec<f64>> = Vec::new();
            let mut offsets = Vec::new();
            for _ in 0..rows {
                let row: Vec<f64> = (0..dim).map(|_| self.range(-1.0, 1.0)).collect();
                let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
                if norm < 0.2 {
                    continue;
                }
                let parallel = g.iter().any(|kept: &Vec<f64>| {
                    let kn = kept.iter().map(|v| v * v).sum::<f64>().sqrt();
                    let dot: f64 = kept.iter().zip(&row).map(|(a, b)| a * b).sum();
                    (dot / (kn * norm)).abs() > 0.9
                });
                if parallel {
                    continue;
                }
                let ga: f64 = row.iter().zip(anchor.entries()).map(|(a, b)| a * b).sum();
                let slack = if self.chance(0.4) {
                    0.0
                } else {
                    self.range(0.1, 1.2)
                };
                g.push(row);
                offsets.push(ga + slack);
            }
            if g.is_empty() {
                let mut row = vec![0.0; dim];
                row[0] = 1.0;
                g.push(row);
                offsets.push(anchor[0] + 1.0);
            }
            ConvexSet::polyhedron(
                Matrix::from_rows(&g).unwrap(),
                Vector::new(offsets).unwrap(),
            )
            .unwrap()
        }
    }

    /// Feasible random equality instance with box/polyhedral sets.
    fn sep_instance(&mut self) -> ProblemSpec {
        let l = self.int(1, 3);
        let n = self.int(1, 3);
        let m = self.int(1, 3);
        let a = self.matrix(l, n, 2.0);
        let xbar = self.point(n, 1.0);
        let c = self.set_around(&xbar);
        let ybar = self.nonzero_point(m);
        // Rank-one correction makes (xbar, ybar) an exact solution.
        let b_raw = self.matrix(l, m, 2.0);
        let ax = a.matvec(&xbar).unwrap();
        let by = b_raw.matvec(&ybar).unwrap();
        let gap = ax.sub(&by).unwrap();
        let ynorm2 = ybar.dot(&ybar).unwrap();
        let mut entries = Vec::with_capacity(l * m);
        for i in 0..l {
            for j in 0..m {
                entries.push(b_raw.get(i, j) + gap[i] * ybar[j] / ynorm2);
            }
        }
        let b = Matrix::new(l, m, entries).unwrap();
        let q = self.set_around(&ybar);
        ProblemSpec::sep(a, b, c, q, xbar, ybar).unwrap()
    }

    /// Feasible random feasibility instance.
    fn sfp_instance(&mut self) -> ProblemSpec {
        let n = self.int(1, 3);
        let m = self.int(1, 3);
        let a = self.matrix(m, n, 2.0);
        let xbar = self.point(n, 1.0);
        let c = self.set_around(&xbar);
        let image = a.matvec(&xbar).unwrap();
        let q = self.set_around(&image);
        ProblemSpec::sfp(a, c, q, xbar).unwrap()
    }
}

// ---------------------------------------------------------------------------
// Criterion 1: corpus verdicts.
// ---------------------------------------------------------------------------

#[test]
fn criterion_1_example_corpus_verdicts() {
    let cases: &[(&str, Verdict)] = &[
        ("ex3_1.json", Verdict::LipschitzLike),
        ("ex3_1b.json", Verdict::LipschitzLike),
        ("ex3_2.json", Verdict::NotLipschitzLike),
        ("ex3_4.json", Verdict::Inconclusive),
        ("ex3_5.json", Verdict::Inconclusive),
        ("ex4_1.json", Verdict::LipschitzLike),
        ("ex4_1b.json", Verdict::LipschitzLike),
        ("ex4_2.json", Verdict::NotLipschitzLike),
        ("ex4_3.json", Verdict::Inconclusive),
        ("ex4_4.json", Verdict::Inconclusive),
    ];
    for (file, want) in cases {
        let spec = load(file);
        let started = Instant::now();
        let cert = certify(&spec, TOL).unwrap_or_else(|e| panic!("{file}: {e}"));
        let elapsed = started.elapsed();
        assert_eq!(cert.verdict, *want, "{file}");
        assert!(
            elapsed.as_secs_f64() < 1.0,
            "{file} took {elapsed:?}, budget is 1 s"
        );
    }

    // The instability witness of ex3_2 must satisfy both cone memberships.
    let spec = load("ex3_2.json");
    let cert = certify(&spec, TOL).unwrap();
    let witness = cert.witness.expect("unstable verdicts carry a witness");
    let (p1, p2) = condition_cones(&spec, TOL).unwrap();
    let w_tol = 1e-8;
    assert!(
        cone_membership(p1.target(), &p1.map().tmatvec(&witness).unwrap(), w_tol).unwrap()
    );
    assert!(
        cone_membership(p2.target(), &p2.map().tmatvec(&witness).unwrap(), w_tol).unwrap()
    );

    // ex4_4 must fail the condition solidly, not marginally.
    let cert = certify(&load("ex4_4.json"), TOL).unwrap();
    assert_eq!(cert.verdict, Verdict::Inconclusive);
    assert!(!cert.marginal);

    println!("criterion 1: PASS - 10/10 corpus verdicts match (9 examples, both branches)");
}

// ---------------------------------------------------------------------------
// Criterion 2: LP battery vs sphere scan on random equality instances.
// ---------------------------------------------------------------------------

#[test]
fn criterion_2_battery_agrees_with_sphere_oracle() {
    let started = Instant::now();
    let mut rng = Rng(2024);
    let mut marginal = 0usize;
    let mut agreements = 0usize;
    for trial in 0..100 {
        let spec = rng.sep_instance();
        let (p1, p2) = condition_cones(&spec, TOL).unwrap();
        let battery = intersection_trivial(&p1, &p2, TOL).unwrap();
        if battery.marginal {
            marginal += 1;
            continue;
        }
        let resolution = if p1.z_dim() == 3 { 64 } else { 256 };
        let scan = sphere_oracle(&p1, &p2, resolution, TOL)
            .unwrap_or_else(|e| panic!("trial {trial}: {e}"));
        assert_eq!(
            battery.trivial,
            scan.is_none(),
            "trial {trial}: battery trivial={} but scan found {:?}\nspec: {spec:?}",
            battery.trivial,
            scan
        );
        agreements += 1;
    }
    let elapsed = started.elapsed().as_secs_f64();
    assert!(
        agreements >= 98,
        "only {agreements}/100 non-marginal instances"
    );
    assert!(elapsed < 30.0, "took {elapsed:.1} s, budget is 30 s");
    println!(
        "criterion 2: PASS - {agreements}/100 non-marginal, 100% agreement, {marginal} marginal, {elapsed:.1} s"
    );
}

// ---------------------------------------------------------------------------
// Criterion 3: feasibility condition equals its equality-form reduction.
// ---------------------------------------------------------------------------

#[test]
fn criterion_3_reduction_consistency() {
    let mut rng = Rng(77);
    for trial in 0..100 {
        let sfp = rng.sfp_instance();
        let sep = sfp_as_sep(&sfp).unwrap();
        let direct = check_sfp_condition(&sfp, TOL).unwrap();
        let reduced = check_sep_condition(&sep, TOL).unwrap();
        assert_eq!(
            direct.trivial, reduced.trivial,
            "trial {trial}: reduction changed the flag\nspec: {sfp:?}"
        );
    }
    println!("criterion 3: PASS - 100/100 reduction-consistent instances");
}

// ---------------------------------------------------------------------------
// Criterion 4: symmetry and positive-scaling invariance.
// ---------------------------------------------------------------------------

#[test]
fn criterion_4_symmetry_and_scaling() {
    let mut rng = Rng(4040);
    for trial in 0..100 {
        let spec = rng.sep_instance();
        let ProblemSpec::Sep {
            a,
            b,
            c,
            q,
            xbar,
            ybar,
        } = &spec
        else {
            unreachable!()
        };
        let swapped = ProblemSpec::sep(
            b.clone(),
            a.clone(),
            q.clone(),
            c.clone(),
            ybar.clone(),
            xbar.clone(),
        )
        .unwrap();
        let fwd = certify(&spec, TOL).unwrap();
        let rev = certify(&swapped, TOL).unwrap();
        assert_eq!(
            fwd.condition_holds, rev.condition_holds,
            "trial {trial}: swap changed the flag"
        );
    }

    // Scaling suite on instances with A xbar = B ybar = 0, so feasibility
    // survives independent positive rescaling of the two matrices.
    let mut rng = Rng(5050);
    for trial in 0..100 {
        let l = rng.int(1, 3);
        let n = rng.int(1, 3);
        let m = rng.int(1, 3);
        let xbar = rng.nonzero_point(n);
        let ybar = rng.nonzero_point(m);
        let kill = |raw: Matrix, v: &Vector| {
            // Project each row orthogonally to v so the product vanishes.
            let vv = v.dot(v).unwrap();
            let mut entries = Vec::with_capacity(raw.rows() * raw.cols());
            for i in 0..raw.rows() {
                let rv: f64 = raw.row(i).iter().zip(v.entries()).map(|(a, b)| a * b).sum();
                for j in 0..raw.cols() {
                    entries.push(raw.get(i, j) - rv * v[j] / vv);
                }
            }
            Matrix::new(raw.rows(), raw.cols(), entries).unwrap()
        };
        let a = kill(rng.matrix(l, n, 2.0), &xbar);
        let b = kill(rng.matrix(l, m, 2.0), &ybar);
        let c = rng.set_around(&xbar);
        let q = rng.set_around(&ybar);
        let base = ProblemSpec::sep(a.clone(), b.clone(), c.clone(), q.clone(), xbar.clone(), ybar.clone())
            .unwrap();
        let t = rng.range(0.05, 20.0);
        let s = rng.range(0.05, 20.0);
        let scaled =
            ProblemSpec::sep(a.scale(t), b.scale(s), c, q, xbar.clone(), ybar.clone()).unwrap();
        let f1 = certify(&base, TOL).unwrap();
        let f2 = certify(&scaled, TOL).unwrap();
        assert_eq!(
            f1.condition_holds, f2.condition_holds,
            "trial {trial}: scaling by ({t}, {s}) changed the flag"
        );
    }
    println!("criterion 4: PASS - 100/100 symmetric, 100/100 scale-invariant");
}

// ---------------------------------------------------------------------------
// Criterion 5: normal-cone soundness per variant.
// ---------------------------------------------------------------------------

#[test]
fn criterion_5_normal_cone_soundness() {
    let mut rng = Rng(909);
    let dim = 3;
    for variant in 0..5 {
        for trial in 0..100 {
            let anchor = rng.point(dim, 1.0);
            let set = match variant {
                // Boxes and polyhedra from the shared generator.
                0 | 1 => rng.set_around(&anchor),
                2 => ConvexSet::singleton(anchor.clone()).unwrap(),
                3 => {
                    let offset = rng.point(dim, 0.4);
                    let center = anchor.sub(&offset).unwrap();
                    let r = offset.norm().max(1e-3);
                    let radius = if rng.chance(0.5) { r } else { r + 0.5 };
                    ConvexSet::ball(center, radius).unwrap()
                }
                _ => ConvexSet::whole_space(dim).unwrap(),
            };
            let cone = set
                .normal_cone(&anchor, TOL)
                .unwrap_or_else(|e| panic!("variant {variant}, trial {trial}: {e}"));
            for _ in 0..100 {
                let member = set.project(&rng.point(dim, 3.0)).unwrap();
                let diff = member.sub(&anchor).unwrap();
                for ray in cone.rays() {
                    let ip = ray.dot(&diff).unwrap();
                    assert!(
                        ip <= 1e-9,
                        "variant {variant}, trial {trial}: <v, s-x> = {ip}"
                    );
                }
                for lin in cone.lineality() {
                    let ip = lin.dot(&diff).unwrap();
                    assert!(
                        ip.abs() <= 1e-9,
                        "variant {variant}, trial {trial}: |<v, s-x>| = {ip}"
                    );
                }
            }
        }
    }
    println!("criterion 5: PASS - 5 variants x 100 pairs x 100 members sound");
}

// ---------------------------------------------------------------------------
// Criterion 6: probe corroboration on closed-form families.
// ---------------------------------------------------------------------------

#[test]
fn criterion_6_probe_corroboration() {
    let started = Instant::now();
    let cfg = ProbeConfig::default();

    // Constant solution map: every ratio is exactly zero.
    let report = run_probe(&load("ex3_4.json"), &cfg).unwrap();
    assert_eq!(report.modulus_estimate, 0.0, "constant map must not drift");
    assert!(!report.diverging);

    // Flipping solution set: ratios blow up as the radius shrinks; the
    // smallest radius must witness the closed-form lower bound 0.5/(2r).
    let report = run_probe(&load("ex3_2.json"), &cfg).unwrap();
    assert!(report.diverging, "report: {report:?}");
    let last = report.per_radius.last().unwrap();
    assert!(
        last.max_ratio >= 0.5 / (2.0 * last.radius),
        "max ratio {} below bound {}",
        last.max_ratio,
        0.5 / (2.0 * last.radius)
    );

    // Stable instance: bounded ratios, no divergence.
    let report = run_probe(&load("ex4_1.json"), &cfg).unwrap();
    assert!(!report.diverging);
    assert!(report.modulus_estimate <= 1.0);

    let elapsed = started.elapsed().as_secs_f64();
    assert!(elapsed < 60.0, "took {elapsed:.1} s, budget is 60 s");
    println!("criterion 6: PASS - flat / diverging / bounded as derived, {elapsed:.1} s");
}

// ---------------------------------------------------------------------------
// Criterion 7: solver contract on feasible instances.
// ---------------------------------------------------------------------------

#[test]
fn criterion_7_solver_contract() {
    let mut rng = Rng(31337);
    let mut done = 0usize;
    while done < 20 {
        let sep_case = done % 2 == 1;
        let (spec, star_x, star_y, x0, y0) = if sep_case {
            let l = rng.int(1, 5);
            let n = rng.int(1, 5);
            let m = rng.int(1, 5);
            let a = rng.matrix(l, n, 1.5);
            let xstar = rng.point(n, 1.0);
            let ystar = rng.nonzero_point(m);
            let b_raw = rng.matrix(l, m, 1.5);
            let gap = a
                .matvec(&xstar)
                .unwrap()
                .sub(&b_raw.matvec(&ystar).unwrap())
                .unwrap();
            let yy = ystar.dot(&ystar).unwrap();
            let mut entries = Vec::new();
            for i in 0..l {
                for j in 0..m {
                    entries.push(b_raw.get(i, j) + gap[i] * ystar[j] / yy);
                }
            }
            let b = Matrix::new(l, m, entries).unwrap();
            // Well-conditioned stacked matrix keeps the linear rate usable.
            let mut stacked = Vec::new();
            for i in 0..l {
                let mut row = a.row(i).to_vec();
                row.extend(b.row(i).iter().map(|v| -v));
                stacked.push(row);
            }
            if Matrix::from_rows(&stacked).unwrap().rank(0.02) < l {
                continue;
            }
            let c = rng.set_around(&xstar);
            let q = rng.set_around(&ystar);
            let spec =
                ProblemSpec::sep(a, b, c, q, xstar.clone(), ystar.clone()).unwrap();
            let x0 = xstar.add(&rng.point(xstar.dim(), 0.8)).unwrap();
            let y0 = ystar.add(&rng.point(ystar.dim(), 0.8)).unwrap();
            (spec, xstar, Some(ystar), x0, Some(y0))
        } else {
            let n = rng.int(1, 5);
            let m = rng.int(1, 5);
            let a = rng.matrix(m, n, 1.5);
            if a.rank(0.02) < n.min(m) {
                continue;
            }
            let xstar = rng.point(n, 1.0);
            let c = rng.set_around(&xstar);
            let image = a.matvec(&xstar).unwrap();
            let q = rng.set_around(&image);
            let spec = ProblemSpec::sfp(a, c, q, xstar.clone()).unwrap();
            let x0 = xstar.add(&rng.point(xstar.dim(), 0.8)).unwrap();
            (spec, xstar, None, x0, None)
        };

        // Contract: residual 1e-8 within 1e5 iterations, feasible at 1e-7.
        let result = match &spec {
            ProblemSpec::Sfp { a, c, q, .. } => {
                solve_sfp(a, c, q, &x0, default_step_sfp(a), 100_000, 1e-8).unwrap()
            }
            ProblemSpec::Sep { a, b, c, q, .. } => solve_sep(
                a,
                b,
                c,
                q,
                &x0,
                y0.as_ref().unwrap(),
                default_step_sep(a, b),
                100_000,
                1e-8,
            )
            .unwrap(),
        };
        assert!(
            result.converged && result.residual <= 1e-8,
            "instance {done}: residual {} after {} iterations",
            result.residual,
            result.iterations
        );
        match &spec {
            ProblemSpec::Sfp { a, c, q, .. } => {
                assert!(c.contains(&result.x, 1e-7).unwrap());
                assert!(q.contains(&a.matvec(&result.x).unwrap(), 1e-7).unwrap());
            }
            ProblemSpec::Sep { c, q, .. } => {
                assert!(c.contains(&result.x, 1e-7).unwrap());
                assert!(q.contains(result.y.as_ref().unwrap(), 1e-7).unwrap());
            }
        }

        // Fejér monotonicity against the constructed solution point, stepped
        // one iteration at a time through the public interface.
        let mut distances = Vec::new();
        match &spec {
            ProblemSpec::Sfp { a, c, q, .. } => {
                let step = default_step_sfp(a);
                let mut x = x0.clone();
                for _ in 0..150 {
                    let d = x.sub(&star_x).unwrap().norm();
                    distances.push(d);
                    let out = solve_sfp(a, c, q, &x, step, 1, 0.0).unwrap();
                    x = out.x;
                    if out.converged {
                        break;
                    }
                }
            }
            ProblemSpec::Sep { a, b, c, q, .. } => {
                let step = default_step_sep(a, b);
                let mut x = x0.clone();
                let mut y = y0.clone().unwrap();
                let sy = star_y.as_ref().unwrap();
                for _ in 0..150 {
                    let dx = x.sub(&star_x).unwrap().norm();
                    let dy = y.sub(sy).unwrap().norm();
                    distances.push((dx * dx + dy * dy).sqrt());
                    let out = solve_sep(a, b, c, q, &x, &y, step, 1, 0.0).unwrap();
                    x = out.x;
                    y = out.y.unwrap();
                }
            }
        }
        for w in distances.windows(2) {
            assert!(
                w[1] <= w[0] + 1e-12,
                "instance {done}: distance to the solution increased: {} -> {}",
                w[0],
                w[1]
            );
        }
        done += 1;
    }
    println!("criterion 7: PASS - 20/20 solver-contract instances");
}

