//! Property suites for the geometric and dual-cone invariants.

use proptest::prelude::*;
use splitstab::cones::{build_preimage, cone_membership, intersection_trivial, sphere_oracle};
use splitstab::numerics::{Matrix, Vector};
use splitstab::sets::{ConvexSet, FGCone};

fn vec_(v: &[f64]) -> Vector {
    Vector::new(v.to_vec()).unwrap()
}

/// Random structured set together with a point guaranteed to lie in it.
fn arb_set_with_anchor(dim: usize) -> impl Strategy<Value = (ConvexSet, Vector)> {
    let anchor = prop::collection::vec(-1.5..1.5f64, dim);
    (anchor, 0..5u8, prop::collection::vec(0..4u8, dim), any::<u64>()).prop_map(
        move |(anchor, variant, coord_modes, seed)| {
            let a = vec_(&anchor);
            let mut mix = seed;
            let mut next = move || {
                mix = mix
                    .wrapping_add(0x9E37_79B9_7F4A_7C15)
                    .rotate_left(17)
                    .wrapping_mul(0x2545_F491_4F6C_DD1D);
                (mix >> 11) as f64 / (1u64 << 53) as f64
            };
            match variant {
                0 => {
                    // Box with a mix of interior, active, pinned, infinite sides.
                    let mut lower = Vec::with_capacity(dim);
                    let mut upper = Vec::with_capacity(dim);
                    for (i, mode) in coord_modes.iter().enumerate() {
                        let (l, u) = match mode {
                            0 => (anchor[i] - 0.5 - next(), anchor[i] + 0.5 + next()),
                            1 => (anchor[i], anchor[i] + 1.0 + next()),
                            2 => (anchor[i] - 1.0 - next(), anchor[i]),
                            _ => (f64::NEG_INFINITY, anchor[i] + next()),
                        };
                        lower.push(l);
                        upper.push(u);
                    }
                    (ConvexSet::box_set(lower, upper).unwrap(), a)
                }
                1 => {
                    // Polyhedron with rows anchored at the point. Nearly
                    // parallel row pairs are filtered out: they make cyclic
                    // projection legitimately slow, which is not what these
                    // properties are about.
                    let rows = 1 + (coord_modes[0] % 3) as usize;
                    let mut g: Vec<Vec<f64>> = Vec::new();
                    let mut offs = Vec::new();
                    for r in 0..rows {
                        let row: Vec<f64> = (0..dim).map(|_| next() * 2.0 - 1.0).collect();
                        let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
                        if norm < 1e-3 {
                            continue;
                        }
                        let parallel = g.iter().any(|kept: &Vec<f64>| {
                            let kn = kept.iter().map(|v| v * v).sum::<f64>().sqrt();
                            let dot: f64 =
                                kept.iter().zip(&row).map(|(x, y)| x * y).sum();
                            (dot / (kn * norm)).abs() > 0.9
                        });
                        if parallel {
                            continue;
                        }
                        let ga: f64 = row.iter().zip(a.entries()).map(|(x, y)| x * y).sum();
                        let slack = if r % 2 == 0 { 0.0 } else { next() };
                        g.push(row);
                        offs.push(ga + slack);
                    }
                    if g.is_empty() {
                        g.push((0..dim).map(|i| if i == 0 { 1.0 } else { 0.0 }).collect());
                        offs.push(anchor[0] + 1.0);
                    }
                    let set = ConvexSet::polyhedron(
                        Matrix::from_rows(&g).unwrap(),
                        Vector::new(offs).unwrap(),
                    )
                    .unwrap();
                    (set, a)
                }
                2 => (ConvexSet::singleton(a.clone()).unwrap(), a),
                3 => {
                    // Ball with the anchor inside or on the boundary.
                    let offset: Vec<f64> = (0..dim).map(|_| next() * 0.8 - 0.4).collect();
                    let center = a.sub(&vec_(&offset)).unwrap();
                    let off_norm = vec_(&offset).norm().max(1e-3);
                    let radius = if coord_modes[0] % 2 == 0 {
                        off_norm // anchor on the sphere
                    } else {
                        off_norm + 0.5
                    };
                    (ConvexSet::ball(center, radius).unwrap(), a)
                }
                _ => (ConvexSet::whole_space(dim).unwrap(), a),
            }
        },
    )
}

/// A random member of the set, derived by projecting a raw point.
fn member_from_raw(set: &ConvexSet, raw: &[f64]) -> Vector {
    set.project(&vec_(&raw[..set.dim()])).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn adjoint_identity(
        entries in prop::collection::vec(-3.0..3.0f64, 6),
        z in prop::collection::vec(-3.0..3.0f64, 2),
        x in prop::collection::vec(-3.0..3.0f64, 3),
    ) {
        let m = Matrix::new(2, 3, entries).unwrap();
        let z = vec_(&z);
        let x = vec_(&x);
        let lhs = m.tmatvec(&z).unwrap().dot(&x).unwrap();
        let rhs = z.dot(&m.matvec(&x).unwrap()).unwrap();
        let scale = 1.0 + lhs.abs().max(rhs.abs());
        prop_assert!((lhs - rhs).abs() <= 1e-12 * scale);
    }

    #[test]
    fn matvec_is_linear(
        entries in prop::collection::vec(-3.0..3.0f64, 6),
        u in prop::collection::vec(-3.0..3.0f64, 3),
        v in prop::collection::vec(-3.0..3.0f64, 3),
    ) {
        let m = Matrix::new(2, 3, entries).unwrap();
        let u = vec_(&u);
        let v = vec_(&v);
        let sum = m.matvec(&u.add(&v).unwrap()).unwrap();
        let parts = m.matvec(&u).unwrap().add(&m.matvec(&v).unwrap()).unwrap();
        let scale = 1.0 + sum.norm();
        prop_assert!(sum.sub(&parts).unwrap().norm() <= 1e-12 * scale);
    }

    #[test]
    fn projection_characterization(
        (set, _anchor) in arb_set_with_anchor(3),
        raw in prop::collection::vec(-4.0..4.0f64, 3),
        members in prop::collection::vec(prop::collection::vec(-4.0..4.0f64, 3), 20),
    ) {
        let x = vec_(&raw);
        let p = set.project(&x).unwrap();
        // The projection is characterized by <x - p, s - p> <= 0 on the set.
        for m in &members {
            let s = member_from_raw(&set, m);
            let lhs = x.sub(&p).unwrap().dot(&s.sub(&p).unwrap()).unwrap();
            prop_assert!(lhs <= 1e-9, "characterization violated: {lhs}");
        }
        // Idempotence.
        let pp = set.project(&p).unwrap();
        prop_assert!(pp.sub(&p).unwrap().norm() <= 1e-12 * (1.0 + p.norm()));
        // Fixed points of feasible inputs.
        prop_assert!(set.contains(&p, 1e-8).unwrap());
    }

    #[test]
    fn normal_cone_soundness(
        (set, anchor) in arb_set_with_anchor(3),
        members in prop::collection::vec(prop::collection::vec(-4.0..4.0f64, 3), 20),
    ) {
        let cone = set.normal_cone(&anchor, 1e-9).unwrap();
        for m in &members {
            let s = member_from_raw(&set, m);
            let diff = s.sub(&anchor).unwrap();
            for ray in cone.rays() {
                prop_assert!(ray.dot(&diff).unwrap() <= 1e-9);
            }
            for lin in cone.lineality() {
                prop_assert!(lin.dot(&diff).unwrap().abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn interior_points_have_trivial_cones(
        (set, anchor) in arb_set_with_anchor(3),
    ) {
        if set.is_interior(&anchor, 1e-6).unwrap() {
            let cone = set.normal_cone(&anchor, 1e-9).unwrap();
            prop_assert!(cone.is_trivial());
        }
    }
}

/// Random finitely generated cone in the given dimension.
fn arb_cone(dim: usize) -> impl Strategy<Value = FGCone> {
    (
        prop::collection::vec(prop::collection::vec(-1.0..1.0f64, dim), 0..3),
        prop::collection::vec(prop::collection::vec(-1.0..1.0f64, dim), 0..2),
    )
        .prop_map(move |(rays, lins)| {
            let keep = |vs: Vec<Vec<f64>>| -> Vec<Vector> {
                vs.into_iter()
                    .filter(|v| v.iter().map(|x| x * x).sum::<f64>().sqrt() > 0.1)
                    .map(|v| vec_(&v))
                    .collect()
            };
            FGCone::new(dim, keep(rays), keep(lins)).unwrap()
        })
}

fn arb_matrix(rows: usize, cols: usize) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(-2.0..2.0f64, rows * cols)
        .prop_map(move |e| Matrix::new(rows, cols, e).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn battery_is_positively_scale_invariant(
        a in arb_matrix(2, 2),
        b in arb_matrix(2, 2),
        k1 in arb_cone(2),
        k2 in arb_cone(2),
        t in 0.01..100.0f64,
        s in 0.01..100.0f64,
    ) {
        let base = intersection_trivial(
            &build_preimage(a.clone(), k1.clone()).unwrap(),
            &build_preimage(b.clone(), k2.clone()).unwrap(),
            1e-9,
        ).unwrap();
        let scaled = intersection_trivial(
            &build_preimage(a.scale(t), k1).unwrap(),
            &build_preimage(b.scale(s), k2).unwrap(),
            1e-9,
        ).unwrap();
        if !base.marginal && !scaled.marginal {
            prop_assert_eq!(base.trivial, scaled.trivial);
        }
    }

    #[test]
    fn witnesses_pass_membership_recheck(
        a in arb_matrix(2, 2),
        b in arb_matrix(2, 2),
        k1 in arb_cone(2),
        k2 in arb_cone(2),
    ) {
        let p1 = build_preimage(a, k1).unwrap();
        let p2 = build_preimage(b, k2).unwrap();
        let r = intersection_trivial(&p1, &p2, 1e-9).unwrap();
        if let Some(w) = &r.witness {
            prop_assert!((w.norm_inf() - 1.0).abs() <= 1e-9);
            let tol = 1e-8; // ten times the battery tolerance
            prop_assert!(cone_membership(p1.target(), &p1.map().tmatvec(w).unwrap(), tol).unwrap());
            prop_assert!(cone_membership(p2.target(), &p2.map().tmatvec(w).unwrap(), tol).unwrap());
        }
    }

    #[test]
    fn condition_is_symmetric_under_swap(
        a in arb_matrix(2, 2),
        b in arb_matrix(2, 2),
        nc in arb_cone(2),
        nq in arb_cone(2),
    ) {
        // Swapping the roles of the two blocks mirrors the intersection
        // through z -> -z, which cannot change triviality.
        let fwd = intersection_trivial(
            &build_preimage(a.clone(), nc.negate()).unwrap(),
            &build_preimage(b.clone(), nq.clone()).unwrap(),
            1e-9,
        ).unwrap();
        let swapped = intersection_trivial(
            &build_preimage(b, nq.negate()).unwrap(),
            &build_preimage(a, nc).unwrap(),
            1e-9,
        ).unwrap();
        if !fwd.marginal && !swapped.marginal {
            prop_assert_eq!(fwd.trivial, swapped.trivial);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn battery_matches_sphere_scan_in_2d(
        a in arb_matrix(2, 2),
        b in arb_matrix(2, 2),
        k1 in arb_cone(2),
        k2 in arb_cone(2),
    ) {
        let p1 = build_preimage(a, k1).unwrap();
        let p2 = build_preimage(b, k2).unwrap();
        let battery = intersection_trivial(&p1, &p2, 1e-9).unwrap();
        if battery.marginal {
            return Ok(());
        }
        let scan = sphere_oracle(&p1, &p2, 256, 1e-9).unwrap();
        prop_assert_eq!(battery.trivial, scan.is_none());
    }
}
