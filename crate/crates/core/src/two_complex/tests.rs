use super::*;
use crate::group_algebra::IrrepLabel;
use rand::SeedableRng;

fn table(s: &str) -> IrrepTable {
    IrrepTable::new(s.parse().unwrap()).unwrap()
}

fn z(c: &TwoComplex, t: &IrrepTable, m: Method) -> Complex64 {
    partition_function_with(c, t, None, m).unwrap().value
}

fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol * (1.0 + b.norm())
}

fn loop_state(t: &IrrepTable, r: u32) -> SpinNetwork {
    SpinNetwork::single_loop(t.spec(), IrrepLabel(r))
}

/// `sum_R d_R^(2 - 2g)` from the character table.
fn surface_oracle(t: &IrrepTable, g: i32) -> f64 {
    t.irreps().iter().map(|&r| (t.dim(r).unwrap() as f64).powi(2 - 2 * g)).sum()
}

#[test]
fn closed_surface_examples() {
    let s3 = table("S3");
    for m in [Method::GroupSum, Method::BruteForce, Method::CharacterExpansion] {
        assert!(close(z(&corpus::sphere(), &s3, m), Complex64::new(6.0, 0.0), 1e-12));
        assert!(close(z(&corpus::torus(), &s3, m), Complex64::new(3.0, 0.0), 1e-12));
        assert!(close(z(&corpus::genus2(), &s3, m), Complex64::new(2.25, 0.0), 1e-12));
        assert!(close(z(&corpus::torus(), &table("Z4"), m), Complex64::new(4.0, 0.0), 1e-12));
    }
}

#[test]
fn surfaces_match_character_formula() {
    for g in ["Z2", "Z5", "S3", "Q8"] {
        let t = table(g);
        for genus in 0..3 {
            let v = z(&corpus::surface(genus), &t, Method::BruteForce);
            assert!(close(v, Complex64::new(surface_oracle(&t, genus as i32), 0.0), 1e-12), "{g} genus {genus}");
        }
    }
}

#[test]
fn su2_surfaces_are_truncated_sums() {
    let t = table("SU2:2");
    let torus = z(&corpus::torus(), &t, Method::Auto);
    assert!(close(torus, Complex64::new(5.0, 0.0), 1e-10));
    let g2 = z(&corpus::genus2(), &t, Method::Auto);
    assert!(close(g2, Complex64::new(surface_oracle(&t, 2), 0.0), 1e-10));
}

#[test]
fn empty_complex_is_one() {
    let v = partition_function(&TwoComplex::default(), &table("S3"), None).unwrap();
    assert_eq!(v.value, Complex64::new(1.0, 0.0));
    assert_eq!(v.exactness, Exactness::Exact);
}

#[test]
fn face_holonomy_examples() {
    let t = table("S3");
    let c = corpus::torus();
    let e = t.identity();
    let id: BTreeMap<usize, GroupElement> = [(0, e), (1, e)].into();
    assert_eq!(face_holonomy(&c, &t, 0, &id).unwrap(), e);
    let u = t.element_by_name("[021]").unwrap();
    let v = t.element_by_name("[120]").unwrap();
    let a: BTreeMap<usize, GroupElement> = [(0, u), (1, v)].into();
    let expect = [u, v, t.invert(&u).unwrap(), t.invert(&v).unwrap()]
        .iter()
        .fold(e, |h, x| t.compose(&h, x).unwrap());
    assert_eq!(face_holonomy(&c, &t, 0, &a).unwrap(), expect);
    assert!(matches!(
        face_holonomy(&c, &t, 0, &[(0, u)].into()),
        Err(TwoComplexError::MissingAssignment { edge: 1, .. })
    ));
    let disk = corpus::disk();
    assert_eq!(face_holonomy(&disk, &t, 0, &[(0, v)].into()).unwrap(), v);
}

#[test]
fn face_kernel_examples() {
    let t = table("S3");
    let e = t.identity();
    assert!(close(face_amplitude_kernel(&t, &[e], &e).unwrap(), Complex64::new(10.0, 0.0), 1e-14));
    let c3 = t.element_by_name("[120]").unwrap();
    assert!(close(face_amplitude_kernel(&t, &[c3], &e).unwrap(), Complex64::new(-2.0, 0.0), 1e-14));
    let d = face_amplitude_kernel(&t, &[], &e).unwrap();
    assert!(close(d, t.delta_kernel(&e).unwrap(), 1e-14));
}

#[test]
fn boundary_assignment_gives_delta() {
    let t = table("S3");
    let disk = corpus::disk();
    for u in t.elements().unwrap() {
        let v = partition_function(&disk, &t, Some(&[(0, u)].into())).unwrap().value;
        assert!(close(v, t.delta_kernel(&u).unwrap(), 1e-12));
    }
    assert!(partition_function(&disk, &t, Some(&BTreeMap::new())).is_err());
    assert!(partition_function(&disk, &t, Some(&[(0, t.identity()), (7, t.identity())].into())).is_err());
}

#[test]
fn disk_inner_products() {
    let t = table("S3");
    let opts = InnerProductOptions::default();
    let two = loop_state(&t, 2);
    let v = physical_inner_product(&two, &two, &corpus::disk(), &t, &opts).unwrap();
    assert!(close(v.value, Complex64::new(4.0, 0.0), 1e-12));
    let (triv, sign) = (loop_state(&t, 0), loop_state(&t, 1));
    let v = physical_inner_product(&triv, &sign, &corpus::disk(), &t, &opts).unwrap();
    assert!(close(v.value, Complex64::new(1.0, 0.0), 1e-12));
    for m in [Method::BruteForce, Method::CharacterExpansion] {
        let o = InnerProductOptions { method: m, ..Default::default() };
        let v = physical_inner_product(&two, &two, &corpus::disk(), &t, &o).unwrap();
        assert!(close(v.value, Complex64::new(4.0, 0.0), 1e-12));
    }
}

#[test]
fn mismatched_boundary_is_zero() {
    let t = table("S3");
    let lp = loop_state(&t, 0);
    let theta = SpinNetwork::new(t.spec(), Graph::theta(), (0..3).map(|l| (l, IrrepLabel(0))).collect());
    let v = physical_inner_product(&lp, &theta, &corpus::disk(), &t, &Default::default()).unwrap();
    assert_eq!(v.value, Complex64::new(0.0, 0.0));
}

#[test]
fn group_mismatch_is_an_error() {
    let t = table("S3");
    let other = loop_state(&table("Z3"), 0);
    let r = physical_inner_product(&other, &other, &corpus::disk(), &t, &Default::default());
    assert!(matches!(r, Err(TwoComplexError::GroupMismatch { .. })));
}

#[test]
fn annulus_projects_onto_matching_irreps() {
    let t = table("S3");
    let c = corpus::annulus();
    for a in 0..3 {
        for b in 0..3 {
            let v = physical_inner_product(&loop_state(&t, a), &loop_state(&t, b), &c, &t, &Default::default())
                .unwrap()
                .value;
            let expect = if a == b { 1.0 } else { 0.0 };
            assert!(close(v, Complex64::new(expect, 0.0), 1e-12), "{a} {b} {v}");
        }
    }
}

#[test]
fn annulus_idempotence() {
    let t = table("S3");
    let states: Vec<SpinNetwork> = (0..3).map(|r| loop_state(&t, r)).collect();
    let rep = projector_idempotence_check(&corpus::annulus(), &t, &states, &Default::default()).unwrap();
    assert_eq!(rep.pairs, 9);
    assert!(rep.max_deviation < 1e-12);

    let su2 = table("SU2:2");
    let states: Vec<SpinNetwork> = (0..3).map(|r| loop_state(&su2, r)).collect();
    let rep = projector_idempotence_check(&corpus::annulus(), &su2, &states, &Default::default()).unwrap();
    assert!(rep.max_deviation <= 1e-10);
}

#[test]
fn closed_idempotence_compares_partition_functions() {
    let t = table("S3");
    let rep = projector_idempotence_check(&corpus::torus(), &t, &[], &Default::default()).unwrap();
    assert_eq!(rep.pairs, 1);
    assert!(close(rep.single[0].value, Complex64::new(3.0, 0.0), 1e-12));
    assert_eq!(rep.max_deviation, 0.0);
}

#[test]
fn engines_agree_on_cylinders() {
    let t = table("S3");
    let theta = Graph::theta();
    let c = corpus::cylinder_over(&theta);
    let mk = |spins: [u32; 3]| SpinNetwork::new(t.spec(), theta.clone(), (0..3).map(|l| (l, IrrepLabel(spins[l]))).collect());
    let states = [mk([2, 2, 2]), mk([0, 2, 2]), mk([1, 2, 2]), mk([0, 0, 0])];
    for a in &states {
        for b in &states {
            let vals: Vec<Complex64> = [Method::GroupSum, Method::BruteForce, Method::CharacterExpansion]
                .iter()
                .map(|&m| {
                    let o = InnerProductOptions { method: m, ..Default::default() };
                    physical_inner_product(a, b, &c, &t, &o).unwrap().value
                })
                .collect();
            assert!(close(vals[0], vals[1], 1e-12) && close(vals[2], vals[1], 1e-12), "{vals:?}");
        }
    }
}

#[test]
fn conjugate_symmetry() {
    let t = table("S3");
    let c = corpus::annulus();
    let cr = c.reversed();
    for a in 0..3 {
        for b in 0..3 {
            let (x, y) = (loop_state(&t, a), loop_state(&t, b));
            let fwd = physical_inner_product(&x, &y, &c, &t, &Default::default()).unwrap().value;
            let back = physical_inner_product(&y, &x, &cr, &t, &Default::default()).unwrap().value;
            assert!(close(fwd, back.conj(), 1e-12));
        }
    }
}

#[test]
fn disjoint_union_multiplies() {
    let t = table("Q8");
    let a = corpus::torus();
    let b = corpus::sphere();
    let u = a.disjoint_union(&b);
    assert!(close(z(&u, &t, Method::Auto), z(&a, &t, Method::Auto) * z(&b, &t, Method::Auto), 1e-12));
}

#[test]
fn subdivision_examples() {
    let t = table("S3");
    let s = corpus::sphere().apply(Move::SplitEdge { edge: 0 }).unwrap();
    assert_eq!((s.vertices.len(), s.edges.len(), s.faces.len()), (2, 2, 2));
    assert!(close(z(&s, &t, Method::BruteForce), Complex64::new(6.0, 0.0), 1e-12));
    let tor = corpus::torus().apply(Move::SplitFace { face: 0, i: 0, j: 2 }).unwrap();
    assert_eq!(tor.faces.len(), 2);
    assert!(close(z(&tor, &t, Method::BruteForce), Complex64::new(3.0, 0.0), 1e-12));
}

#[test]
fn random_moves_preserve_z() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    for g in ["Z3", "S3"] {
        let t = table(g);
        for (name, c) in corpus::all() {
            let z0 = z(&c, &t, Method::Auto);
            let mut cur = c.clone();
            for _ in 0..5 {
                let Some(m) = cur.random_interior_move(&mut rng) else { break };
                cur = cur.apply(m).unwrap();
            }
            if c.boundaries.is_empty() {
                assert!(close(z(&cur, &t, Method::GroupSum), z0, 1e-12), "{g} {name}");
            }
        }
    }
}
