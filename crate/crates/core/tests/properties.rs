use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use tqnn::classifier::{classify, randomize_labels, apply_label_permutation, topological_dataset, BoundaryState, Template};
use tqnn::group_algebra::{GroupElement, GroupSpec, HaarOptions, IrrepLabel, IrrepTable, Su2Element};
use tqnn::path_integral::{brute_force_path_sum, propagate, ParticleModel, PathLattice, Potential, Signature};
use tqnn::spin_network::{CoherentWeights, Graph, SpinNetwork};
use tqnn::two_complex::{corpus, partition_function};

const FINITE: [&str; 5] = ["Z2", "Z3", "Z6", "S3", "Q8"];

fn table(s: &str) -> IrrepTable {
    IrrepTable::new(s.parse().unwrap()).unwrap()
}

fn element(t: &IrrepTable, rng: &mut ChaCha8Rng) -> GroupElement {
    use rand::Rng;
    match t.order() {
        Some(n) => GroupElement::Finite(rng.random_range(0..n)),
        None => GroupElement::Su2(Su2Element::random(rng)),
    }
}

fn z(c: &tqnn::two_complex::TwoComplex, t: &IrrepTable) -> Complex64 {
    partition_function(c, t, None).unwrap().value
}

fn rel_close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol * b.norm().max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn gauge_invariance(seed in any::<u64>(), su2 in any::<bool>()) {
        let (t, spins) = if su2 {
            (table("SU2:4"), [1, 1, 2])
        } else {
            (table("S3"), [2, 2, 2])
        };
        let sn = SpinNetwork::new(t.spec(), Graph::theta(), (0..3).map(|l| (l, IrrepLabel(spins[l]))).collect());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let hol: BTreeMap<usize, GroupElement> = (0..3).map(|l| (l, element(&t, &mut rng))).collect();
        let g: BTreeMap<usize, GroupElement> = sn.graph.nodes.iter().map(|&n| (n, element(&t, &mut rng))).collect();
        let gauged: BTreeMap<usize, GroupElement> = sn
            .graph
            .links
            .iter()
            .map(|l| {
                let u = t.compose(&g[&l.dst], &t.compose(&hol[&l.id], &t.invert(&g[&l.src]).unwrap()).unwrap()).unwrap();
                (l.id, u)
            })
            .collect();
        let a = sn.evaluate_cylindrical(&t, &hol).unwrap();
        let b = sn.evaluate_cylindrical(&t, &gauged).unwrap();
        prop_assert!((a - b).norm() < 1e-12, "{a} {b}");
    }

    #[test]
    fn character_orthogonality(gi in 0..FINITE.len(), r in 0usize..8, s in 0usize..8) {
        let t = table(FINITE[gi]);
        let irreps = t.irreps();
        let (r, s) = (irreps[r % irreps.len()], irreps[s % irreps.len()]);
        let v = t
            .haar_integrate(|u| t.character(r, u).unwrap() * t.character(s, u).unwrap().conj(), HaarOptions::default())
            .unwrap()
            .value;
        let want = if r == s { 1.0 } else { 0.0 };
        prop_assert!((v - want).norm() <= 1e-12);
    }

    #[test]
    fn su2_orthogonality(j in 0u32..=10, k in 0u32..=10) {
        let t = table("SU2:10");
        let v = t
            .haar_integrate(
                |u| t.character(IrrepLabel(j), u).unwrap() * t.character(IrrepLabel(k), u).unwrap(),
                HaarOptions::default(),
            )
            .unwrap()
            .value;
        let want = if j == k { 1.0 } else { 0.0 };
        prop_assert!((v - want).norm() <= 1e-8);
    }

    #[test]
    fn delta_reproduces_class_functions(gi in 0..FINITE.len(), r in 0usize..8, seed in any::<u64>()) {
        let t = table(FINITE[gi]);
        let irreps = t.irreps();
        let r = irreps[r % irreps.len()];
        let g = element(&t, &mut ChaCha8Rng::seed_from_u64(seed));
        let ginv = t.invert(&g).unwrap();
        let v = t
            .haar_integrate(
                |u| t.delta_kernel(&t.compose(u, &ginv).unwrap()).unwrap() * t.character(r, u).unwrap(),
                HaarOptions::default(),
            )
            .unwrap()
            .value;
        prop_assert!((v - t.character(r, &g).unwrap()).norm() <= 1e-12);
    }

    #[test]
    fn characters_are_class_functions(gi in 0..FINITE.len() + 1, seed in any::<u64>()) {
        let t = if gi == FINITE.len() { table("SU2:6") } else { table(FINITE[gi]) };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (g, h) = (element(&t, &mut rng), element(&t, &mut rng));
        let conj = t.compose(&h, &t.compose(&g, &t.invert(&h).unwrap()).unwrap()).unwrap();
        for r in t.irreps() {
            prop_assert!((t.character(r, &conj).unwrap() - t.character(r, &g).unwrap()).norm() < 1e-12);
        }
    }

    #[test]
    fn subdivision_invariance(ci in 0..corpus::NAMES.len(), gi in 0..FINITE.len(), seed in any::<u64>()) {
        let t = table(FINITE[gi]);
        let c0 = corpus::by_name(corpus::NAMES[ci]).unwrap();
        let z0 = z(&c0, &t);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut c = c0;
        for _ in 0..3 {
            if let Some(mv) = c.random_interior_move(&mut rng) {
                c = c.apply(mv).unwrap();
            }
        }
        prop_assert!(rel_close(z(&c, &t), z0, 1e-12));
    }

    #[test]
    fn disjoint_union_multiplies(a in 2..corpus::NAMES.len(), b in 2..corpus::NAMES.len(), gi in 0..FINITE.len()) {
        let t = table(FINITE[gi]);
        let (ca, cb) = (corpus::by_name(corpus::NAMES[a]).unwrap(), corpus::by_name(corpus::NAMES[b]).unwrap());
        prop_assert!(rel_close(z(&ca.disjoint_union(&cb), &t), z(&ca, &t) * z(&cb, &t), 1e-12));
    }

    #[test]
    fn transfer_matrix_matches_path_sum(omega in 0.0f64..2.0, t_out in 0.5f64..3.0, n in 3usize..=4) {
        let lattice = PathLattice { x_min: -1.0, x_max: 1.0, n_points: 5, t_in: 0.0, t_out, slices: n };
        let model = ParticleModel {
            potential: Potential::Harmonic { omega },
            ..ParticleModel::free(Signature::Euclidean)
        };
        let p = propagate(&model, &lattice, Default::default()).unwrap();
        for a in lattice.positions() {
            for b in lattice.positions() {
                let bf = brute_force_path_sum(&model, &lattice, a, b).unwrap();
                prop_assert!((p.at(b, a).unwrap() - bf).norm() <= 1e-12 * (1.0 + bf.norm()));
            }
        }
    }

    #[test]
    fn classification_is_a_probability_vector(means in proptest::collection::vec(0.0f64..3.0, 2..5), m in 0.0f64..3.0) {
        let t = table("SU2:6");
        let mk = |x: f64| BoundaryState::Coherent {
            group: t.spec(),
            graph: Graph::single_loop(),
            weights: CoherentWeights::with_default_spreads(BTreeMap::from([(0, x)])),
        };
        let classes: BTreeMap<usize, BoundaryState> = means.iter().enumerate().map(|(i, &x)| (i, mk(x))).collect();
        let c = classify(&mk(m), &classes, &Template::Cylinder, &t).unwrap();
        let sum: f64 = c.probabilities.values().sum();
        prop_assert!((sum - 1.0).abs() < 1e-12);
        prop_assert!(c.probabilities.values().all(|&p| p >= 0.0));
    }

    #[test]
    fn label_permutation_inverts(seed in any::<u64>()) {
        let graphs = [Graph::single_loop(), Graph::theta(), Graph::bouquet(2)];
        let ds = topological_dataset(GroupSpec::S3, &graphs, 3, 1, 2).unwrap();
        let (r, perm) = randomize_labels(&ds, seed).unwrap();
        let inv: BTreeMap<usize, usize> = perm.iter().map(|(&a, &b)| (b, a)).collect();
        prop_assert_eq!(inv.len(), perm.len());
        prop_assert_eq!(apply_label_permutation(&r, &inv).unwrap(), ds);
    }
}
