use std::collections::BTreeMap;

use proptest::prelude::*;
use qpmut_core::canonical::{canonical_form, canonicalize};
use qpmut_core::graded::graded_iso;
use qpmut_core::quiver::{fz_mutate, fz_mutate_matrix};
use qpmut_core::{rational, wire, ArrowId, CycleClass, ExchangeMatrix, GradedQp, Potential, Qp, Quiver, Vertex};

fn matrix(n: usize, max: i64) -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::vec(-max..=max, n * (n - 1) / 2).prop_map(move |upper| {
        let mut b = vec![vec![0i64; n]; n];
        let mut it = upper.into_iter();
        for j in 0..n {
            for k in j + 1..n {
                let x = it.next().unwrap();
                b[j][k] = x;
                b[k][j] = -x;
            }
        }
        b
    })
}

fn quiver(max_n: usize, max: i64) -> impl Strategy<Value = Quiver> {
    (1..=max_n).prop_flat_map(move |n| matrix(n, max)).prop_map(|b| {
        let vs: Vec<Vertex> = (1..=b.len() as Vertex).collect();
        Quiver::from_exchange_matrix(&ExchangeMatrix::new(vs, b).unwrap())
    })
}

fn relabeled(q: &Quiver, perm: &[usize]) -> Quiver {
    let map: BTreeMap<Vertex, Vertex> = q.vertices().iter().enumerate().map(|(k, &v)| (v, perm[k] as Vertex + 1)).collect();
    q.relabel_vertices(&map).unwrap()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for k in 0..n {
            let mut q = p.clone();
            q.insert(k, n - 1);
            out.push(q);
        }
    }
    out
}

fn brute_force_iso(a: &Quiver, b: &Quiver) -> bool {
    let (ma, mb) = (a.to_exchange_matrix().unwrap().entries, b.to_exchange_matrix().unwrap().entries);
    let n = ma.len();
    n == mb.len() && permutations(n).iter().any(|p| (0..n).all(|j| (0..n).all(|k| ma[j][k] == mb[p[j]][p[k]])))
}

fn word(max_len: usize) -> impl Strategy<Value = Vec<ArrowId>> {
    prop::collection::vec(prop::sample::select(vec!["a", "b", "c", "10", "2"]), 1..=max_len)
        .prop_map(|w| w.into_iter().map(ArrowId::from).collect())
}

/// The three-cycle `1 -> 2 -> 3 -> 1` with two parallel copies of each arrow.
fn doubled_triangle() -> Quiver {
    Quiver::from_edges(1..=3, &[(1, 2), (1, 2), (2, 3), (2, 3), (3, 1), (3, 1)]).unwrap()
}

fn potential_on(q: &Quiver) -> impl Strategy<Value = Potential> {
    let q = q.clone();
    prop::collection::vec((0..2usize, 0..2usize, 0..2usize, -3i64..=3), 0..6).prop_map(move |choices| {
        let pick = |s: Vertex, t: Vertex, k: usize| q.arrows().iter().filter(|a| a.source == s && a.target == t).nth(k).unwrap().id.clone();
        let terms = choices.into_iter().map(|(x, y, z, c)| (vec![pick(1, 2, x), pick(2, 3, y), pick(3, 1, z)], rational::int(c)));
        Potential::new(terms, 12).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn matrix_encoding_round_trips(b in (1usize..=6).prop_flat_map(|n| matrix(n, 3))) {
        let vs: Vec<Vertex> = (1..=b.len() as Vertex).collect();
        let m = ExchangeMatrix::new(vs, b).unwrap();
        let q = Quiver::from_exchange_matrix(&m);
        prop_assert!(!q.has_loops_or_two_cycles());
        prop_assert_eq!(q.to_exchange_matrix().unwrap(), m);
    }

    #[test]
    fn fz_mutation_is_an_involution(q in quiver(6, 3), i in 0usize..6) {
        let v = q.vertices()[i % q.num_vertices()];
        let twice = fz_mutate(&fz_mutate(&q, v).unwrap(), v).unwrap();
        prop_assert_eq!(twice.to_exchange_matrix().unwrap(), q.to_exchange_matrix().unwrap());
    }

    #[test]
    fn fz_mutation_matches_matrix_mutation(q in quiver(6, 3), i in 0usize..6) {
        let k = i % q.num_vertices();
        let via_quiver = fz_mutate(&q, q.vertices()[k]).unwrap().to_exchange_matrix().unwrap();
        let via_matrix = fz_mutate_matrix(&q.to_exchange_matrix().unwrap(), k).unwrap();
        prop_assert_eq!(via_quiver, via_matrix);
    }

    #[test]
    fn canonical_form_ignores_labels(q in quiver(6, 2), seed in any::<u64>()) {
        let n = q.num_vertices();
        let perms = permutations(n);
        let p = &perms[(seed % perms.len() as u64) as usize];
        prop_assert_eq!(canonical_form(&q), canonical_form(&relabeled(&q, p)));
    }

    #[test]
    fn canonical_form_decides_isomorphism(a in quiver(5, 1), b in quiver(5, 1)) {
        prop_assert_eq!(canonical_form(&a) == canonical_form(&b), brute_force_iso(&a, &b));
    }

    #[test]
    fn canonical_vertex_order_is_an_isomorphism(q in quiver(5, 2), seed in any::<u64>()) {
        let perms = permutations(q.num_vertices());
        let r = relabeled(&q, &perms[(seed % perms.len() as u64) as usize]);
        let (cq, cr) = (canonicalize(&q, None, None), canonicalize(&r, None, None));
        let map = cq.vertex_map_to(&cr);
        prop_assert_eq!(q.relabel_vertices(&map).unwrap().to_exchange_matrix().unwrap(), r.to_exchange_matrix().unwrap());
    }

    #[test]
    fn cycle_classes_are_rotation_invariant(w in word(7), k in 0usize..7) {
        let k = k % w.len();
        let rotated: Vec<ArrowId> = w[k..].iter().chain(&w[..k]).cloned().collect();
        let c = CycleClass::new(w.clone());
        prop_assert_eq!(&c, &CycleClass::new(rotated));
        prop_assert!((0..w.len()).all(|j| CycleClass::new(c.rotated(j)) == c));
        prop_assert!((0..w.len()).all(|j| c.arrows() <= &c.rotated(j)[..]));
    }

    #[test]
    fn cyclic_derivative_is_linear(w1 in potential_on(&doubled_triangle()), w2 in potential_on(&doubled_triangle()), c in -3i64..=3) {
        let q = doubled_triangle();
        let c = rational::int(c);
        let sum = w1.plus(&w2.scale(&c));
        for a in q.arrows() {
            let lhs = sum.cyclic_derivative(&q, &a.id).unwrap();
            let rhs = w1.cyclic_derivative(&q, &a.id).unwrap().plus(&w2.cyclic_derivative(&q, &a.id).unwrap().scale(&c));
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn qp_json_is_a_normal_form(w in potential_on(&doubled_triangle())) {
        let qp = Qp::new(doubled_triangle(), w).unwrap();
        let s = wire::to_normalized_string(&wire::qp_to_json(&qp));
        let back = wire::qp_from_json(&wire::parse(&s).unwrap()).unwrap();
        prop_assert_eq!(&back, &qp);
        prop_assert_eq!(wire::to_normalized_string(&wire::qp_to_json(&back)), s);
    }

    #[test]
    fn left_then_right_graded_mutation_is_identity(q in quiver(5, 2), i in 0usize..5) {
        let v = q.vertices()[i % q.num_vertices()];
        let g = GradedQp::ungraded(Qp::trivial(q)).unwrap();
        let back = g.left_mutate(v, 12).unwrap().right_mutate(v, 12).unwrap();
        prop_assert!(graded_iso(&back, &g));
        let back = g.right_mutate(v, 12).unwrap().left_mutate(v, 12).unwrap();
        prop_assert!(graded_iso(&back, &g));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    // certified dimensions are exact, so they must agree whenever both exist
    fn reduction_and_double_mutation_keep_jacobi_dimension(w in potential_on(&doubled_triangle()), i in 1u32..=3) {
        let qp = Qp::new(doubled_triangle(), w).unwrap();
        let before = qp.jacobi_finite(6).unwrap();
        let premutated = qp.premutate(i).unwrap();
        let full = premutated.jacobi_finite(6).unwrap();
        let reduced = premutated.reduce(12).unwrap().0.jacobi_finite(6).unwrap();
        if full.is_finite() && reduced.is_finite() {
            prop_assert_eq!(reduced.dim(), full.dim());
        }
        let mutated = qp.dwz_mutate(i, 12).unwrap();
        prop_assume!(!mutated.quiver.has_two_cycle_at(i) && !mutated.quiver.has_loop_at(i));
        let twice = mutated.dwz_mutate(i, 12).unwrap().jacobi_finite(6).unwrap();
        if before.is_finite() && twice.is_finite() {
            prop_assert_eq!(twice.dim(), before.dim());
        }
    }
}
