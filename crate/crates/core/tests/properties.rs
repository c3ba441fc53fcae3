//! Property tests for the algebraic invariants that hold exactly or to tight
//! float tolerances.

use num_complex::Complex64;
use pptmaps::channel::{compose, make_gamma, reshuffle};
use pptmaps::graphs::{parse_graph, Graph};
use pptmaps::matcore::{kron, partial_transpose, ComplexMatrix};
use proptest::prelude::*;

fn complex_entries(n: usize) -> impl Strategy<Value = Vec<Complex64>> {
    proptest::collection::vec(
        (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| Complex64::new(re, im)),
        n,
    )
}

fn adjacency(p: usize) -> impl Strategy<Value = ComplexMatrix> {
    proptest::collection::vec(proptest::bool::ANY, p * (p - 1) / 2).prop_map(move |bits| {
        let mut a = ComplexMatrix::zeros(p, p);
        let mut idx = 0;
        for i in 0..p {
            for j in (i + 1)..p {
                if bits[idx] {
                    a[(i, j)] = Complex64::new(1.0, 0.0);
                    a[(j, i)] = Complex64::new(1.0, 0.0);
                }
                idx += 1;
            }
        }
        a
    })
}

fn graph(p: usize) -> impl Strategy<Value = Graph> {
    proptest::collection::vec(proptest::bool::ANY, p * (p - 1) / 2).prop_map(move |bits| {
        let mut g = Graph::new(p);
        let mut idx = 0;
        for i in 0..p {
            for j in (i + 1)..p {
                if bits[idx] {
                    g.add_edge(i, j).unwrap();
                }
                idx += 1;
            }
        }
        g
    })
}

proptest! {
    #[test]
    fn partial_transpose_is_an_exact_involution(
        entries in complex_entries(36),
        (p, q) in prop_oneof![Just((2usize, 3usize)), Just((3, 2)), Just((6, 1)), Just((1, 6))],
    ) {
        let m = ComplexMatrix::new(6, 6, entries).hermitian_part();
        let pt = partial_transpose(&m, p, q).unwrap();
        let back = partial_transpose(&pt, p, q).unwrap();
        // Entry permutation: zero ulps of drift.
        prop_assert_eq!(back, m.clone());
        prop_assert_eq!(pt.trace(), m.trace());
    }

    #[test]
    fn reshuffle_is_an_exact_involution(entries in complex_entries(36), q in 2usize..=3) {
        let p = 6 / q;
        let m = ComplexMatrix::new(6, 6, entries);
        let back = reshuffle(&reshuffle(&m, p, q).unwrap(), p, q).unwrap();
        prop_assert_eq!(back, m);
    }

    #[test]
    fn kron_is_associative(
        a in complex_entries(4),
        b in complex_entries(4),
        c in complex_entries(4),
    ) {
        let a = ComplexMatrix::new(2, 2, a);
        let b = ComplexMatrix::new(2, 2, b);
        let c = ComplexMatrix::new(2, 2, c);
        let left = kron(&kron(&a, &b), &c);
        let right = kron(&a, &kron(&b, &c));
        prop_assert!(left.max_abs_diff(&right) <= 1e-14);
    }

    #[test]
    fn gamma_is_a_semigroup_in_t(
        a in adjacency(5),
        s in 0.0f64..10.0,
        t in 0.0f64..10.0,
    ) {
        let lhs = compose(&make_gamma(s, &a).unwrap(), &make_gamma(t, &a).unwrap()).unwrap();
        let rhs = make_gamma(s * t, &a).unwrap();
        prop_assert!(lhs.choi_distance(&rhs) <= 1e-10);
    }

    #[test]
    fn channel_reshuffle_round_trip(a in adjacency(4), t in 0.0f64..5.0) {
        let g = make_gamma(t, &a).unwrap();
        let back = reshuffle(g.transfer(), 4, 4).unwrap();
        prop_assert_eq!(&back, g.choi());
    }

    #[test]
    fn edge_list_round_trips(g in graph(7)) {
        let text = g.to_edge_list();
        let parsed = parse_graph(&text).unwrap();
        prop_assert_eq!(&parsed, &g);
        prop_assert_eq!(parsed.to_edge_list(), text);
    }
}
