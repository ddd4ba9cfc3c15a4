use level2::linalg::{char_poly, char_poly_berkowitz, det_bareiss};
use level2::{Graph, IntMatrix};
use num_bigint::BigInt;
use proptest::prelude::*;

fn graph_strategy(max: usize) -> impl Strategy<Value = Graph> {
    (1..=max).prop_flat_map(|n| {
        proptest::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| {
            let mut g = Graph::empty(n);
            let mut k = 0;
            for a in 0..n {
                for b in a + 1..n {
                    if bits[k] {
                        g.add_edge(a, b);
                    }
                    k += 1;
                }
            }
            g
        })
    })
}

fn matrix_strategy() -> impl Strategy<Value = IntMatrix> {
    (1usize..=9).prop_flat_map(|n| {
        proptest::collection::vec(-50i64..=50, n * n).prop_map(move |v| IntMatrix::from_i64(n, n, &v).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn char_poly_is_relabelling_invariant(g in graph_strategy(24), seed in any::<u64>()) {
        let n = g.order();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut s = seed;
        for i in (1..n).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (s >> 33) as usize % (i + 1));
        }
        prop_assert_eq!(g.char_poly(), g.relabel(&perm).char_poly());
    }

    #[test]
    fn char_poly_agrees_with_berkowitz(a in matrix_strategy()) {
        let p = char_poly(&a).unwrap();
        prop_assert_eq!(&p, &char_poly_berkowitz(&a).unwrap());
        // The constant term is (−1)ⁿ det A.
        let n = a.rows();
        let det = det_bareiss(&a).unwrap();
        let c0 = if n % 2 == 0 { det } else { -det };
        prop_assert_eq!(p.coeffs()[0].clone(), c0);
    }

    #[test]
    fn complement_of_complement(g in graph_strategy(30)) {
        prop_assert_eq!(g.complement().complement(), g.clone());
        prop_assert_eq!(Graph::from_graph6(&g.to_graph6()).unwrap(), g);
    }
}

#[test]
fn large_entries_stay_exact() {
    let n = 6;
    let big: Vec<BigInt> = (0..n * n).map(|k| BigInt::from(10i64).pow(15) * BigInt::from(k as i64 % 7 - 3)).collect();
    let a = IntMatrix::new(n, n, big).unwrap();
    assert_eq!(char_poly(&a).unwrap(), char_poly_berkowitz(&a).unwrap());
}
