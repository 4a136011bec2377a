mod common;

use proptest::prelude::*;
use ramsey_core::canon::{canonical_form, is_isomorphic};
use ramsey_core::certificate::{parse_certificate, Certificate};
use ramsey_core::convex::lp::{find_feasible, Problem, Row};
use ramsey_core::embedding::enumerate_embeddings;
use ramsey_core::ramsey::Verdict;
use ramsey_core::rational::{format_rational, parse_rational, Q};
use ramsey_core::structure::{FinStructure, Signature};
use ramsey_core::text::{format_structure, parse_structure};

/// A structure with one binary and one ternary symbol on up to 4 points,
/// with relations drawn from `bits`.
fn mixed(n: usize, bits: &[bool]) -> FinStructure {
    let sig = Signature::new([("e", 2), ("t", 3)]).unwrap();
    let mut i = 0;
    FinStructure::from_fn(sig, n, |_, _| {
        i += 1;
        bits[i % bits.len()]
    })
}

fn structure() -> impl Strategy<Value = FinStructure> {
    (0usize..=4, prop::collection::vec(any::<bool>(), 1..96)).prop_map(|(n, bits)| mixed(n, &bits))
}

fn small_graph() -> impl Strategy<Value = FinStructure> {
    (1usize..=4, prop::collection::vec(any::<bool>(), 6))
        .prop_map(|(n, bits)| {
            let mut edges = Vec::new();
            let mut k = 0;
            for i in 0..n {
                for j in (i + 1)..n {
                    if bits[k] {
                        edges.push((i, j));
                    }
                    k += 1;
                }
            }
            ramsey_core::structure::build::graph(n, &edges)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn structure_text_round_trips(s in structure()) {
        let back = parse_structure(&format_structure("s", &s)).unwrap();
        prop_assert_eq!(back.structure, s);
    }

    #[test]
    fn canonical_form_ignores_labels(s in structure(), seed in any::<u64>()) {
        let perm = common::permutation(s.size(), seed);
        let moved = s.relabel(&perm);
        prop_assert_eq!(canonical_form(&s).structure, canonical_form(&moved).structure);
        prop_assert!(is_isomorphic(&s, &moved));
        prop_assert_eq!(s.relabel(&canonical_form(&s).relabel), canonical_form(&s).structure);
    }

    #[test]
    fn embeddings_match_brute_force(a in small_graph(), b in small_graph()) {
        let got: Vec<Vec<usize>> = enumerate_embeddings(&a, &b).unwrap().iter().map(|e| e.map().to_vec()).collect();
        prop_assert_eq!(got, common::embeddings(&a, &b));
    }

    #[test]
    fn rationals_round_trip(p in -10_000i64..10_000, q in 1i64..10_000) {
        let x = Q::new(p.into(), q.into());
        prop_assert_eq!(parse_rational(&format_rational(&x)).unwrap(), x.clone());
        prop_assert_eq!(parse_rational(&format!("{}/{}", p * 3, q * 3)).unwrap(), x);
    }

    #[test]
    fn lp_finds_a_point_when_one_exists(
        point in prop::collection::vec(0i64..4, 1..5),
        rows in prop::collection::vec(prop::collection::vec(-3i64..4, 4), 0..5),
        slack in prop::collection::vec(0i64..3, 5),
    ) {
        let vars = point.len();
        let x0: Vec<Q> = point.iter().map(|&v| Q::from_integer(v.into())).collect();
        let mut p = Problem::new(vars);
        for (i, r) in rows.iter().enumerate() {
            let coeffs: Vec<Q> = r[..vars].iter().map(|&c| Q::from_integer(c.into())).collect();
            let at: Q = coeffs.iter().zip(&x0).map(|(a, b)| a * b).sum();
            if i % 2 == 0 {
                p.eq.push(Row { coeffs, rhs: at });
            } else {
                p.le.push(Row { coeffs, rhs: at + Q::from_integer(slack[i].into()) });
            }
        }
        prop_assert!(p.satisfied_by(&x0));
        let x = find_feasible(&p);
        prop_assert!(x.as_ref().is_some_and(|x| p.satisfied_by(x)));

        // variables are non-negative, so a negative total is out of reach
        p.le.push(Row { coeffs: vec![Q::from_integer(1.into()); vars], rhs: Q::from_integer((-1).into()) });
        prop_assert!(find_feasible(&p).is_none());
    }

    #[test]
    fn certificates_round_trip(
        s in structure(),
        values in prop::collection::vec("[a-z0-9/,-]{1,6}", 0..4),
        verdict in prop_oneof![Just(Verdict::Yes), Just(Verdict::No), Just(Verdict::Unknown)],
    ) {
        let mut cert = Certificate::new("probe", verdict);
        cert.push_field("values", values.iter());
        cert.push_structure("S", &s);
        let text = cert.to_text();
        let back = parse_certificate(&text).unwrap();
        prop_assert_eq!(back.to_text(), text);
        prop_assert_eq!(back.structure("S").unwrap(), &s);
    }
}
