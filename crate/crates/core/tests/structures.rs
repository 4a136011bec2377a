mod common;

use ramsey_core::canon::{canonical_form, is_isomorphic};
use ramsey_core::embedding::{copies_of_tuple, enumerate_embeddings, Embedding};
use ramsey_core::structure::{build, FinStructure, Signature};
use ramsey_core::text::{format_structure, parse_structure};

#[test]
fn canonical_forms() {
    let point = FinStructure::empty(Signature::graph());
    let point = FinStructure::from_fn(point.sig().clone(), 1, |_, _| false);
    let cf = canonical_form(&point);
    assert_eq!(cf.structure, point);
    assert_eq!(cf.relabel, vec![0]);

    let p3 = build::path(3);
    let moved = p3.relabel(&[2, 0, 1]);
    assert_eq!(canonical_form(&p3).structure, canonical_form(&moved).structure);

    let k3 = build::complete_graph(3);
    assert_ne!(canonical_form(&p3).structure, canonical_form(&k3).structure);
    // no bijection of 3 points carries P3 onto K3
    assert!(common::embeddings(&p3, &k3).is_empty());
    assert!(!is_isomorphic(&p3, &k3));
}

#[test]
fn embedding_counts_match_brute_force() {
    let cases = [
        (build::chain(2), build::chain(3), 3),
        (build::complete_graph(2), build::complete_graph(3), 6),
        (build::complete_graph(2), build::complete_graph(2), 2),
    ];
    for (a, b, n) in cases {
        let got: Vec<Vec<usize>> = enumerate_embeddings(&a, &b).unwrap().iter().map(|e| e.map().to_vec()).collect();
        assert_eq!(got, common::embeddings(&a, &b));
        assert_eq!(got.len(), n);
    }
}

#[test]
fn composition_by_hand() {
    let (c1, c2, c3) = (build::chain(1), build::chain(2), build::chain(3));
    let f = Embedding::new(&c2, &c3, vec![0, 2]).unwrap();
    let g = Embedding::new(&c1, &c2, vec![1]).unwrap();
    assert_eq!(f.compose(&g).unwrap().map(), &[2]);
    assert_eq!(Embedding::identity(3).compose(&f).unwrap(), f);
    assert_eq!(f.compose(&Embedding::identity(2)).unwrap(), f);
}

#[test]
fn tuple_copies() {
    let c3 = build::chain(3);
    assert_eq!(copies_of_tuple(&build::chain(1), &[0], &c3).unwrap().len(), 3);
    assert_eq!(copies_of_tuple(&build::chain(2), &[0, 1], &c3).unwrap().len(), 3);
    let diag: Vec<Vec<usize>> = copies_of_tuple(&build::chain(1), &[0, 0], &c3)
        .unwrap()
        .into_iter()
        .map(|t| t.image)
        .collect();
    assert_eq!(diag, vec![vec![0, 0], vec![1, 1], vec![2, 2]]);
    for (a, t, b) in [
        (build::path(3), vec![0, 2, 0], build::cycle(5)),
        (build::chain(3), vec![2, 0], build::chain(5)),
    ] {
        let mut got: Vec<Vec<usize>> = copies_of_tuple(&a, &t, &b).unwrap().into_iter().map(|c| c.image).collect();
        got.sort();
        assert_eq!(got, common::copies(&a, &t, &b));
    }
}

#[test]
fn reducts_and_induced_substructures() {
    let og = build::ordered_graph(3, &[(0, 1)]);
    assert_eq!(og.reduct(&Signature::graph()).unwrap(), build::graph(3, &[(0, 1)]));
    assert_eq!(og.reduct(og.sig()).unwrap(), og);
    assert_eq!(build::chain(3).reduct(&Signature::empty()).unwrap(), build::pure_set(3));

    let p3 = build::path(3);
    assert!(is_isomorphic(&p3.induced_substructure(&[0, 1, 2]).unwrap().0, &p3));
    assert_eq!(p3.induced_substructure(&[]).unwrap().0.size(), 0);
    assert_eq!(p3.induced_substructure(&[0, 2]).unwrap().0, build::edgeless(2));
}

#[test]
fn text_round_trip_keeps_canonical_form() {
    for s in [build::cycle(5), build::chain(4), build::ordered_graph(3, &[(0, 2)]), build::pure_set(2)] {
        let text = format_structure("s", &s);
        let back = parse_structure(&text).unwrap().structure;
        assert_eq!(back, s);
        assert_eq!(canonical_form(&back), canonical_form(&s));
    }
}
