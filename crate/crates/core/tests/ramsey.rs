mod common;

use ramsey_core::fraisse::catalog::builtin;
use ramsey_core::fraisse::{build_limit_approximant, Chain};
use ramsey_core::embedding::Embedding;
use ramsey_core::ramsey::oracle::{self, JointSpec};
use ramsey_core::ramsey::{
    arrows, check_bad_coloring, compute_degree, degree_arrows, extend_bad_colorings, find_ramsey_witness,
    joint_degree_witness, tuple_arrows, verify_thread, DegreeBounds, JointOutcome, JointTuple, SearchOptions, Verdict,
    WitnessOutcome,
};
use ramsey_core::structure::{build, FinStructure};

#[test]
fn chain_instances() {
    let (c1, c2, c3) = (build::chain(1), build::chain(2), build::chain(3));
    assert_eq!(arrows(&c3, &c2, &c1, 2).unwrap().verdict, Verdict::Yes);
    assert!(common::arrows(&c3, &c2, &c1, &[0], 2, 1));

    let no = arrows(&build::chain(5), &c3, &c2, 2).unwrap();
    assert_eq!(no.verdict, Verdict::No);
    let col = no.bad_coloring.unwrap();
    assert_eq!(col.colors.len(), 10);
    assert_eq!(check_bad_coloring(&build::chain(5), &c3, &c2, &[0, 1], 1, &col).unwrap(), None);
    assert_eq!(arrows(&build::chain(6), &c3, &c2, 2).unwrap().verdict, Verdict::Yes);
    assert!(common::arrows(&build::chain(6), &c3, &c2, &[0, 1], 2, 1));
}

#[test]
fn one_color_always_arrows() {
    for (c, b, a) in [
        (build::cycle(5), build::path(3), build::complete_graph(2)),
        (build::chain(4), build::chain(2), build::chain(2)),
        (build::complete_graph(3), build::complete_graph(1), build::complete_graph(1)),
    ] {
        assert_eq!(arrows(&c, &b, &a, 1).unwrap().verdict, Verdict::Yes);
    }
}

#[test]
fn witnesses_by_scanning_sizes() {
    let lo = builtin("linorder").unwrap();
    let size = |o: WitnessOutcome| match o {
        WitnessOutcome::Found { c, .. } => c.size(),
        other => panic!("{other:?}"),
    };
    assert_eq!(size(find_ramsey_witness(&lo, &build::chain(1), &build::chain(2), 2, 5).unwrap()), 3);
    assert_eq!(size(find_ramsey_witness(&lo, &build::chain(2), &build::chain(3), 2, 6).unwrap()), 6);
    let g = builtin("graph").unwrap();
    match find_ramsey_witness(&g, &build::complete_graph(1), &build::complete_graph(2), 2, 3).unwrap() {
        WitnessOutcome::Found { c, .. } => assert_eq!(c, build::complete_graph(3)),
        other => panic!("{other:?}"),
    }
    // every smaller graph containing an edge is refuted by enumeration
    for n in 2..=3 {
        for c in g.members_of_size(n).unwrap().iter() {
            if *c != build::complete_graph(3) && !common::embeddings(&build::complete_graph(2), c).is_empty() {
                assert!(!common::arrows(c, &build::complete_graph(2), &build::complete_graph(1), &[0], 2, 1));
            }
        }
    }
}

#[test]
fn degree_arrows_basics() {
    let (c, b, a) = (build::chain(4), build::chain(3), build::chain(2));
    for r in 1..=3 {
        assert_eq!(degree_arrows(&c, &b, &a, r, r).unwrap().verdict, Verdict::Yes);
        assert_eq!(degree_arrows(&c, &b, &a, r, 1).unwrap().verdict, arrows(&c, &b, &a, r).unwrap().verdict);
    }
    // P3 is not an induced subgraph of K4, so every coloring is bad
    let v = degree_arrows(&build::complete_graph(4), &build::path(3), &build::complete_graph(1), 2, 1).unwrap();
    assert_eq!(v.verdict, Verdict::No);
    assert!(!common::arrows(&build::complete_graph(4), &build::path(3), &build::complete_graph(1), &[0], 2, 1));
}

#[test]
fn degrees_at_bounds() {
    let opts = SearchOptions::default();
    let bounds = DegreeBounds { b_size: 3, colors: 2, c_size: 5 };
    let lo = builtin("linorder").unwrap();
    assert_eq!(compute_degree(&lo, &build::chain(1), &[0], bounds, &opts).unwrap().k, 1);
    // the 3-chain needs a 6-element witness for ordered pairs, one more than these bounds allow
    assert_eq!(compute_degree(&lo, &build::chain(2), &[0, 1], bounds, &opts).unwrap().k, 2);
    let wide = DegreeBounds { b_size: 3, colors: 2, c_size: 6 };
    let v = compute_degree(&lo, &build::chain(2), &[0, 1], wide, &opts).unwrap();
    assert_eq!((v.k, v.complete), (1, true));
    let set = builtin("set").unwrap();
    assert_eq!(compute_degree(&set, &build::pure_set(1), &[0], bounds, &opts).unwrap().k, 1);
    let g = builtin("graph").unwrap();
    // vertices: the pentagon handles every graph on 2 points, 3-point graphs need more room
    let small = DegreeBounds { b_size: 2, colors: 2, c_size: 5 };
    assert_eq!(compute_degree(&g, &build::complete_graph(1), &[0], small, &opts).unwrap().k, 1);
    assert!(common::arrows(&build::cycle(5), &build::complete_graph(2), &build::complete_graph(1), &[0], 2, 1));
    assert!(common::arrows(&build::cycle(5), &build::edgeless(2), &build::complete_graph(1), &[0], 2, 1));
    // an enumerated edge: both orientations must be colored, so two colors survive
    let bounds = DegreeBounds { b_size: 3, colors: 2, c_size: 4 };
    let v = compute_degree(&g, &build::complete_graph(2), &[0, 1], bounds, &opts).unwrap();
    assert!(v.complete);
    assert_eq!(v.k, 2);
    let lower = v.lower.unwrap();
    for (c, col) in &lower.refutations {
        assert_eq!(check_bad_coloring(c, &lower.b, &v.span, &v.span_tuple, lower.k, col).unwrap(), None);
    }
}

#[test]
fn joint_witnesses() {
    let lo = builtin("linorder").unwrap();
    let a = build::chain(2);
    let tuples = vec![JointTuple { tuple: vec![0], k: 1 }, JointTuple { tuple: vec![0, 1], k: 1 }];
    let opts = SearchOptions::default();
    let point = build::chain(1);
    let specs = [JointSpec { a: &point, tuple: &[0], r: 2, k: 1 }, JointSpec { a: &a, tuple: &[0, 1], r: 2, k: 1 }];
    let b = build::chain(2);
    let JointOutcome::Found { c, .. } = joint_degree_witness(&lo, &a, &tuples, &b, 2, 7, &opts).unwrap() else {
        panic!("no joint witness")
    };
    assert!(oracle::joint_arrows(&c, &b, &specs).unwrap(), "{c:?}");
    assert!(oracle::joint_arrows(&build::chain(3), &b, &specs).unwrap());
    assert!(!oracle::joint_arrows(&b, &b, &specs).unwrap());

    // over the 3-chain the point stage alone needs 5 elements and no chain up to 5 handles both
    let b = build::chain(3);
    assert!(matches!(joint_degree_witness(&lo, &a, &tuples, &b, 2, 5, &opts).unwrap(), JointOutcome::Unknown));
    for n in 3..=5 {
        assert!(!oracle::joint_arrows(&build::chain(n), &b, &specs).unwrap());
    }
    let single = vec![JointTuple { tuple: vec![0, 1], k: 1 }];
    let JointOutcome::Found { c, .. } = joint_degree_witness(&lo, &a, &single, &b, 2, 7, &opts).unwrap() else {
        panic!()
    };
    assert_eq!(c.size(), 6);
    match joint_degree_witness(&lo, &a, &[], &b, 2, 7, &opts).unwrap() {
        JointOutcome::Found { c, .. } => assert_eq!(c, b),
        other => panic!("{other:?}"),
    }
}

fn chain_of(sizes: &[usize]) -> Chain {
    let stages: Vec<FinStructure> = sizes.iter().map(|&n| build::chain(n)).collect();
    let inclusions = stages
        .windows(2)
        .map(|w| Embedding::new(&w[0], &w[1], (0..w[0].size()).collect()).unwrap())
        .collect();
    Chain { stages, inclusions }
}

#[test]
fn coherent_threads() {
    let (b, a) = (build::chain(3), build::chain(2));
    let chain = chain_of(&[3, 4, 5]);
    // bad sets before pruning: 6, 18 and 12 colorings (out of 2^3, 2^6, 2^10)
    let counts: Vec<u64> = chain
        .stages
        .iter()
        .map(|c| oracle::count_bad_colorings(c, &b, &a, &[0, 1], 2, 1).unwrap())
        .collect();
    assert_eq!(counts, vec![6, 18, 12]);
    let thread = extend_bad_colorings(&chain, &b, &a, 2).unwrap();
    assert_eq!(verify_thread(&chain, &b, &a, &thread).unwrap(), None);
    assert_eq!(extend_bad_colorings(&chain_of(&[4]), &b, &a, 2).unwrap().len(), 1);
    assert!(extend_bad_colorings(&chain_of(&[5, 6]), &b, &a, 2).is_err());
}

#[test]
fn searched_and_enumerated_bad_colorings_agree() {
    let cases = [
        (build::cycle(5), build::path(3), build::complete_graph(1), vec![0]),
        (build::cycle(5), build::complete_graph(2), build::complete_graph(2), vec![0, 1]),
        (build::chain(4), build::chain(3), build::chain(2), vec![1, 0]),
        (build::path(4), build::path(3), build::complete_graph(2), vec![0, 1]),
    ];
    for (c, b, a, t) in cases {
        for r in 1..=3 {
            for k in 1..=2 {
                let v = tuple_arrows(&c, &b, &a, &t, r, k, &SearchOptions::default()).unwrap();
                assert_eq!(v.verdict == Verdict::Yes, common::arrows(&c, &b, &a, &t, r, k), "{c:?} {t:?} r={r} k={k}");
            }
        }
    }
}

#[test]
fn limit_stages_feed_threads() {
    let lo = builtin("linorder").unwrap();
    let chain = build_limit_approximant(&lo, &build::chain(1), 3, 1).unwrap();
    let r = chain.last().size();
    let thread = extend_bad_colorings(&chain, &build::chain(2), &build::chain(1), r).unwrap();
    assert_eq!(verify_thread(&chain, &build::chain(2), &build::chain(1), &thread).unwrap(), None);
    assert!(extend_bad_colorings(&chain, &build::chain(2), &build::chain(1), r - 1).is_err());
}
