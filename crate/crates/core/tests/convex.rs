mod common;

use ramsey_core::convex::{
    check_ecrp_instance, compose_affine, ecrp_sweep, eval_coloring, AffineCombination, AffineWitness, ConvexInstance,
    VectorColoring,
};
use ramsey_core::embedding::Embedding;
use ramsey_core::fraisse::catalog::builtin;
use ramsey_core::ramsey::Verdict;
use ramsey_core::rational::Q;
use ramsey_core::structure::{build, FinStructure};

fn q(n: i64, d: i64) -> Q {
    Q::new(n.into(), d.into())
}

#[test]
fn uniform_composition() {
    let (c2, c3) = (build::chain(2), build::chain(3));
    let support = common::embeddings(&c2, &c3)
        .into_iter()
        .map(|m| Embedding::new(&c2, &c3, m).unwrap())
        .collect();
    let v = AffineWitness::uniform(support).unwrap();
    let low = compose_affine(&v, &build::chain(1), &[0], &c2, &[0]).unwrap();
    assert_eq!(low, AffineCombination::from_terms([(vec![0], q(2, 3)), (vec![1], q(1, 3))]));
    let high = compose_affine(&v, &build::chain(1), &[0], &c2, &[1]).unwrap();
    assert_eq!(high, AffineCombination::from_terms([(vec![1], q(1, 3)), (vec![2], q(2, 3))]));

    let col = VectorColoring::new(2, vec![vec![0], vec![1], vec![2]], vec![0b01, 0b11, 0b10]).unwrap();
    assert_eq!(eval_coloring(&col, &low).unwrap(), vec![q(1, 1), q(1, 3)]);
    assert_eq!(eval_coloring(&col, &high).unwrap(), vec![q(1, 3), q(1, 1)]);
    // 2 is not a point of B
    assert!(compose_affine(&v, &build::chain(1), &[0], &c2, &[2]).is_err());
}

#[test]
fn witness_for_a_single_marked_point() {
    let inst = ConvexInstance::new(&build::chain(1), &[0], &build::chain(2), &build::chain(3)).unwrap();
    let col = VectorColoring::new(1, inst.domain.clone(), vec![1, 0, 0]).unwrap();
    let w = inst.witness(&col, &q(0, 1)).unwrap().unwrap();
    assert_eq!(w.support.len(), 1);
    assert_eq!(w.support[0].map(), &[1, 2]);
    assert_eq!(inst.check_witness(&col, &q(0, 1), &w).unwrap(), None);
    let p = inst.system(&col, &q(0, 1));
    assert!(p.satisfied_by(&[q(0, 1), q(0, 1), q(1, 1)]));
    assert!(!p.satisfied_by(&[q(1, 1), q(0, 1), q(0, 1)]));
}

/// With two copies in `B` and one coordinate the system asks for a convex
/// combination of the differences `c(f(b0)) - c(f(b1))` within `eps` of 0.
fn two_copy_feasible(inst: &ConvexInstance, col: &VectorColoring, eps_at_least_one: bool) -> bool {
    let diffs: Vec<i64> = inst
        .incidence
        .iter()
        .map(|inc| col.values[inc[0]] as i64 - col.values[inc[1]] as i64)
        .collect();
    let zero = diffs.contains(&0) || (diffs.iter().any(|&d| d > 0) && diffs.iter().any(|&d| d < 0));
    !diffs.is_empty() && (zero || eps_at_least_one)
}

#[test]
fn sweeps_agree_with_the_two_copy_rule() {
    let cases: Vec<(FinStructure, FinStructure, FinStructure)> = vec![
        (build::chain(1), build::chain(2), build::chain(4)),
        (build::chain(1), build::chain(2), build::chain(2)),
        (build::complete_graph(1), build::complete_graph(2), build::cycle(5)),
        (build::complete_graph(1), build::edgeless(2), build::path(4)),
    ];
    for (a, b, c) in cases {
        let inst = ConvexInstance::new(&a, &[0], &b, &c).unwrap();
        assert_eq!(inst.copies_in_b.len(), 2);
        for (eps, wide) in [(q(0, 1), false), (q(1, 2), false), (q(1, 1), true)] {
            for (col, w) in ecrp_sweep(&inst, 1, &eps, 1 << 12).unwrap() {
                assert_eq!(w.is_some(), two_copy_feasible(&inst, &col, wide), "{c:?} {:?} eps={eps}", col.values);
                if let Some(w) = w {
                    assert_eq!(inst.check_witness(&col, &eps, &w).unwrap(), None);
                }
            }
        }
    }
}

#[test]
fn instance_verdicts() {
    let lo = builtin("linorder").unwrap();
    let (c1, c2) = (build::chain(1), build::chain(2));
    // one embedding: the coloring (1, 0) separates the two points
    let out = check_ecrp_instance(&lo, &c1, &[0], &c2, &c2, 1, &q(0, 1), 1 << 20).unwrap();
    assert_eq!(out.verdict, Verdict::No);
    assert_eq!(out.counterexample.unwrap().values, vec![0, 1]);
    assert_eq!(out.colorings, Some(4));
    // a tolerance of 1 is always met on the cube
    for c in [build::chain(2), build::chain(3)] {
        let out = check_ecrp_instance(&lo, &c1, &[0], &c2, &c, 2, &q(1, 1), 1 << 20).unwrap();
        assert_eq!(out.verdict, Verdict::Yes);
    }
    // B = A: a single copy in B, so any point mass works
    let out = check_ecrp_instance(&lo, &c2, &[0, 1], &c2, &build::chain(4), 2, &q(0, 1), 1 << 20).unwrap();
    assert_eq!(out.verdict, Verdict::Yes);
    // 3 copies at 2 coordinates exceed a guard of 32
    let out = check_ecrp_instance(&lo, &c1, &[0], &c2, &build::chain(3), 2, &q(0, 1), 32).unwrap();
    assert_eq!((out.verdict, out.colorings), (Verdict::Unknown, Some(64)));
    assert!(check_ecrp_instance(&lo, &c1, &[0], &c2, &build::chain(3), 1, &q(-1, 2), 32).is_err());
}

#[test]
fn witnesses_are_validated() {
    let (c2, c3) = (build::chain(2), build::chain(3));
    let f = |m: Vec<usize>| Embedding::new(&c2, &c3, m).unwrap();
    assert!(AffineWitness::new(vec![f(vec![0, 1])], vec![q(1, 2)]).is_err());
    assert!(AffineWitness::new(vec![f(vec![0, 2]), f(vec![0, 1])], vec![q(1, 2), q(1, 2)]).is_err());
    assert!(AffineWitness::new(vec![f(vec![0, 1]), f(vec![0, 2])], vec![q(3, 2), q(-1, 2)]).is_err());
    assert!(AffineWitness::new(vec![f(vec![0, 1]), f(vec![0, 2])], vec![q(1, 4), q(3, 4)]).is_ok());
}
