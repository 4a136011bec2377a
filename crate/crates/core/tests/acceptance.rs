//! Exit gate: one pass/fail line per criterion, then a single assertion.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};
use ramsey_core::certificate::{parse_certificate, run, verify, Request};
use ramsey_core::convex::{ecrp_sweep, lp, AffineWitness, ConvexInstance, VectorColoring};
use ramsey_core::embedding::Embedding;
use ramsey_core::flows::{
    build_orbit_system, count_expansions, minimal_flow_window, ExpansionPair, Side, Surrogate,
};
use ramsey_core::fraisse::catalog::{builtin, Catalog};
use ramsey_core::fraisse::Chain;
use ramsey_core::ramsey::{
    arrows, compute_degree, degree_arrows, extend_bad_colorings, good_copy, identity_tuple, oracle,
    verify_thread, Coloring, DegreeBounds, SearchOptions, Verdict,
};
use ramsey_core::rational::Q;
use ramsey_core::structure::{build, FinStructure, Tuple};

/// Wall-clock ceiling for each chain instance (search plus oracle).
const CHAIN_TIME_LIMIT: Duration = Duration::from_secs(10);
/// Instances enter the degree/arrows comparison when `log2` of their
/// coloring count is at most this.
const ORACLE_BITS: f64 = 22.0;
/// Randomized trials per property suite.
const PROPERTY_TRIALS: u32 = 100;
/// Worker counts whose outputs must coincide byte for byte.
const WORKER_COUNTS: [usize; 3] = [1, 4, 8];

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e2s<E: std::fmt::Debug>(e: E) -> String {
    format!("{e:?}")
}

fn chain_ramsey() -> Outcome {
    let (a, b) = (build::chain(2), build::chain(3));
    let mut notes = Vec::new();
    for (n, expected, bits) in [(6, Verdict::Yes, 15), (5, Verdict::No, 10)] {
        let c = build::chain(n);
        let start = Instant::now();
        let v = arrows(&c, &b, &a, 2).map_err(e2s)?;
        ensure(v.verdict == expected, || format!("{n}-chain: search says {:?}", v.verdict))?;
        let tuple = identity_tuple(&a);
        let built_in = oracle::least_bad_coloring(&c, &b, &a, &tuple, 2, 1).map_err(e2s)?;
        let elapsed = start.elapsed();
        ensure(common::copies(&a, &tuple, &c).len() == bits, || format!("{n}-chain: expected 2^{bits} colorings"))?;
        let reference = common::least_bad(&c, &b, &a, &tuple, 2, 1);
        ensure(built_in.as_ref().map(|x| x.1.clone()) == reference, || {
            format!("{n}-chain: oracles disagree")
        })?;
        match expected {
            Verdict::Yes => ensure(reference.is_none(), || "6-chain: enumeration finds a bad coloring".into())?,
            _ => {
                let col = v.bad_coloring.ok_or("5-chain: no coloring")?;
                ensure(col.colors.len() == 10, || "5-chain: coloring does not have 10 entries".into())?;
                let (domain, edges) = common::hypergraph(&c, &b, &a, &tuple);
                ensure(col.domain == domain, || "5-chain: domain differs".into())?;
                ensure(edges.iter().all(|e| e.iter().map(|&i| col.colors[i]).collect::<BTreeSet<_>>().len() > 1), || {
                    "5-chain: some 3-chain is monochromatic".into()
                })?;
            }
        }
        ensure(elapsed < CHAIN_TIME_LIMIT, || format!("{n}-chain took {elapsed:?}"))?;
        notes.push(format!("{n}-chain {} in {:.0?}", v.verdict, elapsed));
    }
    Ok(notes.join(", "))
}

fn vertex_toy() -> Outcome {
    let (a, b) = (build::complete_graph(1), build::complete_graph(2));
    let cases = [
        ("K3", build::complete_graph(3), Verdict::Yes),
        ("K2", build::complete_graph(2), Verdict::No),
        ("P3", build::path(3), Verdict::No),
    ];
    for (name, c, expected) in cases {
        let v = arrows(&c, &b, &a, 2).map_err(e2s)?;
        let reference = common::arrows(&c, &b, &a, &[0], 2, 1);
        ensure(v.verdict == expected, || format!("{name}: search says {:?}", v.verdict))?;
        ensure(reference == (expected == Verdict::Yes), || format!("{name}: enumeration disagrees"))?;
    }
    ensure(common::copies(&a, &[0], &build::complete_graph(3)).len() == 3, || "K3 has 3 vertices".into())?;
    Ok("K3 yes over 2^3 colorings; K2 and P3 refuted".into())
}

/// `(class, largest A, largest B, largest C, largest r)`.
const DEGREE_CATALOG: &[(&str, usize, usize, usize, usize)] = &[
    ("set", 2, 3, 4, 3),
    ("linorder", 2, 3, 4, 3),
    ("graph", 2, 3, 4, 2),
    ("triangle_free", 2, 3, 4, 2),
    ("ordered_graph", 2, 3, 3, 2),
    ("tournament", 2, 3, 3, 2),
    ("digraph", 2, 2, 3, 2),
];

fn degree_coherence() -> Outcome {
    let opts = SearchOptions::default();
    let mut compared = 0;
    let mut degrees = 0;
    for &(name, max_a, max_b, max_c, max_r) in DEGREE_CATALOG {
        let class = builtin(name).ok_or("missing class")?;
        for na in 1..=max_a {
            for a in class.members_of_size(na).map_err(e2s)?.iter() {
                let tuple = identity_tuple(a);
                for nb in na..=max_b {
                    for b in class.members_of_size(nb).map_err(e2s)?.iter() {
                        if common::embeddings(a, b).is_empty() {
                            continue;
                        }
                        for nc in nb..=max_c {
                            for c in class.members_of_size(nc).map_err(e2s)?.iter() {
                                if common::embeddings(b, c).is_empty() {
                                    continue;
                                }
                                for r in 1..=max_r {
                                    if common::log2_colorings(c, a, &tuple, r) > ORACLE_BITS {
                                        continue;
                                    }
                                    let plain = arrows(c, b, a, r).map_err(e2s)?.verdict;
                                    let k1 = degree_arrows(c, b, a, r, 1).map_err(e2s)?.verdict;
                                    let truth = common::arrows(c, b, a, &tuple, r, 1);
                                    ensure(plain == k1 && (plain == Verdict::Yes) == truth, || {
                                        format!("{name}: arrows {plain:?}, k=1 {k1:?}, enumeration {truth} for C={c:?}")
                                    })?;
                                    compared += 1;
                                }
                            }
                        }
                    }
                }
                let bounds = DegreeBounds { b_size: max_b, colors: max_r, c_size: max_c };
                let v = compute_degree(&class, a, &tuple, bounds, &opts).map_err(e2s)?;
                let expected = reference_degree(&class, a, &tuple, bounds)?;
                ensure(v.complete && v.k == expected, || {
                    format!("{name}: degree of {a:?} is {} (complete {}), enumeration gives {expected}", v.k, v.complete)
                })?;
                degrees += 1;
            }
        }
    }
    Ok(format!("{compared} arrow instances and {degrees} degrees match enumeration"))
}

/// Max over `(B, r)` of the least `k` achieved by some `C` in the bounds.
fn reference_degree(
    class: &ramsey_core::fraisse::ClassSpec,
    a: &FinStructure,
    tuple: &[usize],
    bounds: DegreeBounds,
) -> Result<usize, String> {
    let mut worst = 1;
    for nb in a.size()..=bounds.b_size {
        for b in class.members_of_size(nb).map_err(e2s)?.iter() {
            if common::embeddings(a, b).is_empty() {
                continue;
            }
            for r in 1..=bounds.colors {
                let mut best = r;
                for nc in nb..=bounds.c_size {
                    for c in class.members_of_size(nc).map_err(e2s)?.iter() {
                        if common::embeddings(b, c).is_empty() {
                            continue;
                        }
                        if let Some(k) = (1..r).find(|&k| common::arrows(c, b, a, tuple, r, k)) {
                            best = best.min(k);
                        }
                    }
                }
                worst = worst.max(best);
            }
        }
    }
    Ok(worst)
}

fn expansion_counting() -> Outcome {
    let pair = ExpansionPair::new(builtin("graph").unwrap(), builtin("ordered_graph").unwrap()).map_err(e2s)?;
    for (name, g, expected) in [("P3", build::path(3), 3), ("K3", build::complete_graph(3), 1)] {
        let got = count_expansions(&g, &pair).map_err(e2s)?.count;
        let reference = common::factorial(g.size()) / common::automorphism_count(&g);
        ensure(got == expected && reference == expected, || {
            format!("{name}: counted {got}, orderings/|Aut| gives {reference}")
        })?;
    }
    let mut checked = 0;
    for n in 1..=4 {
        for g in builtin("graph").unwrap().members_of_size(n).map_err(e2s)?.iter() {
            let got = count_expansions(g, &pair).map_err(e2s)?.count;
            let reference = common::factorial(n) / common::automorphism_count(g);
            ensure(got == reference, || format!("{g:?}: counted {got}, expected {reference}"))?;
            checked += 1;
        }
    }
    Ok(format!("P3 -> 3, K3 -> 1, and {checked} graphs up to 4 vertices agree"))
}

fn minimal_flow() -> Outcome {
    let pair = ExpansionPair::new(builtin("set").unwrap(), builtin("linorder").unwrap()).map_err(e2s)?;
    let orders: BTreeSet<FinStructure> = common::embeddings(&build::pure_set(3), &build::pure_set(3))
        .iter()
        .map(|perm| build::chain(3).relabel(perm))
        .collect();
    ensure(orders.len() == 6, || "S3 orbit of the 3-chain has 6 orders".into())?;
    for w in [3, 4, 5] {
        let flow = minimal_flow_window(&pair, &build::chain(w), 3, Surrogate::WindowAutomorphisms).map_err(e2s)?;
        let got: BTreeSet<FinStructure> = flow.points.iter().cloned().collect();
        ensure(flow.points.len() == 6 && got == orders, || {
            format!("window of {w} points gives {} points", flow.points.len())
        })?;
    }
    Ok("6 linear orders on 3 labeled points, windows of 3, 4 and 5".into())
}

fn ecrp_sweep_check() -> Outcome {
    let (a, b, c) = (build::chain(1), build::chain(2), build::chain(3));
    let inst = ConvexInstance::new(&a, &[0], &b, &c).map_err(e2s)?;
    let eps = Q::from_integer(0.into());
    let sweep = ecrp_sweep(&inst, 1, &eps, 1 << 20).map_err(e2s)?;
    ensure(sweep.len() == 8, || format!("{} colorings", sweep.len()))?;
    let ramsey_domain: Vec<Tuple> = common::copies(&a, &[0], &c);
    let (mut feasible, mut mono) = (0, 0);
    for (col, witness) in &sweep {
        let lp = lp::find_feasible(&inst.system(col, &eps));
        ensure(lp.is_some() == witness.is_some(), || format!("{col:?}: LP and sweep disagree"))?;
        if let Some(lambda) = &lp {
            ensure(inst.system(col, &eps).satisfied_by(lambda), || format!("{col:?}: LP point violates its rows"))?;
        }
        if let Some(w) = witness {
            feasible += 1;
            ensure(inst.check_witness(col, &eps, w).map_err(e2s)?.is_none(), || format!("{col:?}: witness fails"))?;
            ensure(substitutes_exactly(&inst, col, w), || format!("{col:?}: witness does not balance"))?;
        }
        let two = Coloring::new(2, ramsey_domain.clone(), col.values.iter().map(|&v| v as usize).collect()).map_err(e2s)?;
        if let Some(g) = good_copy(&c, &b, &a, &[0], 1, &two).map_err(e2s)? {
            mono += 1;
            let pm = AffineWitness::point_mass(g);
            ensure(inst.check_witness(col, &eps, &pm).map_err(e2s)?.is_none(), || {
                format!("{col:?}: point mass on a monochromatic copy fails")
            })?;
            ensure(witness.is_some(), || format!("{col:?}: LP infeasible despite a monochromatic copy"))?;
        }
    }
    Ok(format!("8 colorings, {feasible} feasible, {mono} with a monochromatic copy"))
}

/// Evaluates `sum_f w_f * value(f(copy))` by hand for every copy in `B` and
/// checks all copies agree.
fn substitutes_exactly(inst: &ConvexInstance, col: &VectorColoring, w: &AffineWitness) -> bool {
    let sums: Vec<Q> = inst
        .copies_in_b
        .iter()
        .map(|t| {
            w.support
                .iter()
                .zip(&w.weights)
                .map(|(f, lambda)| {
                    let img = f.apply_tuple(t);
                    let i = col.domain.iter().position(|d| *d == img).unwrap();
                    lambda * Q::from_integer((col.values[i] as i64).into())
                })
                .sum()
        })
        .collect();
    let total: Q = w.weights.iter().sum();
    total == Q::from_integer(1.into()) && sums.windows(2).all(|p| p[0] == p[1])
}

fn small_graph() -> impl Strategy<Value = FinStructure> {
    (1usize..=5, any::<u32>()).prop_map(|(n, bits)| {
        let mut edges = Vec::new();
        let mut k = 0;
        for i in 0..n {
            for j in (i + 1)..n {
                if bits >> k & 1 == 1 {
                    edges.push((i, j));
                }
                k += 1;
            }
        }
        build::graph(n, &edges)
    })
}

fn pattern(i: usize) -> (FinStructure, FinStructure) {
    [
        (build::complete_graph(1), build::complete_graph(2)),
        (build::complete_graph(1), build::edgeless(2)),
        (build::complete_graph(2), build::path(3)),
        (build::complete_graph(1), build::path(3)),
        (build::edgeless(2), build::path(3)),
    ][i % 5]
        .clone()
}

fn verdict_of(c: &FinStructure, b: &FinStructure, a: &FinStructure, r: usize, k: usize) -> Result<Verdict, TestCaseError> {
    degree_arrows(c, b, a, r, k).map(|v| v.verdict).map_err(|e| TestCaseError::fail(e2s(e)))
}

fn property_suites() -> Outcome {
    let cfg = Config { cases: PROPERTY_TRIALS, failure_persistence: None, ..Config::default() };
    let mut names = Vec::new();
    let trials = std::sync::atomic::AtomicUsize::new(0);
    let tick = || {
        trials.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
    };
    // a runner counts its passes, so each suite gets a fresh one
    let runner = || TestRunner::new_with_rng(cfg.clone(), proptest::test_runner::TestRng::deterministic_rng(cfg.rng_algorithm));

    runner()
        .run(&(small_graph(), 0usize..5, any::<u64>(), 1usize..3), |(c2, p, seed, r)| {
            tick();
            let (a, b) = pattern(p);
            // C is C2 minus a random point
            let drop = (seed % c2.size() as u64) as usize;
            let keep: Vec<usize> = (0..c2.size()).filter(|&x| x != drop).collect();
            let c = FinStructure::from_fn(c2.sig().clone(), keep.len(), |s, t| {
                c2.holds(s, &t.iter().map(|&i| keep[i]).collect::<Vec<_>>())
            });
            if verdict_of(&c, &b, &a, r, 1)? == Verdict::Yes {
                prop_assert_eq!(verdict_of(&c2, &b, &a, r, 1)?, Verdict::Yes);
            }
            Ok(())
        })
        .map_err(|e| format!("upward closure: {e}"))?;
    names.push("upward closure");

    runner()
        .run(&(small_graph(), 0usize..5, 1usize..4, 1usize..3), |(c, p, r, k)| {
            tick();
            let (a, b) = pattern(p);
            let v = verdict_of(&c, &b, &a, r, k)?;
            if v == Verdict::Yes {
                prop_assert_eq!(verdict_of(&c, &b, &a, r, k + 1)?, Verdict::Yes);
                if r > 1 {
                    prop_assert_eq!(verdict_of(&c, &b, &a, r - 1, k)?, Verdict::Yes);
                }
            }
            Ok(())
        })
        .map_err(|e| format!("monotonicity in k and r: {e}"))?;
    names.push("monotonicity in k and r");

    runner()
        .run(&(2usize..=4, any::<u64>(), 0i64..4, 1i64..4), |(n, bits, p, extra)| {
            tick();
            let (a, b, c) = (build::chain(1), build::chain(2), build::chain(n));
            let inst = ConvexInstance::new(&a, &[0], &b, &c).map_err(|e| TestCaseError::fail(e2s(e)))?;
            let total = inst.coloring_count(1).unwrap();
            let col = inst.coloring(1, bits % total);
            let lo = Q::new(p.into(), 4.into());
            let hi = lo.clone() + Q::new(extra.into(), 4.into());
            let at_lo = inst.witness(&col, &lo).map_err(|e| TestCaseError::fail(e2s(e)))?;
            if let Some(w) = at_lo {
                prop_assert!(inst.check_witness(&col, &hi, &w).unwrap().is_none());
                prop_assert!(inst.witness(&col, &hi).unwrap().is_some());
            }
            Ok(())
        })
        .map_err(|e| format!("monotonicity in epsilon: {e}"))?;
    names.push("monotonicity in epsilon");

    runner()
        .run(&(small_graph(), 0usize..5, any::<u64>(), 1usize..3), |(c, p, seed, r)| {
            tick();
            let (a, b) = pattern(p);
            let perm_c = common::permutation(c.size(), seed);
            let perm_b = common::permutation(b.size(), seed ^ 0x9e37);
            let perm_a = common::permutation(a.size(), seed ^ 0x51ed);
            let v = verdict_of(&c, &b, &a, r, 1)?;
            let w = verdict_of(&c.relabel(&perm_c), &b.relabel(&perm_b), &a.relabel(&perm_a), r, 1)?;
            prop_assert_eq!(v, w);
            let pair = ExpansionPair::new(builtin("graph").unwrap(), builtin("ordered_graph").unwrap()).unwrap();
            prop_assert_eq!(
                count_expansions(&c, &pair).unwrap().count,
                count_expansions(&c.relabel(&perm_c), &pair).unwrap().count
            );
            let k = builtin("triangle_free").unwrap();
            prop_assert_eq!(k.contains(&c), k.contains(&c.relabel(&perm_c)));
            if c.size() >= 2 {
                let inst = ConvexInstance::new(&build::complete_graph(1), &[0], &build::complete_graph(2), &c).unwrap();
                let inst2 = ConvexInstance::new(&build::complete_graph(1), &[0], &build::complete_graph(2), &c.relabel(&perm_c)).unwrap();
                // the same coloring, carried along the relabeling
                let values: Vec<u64> = (0..c.size()).map(|x| (seed >> x) & 1).collect();
                let col = VectorColoring::new(1, inst.domain.clone(), values.clone()).unwrap();
                let mut moved: Vec<(Tuple, u64)> = (0..c.size()).map(|x| (vec![perm_c[x]], values[x])).collect();
                moved.sort();
                let col2 = VectorColoring::new(1, moved.iter().map(|m| m.0.clone()).collect(), moved.iter().map(|m| m.1).collect()).unwrap();
                let eps = Q::from_integer(0.into());
                prop_assert_eq!(inst.witness(&col, &eps).unwrap().is_some(), inst2.witness(&col2, &eps).unwrap().is_some());
            }
            Ok(())
        })
        .map_err(|e| format!("isomorphism invariance: {e}"))?;
    names.push("isomorphism invariance");

    runner()
        .run(&(small_graph(), proptest::collection::vec((0usize..5, 0usize..5, 0usize..5, 1usize..4), 1..4)), |(w, seeds)| {
            tick();
            let n = w.size();
            let mut family: BTreeSet<Tuple> = BTreeSet::new();
            for (x, y, z, len) in seeds {
                let t: Tuple = [x % n, y % n, z % n][..len].to_vec();
                close_under_deletion(&t, &mut family);
            }
            let family: Vec<Tuple> = family.into_iter().collect();
            let sys = build_orbit_system(&w, &family).map_err(|e| TestCaseError::fail(e2s(e)))?;
            prop_assert_eq!(sys.validate(), None);
            for bond in &sys.bonding {
                let hit: BTreeSet<usize> = bond.map.iter().copied().collect();
                prop_assert_eq!(hit.len(), sys.fibers[bond.to].len());
                for (i, copy) in sys.fibers[bond.from].iter().enumerate() {
                    let mut shorter = copy.clone();
                    shorter.remove(bond.dropped);
                    prop_assert_eq!(&sys.fibers[bond.to][bond.map[i]], &shorter);
                }
            }
            for thread in sys.threads().unwrap() {
                for bond in &sys.bonding {
                    prop_assert_eq!(bond.map[thread[bond.from]], thread[bond.to]);
                }
            }
            Ok(())
        })
        .map_err(|e| format!("orbit systems: {e}"))?;
    names.push("orbit systems");

    runner()
        .run(&(2usize..=4, 1usize..=3, 0usize..2), |(first, steps, extra)| {
            tick();
            let sizes: Vec<usize> = (0..=steps).map(|i| first + i).collect();
            let chain = chain_of(&sizes);
            let (a, b) = (build::chain(1), build::chain(2));
            // a bad coloring of points gives every point its own color
            let thread = extend_bad_colorings(&chain, &b, &a, sizes.last().copied().unwrap() + extra)
                .map_err(|e| TestCaseError::fail(e2s(e)))?;
            prop_assert_eq!(verify_thread(&chain, &b, &a, &thread).unwrap(), None);
            for (i, incl) in chain.inclusions.iter().enumerate() {
                for (j, t) in thread[i].domain.iter().enumerate() {
                    let img = incl.apply_tuple(t);
                    prop_assert_eq!(thread[i + 1].color_of(&img), Some(thread[i].colors[j]));
                }
            }
            Ok(())
        })
        .map_err(|e| format!("coherent threads: {e}"))?;
    names.push("coherent threads");

    let ran = trials.load(std::sync::atomic::Ordering::Relaxed);
    ensure(ran >= names.len() * PROPERTY_TRIALS as usize, || format!("only {ran} trials ran"))?;
    Ok(format!("{ran} trials over {} suites: {}", names.len(), names.join(", ")))
}

fn close_under_deletion(t: &Tuple, family: &mut BTreeSet<Tuple>) {
    if !family.insert(t.clone()) || t.len() < 2 {
        return;
    }
    for i in 0..t.len() {
        let mut s = t.clone();
        s.remove(i);
        close_under_deletion(&s, family);
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

/// One request per kind, plus a few more.
fn certificate_corpus() -> Vec<Request> {
    let mut out = vec![
        Request::CheckClass { class: "graph".into(), bound: 3, seed: 5 },
        Request::CheckClass { class: "ap_fail".into(), bound: 2, seed: 5 },
        Request::CheckClass { class: "connected_graph".into(), bound: 3, seed: 5 },
        Request::BuildLimit { class: "graph".into(), steps: 3, horizon: 2 },
        Request::BuildLimit { class: "linorder".into(), steps: 3, horizon: 1 },
        Request::CheckErp {
            class: "graph".into(),
            a: build::complete_graph(1),
            tuple: vec![0],
            b: build::complete_graph(2),
            colors: 2,
            degree: 1,
            bound: 4,
        },
        Request::Degree {
            class: "linorder".into(),
            a: build::chain(2),
            tuple: vec![1, 0],
            bounds: DegreeBounds { b_size: 3, colors: 2, c_size: 5 },
        },
        Request::Degree {
            class: "set".into(),
            a: build::pure_set(2),
            tuple: vec![0, 1],
            bounds: DegreeBounds { b_size: 3, colors: 2, c_size: 5 },
        },
        Request::JointDegree {
            class: "linorder".into(),
            a: build::chain(2),
            tuples: vec![
                ramsey_core::ramsey::JointTuple { tuple: vec![0], k: 1 },
                ramsey_core::ramsey::JointTuple { tuple: vec![0, 1], k: 1 },
            ],
            b: build::chain(3),
            colors: 2,
            bound: 6,
        },
        Request::CountExpansions { base: "graph".into(), expanded: "ordered_graph".into(), a0: build::cycle(4) },
        Request::CheckExpansion { base: "graph".into(), expanded: "ordered_graph".into(), a0: build::complete_graph(2), bound: 3 },
        Request::MinFlowWindow {
            base: "set".into(),
            expanded: "linorder".into(),
            window: build::chain(4),
            n: 2,
            surrogate: Surrogate::PartialIsomorphisms,
        },
        Request::OrbitSystem { window: build::cycle(5), tuples: vec![vec![0], vec![1], vec![0, 1]] },
    ];
    for n in 3..=6 {
        out.push(Request::Arrows {
            a: build::chain(2),
            tuple: vec![0, 1],
            b: build::chain(3),
            c: build::chain(n),
            colors: 2,
            degree: 1,
        });
    }
    for (c, eps) in [(2, (0, 1)), (3, (0, 1)), (3, (1, 2)), (4, (1, 3))] {
        out.push(Request::CheckEcrp {
            class: "linorder".into(),
            a: build::chain(1),
            tuple: vec![0],
            b: build::chain(2),
            c: build::chain(c),
            colors: 2,
            epsilon: Q::new(eps.0.into(), eps.1.into()),
            guard: 1 << 20,
        });
    }
    for side in [Side::Right, Side::Left, Side::TwoSided] {
        for surrogate in [Surrogate::WindowAutomorphisms, Surrogate::PartialIsomorphisms] {
            out.push(Request::WindowExpansion {
                base: "set".into(),
                expanded: "linorder".into(),
                window: build::chain(4),
                side,
                surrogate,
                max_subset: 3,
            });
        }
    }
    out
}

fn certificate_round_trip() -> Outcome {
    let catalog = Catalog::new();
    let corpus = certificate_corpus();
    let mut texts: Vec<Vec<String>> = vec![Vec::new(); WORKER_COUNTS.len()];
    for (slot, &w) in WORKER_COUNTS.iter().enumerate() {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(w).build().map_err(e2s)?;
        for req in &corpus {
            let out = pool.install(|| run(req, &catalog)).map_err(e2s)?;
            texts[slot].push(out.certificate.to_text());
        }
    }
    for (slot, w) in WORKER_COUNTS.iter().enumerate().skip(1) {
        for (i, (x, y)) in texts[0].iter().zip(&texts[slot]).enumerate() {
            ensure(x == y, || format!("{} differs between 1 and {w} workers", corpus[i].kind()))?;
        }
    }
    for (req, text) in corpus.iter().zip(&texts[0]) {
        let cert = parse_certificate(text).map_err(e2s)?;
        ensure(cert.to_text() == *text, || format!("{}: text does not round trip", req.kind()))?;
        ensure(Request::from_certificate(&cert).map_err(e2s)? == *req, || format!("{}: header does not round trip", req.kind()))?;
        if let Some(why) = verify(&cert, &catalog).map_err(e2s)? {
            return Err(format!("{}: {why}", req.kind()));
        }
    }
    let kinds: BTreeSet<&str> = corpus.iter().map(|r| r.kind()).collect();
    Ok(format!("{} certificates over {} kinds verify; identical at 1, 4 and 8 workers", corpus.len(), kinds.len()))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 8] = [
        ("1 chain ramsey", chain_ramsey),
        ("2 vertex toy", vertex_toy),
        ("3 degree coherence", degree_coherence),
        ("4 expansion counting", expansion_counting),
        ("5 minimal flow window", minimal_flow),
        ("6 ecrp sweep", ecrp_sweep_check),
        ("7 property suites", property_suites),
        ("8 certificate round trip", certificate_round_trip),
    ];
    let mut failed = Vec::new();
    for (name, check) in criteria {
        let start = Instant::now();
        match check() {
            Ok(detail) => println!("PASS criterion {name}: {detail} ({:.1?})", start.elapsed()),
            Err(why) => {
                println!("FAIL criterion {name}: {why}");
                failed.push(name);
            }
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed.len(), criteria.len());
    if !failed.is_empty() {
        std::process::exit(1);
    }
}
