use super::axioms::{for_each_subset, free_amalgam, verify_amalgam, Amalgam, Span};
use super::ClassSpec;
use crate::canon::automorphisms;
use crate::embedding::{embedding_violation, enumerate_embeddings, first_embedding, Embedding};
use crate::error::{Error, Result};
use crate::structure::FinStructure;

/// Finite approximants `stages[0] ≤ stages[1] ≤ ...` of a limit structure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chain {
    pub stages: Vec<FinStructure>,
    /// `inclusions[i]` embeds `stages[i]` into `stages[i + 1]`.
    pub inclusions: Vec<Embedding>,
}

impl Chain {
    pub fn last(&self) -> &FinStructure {
        self.stages.last().expect("a chain has a first stage")
    }

    /// The composite embedding of stage `i` into stage `j` (`i ≤ j`).
    pub fn inclusion(&self, i: usize, j: usize) -> Result<Embedding> {
        if i > j || j >= self.stages.len() {
            return Err(Error::Precondition(format!("no inclusion from stage {i} into stage {j}")));
        }
        let mut e = Embedding::identity(self.stages[i].size());
        for inc in &self.inclusions[i..j] {
            e = inc.compose(&e)?;
        }
        Ok(e)
    }

    /// Checks that every consecutive and composite inclusion is an embedding.
    pub fn validate(&self) -> Result<()> {
        if self.inclusions.len() + 1 != self.stages.len() {
            return Err(Error::InvalidStructure("chain needs one inclusion per step".into()));
        }
        for i in 0..self.stages.len() {
            for j in i..self.stages.len() {
                let e = self.inclusion(i, j)?;
                if let Some(why) = embedding_violation(&self.stages[i], &self.stages[j], e.map()) {
                    return Err(Error::NotAnEmbedding(format!("stage {i} into stage {j}: {why}")));
                }
            }
        }
        Ok(())
    }
}

/// A substructure with a one-point extension in the class that has no copy
/// over it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MissingExtension {
    /// Points of the checked structure spanning the substructure.
    pub subset: Vec<usize>,
    /// The extension: point `i < subset.len()` stands for `subset[i]`, the
    /// last point is new.
    pub extension: FinStructure,
}

/// Requests `(subset, extension)` of `s` up to `horizon` points, by subset
/// size, then subset, then extension.
fn extension_requests(k: &ClassSpec, s: &FinStructure, horizon: usize) -> Result<Vec<(Vec<usize>, FinStructure)>> {
    let mut out = Vec::new();
    for size in 0..=horizon.min(s.size()) {
        let mut subsets = Vec::new();
        for_each_subset(s.size(), size, |sub| {
            subsets.push(sub.to_vec());
            false
        });
        for sub in subsets {
            let (a, _) = s.induced_ordered(&sub)?;
            for ext in k.one_point_extensions(&a)? {
                out.push((sub.clone(), ext));
            }
        }
    }
    Ok(out)
}

fn realized(ext: &FinStructure, target: &FinStructure, anchor: &[usize]) -> Result<bool> {
    let mut partial: Vec<Option<usize>> = anchor.iter().map(|&x| Some(x)).collect();
    partial.push(None);
    Ok(first_embedding(ext, target, Some(&partial))?.is_some())
}

/// Every substructure of `mn` with at most `horizon` points has a copy of
/// each of its one-point extensions in `k` over it.
pub fn check_extension_property(mn: &FinStructure, k: &ClassSpec, horizon: usize) -> Result<Option<MissingExtension>> {
    check_extension_property_over(mn, &Embedding::identity(mn.size()), mn, k, horizon)
}

/// Like [`check_extension_property`], but only for substructures of `base`,
/// placed into `mn` by `inclusion`.
pub fn check_extension_property_over(
    base: &FinStructure,
    inclusion: &Embedding,
    mn: &FinStructure,
    k: &ClassSpec,
    horizon: usize,
) -> Result<Option<MissingExtension>> {
    if inclusion.src_size() != base.size() || inclusion.dst_size() != mn.size() {
        return Err(Error::Precondition("inclusion does not match the structures".into()));
    }
    for (subset, ext) in extension_requests(k, base, horizon)? {
        let anchor: Vec<usize> = subset.iter().map(|&x| inclusion.apply(x)).collect();
        if !realized(&ext, mn, &anchor)? {
            return Ok(Some(MissingExtension { subset: anchor, extension: ext }));
        }
    }
    Ok(None)
}

/// Resolves the one-point span `A -> current` (via `anchor`), `A -> ext` by
/// a one-point extension of `current`: the free amalgam if it is a member,
/// otherwise the first member extension (in sorted order) admitting it.
fn resolve(k: &ClassSpec, current: &FinStructure, anchor: &[usize], ext: &FinStructure) -> Result<Amalgam> {
    let (a, _) = ext.induced_ordered(&(0..anchor.len()).collect::<Vec<_>>())?;
    let span = Span {
        f1: Embedding::new(&a, current, anchor.to_vec())?,
        f2: Embedding::new(&a, ext, (0..anchor.len()).collect())?,
        a,
        b1: current.clone(),
        b2: ext.clone(),
    };
    let (c, g1, g2) = free_amalgam(current, ext, &span.f1, &span.f2)?;
    let am = if k.contains(&c) {
        Amalgam { c, g1, g2, free: true }
    } else {
        let n = current.size();
        let mut map = anchor.to_vec();
        map.push(n);
        let found = k
            .one_point_extensions(current)?
            .into_iter()
            .find(|x| embedding_violation(ext, x, &map).is_none());
        match found {
            Some(x) => Amalgam {
                g1: Embedding::from_parts(n, n + 1, (0..n).collect()),
                g2: Embedding::from_parts(ext.size(), n + 1, map),
                c: x,
                free: false,
            },
            None => {
                return Err(Error::AmalgamationFailed(format!(
                    "no one-point extension of a {n}-point stage realizes an extension over {anchor:?}"
                )))
            }
        }
    };
    verify_amalgam(k, &span, &am)?;
    Ok(am)
}

/// Builds `steps` stages on top of `start`. Stage `i + 1` realizes every
/// one-point extension over every substructure of stage `i` with at most
/// `horizon` points; requests are handled in a fixed order and each
/// unrealized one is amalgamated in as a new last point. The result is
/// re-verified before it is returned.
pub fn build_limit_approximant(k: &ClassSpec, start: &FinStructure, steps: usize, horizon: usize) -> Result<Chain> {
    k.require_member(start)?;
    let mut chain = Chain {
        stages: vec![start.clone()],
        inclusions: Vec::new(),
    };
    for _ in 0..steps {
        let stage = chain.last().clone();
        let mut current = stage.clone();
        for (subset, ext) in extension_requests(k, &stage, horizon)? {
            // points of `stage` keep their labels in `current`
            if realized(&ext, &current, &subset)? {
                continue;
            }
            current = resolve(k, &current, &subset, &ext)?.c;
        }
        let inclusion = Embedding::from_parts(stage.size(), current.size(), (0..stage.size()).collect());
        chain.stages.push(current);
        chain.inclusions.push(inclusion);
    }
    chain.validate()?;
    for i in 0..steps {
        k.require_member(&chain.stages[i + 1])?;
        if let Some(m) =
            check_extension_property_over(&chain.stages[i], &chain.inclusions[i], &chain.stages[i + 1], k, horizon)?
        {
            return Err(Error::AmalgamationFailed(format!(
                "stage {} misses an extension over {:?}",
                i + 1,
                m.subset
            )));
        }
    }
    Ok(chain)
}

/// Families of subsets of a window.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CofinalStrategy {
    All,
    /// Initial segments of the window's `lt` order, or of the labels when
    /// there is no such symbol.
    InitialSegments,
    EvenSized,
}

/// Subsets of the window's points, each sorted, by size then
/// lexicographically.
pub fn cofinal_family(window: &FinStructure, strategy: CofinalStrategy) -> Vec<Vec<usize>> {
    let n = window.size();
    match strategy {
        CofinalStrategy::All | CofinalStrategy::EvenSized => {
            let mut out = Vec::new();
            for size in 0..=n {
                if strategy == CofinalStrategy::EvenSized && size % 2 == 1 {
                    continue;
                }
                for_each_subset(n, size, |s| {
                    out.push(s.to_vec());
                    false
                });
            }
            out
        }
        CofinalStrategy::InitialSegments => {
            let mut order: Vec<usize> = (0..n).collect();
            if let Some(lt) = window.sig().index_of("lt").filter(|&i| window.sig().arity(i) == 2) {
                let mut below = vec![0usize; n];
                for t in window.table(lt) {
                    below[t[1]] += 1;
                }
                order.sort_by_key(|&x| (below[x], x));
            }
            (0..=n)
                .map(|j| {
                    let mut seg = order[..j].to_vec();
                    seg.sort_unstable();
                    seg
                })
                .collect()
        }
    }
}

/// Every subset of `0..n` with at most `bound` points lies inside some
/// member of `family`.
pub fn is_cofinal(family: &[Vec<usize>], n: usize, bound: usize) -> bool {
    let masks: Vec<u128> = family
        .iter()
        .map(|s| s.iter().fold(0u128, |m, &x| m | 1 << x))
        .collect();
    let mut ok = true;
    for size in 0..=bound.min(n) {
        for_each_subset(n, size, |s| {
            let m = s.iter().fold(0u128, |m, &x| m | 1 << x);
            if !masks.iter().any(|&f| f & m == m) {
                ok = false;
                return true;
            }
            false
        });
        if !ok {
            break;
        }
    }
    ok
}

/// An isomorphism between substructures of a window that no automorphism
/// of the window extends.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomogeneityFailure {
    pub domain: Vec<usize>,
    pub image: Vec<usize>,
}

/// Every isomorphism between substructures of `w` with at most `k` points
/// extends to an automorphism of `w`.
pub fn check_window_homogeneity(w: &FinStructure, k: usize) -> Result<Option<HomogeneityFailure>> {
    let auts = automorphisms(w);
    let mut failure = None;
    for size in 0..=k.min(w.size()) {
        let mut subsets = Vec::new();
        for_each_subset(w.size(), size, |s| {
            subsets.push(s.to_vec());
            false
        });
        for domain in subsets {
            let (sub, _) = w.induced_ordered(&domain)?;
            let restrictions: std::collections::BTreeSet<Vec<usize>> = auts
                .iter()
                .map(|a| domain.iter().map(|&x| a.apply(x)).collect())
                .collect();
            for e in enumerate_embeddings(&sub, w)? {
                if !restrictions.contains(e.map()) {
                    failure = Some(HomogeneityFailure {
                        domain: domain.clone(),
                        image: e.map().to_vec(),
                    });
                    break;
                }
            }
            if failure.is_some() {
                return Ok(failure);
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fraisse::catalog::builtin;
    use crate::structure::build;

    #[test]
    fn finite_chain_lacks_a_point_below() {
        let lo = builtin("linorder").unwrap();
        let m = check_extension_property(&build::chain(3), &lo, 1).unwrap().unwrap();
        assert_eq!(m.subset, vec![0]);
        // the missing extension puts the new point below the minimum
        assert!(m.extension.holds(0, &[1, 0]));
    }

    #[test]
    fn pure_sets_are_extension_closed() {
        let set = builtin("set").unwrap();
        for k in 0..4 {
            assert_eq!(check_extension_property(&build::pure_set(k + 1), &set, k).unwrap(), None);
        }
        assert!(check_extension_property(&build::pure_set(2), &set, 2).unwrap().is_some());
    }

    #[test]
    fn linear_order_approximant_grows_on_both_sides() {
        let lo = builtin("linorder").unwrap();
        let chain = build_limit_approximant(&lo, &build::chain(1), 3, 1).unwrap();
        let sizes: Vec<usize> = chain.stages.iter().map(FinStructure::size).collect();
        assert_eq!(sizes, vec![1, 3, 5, 7]);
        let chain = build_limit_approximant(&lo, &build::chain(1), 3, 2).unwrap();
        let sizes: Vec<usize> = chain.stages.iter().map(FinStructure::size).collect();
        // every gap, and both ends, gets a new point
        assert_eq!(sizes, vec![1, 3, 7, 15]);
        for s in &chain.stages {
            assert!(lo.contains(s));
        }
    }

    #[test]
    fn random_graph_approximant() {
        let g = builtin("graph").unwrap();
        let chain = build_limit_approximant(&g, &build::complete_graph(1), 2, 2).unwrap();
        chain.validate().unwrap();
        for i in 0..2 {
            let over = check_extension_property_over(
                &chain.stages[i],
                &chain.inclusions[i],
                &chain.stages[i + 1],
                &g,
                2,
            )
            .unwrap();
            assert_eq!(over, None);
        }
        // over every pair of stage 1 there are points adjacent to exactly
        // each subset of the pair in stage 2
        let s1 = &chain.stages[1];
        let s2 = &chain.stages[2];
        for a in 0..s1.size() {
            for b in a + 1..s1.size() {
                for mask in 0..4 {
                    let want_a = mask & 1 == 1;
                    let want_b = mask & 2 == 2;
                    assert!((s1.size()..s2.size())
                        .chain(0..s1.size())
                        .any(|z| z != a && z != b && s2.holds(0, &[a, z]) == want_a && s2.holds(0, &[b, z]) == want_b));
                }
            }
        }
    }

    #[test]
    fn pure_set_approximant() {
        let set = builtin("set").unwrap();
        let chain = build_limit_approximant(&set, &build::pure_set(0), 3, 2).unwrap();
        let sizes: Vec<usize> = chain.stages.iter().map(FinStructure::size).collect();
        assert_eq!(sizes, vec![0, 1, 2, 3]);
    }

    #[test]
    fn cofinal_families() {
        let w = build::chain(6);
        let all = cofinal_family(&w, CofinalStrategy::All);
        assert_eq!(all.len(), 64);
        assert!(is_cofinal(&all, 6, 6));
        let segs = cofinal_family(&w, CofinalStrategy::InitialSegments);
        assert_eq!(segs.len(), 7);
        assert!(is_cofinal(&segs, 6, 6));
        let even = cofinal_family(&w, CofinalStrategy::EvenSized);
        assert!(is_cofinal(&even, 6, 6));
        let odd_window = cofinal_family(&build::chain(5), CofinalStrategy::EvenSized);
        assert!(is_cofinal(&odd_window, 5, 4));
        assert!(!is_cofinal(&odd_window, 5, 5));
        // initial segments follow the order, not the labels
        let relabeled = build::chain(3).relabel(&[2, 0, 1]);
        let segs = cofinal_family(&relabeled, CofinalStrategy::InitialSegments);
        assert_eq!(segs[1], vec![2]);
    }

    #[test]
    fn homogeneity_of_windows() {
        assert_eq!(check_window_homogeneity(&build::pure_set(4), 4).unwrap(), None);
        assert_eq!(check_window_homogeneity(&build::cycle(5), 2).unwrap(), None);
        // a finite chain has only the identity automorphism
        assert!(check_window_homogeneity(&build::chain(3), 1).unwrap().is_some());
        assert!(check_window_homogeneity(&build::path(3), 1).unwrap().is_some());
    }
}
