use rayon::prelude::*;

use super::ClassSpec;
use crate::canon::automorphisms;
use crate::embedding::{embedding_violation, enumerate_embeddings, first_embedding, Embedding};
use crate::error::{Error, Result};
use crate::structure::FinStructure;

/// Outcome of checking an axiom up to a size bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AxiomResult<T> {
    HoldsUpTo(usize),
    Fails(T),
}

impl<T> AxiomResult<T> {
    pub fn holds(&self) -> bool {
        matches!(self, AxiomResult::HoldsUpTo(_))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HpFailure {
    pub member: FinStructure,
    /// Points of `member` spanning a non-member.
    pub subset: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JepFailure {
    pub a: FinStructure,
    pub b: FinStructure,
    pub search_bound: usize,
}

/// `f1: a -> b1` and `f2: a -> b2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Span {
    pub a: FinStructure,
    pub b1: FinStructure,
    pub b2: FinStructure,
    pub f1: Embedding,
    pub f2: Embedding,
}

/// `g1: b1 -> c` and `g2: b2 -> c` with `g1∘f1 = g2∘f2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Amalgam {
    pub c: FinStructure,
    pub g1: Embedding,
    pub g2: Embedding,
    /// Whether `c` is the free amalgam.
    pub free: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AmalgamOutcome {
    Found(Amalgam),
    /// No member of size at most `search_bound` amalgamates the span.
    Exhausted { search_bound: usize },
}

impl AmalgamOutcome {
    pub fn amalgam(&self) -> Option<&Amalgam> {
        match self {
            AmalgamOutcome::Found(a) => Some(a),
            AmalgamOutcome::Exhausted { .. } => None,
        }
    }
}

/// Every induced substructure of every member up to `bound` is a member.
pub fn check_hp(k: &ClassSpec, bound: usize) -> Result<AxiomResult<HpFailure>> {
    for n in 0..=bound {
        for m in k.members_of_size(n)?.iter() {
            // subsets by size, then lexicographically
            for size in 0..n {
                let mut found = None;
                for_each_subset(n, size, |subset| {
                    let (sub, _) = m.induced_ordered(subset).expect("subset in range");
                    if !k.contains(&sub) {
                        found = Some(subset.to_vec());
                        return true;
                    }
                    false
                });
                if let Some(subset) = found {
                    return Ok(AxiomResult::Fails(HpFailure { member: m.clone(), subset }));
                }
            }
        }
    }
    Ok(AxiomResult::HoldsUpTo(bound))
}

/// Calls `f` on each `size`-subset of `0..n` in lexicographic order until it
/// returns true.
pub(crate) fn for_each_subset(n: usize, size: usize, mut f: impl FnMut(&[usize]) -> bool) {
    if size > n {
        return;
    }
    let mut idx: Vec<usize> = (0..size).collect();
    loop {
        if f(&idx) {
            return;
        }
        // rightmost position that can still advance
        let mut i = size;
        while i > 0 && idx[i - 1] == n - size + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return;
        }
        idx[i - 1] += 1;
        for j in i..size {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// The disjoint union of `b1` and `b2` glued along the images of `f1` and
/// `f2`, with no further tuples. Points of `b1` keep their labels; the
/// remaining points of `b2` follow in increasing order.
pub fn free_amalgam(b1: &FinStructure, b2: &FinStructure, f1: &Embedding, f2: &Embedding) -> Result<(FinStructure, Embedding, Embedding)> {
    b1.same_signature(b2)?;
    if f1.src_size() != f2.src_size() || f1.dst_size() != b1.size() || f2.dst_size() != b2.size() {
        return Err(Error::Precondition("span maps do not match the structures".into()));
    }
    let mut g2 = vec![usize::MAX; b2.size()];
    for (&x1, &x2) in f1.map().iter().zip(f2.map()) {
        g2[x2] = x1;
    }
    let mut next = b1.size();
    for slot in g2.iter_mut() {
        if *slot == usize::MAX {
            *slot = next;
            next += 1;
        }
    }
    let mut tables = b1.tables().to_vec();
    for (sym, table) in b2.tables().iter().enumerate() {
        for t in table {
            tables[sym].push(t.iter().map(|&x| g2[x]).collect());
        }
        tables[sym].sort();
        tables[sym].dedup();
    }
    let c = FinStructure::new(b1.sig_arc().clone(), next, tables)?;
    let g1 = Embedding::from_parts(b1.size(), next, (0..b1.size()).collect());
    let g2 = Embedding::from_parts(b2.size(), next, g2);
    Ok((c, g1, g2))
}

fn validate_span(k: &ClassSpec, span: &Span) -> Result<()> {
    span.a.same_signature(&span.b1)?;
    span.a.same_signature(&span.b2)?;
    for (f, b) in [(&span.f1, &span.b1), (&span.f2, &span.b2)] {
        if f.src_size() != span.a.size() || f.dst_size() != b.size() {
            return Err(Error::NotAnEmbedding("span map has the wrong shape".into()));
        }
        if let Some(why) = embedding_violation(&span.a, b, f.map()) {
            return Err(Error::NotAnEmbedding(why));
        }
    }
    for s in [&span.a, &span.b1, &span.b2] {
        k.require_member(s)?;
    }
    Ok(())
}

/// Re-checks an amalgam: embeddings into a member and a commuting square.
pub fn verify_amalgam(k: &ClassSpec, span: &Span, am: &Amalgam) -> Result<()> {
    k.require_member(&am.c)?;
    for (g, b) in [(&am.g1, &span.b1), (&am.g2, &span.b2)] {
        if g.src_size() != b.size() || g.dst_size() != am.c.size() {
            return Err(Error::NotAnEmbedding("amalgam map has the wrong shape".into()));
        }
        if let Some(why) = embedding_violation(b, &am.c, g.map()) {
            return Err(Error::NotAnEmbedding(why));
        }
    }
    let left = am.g1.compose(&span.f1)?;
    let right = am.g2.compose(&span.f2)?;
    if left.map() != right.map() {
        return Err(Error::AmalgamationFailed("square does not commute".into()));
    }
    Ok(())
}

/// Finds an amalgam of the span in `k`: the free amalgam when it is a
/// member, otherwise the first member by size and canonical order (up to
/// `search_bound` points) admitting commuting embeddings.
pub fn amalgamate(k: &ClassSpec, span: &Span, search_bound: usize) -> Result<AmalgamOutcome> {
    validate_span(k, span)?;
    let (c, g1, g2) = free_amalgam(&span.b1, &span.b2, &span.f1, &span.f2)?;
    if k.contains(&c) {
        let am = Amalgam { c, g1, g2, free: true };
        verify_amalgam(k, span, &am)?;
        return Ok(AmalgamOutcome::Found(am));
    }
    let lo = span.b1.size().max(span.b2.size());
    for n in lo..=search_bound {
        for c in k.members_of_size(n)?.iter() {
            if let Some(am) = amalgam_into(span, c)? {
                verify_amalgam(k, span, &am)?;
                return Ok(AmalgamOutcome::Found(am));
            }
        }
    }
    Ok(AmalgamOutcome::Exhausted { search_bound })
}

fn amalgam_into(span: &Span, c: &FinStructure) -> Result<Option<Amalgam>> {
    for g1 in enumerate_embeddings(&span.b1, c)? {
        let mut partial: Vec<Option<usize>> = vec![None; span.b2.size()];
        for (i, &x2) in span.f2.map().iter().enumerate() {
            partial[x2] = Some(g1.apply(span.f1.apply(i)));
        }
        if let Some(g2) = first_embedding(&span.b2, c, Some(&partial))? {
            return Ok(Some(Amalgam { c: c.clone(), g1, g2, free: false }));
        }
    }
    Ok(None)
}

/// Default search bound for amalgams of a span: in a hereditary class the
/// union of the two images is itself an amalgam.
pub(crate) fn default_search_bound(span: &Span) -> usize {
    span.b1.size() + span.b2.size() - span.a.size()
}

/// A member embedding both `a` and `b`, tried as the amalgam over the empty
/// structure.
pub fn joint_embedding(k: &ClassSpec, a: &FinStructure, b: &FinStructure, search_bound: usize) -> Result<AmalgamOutcome> {
    let empty = FinStructure::empty(a.sig_arc().clone());
    let span = Span {
        f1: Embedding::from_parts(0, a.size(), Vec::new()),
        f2: Embedding::from_parts(0, b.size(), Vec::new()),
        a: empty,
        b1: a.clone(),
        b2: b.clone(),
    };
    if !k.contains(&span.a) {
        // the empty structure is not a member: search directly
        a.same_signature(b)?;
        k.require_member(a)?;
        k.require_member(b)?;
        let (c, g1, g2) = free_amalgam(a, b, &span.f1, &span.f2)?;
        if k.contains(&c) {
            return Ok(AmalgamOutcome::Found(Amalgam { c, g1, g2, free: true }));
        }
        for n in a.size().max(b.size())..=search_bound {
            for c in k.members_of_size(n)?.iter() {
                if let Some(am) = amalgam_into(&span, c)? {
                    return Ok(AmalgamOutcome::Found(am));
                }
            }
        }
        return Ok(AmalgamOutcome::Exhausted { search_bound });
    }
    amalgamate(k, &span, search_bound)
}

/// Every pair of members up to `bound` embeds jointly into a member of size
/// at most `|A| + |B|`.
pub fn check_jep(k: &ClassSpec, bound: usize) -> Result<AxiomResult<JepFailure>> {
    let members = k.members_up_to(bound)?;
    let pairs: Vec<(usize, usize)> = (0..members.len())
        .flat_map(|i| (i..members.len()).map(move |j| (i, j)))
        .collect();
    let failure = pairs
        .par_iter()
        .map(|&(i, j)| {
            let (a, b) = (&members[i], &members[j]);
            let sb = a.size() + b.size();
            match joint_embedding(k, a, b, sb)? {
                AmalgamOutcome::Found(_) => Ok(None),
                AmalgamOutcome::Exhausted { search_bound } => Ok(Some(JepFailure {
                    a: a.clone(),
                    b: b.clone(),
                    search_bound,
                })),
            }
        })
        .find_map_first(|r: Result<Option<JepFailure>>| match r {
            Ok(None) => None,
            other => Some(other),
        });
    match failure {
        None => Ok(AxiomResult::HoldsUpTo(bound)),
        Some(r) => r.map(|f| AxiomResult::Fails(f.expect("filtered"))),
    }
}

/// Representatives of `Emb(a, b)` up to automorphisms of `b`: the
/// lexicographically least map of each orbit.
fn embeddings_up_to_automorphism(a: &FinStructure, b: &FinStructure, auts: &[Embedding]) -> Result<Vec<Embedding>> {
    let all = enumerate_embeddings(a, b)?;
    Ok(all
        .into_iter()
        .filter(|f| {
            auts.iter().all(|s| {
                let moved: Vec<usize> = f.map().iter().map(|&x| s.apply(x)).collect();
                moved.as_slice() >= f.map()
            })
        })
        .collect())
}

/// All spans with `|A| ≤ |B1|, |B2| ≤ bound`, `B1` not after `B2` in
/// canonical order, and each map taken up to automorphisms of its target.
pub fn spans_up_to(k: &ClassSpec, bound: usize) -> Result<Vec<Span>> {
    let members = k.members_up_to(bound)?;
    let auts: Vec<Vec<Embedding>> = members.iter().map(automorphisms).collect();
    let mut out = Vec::new();
    for a in &members {
        for i in 0..members.len() {
            let b1 = &members[i];
            if b1.size() < a.size() {
                continue;
            }
            let f1s = embeddings_up_to_automorphism(a, b1, &auts[i])?;
            if f1s.is_empty() {
                continue;
            }
            for j in i..members.len() {
                let b2 = &members[j];
                if b2.size() < a.size() {
                    continue;
                }
                let f2s = embeddings_up_to_automorphism(a, b2, &auts[j])?;
                for f1 in &f1s {
                    for f2 in &f2s {
                        out.push(Span {
                            a: a.clone(),
                            b1: b1.clone(),
                            b2: b2.clone(),
                            f1: f1.clone(),
                            f2: f2.clone(),
                        });
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Every span of members up to `bound` amalgamates in `k`. The first failing
/// span in canonical order is reported, however the sweep is scheduled.
pub fn check_ap(k: &ClassSpec, bound: usize) -> Result<AxiomResult<Span>> {
    let spans = spans_up_to(k, bound)?;
    let failure = spans
        .par_iter()
        .map(|span| match amalgamate(k, span, default_search_bound(span))? {
            AmalgamOutcome::Found(_) => Ok(false),
            AmalgamOutcome::Exhausted { .. } => Ok(true),
        })
        .enumerate()
        .find_map_first(|(i, r): (usize, Result<bool>)| match r {
            Ok(false) => None,
            Ok(true) => Some(Ok(i)),
            Err(e) => Some(Err(e)),
        });
    match failure {
        None => Ok(AxiomResult::HoldsUpTo(bound)),
        Some(r) => r.map(|i| AxiomResult::Fails(spans[i].clone())),
    }
}
