//! Embeddings between finite structures and copies of tuples.
//!
//! An embedding is an injective map that preserves and reflects every
//! relation. Enumeration is a plain backtracking search over the source
//! points in increasing order, so results come out lexicographically
//! ordered by their map arrays.

use std::ops::ControlFlow;

use crate::error::{Error, Result};
use crate::structure::{for_each_tuple, FinStructure, Tuple};

/// An embedding `src -> dst`, stored as its map array together with the
/// sizes of both ends.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Embedding {
    src_size: usize,
    dst_size: usize,
    map: Vec<usize>,
}

impl Embedding {
    /// Validates `map` as an embedding of `src` into `dst`.
    pub fn new(src: &FinStructure, dst: &FinStructure, map: Vec<usize>) -> Result<Self> {
        src.same_signature(dst)?;
        if map.len() != src.size() {
            return Err(Error::NotAnEmbedding(format!(
                "map has length {} but the source has {} points",
                map.len(),
                src.size()
            )));
        }
        if let Some(reason) = embedding_violation(src, dst, &map) {
            return Err(Error::NotAnEmbedding(reason));
        }
        Ok(Embedding::from_parts(src.size(), dst.size(), map))
    }

    pub(crate) fn from_parts(src_size: usize, dst_size: usize, map: Vec<usize>) -> Self {
        Embedding {
            src_size,
            dst_size,
            map,
        }
    }

    pub fn identity(n: usize) -> Self {
        Embedding::from_parts(n, n, (0..n).collect())
    }

    pub fn src_size(&self) -> usize {
        self.src_size
    }

    pub fn dst_size(&self) -> usize {
        self.dst_size
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn apply(&self, x: usize) -> usize {
        self.map[x]
    }

    pub fn apply_tuple(&self, t: &[usize]) -> Tuple {
        t.iter().map(|&x| self.map[x]).collect()
    }

    /// `self ∘ inner`: first `inner`, then `self`.
    pub fn compose(&self, inner: &Embedding) -> Result<Embedding> {
        if inner.dst_size != self.src_size {
            return Err(Error::CompositionMismatch(format!(
                "inner embedding lands in a structure of size {}, outer starts from size {}",
                inner.dst_size, self.src_size
            )));
        }
        Ok(Embedding::from_parts(
            inner.src_size,
            self.dst_size,
            inner.map.iter().map(|&x| self.map[x]).collect(),
        ))
    }

    /// The inverse of a bijective self-map.
    pub fn inverse(&self) -> Option<Embedding> {
        if self.src_size != self.dst_size {
            return None;
        }
        let mut inv = vec![usize::MAX; self.dst_size];
        for (i, &y) in self.map.iter().enumerate() {
            inv[y] = i;
        }
        if inv.contains(&usize::MAX) {
            return None;
        }
        Some(Embedding::from_parts(self.dst_size, self.src_size, inv))
    }

    pub fn is_bijective(&self) -> bool {
        self.src_size == self.dst_size
    }

    /// Sorted image of the map.
    pub fn image(&self) -> Vec<usize> {
        let mut img = self.map.clone();
        img.sort_unstable();
        img
    }
}

/// Describes why `map` fails to be an embedding, or `None` if it is one.
pub fn embedding_violation(src: &FinStructure, dst: &FinStructure, map: &[usize]) -> Option<String> {
    if map.len() != src.size() {
        return Some(format!("map length {} != {}", map.len(), src.size()));
    }
    let mut seen = vec![false; dst.size()];
    for (i, &y) in map.iter().enumerate() {
        if y >= dst.size() {
            return Some(format!("point {i} maps to {y}, outside a target of size {}", dst.size()));
        }
        if seen[y] {
            return Some(format!("map is not injective at {y}"));
        }
        seen[y] = true;
    }
    for (s, sym) in src.sig().symbols().iter().enumerate() {
        let mut bad = None;
        for_each_tuple(src.size(), sym.arity, |t| {
            if bad.is_some() {
                return;
            }
            let image: Vec<usize> = t.iter().map(|&x| map[x]).collect();
            if src.holds(s, t) != dst.holds(s, &image) {
                bad = Some(format!(
                    "`{}` differs on {:?} -> {:?}",
                    sym.name, t, image
                ));
            }
        });
        if bad.is_some() {
            return bad;
        }
    }
    None
}

struct Check {
    symbol: usize,
    tuple: Tuple,
    holds: bool,
}

/// For each source point `i`, the atomic facts over `{0..=i}` that mention `i`.
fn step_checks(src: &FinStructure) -> Vec<Vec<Check>> {
    let n = src.size();
    let mut out: Vec<Vec<Check>> = (0..n).map(|_| Vec::new()).collect();
    for (s, sym) in src.sig().symbols().iter().enumerate() {
        for_each_tuple(n, sym.arity, |t| {
            let top = *t.iter().max().unwrap();
            out[top].push(Check {
                symbol: s,
                tuple: t.to_vec(),
                holds: src.holds(s, t),
            });
        });
    }
    out
}

/// Visits every embedding `src -> dst` extending `partial` (where given) in
/// lexicographic order of map arrays. The visitor may stop early.
pub fn for_each_embedding<F>(
    src: &FinStructure,
    dst: &FinStructure,
    partial: Option<&[Option<usize>]>,
    mut visit: F,
) -> Result<()>
where
    F: FnMut(&[usize]) -> ControlFlow<()>,
{
    src.same_signature(dst)?;
    let n = src.size();
    if let Some(p) = partial {
        if p.len() != n {
            return Err(Error::Precondition(format!(
                "partial map has length {} but the source has {} points",
                p.len(),
                n
            )));
        }
        if let Some(&y) = p.iter().flatten().find(|&&y| y >= dst.size()) {
            return Err(Error::OutOfRange {
                point: y,
                size: dst.size(),
            });
        }
    }
    if n > dst.size() {
        return Ok(());
    }
    let checks = step_checks(src);
    let mut map = vec![0usize; n];
    let mut used = vec![false; dst.size()];
    let mut scratch = Vec::new();
    let _ = extend(
        src,
        dst,
        partial,
        &checks,
        0,
        &mut map,
        &mut used,
        &mut scratch,
        &mut visit,
    );
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn extend<F>(
    src: &FinStructure,
    dst: &FinStructure,
    partial: Option<&[Option<usize>]>,
    checks: &[Vec<Check>],
    i: usize,
    map: &mut Vec<usize>,
    used: &mut Vec<bool>,
    scratch: &mut Vec<usize>,
    visit: &mut F,
) -> ControlFlow<()>
where
    F: FnMut(&[usize]) -> ControlFlow<()>,
{
    if i == src.size() {
        return visit(map);
    }
    let (lo, hi) = match partial.and_then(|p| p[i]) {
        Some(y) => (y, y + 1),
        None => (0, dst.size()),
    };
    for y in lo..hi {
        if used[y] {
            continue;
        }
        map[i] = y;
        let ok = checks[i].iter().all(|c| {
            scratch.clear();
            scratch.extend(c.tuple.iter().map(|&x| map[x]));
            dst.holds(c.symbol, scratch) == c.holds
        });
        if !ok {
            continue;
        }
        used[y] = true;
        let flow = extend(src, dst, partial, checks, i + 1, map, used, scratch, visit);
        used[y] = false;
        flow?;
    }
    ControlFlow::Continue(())
}

/// All embeddings `src -> dst`, lexicographically ordered by map array.
pub fn enumerate_embeddings(src: &FinStructure, dst: &FinStructure) -> Result<Vec<Embedding>> {
    enumerate_embeddings_extending(src, dst, None)
}

pub fn enumerate_embeddings_extending(
    src: &FinStructure,
    dst: &FinStructure,
    partial: Option<&[Option<usize>]>,
) -> Result<Vec<Embedding>> {
    let mut out = Vec::new();
    for_each_embedding(src, dst, partial, |m| {
        out.push(Embedding::from_parts(src.size(), dst.size(), m.to_vec()));
        ControlFlow::Continue(())
    })?;
    Ok(out)
}

pub fn first_embedding(
    src: &FinStructure,
    dst: &FinStructure,
    partial: Option<&[Option<usize>]>,
) -> Result<Option<Embedding>> {
    let mut found = None;
    for_each_embedding(src, dst, partial, |m| {
        found = Some(Embedding::from_parts(src.size(), dst.size(), m.to_vec()));
        ControlFlow::Break(())
    })?;
    Ok(found)
}

/// `A ≤ B`: whether some embedding exists. Signature mismatch counts as no.
pub fn embeds(src: &FinStructure, dst: &FinStructure) -> bool {
    matches!(first_embedding(src, dst, None), Ok(Some(_)))
}

pub fn count_embeddings(src: &FinStructure, dst: &FinStructure) -> Result<usize> {
    let mut count = 0usize;
    for_each_embedding(src, dst, None, |_| {
        count += 1;
        ControlFlow::Continue(())
    })?;
    Ok(count)
}

/// A copy of the reference tuple `base` (over some structure A) inside a
/// structure B: a tuple with the same equality pattern and qf-type.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TupleCopy {
    pub base: Tuple,
    pub image: Tuple,
}

/// How a tuple with repetitions factors through its distinct entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TuplePattern {
    /// Distinct entries in order of first occurrence.
    pub distinct: Vec<usize>,
    /// `pattern[p]` is the index in `distinct` of position `p`.
    pub pattern: Vec<usize>,
}

impl TuplePattern {
    pub fn of(tuple: &[usize]) -> Self {
        let mut distinct: Vec<usize> = Vec::new();
        let pattern = tuple
            .iter()
            .map(|&x| match distinct.iter().position(|&d| d == x) {
                Some(i) => i,
                None => {
                    distinct.push(x);
                    distinct.len() - 1
                }
            })
            .collect();
        TuplePattern { distinct, pattern }
    }

    /// Expands a map on the distinct entries back to a full tuple.
    pub fn expand(&self, distinct_image: &[usize]) -> Tuple {
        self.pattern.iter().map(|&j| distinct_image[j]).collect()
    }
}

/// The substructure of `a` spanned by the distinct entries of `tuple`, in
/// first-occurrence order.
pub fn span_of_tuple(a: &FinStructure, tuple: &[usize]) -> Result<(FinStructure, TuplePattern)> {
    if let Some(&p) = tuple.iter().find(|&&p| p >= a.size()) {
        return Err(Error::OutOfRange {
            point: p,
            size: a.size(),
        });
    }
    let pattern = TuplePattern::of(tuple);
    let (span, _) = a.induced_ordered(&pattern.distinct)?;
    Ok((span, pattern))
}

/// All tuples of `b` with the same equality pattern and quantifier-free
/// type as `tuple` (a tuple of points of `a`), lexicographically ordered.
pub fn copies_of_tuple(a: &FinStructure, tuple: &[usize], b: &FinStructure) -> Result<Vec<TupleCopy>> {
    a.same_signature(b)?;
    let (span, pattern) = span_of_tuple(a, tuple)?;
    let mut out = Vec::new();
    for_each_embedding(&span, b, None, |m| {
        out.push(TupleCopy {
            base: tuple.to_vec(),
            image: pattern.expand(m),
        });
        ControlFlow::Continue(())
    })?;
    Ok(out)
}

/// Whether `image` realizes the same equality pattern and qf-type in `b`
/// as `tuple` does in `a`.
pub fn is_copy(a: &FinStructure, tuple: &[usize], b: &FinStructure, image: &[usize]) -> bool {
    if tuple.len() != image.len() || image.iter().any(|&p| p >= b.size()) {
        return false;
    }
    let Ok((span, pattern)) = span_of_tuple(a, tuple) else {
        return false;
    };
    // the distinct image must follow the same equality pattern
    let mut distinct_image = vec![usize::MAX; pattern.distinct.len()];
    for (p, &j) in pattern.pattern.iter().enumerate() {
        if distinct_image[j] == usize::MAX {
            distinct_image[j] = image[p];
        } else if distinct_image[j] != image[p] {
            return false;
        }
    }
    span.same_signature(b).is_ok() && embedding_violation(&span, b, &distinct_image).is_none()
}
