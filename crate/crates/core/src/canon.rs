//! Canonical labeling by individualization and refinement.
//!
//! Points are colored by an isomorphism-invariant refinement; non-discrete
//! colorings are split by individualizing each point of the first
//! non-singleton cell in turn. Every leaf yields a relabeled structure and
//! the lexicographically least one is the canonical form. Automorphisms
//! found along the way (two leaves with equal certificates) prune sibling
//! branches that lie in the same orbit.

use std::collections::BTreeMap;

use crate::embedding::{enumerate_embeddings, Embedding};
use crate::structure::{FinStructure, Tuple};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalForm {
    pub structure: FinStructure,
    /// `relabel[i]` is the canonical label of point `i`.
    pub relabel: Vec<usize>,
}

pub fn canonical_form(s: &FinStructure) -> CanonicalForm {
    let n = s.size();
    if n == 0 {
        return CanonicalForm {
            structure: s.clone(),
            relabel: Vec::new(),
        };
    }
    let incidence = Incidence::new(s);
    let mut search = Search {
        s,
        incidence: &incidence,
        best: None,
        automorphisms: Vec::new(),
    };
    let start = incidence.refine(vec![0; n]);
    search.descend(start, &mut Vec::new());
    let (_, relabel) = search.best.expect("at least one leaf");
    CanonicalForm {
        structure: s.relabel(&relabel),
        relabel,
    }
}

pub fn is_isomorphic(a: &FinStructure, b: &FinStructure) -> bool {
    a.sig() == b.sig()
        && a.size() == b.size()
        && a.tuple_count() == b.tuple_count()
        && canonical_form(a).structure == canonical_form(b).structure
}

/// An isomorphism `a -> b`, if one exists.
pub fn find_isomorphism(a: &FinStructure, b: &FinStructure) -> Option<Embedding> {
    if a.sig() != b.sig() || a.size() != b.size() {
        return None;
    }
    let ca = canonical_form(a);
    let cb = canonical_form(b);
    if ca.structure != cb.structure {
        return None;
    }
    let mut inv_b = vec![0; b.size()];
    for (i, &c) in cb.relabel.iter().enumerate() {
        inv_b[c] = i;
    }
    let map = ca.relabel.iter().map(|&c| inv_b[c]).collect();
    Some(Embedding::from_parts(a.size(), b.size(), map))
}

/// All automorphisms in lexicographic order (identity first).
pub fn automorphisms(s: &FinStructure) -> Vec<Embedding> {
    enumerate_embeddings(s, s).expect("same signature")
}

struct Incidence {
    /// per point: (symbol, tuple) for each tuple containing it, once per occurrence
    occurrences: Vec<Vec<(usize, usize, usize)>>,
    tuples: Vec<Vec<Tuple>>,
    patterns: Vec<Vec<Vec<usize>>>,
}

impl Incidence {
    fn new(s: &FinStructure) -> Self {
        let mut occurrences = vec![Vec::new(); s.size()];
        let mut patterns = Vec::new();
        for (sym, table) in s.tables().iter().enumerate() {
            let mut pats = Vec::with_capacity(table.len());
            for (ti, t) in table.iter().enumerate() {
                for (pos, &v) in t.iter().enumerate() {
                    occurrences[v].push((sym, ti, pos));
                }
                pats.push(crate::embedding::TuplePattern::of(t).pattern);
            }
            patterns.push(pats);
        }
        Incidence {
            occurrences,
            tuples: s.tables().to_vec(),
            patterns,
        }
    }

    /// Refines an ordered partition (given as cell ranks) to equitability.
    fn refine(&self, mut colors: Vec<usize>) -> Vec<usize> {
        let n = colors.len();
        let mut cells = count_cells(&colors);
        loop {
            let keys: Vec<(usize, Vec<Vec<usize>>)> = (0..n)
                .map(|v| {
                    let mut sig: Vec<Vec<usize>> = self.occurrences[v]
                        .iter()
                        .map(|&(sym, ti, pos)| {
                            let t = &self.tuples[sym][ti];
                            let mut e = Vec::with_capacity(2 + 2 * t.len());
                            e.push(sym);
                            e.push(pos);
                            e.extend_from_slice(&self.patterns[sym][ti]);
                            e.extend(t.iter().map(|&u| colors[u]));
                            e
                        })
                        .collect();
                    sig.sort_unstable();
                    (colors[v], sig)
                })
                .collect();
            colors = ranks(&keys);
            let now = count_cells(&colors);
            if now == cells {
                return colors;
            }
            cells = now;
        }
    }
}

fn count_cells(colors: &[usize]) -> usize {
    colors.iter().max().map_or(0, |m| m + 1)
}

/// Dense ranks of the keys, preserving their order.
fn ranks<K: Ord + Clone>(keys: &[K]) -> Vec<usize> {
    let mut sorted: Vec<&K> = keys.iter().collect();
    sorted.sort();
    sorted.dedup();
    let index: BTreeMap<&K, usize> = sorted.into_iter().enumerate().map(|(i, k)| (k, i)).collect();
    keys.iter().map(|k| index[k]).collect()
}

struct Search<'a> {
    s: &'a FinStructure,
    incidence: &'a Incidence,
    best: Option<(Vec<Vec<Tuple>>, Vec<usize>)>,
    automorphisms: Vec<Vec<usize>>,
}

impl Search<'_> {
    fn descend(&mut self, colors: Vec<usize>, prefix: &mut Vec<usize>) {
        let n = colors.len();
        if count_cells(&colors) == n {
            self.leaf(colors);
            return;
        }
        let mut sizes = vec![0usize; n];
        for &c in &colors {
            sizes[c] += 1;
        }
        let target = (0..n).find(|&c| sizes[c] > 1).unwrap();
        let candidates: Vec<usize> = (0..n).filter(|&v| colors[v] == target).collect();
        let mut explored: Vec<usize> = Vec::new();
        for v in candidates {
            if !explored.is_empty() && self.same_orbit(prefix, &explored, v) {
                continue;
            }
            explored.push(v);
            let keys: Vec<(usize, usize)> = (0..n)
                .map(|u| (colors[u], usize::from(colors[u] == target && u != v)))
                .collect();
            let individualized = self.incidence.refine(ranks(&keys));
            prefix.push(v);
            self.descend(individualized, prefix);
            prefix.pop();
        }
    }

    fn leaf(&mut self, labels: Vec<usize>) {
        let cert = self.s.relabel(&labels).tables().to_vec();
        match &self.best {
            None => self.best = Some((cert, labels)),
            Some((best, best_labels)) => match cert.cmp(best) {
                std::cmp::Ordering::Less => self.best = Some((cert, labels)),
                std::cmp::Ordering::Equal => {
                    // labels ∘ best_labels⁻¹ maps the structure onto itself
                    let mut inv = vec![0; labels.len()];
                    for (i, &l) in best_labels.iter().enumerate() {
                        inv[l] = i;
                    }
                    let aut: Vec<usize> = labels.iter().map(|&l| inv[l]).collect();
                    if aut.iter().enumerate().any(|(i, &x)| i != x) {
                        self.automorphisms.push(aut);
                    }
                }
                std::cmp::Ordering::Greater => {}
            },
        }
    }

    /// Whether `v` lies in the orbit of an explored point under the group
    /// generated by known automorphisms fixing `prefix` pointwise.
    fn same_orbit(&self, prefix: &[usize], explored: &[usize], v: usize) -> bool {
        let n = self.s.size();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while parent[r] != r {
                r = parent[r];
            }
            let mut y = x;
            while parent[y] != r {
                let next = parent[y];
                parent[y] = r;
                y = next;
            }
            r
        }
        let mut any = false;
        for aut in &self.automorphisms {
            if prefix.iter().all(|&p| aut[p] == p) {
                any = true;
                for (x, &y) in aut.iter().enumerate() {
                    let (a, b) = (find(&mut parent, x), find(&mut parent, y));
                    if a != b {
                        parent[a] = b;
                    }
                }
            }
        }
        if !any {
            return false;
        }
        let rv = find(&mut parent, v);
        explored.iter().any(|&e| find(&mut parent, e) == rv)
    }
}
