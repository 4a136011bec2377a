//! Brute-force reference computations for the integration tests. Nothing
//! here calls the library's embedding, search or canonical-form code.

#![allow(dead_code)]

use ramsey_core::structure::{FinStructure, Tuple};

fn all_tuples(n: usize, arity: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..arity {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..n).map(move |x| {
                    let mut u = t.clone();
                    u.push(x);
                    u
                })
            })
            .collect();
    }
    out
}

fn preserves(src: &FinStructure, dst: &FinStructure, map: &[usize]) -> bool {
    (0..src.sig().len()).all(|s| {
        all_tuples(src.size(), src.sig().arity(s)).iter().all(|t| {
            let img: Vec<usize> = t.iter().map(|&x| map[x]).collect();
            src.holds(s, t) == dst.holds(s, &img)
        })
    })
}

/// Every injective map `src -> dst` preserving and reflecting all
/// relations, in lexicographic order of the map.
pub fn embeddings(src: &FinStructure, dst: &FinStructure) -> Vec<Vec<usize>> {
    fn go(src: &FinStructure, dst: &FinStructure, map: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if map.len() == src.size() {
            if preserves(src, dst, map) {
                out.push(map.clone());
            }
            return;
        }
        for y in 0..dst.size() {
            if !map.contains(&y) {
                map.push(y);
                go(src, dst, map, out);
                map.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(src, dst, &mut Vec::new(), &mut out);
    out
}

pub fn automorphism_count(s: &FinStructure) -> usize {
    embeddings(s, s).len()
}

pub fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// The points of `tuple` in order of first appearance, the structure they
/// induce, and the tuple rewritten over it.
fn span(a: &FinStructure, tuple: &[usize]) -> (FinStructure, Tuple) {
    let mut points: Vec<usize> = Vec::new();
    for &x in tuple {
        if !points.contains(&x) {
            points.push(x);
        }
    }
    let s = FinStructure::from_fn(a.sig().clone(), points.len(), |sym, t| {
        let img: Vec<usize> = t.iter().map(|&i| points[i]).collect();
        a.holds(sym, &img)
    });
    let rewritten = tuple.iter().map(|x| points.iter().position(|p| p == x).unwrap()).collect();
    (s, rewritten)
}

/// Images of `tuple` (over `a`) in `c`, sorted.
pub fn copies(a: &FinStructure, tuple: &[usize], c: &FinStructure) -> Vec<Tuple> {
    let (s, t) = span(a, tuple);
    let mut out: Vec<Tuple> = embeddings(&s, c)
        .iter()
        .map(|f| t.iter().map(|&x| f[x]).collect())
        .collect();
    out.sort();
    out.dedup();
    out
}

/// For each copy of `b` in `c`, the indices (into the sorted copies of the
/// tuple in `c`) of the tuple copies it contains.
pub fn hypergraph(c: &FinStructure, b: &FinStructure, a: &FinStructure, tuple: &[usize]) -> (Vec<Tuple>, Vec<Vec<usize>>) {
    let domain = copies(a, tuple, c);
    let in_b = copies(a, tuple, b);
    let edges = embeddings(b, c)
        .iter()
        .map(|g| {
            in_b.iter()
                .map(|t| {
                    let img: Tuple = t.iter().map(|&x| g[x]).collect();
                    domain.binary_search(&img).unwrap()
                })
                .collect()
        })
        .collect();
    (domain, edges)
}

fn distinct(edge: &[usize], colors: &[usize]) -> usize {
    let mut seen: Vec<usize> = edge.iter().map(|&i| colors[i]).collect();
    seen.sort_unstable();
    seen.dedup();
    seen.len()
}

/// The lexicographically least `r`-coloring of the tuple copies in `c`
/// under which every copy of `b` sees more than `k` colors, found by trying
/// all `r^n` colorings in order.
pub fn least_bad(c: &FinStructure, b: &FinStructure, a: &FinStructure, tuple: &[usize], r: usize, k: usize) -> Option<Vec<usize>> {
    let (domain, edges) = hypergraph(c, b, a, tuple);
    let n = domain.len();
    let mut colors = vec![0usize; n];
    loop {
        if edges.iter().all(|e| distinct(e, &colors) > k) {
            return Some(colors);
        }
        // next coloring, entry 0 most significant
        let mut i = n;
        loop {
            if i == 0 {
                return None;
            }
            i -= 1;
            colors[i] += 1;
            if colors[i] < r {
                break;
            }
            colors[i] = 0;
        }
    }
}

pub fn arrows(c: &FinStructure, b: &FinStructure, a: &FinStructure, tuple: &[usize], r: usize, k: usize) -> bool {
    least_bad(c, b, a, tuple, r, k).is_none()
}

pub fn log2_colorings(c: &FinStructure, a: &FinStructure, tuple: &[usize], r: usize) -> f64 {
    copies(a, tuple, c).len() as f64 * (r.max(1) as f64).log2()
}

/// A uniformly random permutation of `0..n` driven by `seed`.
pub fn permutation(n: usize, mut seed: u64) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let j = ((seed >> 33) % (i as u64 + 1)) as usize;
        p.swap(i, j);
    }
    p
}
