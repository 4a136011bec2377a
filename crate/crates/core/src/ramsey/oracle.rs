//! Exhaustive enumeration of colorings, kept independent of the search
//! engine so the two can be compared.
//!
//! Copies of a tuple are computed here as the images of the tuple under all
//! embeddings of its structure, so the tuple must mention every point.

use rayon::prelude::*;

use crate::embedding::enumerate_embeddings;
use crate::error::{Error, Result};
use crate::structure::{FinStructure, Tuple};

/// Largest `log2` of the number of colorings the oracle will enumerate.
pub const DEFAULT_GUARD_BITS: f64 = 24.0;

struct Instance {
    domain: Vec<Tuple>,
    edges: Vec<Vec<usize>>,
}

fn images(a: &FinStructure, tuple: &[usize], c: &FinStructure) -> Result<Vec<Tuple>> {
    if (0..a.size()).any(|p| !tuple.contains(&p)) {
        return Err(Error::Precondition("the oracle needs a tuple mentioning every point".into()));
    }
    let mut out: Vec<Tuple> = enumerate_embeddings(a, c)?
        .iter()
        .map(|f| tuple.iter().map(|&x| f.apply(x)).collect())
        .collect();
    out.sort();
    out.dedup();
    Ok(out)
}

fn instance(c: &FinStructure, b: &FinStructure, a: &FinStructure, tuple: &[usize]) -> Result<Instance> {
    let domain = images(a, tuple, c)?;
    let in_b = images(a, tuple, b)?;
    let edges = enumerate_embeddings(b, c)?
        .iter()
        .map(|g| {
            in_b.iter()
                .map(|t| {
                    let img: Tuple = t.iter().map(|&x| g.apply(x)).collect();
                    domain.binary_search(&img).expect("image of a copy is a copy")
                })
                .collect()
        })
        .collect();
    Ok(Instance { domain, edges })
}

fn guard(vars: usize, r: usize, bits: f64) -> Result<u64> {
    let log = vars as f64 * (r.max(1) as f64).log2();
    if log > bits {
        return Err(Error::LimitExceeded(format!(
            "{r}^{vars} colorings exceed the oracle guard of 2^{bits}"
        )));
    }
    Ok((r as u64).pow(vars as u32))
}

/// The `index`-th coloring in lexicographic order (entry 0 most significant).
fn decode(mut index: u64, vars: usize, r: usize, out: &mut [usize]) {
    for slot in out[..vars].iter_mut().rev() {
        *slot = (index % r as u64) as usize;
        index /= r as u64;
    }
}

fn sees_more_than(edge: &[usize], colors: &[usize], k: usize) -> bool {
    let mut seen = 0u64;
    for &i in edge {
        seen |= 1 << colors[i];
    }
    seen.count_ones() as usize > k
}

/// The lexicographically least coloring under which every copy of `b` sees
/// more than `k` colors, found by trying all `r^n` colorings.
pub fn least_bad_coloring(
    c: &FinStructure,
    b: &FinStructure,
    a: &FinStructure,
    tuple: &[usize],
    r: usize,
    k: usize,
) -> Result<Option<(Vec<Tuple>, Vec<usize>)>> {
    let inst = instance(c, b, a, tuple)?;
    let n = inst.domain.len();
    if r == 0 {
        return if n == 0 && inst.edges.iter().all(|e| sees_more_than(e, &[], k)) {
            Ok(Some((inst.domain, Vec::new())))
        } else {
            Ok(None)
        };
    }
    let total = guard(n, r, DEFAULT_GUARD_BITS)?;
    let found = (0..total).into_par_iter().find_first(|&i| {
        let mut colors = vec![0usize; n];
        decode(i, n, r, &mut colors);
        inst.edges.iter().all(|e| sees_more_than(e, &colors, k))
    });
    Ok(found.map(|i| {
        let mut colors = vec![0usize; n];
        decode(i, n, r, &mut colors);
        (inst.domain, colors)
    }))
}

/// Number of bad colorings, by enumeration.
pub fn count_bad_colorings(
    c: &FinStructure,
    b: &FinStructure,
    a: &FinStructure,
    tuple: &[usize],
    r: usize,
    k: usize,
) -> Result<u64> {
    let inst = instance(c, b, a, tuple)?;
    let n = inst.domain.len();
    let total = guard(n, r, DEFAULT_GUARD_BITS)?;
    Ok((0..total)
        .into_par_iter()
        .filter(|&i| {
            let mut colors = vec![0usize; n];
            decode(i, n, r, &mut colors);
            inst.edges.iter().all(|e| sees_more_than(e, &colors, k))
        })
        .count() as u64)
}

/// One tuple of a joint instance: its structure, the tuple, its palette
/// and the number of colors a good copy may show on it.
#[derive(Clone, Debug)]
pub struct JointSpec<'a> {
    pub a: &'a FinStructure,
    pub tuple: &'a [usize],
    pub r: usize,
    pub k: usize,
}

/// Whether every simultaneous coloring admits one copy of `b` meeting every
/// tuple's bound, by enumeration.
pub fn joint_arrows(c: &FinStructure, b: &FinStructure, specs: &[JointSpec<'_>]) -> Result<bool> {
    let instances: Vec<Instance> = specs
        .iter()
        .map(|s| instance(c, b, s.a, s.tuple))
        .collect::<Result<_>>()?;
    let copies = enumerate_embeddings(b, c)?.len();
    let mut log = 0.0;
    let mut total: u64 = 1;
    for (s, inst) in specs.iter().zip(&instances) {
        log += inst.domain.len() as f64 * (s.r.max(1) as f64).log2();
        total = total.saturating_mul((s.r as u64).pow(inst.domain.len() as u32));
    }
    if log > DEFAULT_GUARD_BITS {
        return Err(Error::LimitExceeded(format!("2^{log:.1} joint colorings exceed the oracle guard")));
    }
    let bad_exists = (0..total).into_par_iter().any(|mut i| {
        let mut colorings = Vec::with_capacity(specs.len());
        for (s, inst) in specs.iter().zip(&instances).rev() {
            let n = inst.domain.len();
            let block = (s.r as u64).pow(n as u32);
            let mut colors = vec![0usize; n];
            decode(i % block, n, s.r, &mut colors);
            i /= block;
            colorings.push(colors);
        }
        colorings.reverse();
        (0..copies).all(|g| {
            specs
                .iter()
                .zip(&instances)
                .zip(&colorings)
                .any(|((s, inst), colors)| sees_more_than(&inst.edges[g], colors, s.k))
        })
    });
    Ok(!bad_exists)
}
