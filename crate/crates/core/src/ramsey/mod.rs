//! Arrow relations `C → (B)^A_r` and their degree variants, decided by
//! searching for a bad coloring: one under which every copy of `B` in `C`
//! sees more than `k` colors on its copies of `A`.

pub mod oracle;
pub mod search;
mod threads;
mod witness;

use std::collections::HashMap;
use std::time::{Duration, Instant};

use crate::canon::automorphisms;
use crate::embedding::{copies_of_tuple, enumerate_embeddings, Embedding};
use crate::error::{Error, Result};
use crate::structure::{FinStructure, Tuple};
use search::{Csp, Group, Order, SearchEnd};

pub use threads::{extend_bad_colorings, verify_thread};
pub use witness::{
    compute_degree, find_degree_witness, find_ramsey_witness, joint_arrows, joint_degree_witness, DegreeBounds,
    DegreeEvidence, DegreeVerdict, JointOutcome, JointTuple, LowerEvidence, WitnessOutcome,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Verdict {
    Yes,
    No,
    Unknown,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Yes => "yes",
            Verdict::No => "no",
            Verdict::Unknown => "unknown",
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A coloring of the copies of a tuple (for arrows: the embeddings of `A`)
/// in some structure, indexed in the order of `domain`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Coloring {
    pub r: usize,
    /// Images of the colored tuple, in lexicographic order.
    pub domain: Vec<Tuple>,
    pub colors: Vec<usize>,
}

impl Coloring {
    pub fn new(r: usize, domain: Vec<Tuple>, colors: Vec<usize>) -> Result<Self> {
        if domain.len() != colors.len() {
            return Err(Error::Precondition(format!(
                "{} colors for a domain of {}",
                colors.len(),
                domain.len()
            )));
        }
        if let Some(&c) = colors.iter().find(|&&c| c >= r) {
            return Err(Error::Precondition(format!("color {c} out of range for {r} colors")));
        }
        Ok(Coloring { r, domain, colors })
    }

    pub fn color_of(&self, image: &[usize]) -> Option<usize> {
        self.domain
            .binary_search_by(|t| t.as_slice().cmp(image))
            .ok()
            .map(|i| self.colors[i])
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RunStats {
    pub nodes: u64,
    pub elapsed: Duration,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArrowVerdict {
    pub verdict: Verdict,
    pub bad_coloring: Option<Coloring>,
    pub stats: RunStats,
}

/// Limits for one decision.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchOptions {
    pub node_limit: u64,
    /// Automorphisms of `C` used for symmetry breaking, at most this many.
    pub max_symmetries: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            node_limit: 20_000_000,
            max_symmetries: 2_000,
        }
    }
}

/// The copies of a tuple in `C` and, for each embedding of `B` into `C`, the
/// indices of the copies it carries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CopyFamily {
    pub domain: Vec<Tuple>,
    pub b_copies: Vec<Embedding>,
    pub edges: Vec<Vec<usize>>,
}

impl CopyFamily {
    pub fn new(a: &FinStructure, tuple: &[usize], b: &FinStructure, c: &FinStructure) -> Result<Self> {
        a.same_signature(b)?;
        a.same_signature(c)?;
        let domain: Vec<Tuple> = copies_of_tuple(a, tuple, c)?.into_iter().map(|t| t.image).collect();
        let index: HashMap<&Tuple, usize> = domain.iter().enumerate().map(|(i, t)| (t, i)).collect();
        let in_b: Vec<Tuple> = copies_of_tuple(a, tuple, b)?.into_iter().map(|t| t.image).collect();
        let b_copies = enumerate_embeddings(b, c)?;
        let edges = b_copies
            .iter()
            .map(|g| in_b.iter().map(|t| index[&g.apply_tuple(t)]).collect())
            .collect();
        Ok(CopyFamily { domain, b_copies, edges })
    }

    /// Permutations of the domain induced by automorphisms of `c`.
    pub fn symmetries(&self, c: &FinStructure, max: usize) -> Vec<Vec<usize>> {
        let index: HashMap<&Tuple, usize> = self.domain.iter().enumerate().map(|(i, t)| (t, i)).collect();
        automorphisms(c)
            .into_iter()
            .skip(1)
            .take(max)
            .map(|s| self.domain.iter().map(|t| index[&s.apply_tuple(t)]).collect())
            .collect()
    }
}

/// The tuple `0, 1, ..., n-1` enumerating a structure of size `n`.
pub fn identity_tuple(a: &FinStructure) -> Tuple {
    (0..a.size()).collect()
}

fn bad_coloring_csp(family: &CopyFamily, c: &FinStructure, r: usize, k: usize, opts: &SearchOptions) -> Result<Csp> {
    let mut csp = Csp::new(&[family.domain.len()], &[r])?.with_node_limit(opts.node_limit);
    for edge in &family.edges {
        csp.add_constraint(vec![Group {
            family: 0,
            vars: edge.clone(),
            threshold: k + 1,
        }]);
    }
    for perm in family.symmetries(c, opts.max_symmetries) {
        csp.add_symmetry(perm);
    }
    Ok(csp)
}

/// Decides a constraint system: the most-constrained order settles
/// existence, then the static order returns the lexicographically least
/// solution.
pub(crate) fn decide(csp: &Csp) -> (Verdict, Option<Vec<usize>>, RunStats) {
    let start = Instant::now();
    let (found, end, s1) = csp.first_solution(Order::MostConstrained);
    let mut stats = RunStats { nodes: s1.nodes, elapsed: Duration::ZERO };
    let outcome = match (found, end) {
        (None, SearchEnd::LimitReached) => (Verdict::Unknown, None),
        (None, _) => (Verdict::Yes, None),
        (Some(_), _) => {
            let (least, end2, s2) = csp.first_solution(Order::Static);
            stats.nodes += s2.nodes;
            match (least, end2) {
                (Some(x), _) => (Verdict::No, Some(x)),
                // the static pass ran out of budget: a bad coloring exists
                // but the least one is not certified
                (None, _) => (Verdict::Unknown, None),
            }
        }
    };
    stats.elapsed = start.elapsed();
    (outcome.0, outcome.1, stats)
}

/// Whether every `r`-coloring of the copies of `tuple` (from `a`) in `c`
/// leaves some copy of `b` whose tuple copies carry at most `k` colors.
pub fn tuple_arrows(
    c: &FinStructure,
    b: &FinStructure,
    a: &FinStructure,
    tuple: &[usize],
    r: usize,
    k: usize,
    opts: &SearchOptions,
) -> Result<ArrowVerdict> {
    if k == 0 {
        return Err(Error::Precondition("degree bound must be at least 1".into()));
    }
    let family = CopyFamily::new(a, tuple, b, c)?;
    if r == 0 && !family.domain.is_empty() {
        return Err(Error::Precondition("zero colors for a nonempty set of copies".into()));
    }
    let csp = bad_coloring_csp(&family, c, r, k, opts)?;
    let (verdict, solution, stats) = decide(&csp);
    let bad_coloring = solution.map(|colors| Coloring {
        r,
        domain: family.domain.clone(),
        colors,
    });
    Ok(ArrowVerdict { verdict, bad_coloring, stats })
}

/// `C → (B)^A_r`.
pub fn arrows(c: &FinStructure, b: &FinStructure, a: &FinStructure, r: usize) -> Result<ArrowVerdict> {
    degree_arrows(c, b, a, r, 1)
}

/// `C → (B)^A_{r,k}`: every coloring admits a copy of `B` whose copies of
/// `A` carry at most `k` colors.
pub fn degree_arrows(c: &FinStructure, b: &FinStructure, a: &FinStructure, r: usize, k: usize) -> Result<ArrowVerdict> {
    tuple_arrows(c, b, a, &identity_tuple(a), r, k, &SearchOptions::default())
}

/// A copy of `b` in `c` whose tuple copies carry at most `k` colors under
/// `coloring`; the first in lexicographic order.
pub fn good_copy(
    c: &FinStructure,
    b: &FinStructure,
    a: &FinStructure,
    tuple: &[usize],
    k: usize,
    coloring: &Coloring,
) -> Result<Option<Embedding>> {
    let family = CopyFamily::new(a, tuple, b, c)?;
    if family.domain != coloring.domain {
        return Err(Error::Precondition("coloring domain does not match the copies".into()));
    }
    Ok(family
        .b_copies
        .iter()
        .zip(&family.edges)
        .find(|(_, e)| distinct(e.iter().map(|&i| coloring.colors[i])) <= k)
        .map(|(g, _)| g.clone()))
}

fn distinct(colors: impl Iterator<Item = usize>) -> usize {
    let mut seen: Vec<usize> = colors.collect();
    seen.sort_unstable();
    seen.dedup();
    seen.len()
}

/// Re-checks a claimed bad coloring from scratch. Returns a description of
/// the first violated constraint, if any.
pub fn check_bad_coloring(
    c: &FinStructure,
    b: &FinStructure,
    a: &FinStructure,
    tuple: &[usize],
    k: usize,
    coloring: &Coloring,
) -> Result<Option<String>> {
    if coloring.colors.len() != coloring.domain.len() {
        return Ok(Some("coloring length differs from its domain".into()));
    }
    if let Some(i) = coloring.colors.iter().position(|&x| x >= coloring.r) {
        return Ok(Some(format!("entry {i} is not below {}", coloring.r)));
    }
    let expected: Vec<Tuple> = copies_of_tuple(a, tuple, c)?.into_iter().map(|t| t.image).collect();
    if expected != coloring.domain {
        return Ok(Some("domain is not the list of copies in lexicographic order".into()));
    }
    let in_b: Vec<Tuple> = copies_of_tuple(a, tuple, b)?.into_iter().map(|t| t.image).collect();
    for g in enumerate_embeddings(b, c)? {
        let colors: Vec<usize> = in_b
            .iter()
            .map(|t| coloring.color_of(&g.apply_tuple(t)).expect("copies map to copies"))
            .collect();
        let seen = distinct(colors.iter().copied());
        if seen <= k {
            return Ok(Some(format!(
                "copy {:?} of B sees {} color(s) {:?}, at most {k}",
                g.map(),
                seen,
                colors
            )));
        }
    }
    Ok(None)
}
