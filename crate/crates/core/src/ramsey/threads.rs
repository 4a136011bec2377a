//! Coherent bad colorings along a chain `C_0 ≤ C_1 ≤ ...`: one bad coloring
//! per stage, each restricting to the previous one.

use std::collections::{BTreeSet, HashMap};
use std::ops::ControlFlow;

use super::search::{Csp, Group, Order, SearchEnd};
use super::{check_bad_coloring, identity_tuple, Coloring, CopyFamily};
use crate::embedding::Embedding;
use crate::error::{Error, Result};
use crate::fraisse::Chain;
use crate::structure::{FinStructure, Tuple};

/// Most bad colorings enumerated per stage.
pub const MAX_STAGE_COLORINGS: usize = 1 << 20;

fn all_bad_colorings(family: &CopyFamily, r: usize) -> Result<Vec<Vec<usize>>> {
    let mut csp = Csp::new(&[family.domain.len()], &[r])?;
    for edge in &family.edges {
        csp.add_constraint(vec![Group { family: 0, vars: edge.clone(), threshold: 2 }]);
    }
    let csp = csp.without_symmetry_breaking();
    let mut out = Vec::new();
    let (end, _) = csp.search(Order::Static, |s| {
        out.push(s.to_vec());
        if out.len() > MAX_STAGE_COLORINGS {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    if end != SearchEnd::Exhausted {
        return Err(Error::LimitExceeded(format!(
            "more than {MAX_STAGE_COLORINGS} bad colorings at one stage"
        )));
    }
    Ok(out)
}

/// `index[j]` is the position in `larger` of the image of `smaller[j]`.
fn restriction_index(smaller: &[Tuple], larger: &[Tuple], inclusion: &Embedding) -> Vec<usize> {
    let pos: HashMap<&Tuple, usize> = larger.iter().enumerate().map(|(i, t)| (t, i)).collect();
    smaller.iter().map(|t| pos[&inclusion.apply_tuple(t)]).collect()
}

fn restrict(colors: &[usize], index: &[usize]) -> Vec<usize> {
    index.iter().map(|&i| colors[i]).collect()
}

/// The lexicographically least thread of bad colorings for `A → (B)` with
/// `r` colors along the chain. Each stage's bad set is enumerated, pruned
/// from the last stage backwards to colorings that extend all the way up,
/// and then the least coloring is chosen stage by stage.
pub fn extend_bad_colorings(chain: &Chain, b: &FinStructure, a: &FinStructure, r: usize) -> Result<Vec<Coloring>> {
    chain.validate()?;
    let tuple = identity_tuple(a);
    let families: Vec<CopyFamily> = chain
        .stages
        .iter()
        .map(|c| CopyFamily::new(a, &tuple, b, c))
        .collect::<Result<_>>()?;
    let mut bad: Vec<Vec<Vec<usize>>> = Vec::with_capacity(families.len());
    for (i, f) in families.iter().enumerate() {
        let set = all_bad_colorings(f, r)?;
        if set.is_empty() {
            return Err(Error::Precondition(format!("stage {i} has no bad coloring")));
        }
        bad.push(set);
    }
    let indices: Vec<Vec<usize>> = (0..chain.inclusions.len())
        .map(|i| restriction_index(&families[i].domain, &families[i + 1].domain, &chain.inclusions[i]))
        .collect();
    // keep only colorings that extend to the last stage
    let mut alive: Vec<BTreeSet<Vec<usize>>> = vec![BTreeSet::new(); bad.len()];
    let last = bad.len() - 1;
    alive[last] = bad[last].iter().cloned().collect();
    for i in (0..last).rev() {
        let restricted: BTreeSet<Vec<usize>> = alive[i + 1].iter().map(|c| restrict(c, &indices[i])).collect();
        let own: BTreeSet<&Vec<usize>> = bad[i].iter().collect();
        if let Some(stray) = restricted.iter().find(|c| !own.contains(c)) {
            return Err(Error::Precondition(format!(
                "a restriction to stage {i} is not bad: {stray:?}"
            )));
        }
        alive[i] = restricted;
    }
    let mut thread: Vec<Vec<usize>> = Vec::with_capacity(bad.len());
    thread.push(alive[0].iter().next().expect("nonempty after pruning").clone());
    for i in 1..bad.len() {
        let prev = &thread[i - 1];
        let next = alive[i]
            .iter()
            .find(|c| &restrict(c, &indices[i - 1]) == prev)
            .expect("pruned sets extend")
            .clone();
        thread.push(next);
    }
    Ok(thread
        .into_iter()
        .zip(&families)
        .map(|(colors, f)| Coloring {
            r,
            domain: f.domain.clone(),
            colors,
        })
        .collect())
}

/// Checks that each coloring is bad for its stage and restricts to the
/// previous one. Returns the first problem found.
pub fn verify_thread(chain: &Chain, b: &FinStructure, a: &FinStructure, thread: &[Coloring]) -> Result<Option<String>> {
    if thread.len() != chain.stages.len() {
        return Ok(Some(format!("{} colorings for {} stages", thread.len(), chain.stages.len())));
    }
    let tuple = identity_tuple(a);
    for (i, (c, col)) in chain.stages.iter().zip(thread).enumerate() {
        if let Some(why) = check_bad_coloring(c, b, a, &tuple, 1, col)? {
            return Ok(Some(format!("stage {i}: {why}")));
        }
    }
    for i in 0..chain.inclusions.len() {
        let index = restriction_index(&thread[i].domain, &thread[i + 1].domain, &chain.inclusions[i]);
        if restrict(&thread[i + 1].colors, &index) != thread[i].colors {
            return Ok(Some(format!("stage {} does not restrict to stage {i}", i + 1)));
        }
    }
    Ok(None)
}
