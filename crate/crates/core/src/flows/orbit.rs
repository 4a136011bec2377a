//! The finite inverse system of tuple copies in a window.
//!
//! Each tuple in a subtuple-closed family gets a fiber: the copies of the
//! tuple in the window. Deleting a coordinate restricts a copy to a copy of
//! the shorter tuple. Copies that cannot be part of a coherent choice across
//! the whole family are pruned, after which every bonding map is onto.

use std::collections::{BTreeMap, BTreeSet};

use crate::embedding::copies_of_tuple;
use crate::error::{Error, Result};
use crate::structure::{FinStructure, Tuple};

/// Most threads [`OrbitSystem::threads`] will list.
pub const MAX_THREADS: usize = 1 << 20;

/// Restriction from `from` to `to` by deleting coordinate `dropped`.
/// `map[i]` is the index in `to`'s fiber of the restriction of `from`'s
/// `i`-th copy.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bonding {
    pub from: usize,
    pub to: usize,
    pub dropped: usize,
    pub map: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitSystem {
    /// Sorted by length, then lexicographically.
    pub index: Vec<Tuple>,
    /// All copies of each tuple in the window.
    pub raw_fibers: Vec<Vec<Tuple>>,
    /// Copies surviving the coherence pruning.
    pub fibers: Vec<Vec<Tuple>>,
    pub bonding: Vec<Bonding>,
}

fn drop_coordinate(t: &[usize], i: usize) -> Tuple {
    t.iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(_, &x)| x)
        .collect()
}

/// Builds the system for `family` (tuples of window points), which must
/// contain every tuple obtained by deleting one coordinate from a member
/// of length at least 2.
pub fn build_orbit_system(window: &FinStructure, family: &[Tuple]) -> Result<OrbitSystem> {
    let mut index: Vec<Tuple> = family.to_vec();
    index.sort_by(|x, y| x.len().cmp(&y.len()).then_with(|| x.cmp(y)));
    index.dedup();
    if let Some(&p) = index.iter().flatten().find(|&&p| p >= window.size()) {
        return Err(Error::OutOfRange {
            point: p,
            size: window.size(),
        });
    }
    let position: BTreeMap<&Tuple, usize> = index.iter().enumerate().map(|(i, t)| (t, i)).collect();
    let mut edges = Vec::new();
    for (from, t) in index.iter().enumerate() {
        if t.len() < 2 {
            continue;
        }
        for i in 0..t.len() {
            let sub = drop_coordinate(t, i);
            let &to = position.get(&sub).ok_or_else(|| {
                Error::Precondition(format!("family is not closed under subtuples: {t:?} lacks {sub:?}"))
            })?;
            edges.push((from, to, i));
        }
    }
    let raw_fibers: Vec<Vec<Tuple>> = index
        .iter()
        .map(|t| {
            let mut f: Vec<Tuple> = copies_of_tuple(window, t, window)?.into_iter().map(|c| c.image).collect();
            f.sort();
            f.dedup();
            Ok(f)
        })
        .collect::<Result<_>>()?;
    let mut alive: Vec<BTreeSet<Tuple>> = raw_fibers.iter().map(|f| f.iter().cloned().collect()).collect();
    loop {
        let mut changed = false;
        for &(from, to, i) in &edges {
            let image: BTreeSet<Tuple> = alive[from].iter().map(|c| drop_coordinate(c, i)).collect();
            let before = alive[to].len();
            alive[to].retain(|c| image.contains(c));
            let lower = alive[to].clone();
            let before_from = alive[from].len();
            alive[from].retain(|c| lower.contains(&drop_coordinate(c, i)));
            changed |= alive[to].len() != before || alive[from].len() != before_from;
        }
        if !changed {
            break;
        }
    }
    let fibers: Vec<Vec<Tuple>> = alive.into_iter().map(|s| s.into_iter().collect()).collect();
    let bonding = edges
        .iter()
        .map(|&(from, to, dropped)| Bonding {
            from,
            to,
            dropped,
            map: fibers[from]
                .iter()
                .map(|c| {
                    fibers[to]
                        .binary_search(&drop_coordinate(c, dropped))
                        .expect("pruned fibers are closed under restriction")
                })
                .collect(),
        })
        .collect();
    Ok(OrbitSystem {
        index,
        raw_fibers,
        fibers,
        bonding,
    })
}

impl OrbitSystem {
    /// The first violated requirement: a bonding map that is not onto, or
    /// two deletion orders that disagree.
    pub fn validate(&self) -> Option<String> {
        for b in &self.bonding {
            let hit: BTreeSet<usize> = b.map.iter().copied().collect();
            if hit.len() != self.fibers[b.to].len() {
                return Some(format!(
                    "restriction from {:?} to {:?} is not onto",
                    self.index[b.from], self.index[b.to]
                ));
            }
        }
        let by_key: BTreeMap<(usize, usize), &Bonding> =
            self.bonding.iter().map(|b| ((b.from, b.dropped), b)).collect();
        for (&(from, i), first) in &by_key {
            for j in (i + 1)..self.index[from].len() {
                // delete i then j-1, versus j then i
                let Some(second) = by_key.get(&(first.to, j - 1)) else { continue };
                let Some(other) = by_key.get(&(from, j)) else { continue };
                let Some(other_second) = by_key.get(&(other.to, i)) else { continue };
                for e in 0..self.fibers[from].len() {
                    if second.map[first.map[e]] != other_second.map[other.map[e]] {
                        return Some(format!(
                            "deleting coordinates {i} and {j} of {:?} depends on the order",
                            self.index[from]
                        ));
                    }
                }
            }
        }
        None
    }

    /// Every coherent choice of one copy per tuple, as fiber indices, in
    /// lexicographic order. The empty family has one (empty) thread.
    pub fn threads(&self) -> Result<Vec<Vec<usize>>> {
        let mut parents: Vec<Vec<&Bonding>> = vec![Vec::new(); self.index.len()];
        for b in &self.bonding {
            parents[b.from].push(b);
        }
        let mut out = Vec::new();
        let mut chosen = Vec::with_capacity(self.index.len());
        self.extend(&parents, &mut chosen, &mut out)?;
        Ok(out)
    }

    fn extend(&self, parents: &[Vec<&Bonding>], chosen: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) -> Result<()> {
        let p = chosen.len();
        if p == self.index.len() {
            if out.len() == MAX_THREADS {
                return Err(Error::LimitExceeded(format!("more than {MAX_THREADS} threads")));
            }
            out.push(chosen.clone());
            return Ok(());
        }
        for e in 0..self.fibers[p].len() {
            if parents[p].iter().all(|b| b.map[e] == chosen[b.to]) {
                chosen.push(e);
                self.extend(parents, chosen, out)?;
                chosen.pop();
            }
        }
        Ok(())
    }

    /// Index arrays in a line format: one `tuple` line per fiber and one
    /// `bond` line per restriction.
    pub fn to_text(&self) -> String {
        let join = |t: &[usize]| t.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        let mut out = String::from("orbit-system\n");
        for (t, f) in self.index.iter().zip(&self.fibers) {
            let copies: Vec<String> = f.iter().map(|c| join(c)).collect();
            out.push_str(&format!("tuple {} fiber {}\n", join(t), copies.join(" ")));
        }
        for b in &self.bonding {
            let map: Vec<String> = b.map.iter().map(|x| x.to_string()).collect();
            out.push_str(&format!("bond {} {} drop {} map {}\n", b.from, b.to, b.dropped, map.join(" ")));
        }
        out.push_str("end\n");
        out
    }
}
