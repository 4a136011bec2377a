//! Per-tuple Ramsey degrees at increasing bounds. Finite degrees for every
//! tuple are the combinatorial side of a metrizable minimal flow; this
//! module only reports what the bounded searches found.

use crate::error::Result;
use crate::fraisse::ClassSpec;
use crate::ramsey::{compute_degree, identity_tuple, DegreeBounds, SearchOptions};
use crate::structure::{FinStructure, Tuple};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndicatorEntry {
    pub structure: FinStructure,
    pub tuple: Tuple,
    /// The degree found at each level of bounds, and whether every search
    /// at that level finished within budget.
    pub levels: Vec<(DegreeBounds, usize, bool)>,
    /// The degree went up between two consecutive levels.
    pub growth: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MetrizabilityReport {
    pub class: String,
    pub entries: Vec<IndicatorEntry>,
}

impl MetrizabilityReport {
    pub fn growth_seen(&self) -> bool {
        self.entries.iter().any(|e| e.growth)
    }

    pub fn summary(&self) -> &'static str {
        if self.growth_seen() {
            "degree grows with the bounds"
        } else {
            "finite degree evidenced up to bounds"
        }
    }
}

/// Computes the degree of the enumerating tuple of every member with
/// between 1 and `tuple_bound` points, at each level of `levels`.
pub fn metrizability_indicator(
    class: &ClassSpec,
    tuple_bound: usize,
    levels: &[DegreeBounds],
    opts: &SearchOptions,
) -> Result<MetrizabilityReport> {
    let mut entries = Vec::new();
    for n in 1..=tuple_bound {
        for a in class.members_of_size(n)?.iter() {
            let tuple = identity_tuple(a);
            let mut found = Vec::with_capacity(levels.len());
            for &bounds in levels {
                let v = compute_degree(class, a, &tuple, bounds, opts)?;
                found.push((bounds, v.k, v.complete));
            }
            let growth = found.windows(2).any(|w| w[1].1 > w[0].1);
            entries.push(IndicatorEntry {
                structure: a.clone(),
                tuple,
                levels: found,
                growth,
            });
        }
    }
    Ok(MetrizabilityReport {
        class: class.name().to_string(),
        entries,
    })
}
