//! Reducts and expansions: counting expansions, the expansion property,
//! finite-window orbit closures and the inverse systems of tuple copies.
//!
//! Everything here works on finite windows. A window verdict says nothing
//! about an infinite structure beyond the window it was computed on.

mod indicator;
mod orbit;
mod window;

use std::collections::BTreeSet;
use std::sync::Arc;

use rayon::prelude::*;

use crate::canon::automorphisms;
use crate::embedding::{embeds, enumerate_embeddings};
use crate::error::{Error, Result};
use crate::fraisse::ClassSpec;
use crate::structure::{FinStructure, Signature};
use crate::text::format_structure;

pub use indicator::{metrizability_indicator, IndicatorEntry, MetrizabilityReport};
pub use orbit::{build_orbit_system, Bonding, OrbitSystem, MAX_THREADS};
pub use window::{
    all_subsets, check_window_expansion, compare_surrogates, Side, SurrogateComparison,
    WindowExpansionReport, WindowVerdict,
};

/// A class together with an expansion of it by extra relation symbols.
#[derive(Clone, Debug)]
pub struct ExpansionPair {
    pub base: Arc<ClassSpec>,
    pub expanded: Arc<ClassSpec>,
    extra: Arc<Signature>,
}

impl ExpansionPair {
    pub fn new(base: impl Into<Arc<ClassSpec>>, expanded: impl Into<Arc<ClassSpec>>) -> Result<Self> {
        let (base, expanded) = (base.into(), expanded.into());
        if !base.sig().is_subsignature_of(expanded.sig()) {
            return Err(Error::NotSubsignature(format!(
                "`{}` is not contained in `{}`",
                base.sig(),
                expanded.sig()
            )));
        }
        let extra = Arc::new(expanded.sig().difference(base.sig()));
        Ok(ExpansionPair {
            base,
            expanded,
            extra,
        })
    }

    pub fn base_sig(&self) -> &Signature {
        self.base.sig()
    }

    /// The symbols added by the expansion.
    pub fn extra_sig(&self) -> &Arc<Signature> {
        &self.extra
    }

    /// Checks, up to `bound` points, that reducts of expanded members lie in
    /// the base class and that every base member has an expansion.
    pub fn validate(&self, bound: usize) -> Result<Option<String>> {
        for n in 0..=bound {
            for s in self.expanded.members_of_size(n)?.iter() {
                let r = s.reduct(self.base.sig())?;
                if !self.base.contains(&r) {
                    return Ok(Some(format!("a reduct of size {n} is not in `{}`", self.base.name())));
                }
            }
            for s in self.base.members_of_size(n)?.iter() {
                if labeled_expansions(s, self)?.is_empty() {
                    return Ok(Some(format!("a member of size {n} of `{}` has no expansion", self.base.name())));
                }
            }
        }
        Ok(None)
    }
}

/// Every expansion of `a0` (same points, same reduct) lying in the expanded
/// class, as labeled structures in sorted order.
pub fn labeled_expansions(a0: &FinStructure, pair: &ExpansionPair) -> Result<Vec<FinStructure>> {
    pair.base.require_member(a0)?;
    let k = &pair.expanded;
    let sig0 = pair.base.sig();
    let mut level = vec![FinStructure::empty(k.sig_arc().clone())];
    for i in 0..a0.size() {
        let prefix = a0.induced_ordered(&(0..=i).collect::<Vec<_>>())?.0;
        let mut next = BTreeSet::new();
        for s in &level {
            for ext in (k.extender())(s)? {
                if ext.reduct(sig0)? == prefix && (!k.is_hereditary() || k.contains(&ext)) {
                    next.insert(ext);
                }
            }
        }
        level = next.into_iter().collect();
    }
    level.retain(|s| k.contains(s));
    Ok(level)
}

/// Expansions of one structure, counted up to automorphisms of the reduct.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpansionCount {
    pub count: usize,
    pub labeled: usize,
    /// One representative per class: the least relabeling by an
    /// automorphism of the reduct.
    pub representatives: Vec<FinStructure>,
}

pub fn count_expansions(a0: &FinStructure, pair: &ExpansionPair) -> Result<ExpansionCount> {
    let all = labeled_expansions(a0, pair)?;
    let auts = automorphisms(a0);
    let reps: BTreeSet<FinStructure> = all
        .par_iter()
        .map(|s| {
            auts.iter()
                .map(|g| s.relabel(g.map()))
                .min()
                .expect("the identity is an automorphism")
        })
        .collect();
    Ok(ExpansionCount {
        count: reps.len(),
        labeled: all.len(),
        representatives: reps.into_iter().collect(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExpansionWitness {
    /// Every expansion of the given structure embeds into every expansion
    /// of `b0`.
    Found { b0: FinStructure },
    Unknown { tried: usize },
}

/// Scans base members by size for one into all of whose expansions every
/// expansion of `a0` embeds.
pub fn check_expansion_vanthe(pair: &ExpansionPair, a0: &FinStructure, bound: usize) -> Result<ExpansionWitness> {
    let small = count_expansions(a0, pair)?.representatives;
    let mut tried = 0;
    for n in a0.size()..=bound {
        for b0 in pair.base.members_of_size(n)?.iter() {
            if !embeds(a0, b0) {
                continue;
            }
            tried += 1;
            let large = count_expansions(b0, pair)?.representatives;
            let ok = large.par_iter().all(|b| small.iter().all(|a| embeds(a, b)));
            if ok && !large.is_empty() {
                return Ok(ExpansionWitness::Found { b0: b0.clone() });
            }
        }
    }
    Ok(ExpansionWitness::Unknown { tried })
}

/// How the reduct's symmetries are stood in for on a finite window.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Surrogate {
    /// Automorphisms of the window; only sound on homogeneous windows.
    #[default]
    WindowAutomorphisms,
    /// Embeddings of finite pieces of the window back into it.
    PartialIsomorphisms,
}

impl Surrogate {
    pub fn as_str(self) -> &'static str {
        match self {
            Surrogate::WindowAutomorphisms => "automorphisms",
            Surrogate::PartialIsomorphisms => "partial-isomorphisms",
        }
    }
}

/// The restrictions to the first `n` points of the translates of a
/// designated expansion, as structures in the extra symbols.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlowWindow {
    pub n: usize,
    /// The reduct on the first `n` points.
    pub base: FinStructure,
    pub points: Vec<FinStructure>,
}

impl FlowWindow {
    /// `window <n>` followed by one structure block per point.
    pub fn to_text(&self) -> String {
        let mut out = format!("window {}\n", self.n);
        for (i, p) in self.points.iter().enumerate() {
            out.push_str(&format_structure(&format!("point{i}"), p));
        }
        out
    }

    /// Restricts every point to the first `m ≤ n` points.
    pub fn restrict(&self, m: usize) -> Result<FlowWindow> {
        if m > self.n {
            return Err(Error::Precondition(format!("cannot restrict level {} to {m}", self.n)));
        }
        let prefix: Vec<usize> = (0..m).collect();
        let points: BTreeSet<FinStructure> = self.points.iter().map(|p| p.pullback(&prefix)).collect();
        Ok(FlowWindow {
            n: m,
            base: self.base.pullback(&prefix),
            points: points.into_iter().collect(),
        })
    }
}

/// Maps from the first `n` points into the window along which the
/// designated expansion is pulled back.
fn translate_maps(w0: &FinStructure, n: usize, surrogate: Surrogate) -> Result<BTreeSet<Vec<usize>>> {
    Ok(match surrogate {
        Surrogate::WindowAutomorphisms => automorphisms(w0).iter().map(|g| g.map()[..n].to_vec()).collect(),
        Surrogate::PartialIsomorphisms => {
            let prefix = w0.pullback(&(0..n).collect::<Vec<_>>());
            enumerate_embeddings(&prefix, w0)?.iter().map(|f| f.map().to_vec()).collect()
        }
    })
}

/// The level-`n` shadow of the orbit closure of the designated expansion
/// `window` under the reduct's symmetries. On a finite window the closure
/// is the orbit itself.
pub fn minimal_flow_window(pair: &ExpansionPair, window: &FinStructure, n: usize, surrogate: Surrogate) -> Result<FlowWindow> {
    pair.expanded.require_member(window)?;
    if n > window.size() {
        return Err(Error::Precondition(format!(
            "level {n} exceeds the window's {} points",
            window.size()
        )));
    }
    let w0 = window.reduct(pair.base_sig())?;
    let maps: Vec<Vec<usize>> = translate_maps(&w0, n, surrogate)?.into_iter().collect();
    let points: BTreeSet<FinStructure> = maps
        .par_iter()
        .map(|m| window.pullback(m).reduct(pair.extra_sig()))
        .collect::<Result<_>>()?;
    Ok(FlowWindow {
        n,
        base: w0.pullback(&(0..n).collect::<Vec<_>>()),
        points: points.into_iter().collect(),
    })
}
