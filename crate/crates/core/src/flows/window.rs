//! Right, left and two-sided expansion properties on a finite window.
//!
//! A window is an expanded structure `W` with reduct `W0`. The group
//! quantifiers range either over automorphisms of `W0` and `W`, or over
//! embeddings of finite pieces back into the window.

use std::collections::BTreeSet;

use rayon::prelude::*;

use super::Surrogate;
use crate::canon::automorphisms;
use crate::embedding::{embeds, enumerate_embeddings, Embedding};
use crate::error::Result;
use crate::fraisse::{check_window_homogeneity, for_each_subset};
use crate::structure::{FinStructure, Signature};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    /// Every translate of `B` contains a copy of `A`.
    Right,
    /// `B` contains a copy of every translate of `A`.
    Left,
    /// Every translate of `B` contains a copy of every translate of `A`.
    TwoSided,
}

impl Side {
    pub fn as_str(self) -> &'static str {
        match self {
            Side::Right => "right",
            Side::Left => "left",
            Side::TwoSided => "two-sided",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WindowVerdict {
    Holds,
    /// No member of the family works for this `A`.
    Fails { a: Vec<usize> },
    /// The surrogate is unsound on this window.
    Refused { reason: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WindowExpansionReport {
    pub side: Side,
    pub surrogate: Surrogate,
    pub verdict: WindowVerdict,
    /// For each `A` in the family, the least `B` found.
    pub witnesses: Vec<(Vec<usize>, Option<Vec<usize>>)>,
}

/// Every subset of `{0..n}` with between 1 and `max` points, by size and
/// then lexicographically.
pub fn all_subsets(n: usize, max: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for k in 1..=max.min(n) {
        for_each_subset(n, k, |s| {
            out.push(s.to_vec());
            false
        });
    }
    out
}

struct Moves {
    w: FinStructure,
    w0: FinStructure,
    surrogate: Surrogate,
    auts0: Vec<Embedding>,
    auts: Vec<Embedding>,
}

impl Moves {
    fn image(f: &Embedding, s: &[usize]) -> Vec<usize> {
        let mut t: Vec<usize> = s.iter().map(|&x| f.apply(x)).collect();
        t.sort_unstable();
        t
    }

    /// The sets `σ[S]` for the reduct's symmetries `σ`.
    fn translates(&self, s: &[usize]) -> Result<BTreeSet<Vec<usize>>> {
        Ok(match self.surrogate {
            Surrogate::WindowAutomorphisms => self.auts0.iter().map(|g| Self::image(g, s)).collect(),
            Surrogate::PartialIsomorphisms => {
                let (piece, _) = self.w0.induced_ordered(s)?;
                enumerate_embeddings(&piece, &self.w0)?
                    .iter()
                    .map(|f| {
                        let mut t = f.map().to_vec();
                        t.sort_unstable();
                        t
                    })
                    .collect()
            }
        })
    }

    /// Whether some symmetry `τ` of the expansion maps `x` into `y`.
    fn fits(&self, x: &[usize], y: &[usize]) -> Result<bool> {
        Ok(match self.surrogate {
            Surrogate::WindowAutomorphisms => {
                let target: BTreeSet<usize> = y.iter().copied().collect();
                self.auts.iter().any(|t| x.iter().all(|&p| target.contains(&t.apply(p))))
            }
            Surrogate::PartialIsomorphisms => {
                embeds(&self.w.induced_ordered(x)?.0, &self.w.induced_ordered(y)?.0)
            }
        })
    }

    fn works(&self, side: Side, a: &[usize], b: &[usize]) -> Result<bool> {
        match side {
            Side::Right => {
                for y in self.translates(b)? {
                    if !self.fits(a, &y)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Side::Left => {
                for x in self.translates(a)? {
                    if !self.fits(&x, b)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Side::TwoSided => {
                let ys = self.translates(b)?;
                for x in self.translates(a)? {
                    for y in &ys {
                        if !self.fits(&x, y)? {
                            return Ok(false);
                        }
                    }
                }
                Ok(true)
            }
        }
    }
}

/// Checks one expansion property on `window` for the given family of
/// point sets, with `B` drawn from the same family (smallest first).
pub fn check_window_expansion(
    window: &FinStructure,
    sig0: &Signature,
    side: Side,
    surrogate: Surrogate,
    family: &[Vec<usize>],
) -> Result<WindowExpansionReport> {
    let w0 = window.reduct(sig0)?;
    if surrogate == Surrogate::WindowAutomorphisms {
        for (label, s) in [("window", window), ("reduct window", &w0)] {
            if let Some(f) = check_window_homogeneity(s, s.size())? {
                return Ok(WindowExpansionReport {
                    side,
                    surrogate,
                    verdict: WindowVerdict::Refused {
                        reason: format!(
                            "the {label} is not homogeneous: {:?} -> {:?} does not extend",
                            f.domain, f.image
                        ),
                    },
                    witnesses: Vec::new(),
                });
            }
        }
    }
    let mut family: Vec<Vec<usize>> = family
        .iter()
        .map(|s| {
            let mut t = s.clone();
            t.sort_unstable();
            t.dedup();
            t
        })
        .collect();
    family.sort_by(|x, y| x.len().cmp(&y.len()).then_with(|| x.cmp(y)));
    family.dedup();
    let moves = Moves {
        auts0: automorphisms(&w0),
        auts: automorphisms(window),
        w: window.clone(),
        w0,
        surrogate,
    };
    let witnesses: Vec<(Vec<usize>, Option<Vec<usize>>)> = family
        .par_iter()
        .map(|a| -> Result<(Vec<usize>, Option<Vec<usize>>)> {
            for b in &family {
                if moves.works(side, a, b)? {
                    return Ok((a.clone(), Some(b.clone())));
                }
            }
            Ok((a.clone(), None))
        })
        .collect::<Result<_>>()?;
    let verdict = match witnesses.iter().find(|(_, b)| b.is_none()) {
        Some((a, _)) => WindowVerdict::Fails { a: a.clone() },
        None => WindowVerdict::Holds,
    };
    Ok(WindowExpansionReport {
        side,
        surrogate,
        verdict,
        witnesses,
    })
}

/// Both surrogates side by side, so a disagreement is visible.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurrogateComparison {
    pub automorphisms: WindowExpansionReport,
    pub partial: WindowExpansionReport,
}

impl SurrogateComparison {
    pub fn agree(&self) -> bool {
        self.automorphisms.verdict == self.partial.verdict
    }
}

pub fn compare_surrogates(
    window: &FinStructure,
    sig0: &Signature,
    side: Side,
    family: &[Vec<usize>],
) -> Result<SurrogateComparison> {
    Ok(SurrogateComparison {
        automorphisms: check_window_expansion(window, sig0, side, Surrogate::WindowAutomorphisms, family)?,
        partial: check_window_expansion(window, sig0, side, Surrogate::PartialIsomorphisms, family)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::build;

    #[test]
    fn orders_over_a_four_point_set() {
        let w = build::chain(4);
        let fam = all_subsets(4, 4);
        let cmp = compare_surrogates(&w, &Signature::empty(), Side::Right, &fam).unwrap();
        assert!(matches!(cmp.automorphisms.verdict, WindowVerdict::Refused { .. }));
        assert!(!cmp.agree());
        let r = cmp.partial;
        assert_eq!(r.verdict, WindowVerdict::Holds);
        for (a, b) in &r.witnesses {
            assert_eq!(b.as_ref().unwrap().len(), a.len());
        }
    }

    #[test]
    fn identity_expansion_holds_on_every_side() {
        let fam = all_subsets(5, 3);
        for w in [build::pure_set(4), build::cycle(5)] {
            let sig = w.sig().clone();
            for side in [Side::Right, Side::Left, Side::TwoSided] {
                for s in [Surrogate::WindowAutomorphisms, Surrogate::PartialIsomorphisms] {
                    let fam: Vec<Vec<usize>> = fam.iter().filter(|x| x.iter().all(|&p| p < w.size())).cloned().collect();
                    let r = check_window_expansion(&w, &sig, side, s, &fam).unwrap();
                    assert_eq!(r.verdict, WindowVerdict::Holds, "{side:?} {s:?}");
                    for (a, b) in &r.witnesses {
                        assert_eq!(b.as_ref().unwrap().len(), a.len());
                    }
                }
            }
        }
    }

    #[test]
    fn two_sided_matches_right_on_sets() {
        for n in 2..=5 {
            let w = build::chain(n);
            let fam = all_subsets(n, n);
            let right = check_window_expansion(&w, &Signature::empty(), Side::Right, Surrogate::PartialIsomorphisms, &fam).unwrap();
            let two = check_window_expansion(&w, &Signature::empty(), Side::TwoSided, Surrogate::PartialIsomorphisms, &fam).unwrap();
            assert_eq!(right.verdict, two.verdict);
        }
    }

    #[test]
    fn left_needs_room_for_every_translate() {
        // every translate of an edge in a complete ordered window is again
        // an ordered edge, so an edge suffices
        let w = build::ordered_graph(3, &[(0, 1), (1, 2), (0, 2)]);
        let fam = all_subsets(3, 3);
        let r = check_window_expansion(&w, &Signature::graph(), Side::Left, Surrogate::PartialIsomorphisms, &fam).unwrap();
        assert_eq!(r.verdict, WindowVerdict::Holds);
        let edge = r.witnesses.iter().find(|(a, _)| a == &vec![0, 1]).unwrap();
        assert_eq!(edge.1.as_ref().unwrap().len(), 2);
    }
}
