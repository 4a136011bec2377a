use rayon::prelude::*;

use super::search::{Csp, Group};
use super::{decide, identity_tuple, tuple_arrows, ArrowVerdict, Coloring, CopyFamily, SearchOptions, Verdict};
use crate::embedding::{embeds, span_of_tuple};
use crate::error::{Error, Result};
use crate::fraisse::ClassSpec;
use crate::structure::{FinStructure, Tuple};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WitnessOutcome {
    Found { c: FinStructure, verdict: ArrowVerdict },
    /// No member up to the bound works. This is not a refutation for the
    /// class: a larger member may.
    Unknown {
        tried: usize,
        /// The bad coloring found for the last member tried.
        last_refutation: Option<(FinStructure, Coloring)>,
        /// Some member was left undecided by the node budget.
        budget_exhausted: bool,
    },
}

impl WitnessOutcome {
    pub fn witness(&self) -> Option<&FinStructure> {
        match self {
            WitnessOutcome::Found { c, .. } => Some(c),
            WitnessOutcome::Unknown { .. } => None,
        }
    }
}

/// Scans members of `class` containing `b` by size and canonical order for
/// the first `C` with `C → (B)^ā_{r,k}`.
#[allow(clippy::too_many_arguments)]
pub fn find_degree_witness(
    class: &ClassSpec,
    a: &FinStructure,
    tuple: &[usize],
    b: &FinStructure,
    r: usize,
    k: usize,
    size_bound: usize,
    opts: &SearchOptions,
) -> Result<WitnessOutcome> {
    let mut tried = 0;
    let mut last_refutation = None;
    let mut budget_exhausted = false;
    for n in b.size()..=size_bound {
        let candidates: Vec<FinStructure> = class
            .members_of_size(n)?
            .iter()
            .filter(|c| embeds(b, c))
            .cloned()
            .collect();
        let verdicts: Vec<ArrowVerdict> = candidates
            .par_iter()
            .map(|c| tuple_arrows(c, b, a, tuple, r, k, opts))
            .collect::<Result<_>>()?;
        for (c, v) in candidates.into_iter().zip(verdicts) {
            tried += 1;
            match v.verdict {
                Verdict::Yes => return Ok(WitnessOutcome::Found { c, verdict: v }),
                Verdict::No => last_refutation = v.bad_coloring.clone().map(|col| (c, col)),
                Verdict::Unknown => budget_exhausted = true,
            }
        }
    }
    Ok(WitnessOutcome::Unknown {
        tried,
        last_refutation,
        budget_exhausted,
    })
}

/// First member `C ≤ size_bound` with `C → (B)^A_r`.
pub fn find_ramsey_witness(
    class: &ClassSpec,
    a: &FinStructure,
    b: &FinStructure,
    r: usize,
    size_bound: usize,
) -> Result<WitnessOutcome> {
    find_degree_witness(class, a, &identity_tuple(a), b, r, 1, size_bound, &SearchOptions::default())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DegreeBounds {
    /// Largest `B` tried.
    pub b_size: usize,
    /// Largest number of colors tried.
    pub colors: usize,
    /// Largest `C` searched for.
    pub c_size: usize,
}

/// `C` witnesses degree `k` for `(B, r)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeEvidence {
    pub b: FinStructure,
    pub r: usize,
    pub k: usize,
    pub c: FinStructure,
}

/// For `(B, r)` and each candidate `C`, a coloring under which every copy of
/// `B` sees more than `k` colors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LowerEvidence {
    pub b: FinStructure,
    pub r: usize,
    pub k: usize,
    pub refutations: Vec<(FinStructure, Coloring)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeVerdict {
    /// The least degree that works for every `(B, r)` within the bounds.
    pub k: usize,
    pub bounds: DegreeBounds,
    /// The structure spanned by the tuple, and the tuple over it.
    pub span: FinStructure,
    pub span_tuple: Tuple,
    pub upper: Vec<DegreeEvidence>,
    /// Present when `k > 1`: a pair `(B, r)` for which `k - 1` fails.
    pub lower: Option<LowerEvidence>,
    /// False when some search ran out of budget, so `k` may be too high.
    pub complete: bool,
}

struct PairResult {
    b: FinStructure,
    r: usize,
    k: usize,
    c: FinStructure,
    complete: bool,
}

/// The least `k` such that every member `B` containing the tuple's span (up
/// to `bounds.b_size` points) and every `r ≤ bounds.colors` has a member
/// `C ≤ bounds.c_size` with `C → (B)^ā_{r,k}`. Repetitions in the tuple are
/// allowed; copies then follow its equality pattern.
pub fn compute_degree(
    class: &ClassSpec,
    a: &FinStructure,
    tuple: &[usize],
    bounds: DegreeBounds,
    opts: &SearchOptions,
) -> Result<DegreeVerdict> {
    class.require_member(a)?;
    let (span, pattern) = span_of_tuple(a, tuple)?;
    let span_tuple = pattern.pattern.clone();
    let mut pairs = Vec::new();
    for n in span.size()..=bounds.b_size {
        for b in class.members_of_size(n)?.iter() {
            if embeds(&span, b) {
                for r in 1..=bounds.colors {
                    pairs.push((b.clone(), r));
                }
            }
        }
    }
    let results: Vec<PairResult> = pairs
        .par_iter()
        .map(|(b, r)| -> Result<PairResult> {
            let mut complete = true;
            for k in 1..*r {
                match find_degree_witness(class, &span, &span_tuple, b, *r, k, bounds.c_size, opts)? {
                    WitnessOutcome::Found { c, .. } => {
                        return Ok(PairResult { b: b.clone(), r: *r, k, c, complete })
                    }
                    WitnessOutcome::Unknown { budget_exhausted, .. } => complete &= !budget_exhausted,
                }
            }
            // with k = r colors every copy qualifies, so B itself works
            Ok(PairResult { b: b.clone(), r: *r, k: (*r).max(1), c: b.clone(), complete })
        })
        .collect::<Result<_>>()?;
    let k = results.iter().map(|p| p.k).max().unwrap_or(1);
    let complete = results.iter().all(|p| p.complete);
    let upper = results
        .iter()
        .map(|p| DegreeEvidence {
            b: p.b.clone(),
            r: p.r,
            k: p.k,
            c: p.c.clone(),
        })
        .collect();
    let lower = if k > 1 {
        let worst = results.iter().find(|p| p.k == k).expect("maximum is attained");
        let mut refutations = Vec::new();
        for n in worst.b.size()..=bounds.c_size {
            for c in class.members_of_size(n)?.iter() {
                if !embeds(&worst.b, c) {
                    continue;
                }
                let v = tuple_arrows(c, &worst.b, &span, &span_tuple, worst.r, k - 1, opts)?;
                if let Some(col) = v.bad_coloring {
                    refutations.push((c.clone(), col));
                }
            }
        }
        Some(LowerEvidence {
            b: worst.b.clone(),
            r: worst.r,
            k: k - 1,
            refutations,
        })
    } else {
        None
    };
    Ok(DegreeVerdict {
        k,
        bounds,
        span,
        span_tuple,
        upper,
        lower,
        complete,
    })
}

/// A tuple over a shared structure together with its allowed number of
/// colors on a good copy.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JointTuple {
    pub tuple: Tuple,
    pub k: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum JointOutcome {
    Found {
        c: FinStructure,
        /// Whether `c` came from iterating single-tuple witnesses rather than
        /// a direct scan.
        by_induction: bool,
    },
    Unknown,
}

/// Whether every simultaneous coloring (one `r`-coloring per tuple) admits
/// a single copy of `b` in `c` on which each tuple's copies carry at most
/// its `k` colors. A `No` comes with one coloring per tuple.
pub fn joint_arrows(
    c: &FinStructure,
    b: &FinStructure,
    a_set: &FinStructure,
    tuples: &[JointTuple],
    r: usize,
    opts: &SearchOptions,
) -> Result<(Verdict, Option<Vec<Coloring>>)> {
    let families: Vec<CopyFamily> = tuples
        .iter()
        .map(|t| CopyFamily::new(a_set, &t.tuple, b, c))
        .collect::<Result<_>>()?;
    let sizes: Vec<usize> = families.iter().map(|f| f.domain.len()).collect();
    let mut csp = Csp::new(&sizes, &vec![r; sizes.len()])?.with_node_limit(opts.node_limit);
    let offsets: Vec<usize> = sizes
        .iter()
        .scan(0, |acc, &s| {
            let o = *acc;
            *acc += s;
            Some(o)
        })
        .collect();
    let copies = families.first().map_or(0, |f| f.b_copies.len());
    for g in 0..copies {
        csp.add_constraint(
            families
                .iter()
                .zip(tuples)
                .enumerate()
                .map(|(fi, (f, t))| Group {
                    family: fi,
                    vars: f.edges[g].iter().map(|&v| v + offsets[fi]).collect(),
                    threshold: t.k + 1,
                })
                .collect(),
        );
    }
    if !families.is_empty() {
        let perms: Vec<Vec<Vec<usize>>> = families.iter().map(|f| f.symmetries(c, opts.max_symmetries)).collect();
        for s in 0..perms[0].len() {
            let mut perm = Vec::with_capacity(csp.var_count());
            for (fi, p) in perms.iter().enumerate() {
                perm.extend(p[s].iter().map(|&v| v + offsets[fi]));
            }
            csp.add_symmetry(perm);
        }
    }
    let (verdict, solution, _) = decide(&csp);
    let colorings = solution.map(|colors| {
        families
            .iter()
            .enumerate()
            .map(|(fi, f)| Coloring {
                r,
                domain: f.domain.clone(),
                colors: colors[offsets[fi]..offsets[fi] + sizes[fi]].to_vec(),
            })
            .collect()
    });
    Ok((verdict, colorings))
}

/// Finds one member `C` that handles every tuple at once. First builds
/// `C_1 ≤ C_2 ≤ ...` with `C_i` a single-tuple witness for tuple `i` over
/// `C_{i-1}` (starting from `B`), then re-checks the conjunction on the
/// last one; if that chain leaves the bound, scans members directly.
pub fn joint_degree_witness(
    class: &ClassSpec,
    a_set: &FinStructure,
    tuples: &[JointTuple],
    b: &FinStructure,
    r: usize,
    size_bound: usize,
    opts: &SearchOptions,
) -> Result<JointOutcome> {
    if tuples.is_empty() {
        return Ok(JointOutcome::Found { c: b.clone(), by_induction: true });
    }
    for t in tuples {
        if t.k == 0 {
            return Err(Error::Precondition("degree bound must be at least 1".into()));
        }
        span_of_tuple(a_set, &t.tuple)?;
    }
    let mut current = b.clone();
    let mut chained = true;
    for t in tuples {
        match find_degree_witness(class, a_set, &t.tuple, &current, r, t.k, size_bound, opts)? {
            WitnessOutcome::Found { c, .. } => current = c,
            WitnessOutcome::Unknown { .. } => {
                chained = false;
                break;
            }
        }
    }
    if chained && joint_arrows(&current, b, a_set, tuples, r, opts)?.0 == Verdict::Yes {
        return Ok(JointOutcome::Found { c: current, by_induction: true });
    }
    for n in b.size()..=size_bound {
        for c in class.members_of_size(n)?.iter() {
            if embeds(b, c) && joint_arrows(c, b, a_set, tuples, r, opts)?.0 == Verdict::Yes {
                return Ok(JointOutcome::Found { c: c.clone(), by_induction: false });
            }
        }
    }
    Ok(JointOutcome::Unknown)
}
