//! Convex combinations of copies and the ε-balanced witness problem.
//!
//! A coloring sends each copy of a tuple to a vertex of the `r`-cube. A
//! witness is a probability vector on the embeddings `B → C` under which
//! every copy of the tuple inside `B` receives nearly the same averaged
//! color, up to `ε` in the sup norm.

pub mod lp;

use std::collections::{BTreeSet, HashMap};

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::embedding::{copies_of_tuple, enumerate_embeddings, is_copy, Embedding};
use crate::error::{Error, Result};
use crate::fraisse::ClassSpec;
use crate::ramsey::Verdict;
use crate::rational::Q;
use crate::structure::{FinStructure, Tuple};

/// Largest number of colorings (one LP each) a sweep will try.
pub const DEFAULT_LP_GUARD: u64 = 1 << 20;

/// A probability vector on embeddings `B → C`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineWitness {
    /// Sorted by the embedding map, without repeats.
    pub support: Vec<Embedding>,
    pub weights: Vec<Q>,
}

impl AffineWitness {
    pub fn new(support: Vec<Embedding>, weights: Vec<Q>) -> Result<Self> {
        if support.len() != weights.len() {
            return Err(Error::Precondition(format!(
                "{} weights for {} embeddings",
                weights.len(),
                support.len()
            )));
        }
        if weights.iter().any(|w| w.is_negative()) {
            return Err(Error::Precondition("negative weight".into()));
        }
        if weights.iter().sum::<Q>() != Q::one() {
            return Err(Error::Precondition("weights do not sum to 1".into()));
        }
        if support.windows(2).any(|w| w[0].map() >= w[1].map()) {
            return Err(Error::Precondition("support is not strictly increasing".into()));
        }
        Ok(AffineWitness { support, weights })
    }

    pub fn point_mass(f: Embedding) -> Self {
        AffineWitness {
            support: vec![f],
            weights: vec![Q::one()],
        }
    }

    /// Equal weights on the given embeddings (sorted and deduplicated first).
    pub fn uniform(mut support: Vec<Embedding>) -> Result<Self> {
        support.sort_by(|x, y| x.map().cmp(y.map()));
        support.dedup();
        if support.is_empty() {
            return Err(Error::Precondition("empty support".into()));
        }
        let w = Q::new(1.into(), support.len().into());
        let weights = vec![w; support.len()];
        Ok(AffineWitness { support, weights })
    }
}

/// A formal convex combination of tuples, sorted by tuple with coincident
/// tuples merged.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineCombination {
    pub terms: Vec<(Tuple, Q)>,
}

impl AffineCombination {
    pub fn from_terms(terms: impl IntoIterator<Item = (Tuple, Q)>) -> Self {
        let mut merged: Vec<(Tuple, Q)> = Vec::new();
        let mut sorted: Vec<(Tuple, Q)> = terms.into_iter().collect();
        sorted.sort_by(|x, y| x.0.cmp(&y.0));
        for (t, w) in sorted {
            match merged.last_mut() {
                Some((last, acc)) if *last == t => *acc += w,
                _ => merged.push((t, w)),
            }
        }
        merged.retain(|(_, w)| !w.is_zero());
        AffineCombination { terms: merged }
    }
}

/// The combination `Σ λ_i f_i(copy)` for a copy of `tuple` inside `b`.
pub fn compose_affine(
    v: &AffineWitness,
    a: &FinStructure,
    tuple: &[usize],
    b: &FinStructure,
    copy: &[usize],
) -> Result<AffineCombination> {
    if !is_copy(a, tuple, b, copy) {
        return Err(Error::Precondition(format!("{copy:?} is not a copy of the tuple in B")));
    }
    if let Some(f) = v.support.iter().find(|f| f.src_size() != b.size()) {
        return Err(Error::CompositionMismatch(format!(
            "support embedding has domain of size {}, B has {}",
            f.src_size(),
            b.size()
        )));
    }
    Ok(AffineCombination::from_terms(
        v.support.iter().zip(&v.weights).map(|(f, w)| (f.apply_tuple(copy), w.clone())),
    ))
}

/// A coloring of copies by vertices of the `r`-cube; bit `i` of a value is
/// coordinate `i`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VectorColoring {
    pub r: usize,
    /// Copies in lexicographic order.
    pub domain: Vec<Tuple>,
    pub values: Vec<u64>,
}

impl VectorColoring {
    pub fn new(r: usize, domain: Vec<Tuple>, values: Vec<u64>) -> Result<Self> {
        if r > 64 {
            return Err(Error::Precondition(format!("dimension {r} exceeds 64")));
        }
        if domain.len() != values.len() {
            return Err(Error::Precondition(format!(
                "{} values for a domain of {}",
                values.len(),
                domain.len()
            )));
        }
        if domain.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Precondition("domain is not strictly increasing".into()));
        }
        if r < 64 {
            if let Some(v) = values.iter().find(|&&v| v >> r != 0) {
                return Err(Error::Precondition(format!("value {v:#b} is not a vertex of the {r}-cube")));
            }
        }
        Ok(VectorColoring { r, domain, values })
    }

    pub fn value_of(&self, copy: &[usize]) -> Option<u64> {
        self.domain
            .binary_search_by(|t| t.as_slice().cmp(copy))
            .ok()
            .map(|i| self.values[i])
    }

    /// The value as a 0/1 vector.
    pub fn coordinates(&self, index: usize) -> Vec<u8> {
        (0..self.r).map(|i| ((self.values[index] >> i) & 1) as u8).collect()
    }
}

/// `Σ λ_j c(t_j)` for a combination of copies, coordinate by coordinate.
pub fn eval_coloring(c: &VectorColoring, w: &AffineCombination) -> Result<Vec<Q>> {
    let mut out = vec![Q::zero(); c.r];
    for (t, lambda) in &w.terms {
        let v = c
            .value_of(t)
            .ok_or_else(|| Error::Precondition(format!("{t:?} is not in the coloring's domain")))?;
        for (i, slot) in out.iter_mut().enumerate() {
            if (v >> i) & 1 == 1 {
                *slot += lambda;
            }
        }
    }
    Ok(out)
}

/// Precomputed incidence data for one `(A, tuple, B, C)`.
#[derive(Clone, Debug)]
pub struct ConvexInstance {
    pub a: FinStructure,
    pub tuple: Tuple,
    pub b: FinStructure,
    pub c: FinStructure,
    /// Copies of the tuple in `C`, sorted.
    pub domain: Vec<Tuple>,
    /// Copies of the tuple in `B`, sorted.
    pub copies_in_b: Vec<Tuple>,
    /// `Emb(B, C)` in lexicographic order.
    pub embeddings: Vec<Embedding>,
    /// `incidence[f][j]` indexes `f(copies_in_b[j])` in `domain`.
    pub incidence: Vec<Vec<usize>>,
}

impl ConvexInstance {
    pub fn new(a: &FinStructure, tuple: &[usize], b: &FinStructure, c: &FinStructure) -> Result<Self> {
        a.same_signature(b)?;
        a.same_signature(c)?;
        let mut domain: Vec<Tuple> = copies_of_tuple(a, tuple, c)?.into_iter().map(|t| t.image).collect();
        domain.sort();
        let mut copies_in_b: Vec<Tuple> = copies_of_tuple(a, tuple, b)?.into_iter().map(|t| t.image).collect();
        copies_in_b.sort();
        let embeddings = enumerate_embeddings(b, c)?;
        let index: HashMap<&Tuple, usize> = domain.iter().enumerate().map(|(i, t)| (t, i)).collect();
        let incidence = embeddings
            .iter()
            .map(|f| copies_in_b.iter().map(|t| index[&f.apply_tuple(t)]).collect())
            .collect();
        Ok(ConvexInstance {
            a: a.clone(),
            tuple: tuple.to_vec(),
            b: b.clone(),
            c: c.clone(),
            domain,
            copies_in_b,
            embeddings,
            incidence,
        })
    }

    fn check_coloring(&self, col: &VectorColoring) -> Result<()> {
        if col.domain != self.domain {
            return Err(Error::Precondition("coloring domain differs from the copies in C".into()));
        }
        Ok(())
    }

    /// The linear system in the weights `λ_f`, one `≤ ε` row per ordered
    /// pair of copies in `B` and coordinate, with duplicates and vacuous
    /// rows dropped.
    pub fn system(&self, col: &VectorColoring, eps: &Q) -> lp::Problem {
        let vars = self.embeddings.len();
        let mut rows: BTreeSet<Vec<i8>> = BTreeSet::new();
        let m = self.copies_in_b.len();
        for j in 0..m {
            for k in (j + 1)..m {
                for i in 0..col.r {
                    let row: Vec<i8> = self
                        .incidence
                        .iter()
                        .map(|inc| {
                            let x = ((col.values[inc[j]] >> i) & 1) as i8;
                            let y = ((col.values[inc[k]] >> i) & 1) as i8;
                            x - y
                        })
                        .collect();
                    if row.iter().any(|&x| x != 0) {
                        rows.insert(row.iter().map(|x| -x).collect());
                        rows.insert(row);
                    }
                }
            }
        }
        let mut p = lp::Problem::new(vars);
        p.eq.push(lp::Row {
            coeffs: vec![Q::one(); vars],
            rhs: Q::one(),
        });
        for row in rows {
            p.le.push(lp::Row {
                coeffs: row.into_iter().map(|x| Q::from_integer(x.into())).collect(),
                rhs: eps.clone(),
            });
        }
        p
    }

    /// A vertex witness, or `None` when the system is infeasible.
    ///
    /// An embedding on which the tuple's copies all share one value is a
    /// feasible point mass for every `ε ≥ 0`; the least such one is used
    /// before the simplex is run.
    pub fn witness(&self, col: &VectorColoring, eps: &Q) -> Result<Option<AffineWitness>> {
        self.check_coloring(col)?;
        if eps.is_negative() {
            return Err(Error::Precondition("negative tolerance".into()));
        }
        if self.embeddings.is_empty() {
            return Ok(None);
        }
        let constant = self.incidence.iter().position(|inc| {
            inc.windows(2).all(|w| col.values[w[0]] == col.values[w[1]])
        });
        if let Some(f) = constant {
            return Ok(Some(AffineWitness::point_mass(self.embeddings[f].clone())));
        }
        let Some(lambda) = lp::find_feasible(&self.system(col, eps)) else {
            return Ok(None);
        };
        let (support, weights) = self
            .embeddings
            .iter()
            .zip(lambda)
            .filter(|(_, w)| !w.is_zero())
            .map(|(f, w)| (f.clone(), w))
            .unzip();
        AffineWitness::new(support, weights).map(Some)
    }

    /// Re-substitutes a witness and reports the first violated requirement.
    pub fn check_witness(&self, col: &VectorColoring, eps: &Q, w: &AffineWitness) -> Result<Option<String>> {
        self.check_coloring(col)?;
        if let Err(e) = AffineWitness::new(w.support.clone(), w.weights.clone()) {
            return Ok(Some(e.to_string()));
        }
        if let Some(f) = w.support.iter().find(|f| !self.embeddings.contains(f)) {
            return Ok(Some(format!("{:?} is not an embedding of B into C", f.map())));
        }
        let values: Vec<Vec<Q>> = self
            .copies_in_b
            .iter()
            .map(|t| eval_coloring(col, &compose_affine(w, &self.a, &self.tuple, &self.b, t)?))
            .collect::<Result<_>>()?;
        for (j, x) in values.iter().enumerate() {
            for (k, y) in values.iter().enumerate().skip(j + 1) {
                for i in 0..col.r {
                    let gap = (&x[i] - &y[i]).abs();
                    if gap > *eps {
                        return Ok(Some(format!(
                            "copies {:?} and {:?} differ by {gap} in coordinate {i}",
                            self.copies_in_b[j], self.copies_in_b[k]
                        )));
                    }
                }
            }
        }
        Ok(None)
    }

    /// Number of cube colorings of the domain, if it fits in a `u64`.
    pub fn coloring_count(&self, r: usize) -> Option<u64> {
        let bits = r.checked_mul(self.domain.len())?;
        (bits < 64).then(|| 1u64 << bits)
    }

    /// The `index`-th coloring in lexicographic order of the value sequence.
    pub fn coloring(&self, r: usize, mut index: u64) -> VectorColoring {
        let n = self.domain.len();
        let mut values = vec![0u64; n];
        let mask = if r == 64 { u64::MAX } else { (1u64 << r) - 1 };
        for slot in values.iter_mut().rev() {
            *slot = index & mask;
            index = if r >= 64 { 0 } else { index >> r };
        }
        VectorColoring {
            r,
            domain: self.domain.clone(),
            values,
        }
    }
}

/// Witness for `A`'s tuple in `B`, realized in `C`, for one coloring.
pub fn lp_witness(
    col: &VectorColoring,
    a: &FinStructure,
    b: &FinStructure,
    c: &FinStructure,
    tuple: &[usize],
    eps: &Q,
) -> Result<Option<AffineWitness>> {
    ConvexInstance::new(a, tuple, b, c)?.witness(col, eps)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EcrpOutcome {
    pub verdict: Verdict,
    /// The least coloring with no witness, when the verdict is No.
    pub counterexample: Option<VectorColoring>,
    /// Colorings in the sweep (`2^{r·n}`), or `None` past `u64`.
    pub colorings: Option<u64>,
    pub guard: u64,
}

/// Decides the instance by running one LP per coloring of the copies in
/// `C`, subject to `guard`.
#[allow(clippy::too_many_arguments)]
pub fn check_ecrp_instance(
    class: &ClassSpec,
    a: &FinStructure,
    tuple: &[usize],
    b: &FinStructure,
    c: &FinStructure,
    r: usize,
    eps: &Q,
    guard: u64,
) -> Result<EcrpOutcome> {
    for s in [a, b, c] {
        class.require_member(s)?;
    }
    if r > 64 {
        return Err(Error::Precondition(format!("dimension {r} exceeds 64")));
    }
    let inst = ConvexInstance::new(a, tuple, b, c)?;
    let colorings = inst.coloring_count(r);
    let Some(total) = colorings.filter(|&n| n <= guard) else {
        return Ok(EcrpOutcome {
            verdict: Verdict::Unknown,
            counterexample: None,
            colorings,
            guard,
        });
    };
    let failing = (0..total)
        .into_par_iter()
        .map(|i| -> Result<Option<u64>> {
            let col = inst.coloring(r, i);
            Ok(inst.witness(&col, eps)?.is_none().then_some(i))
        })
        .find_first(|res| !matches!(res, Ok(None)));
    let counterexample = match failing {
        Some(Err(e)) => return Err(e),
        Some(Ok(Some(i))) => Some(inst.coloring(r, i)),
        _ => None,
    };
    Ok(EcrpOutcome {
        verdict: if counterexample.is_some() { Verdict::No } else { Verdict::Yes },
        counterexample,
        colorings,
        guard,
    })
}

/// [`check_ecrp_instance`] at tolerance zero.
pub fn strong_ecrp_instance(
    class: &ClassSpec,
    a: &FinStructure,
    tuple: &[usize],
    b: &FinStructure,
    c: &FinStructure,
    r: usize,
    guard: u64,
) -> Result<EcrpOutcome> {
    check_ecrp_instance(class, a, tuple, b, c, r, &Q::zero(), guard)
}

/// Every coloring in the sweep with its witness (or `None`), in order.
pub fn ecrp_sweep(inst: &ConvexInstance, r: usize, eps: &Q, guard: u64) -> Result<Vec<(VectorColoring, Option<AffineWitness>)>> {
    let total = inst
        .coloring_count(r)
        .filter(|&n| n <= guard)
        .ok_or_else(|| Error::LimitExceeded(format!("more than {guard} colorings")))?;
    (0..total)
        .into_par_iter()
        .map(|i| {
            let col = inst.coloring(r, i);
            let w = inst.witness(&col, eps)?;
            Ok((col, w))
        })
        .collect()
}
