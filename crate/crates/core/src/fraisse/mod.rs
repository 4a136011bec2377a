//! Classes of finite structures: membership, generation up to isomorphism,
//! the amalgamation-class axioms at a size bound, and limit approximants.

mod axioms;
pub mod catalog;
mod limit;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::{Arc, Mutex};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::canon::canonical_form;
use crate::error::{Error, Result};
use crate::structure::{for_each_tuple, FinStructure, Signature, Tuple};

pub use axioms::{
    amalgamate, check_ap, check_hp, check_jep, free_amalgam, joint_embedding, Amalgam,
    AmalgamOutcome, AxiomResult, HpFailure, JepFailure, Span,
};
pub(crate) use axioms::for_each_subset;
pub use limit::{
    build_limit_approximant, check_extension_property, check_extension_property_over,
    check_window_homogeneity, cofinal_family, is_cofinal, Chain, CofinalStrategy,
    HomogeneityFailure, MissingExtension,
};

pub type Membership = Arc<dyn Fn(&FinStructure) -> bool + Send + Sync>;

/// Produces candidate one-point extensions of a structure: every member
/// extension (new point last) must be among them; non-members may be too.
pub type Extender = Arc<dyn Fn(&FinStructure) -> Result<Vec<FinStructure>> + Send + Sync>;

/// How the members of a class are enumerated.
#[derive(Clone)]
pub enum Generator {
    /// Every member of size `n+1` is a one-point extension of a member of
    /// size `n`; valid for hereditary classes.
    Hereditary,
    /// Members of a hereditary ambient class that also satisfy this class's
    /// membership predicate.
    Filtered(Arc<ClassSpec>),
    /// An explicit finite list of members.
    Catalog(Vec<FinStructure>),
}

/// A class of finite structures over one signature.
#[derive(Clone)]
pub struct ClassSpec {
    name: String,
    sig: Arc<Signature>,
    membership: Membership,
    extender: Extender,
    size_bound: usize,
    generator: Option<Generator>,
    hereditary: bool,
    cache: Arc<Mutex<BTreeMap<usize, Arc<Vec<FinStructure>>>>>,
}

impl fmt::Debug for ClassSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ClassSpec")
            .field("name", &self.name)
            .field("sig", &self.sig)
            .field("size_bound", &self.size_bound)
            .field("hereditary", &self.hereditary)
            .finish_non_exhaustive()
    }
}

/// Largest number of new tuples the generic extender will enumerate subsets of.
const GENERIC_EXTENSION_LIMIT: usize = 20;

/// All structures obtained from `s` by adding one point (index `s.size()`)
/// and any set of tuples that mention it.
pub fn generic_extensions(s: &FinStructure) -> Result<Vec<FinStructure>> {
    let n = s.size();
    let mut fresh: Vec<(usize, Tuple)> = Vec::new();
    for (sym, symbol) in s.sig().symbols().iter().enumerate() {
        for_each_tuple(n + 1, symbol.arity, |t| {
            if t.contains(&n) {
                fresh.push((sym, t.to_vec()));
            }
        });
    }
    if fresh.len() > GENERIC_EXTENSION_LIMIT {
        return Err(Error::LimitExceeded(format!(
            "{} candidate tuples for a one-point extension (limit {})",
            fresh.len(),
            GENERIC_EXTENSION_LIMIT
        )));
    }
    let mut out = Vec::with_capacity(1 << fresh.len());
    for mask in 0u64..(1u64 << fresh.len()) {
        let mut tables: Vec<Vec<Tuple>> = s.tables().to_vec();
        for (i, (sym, t)) in fresh.iter().enumerate() {
            if mask >> i & 1 == 1 {
                tables[*sym].push(t.clone());
            }
        }
        out.push(FinStructure::new(s.sig_arc().clone(), n + 1, tables)?);
    }
    Ok(out)
}

impl ClassSpec {
    pub fn new(
        name: impl Into<String>,
        sig: Signature,
        membership: impl Fn(&FinStructure) -> bool + Send + Sync + 'static,
    ) -> Self {
        ClassSpec {
            name: name.into(),
            sig: Arc::new(sig),
            membership: Arc::new(membership),
            extender: Arc::new(generic_extensions),
            size_bound: 5,
            generator: None,
            hereditary: false,
            cache: Arc::new(Mutex::new(BTreeMap::new())),
        }
    }

    pub fn with_generator(mut self, generator: Generator) -> Self {
        self.generator = Some(generator);
        self.cache = Arc::new(Mutex::new(BTreeMap::new()));
        self
    }

    /// Marks the class as closed under substructures.
    pub fn hereditary(mut self) -> Self {
        self.hereditary = true;
        self
    }

    pub fn with_extender(
        mut self,
        extender: impl Fn(&FinStructure) -> Result<Vec<FinStructure>> + Send + Sync + 'static,
    ) -> Self {
        self.extender = Arc::new(extender);
        self
    }

    pub(crate) fn with_extender_arc(mut self, extender: Extender) -> Self {
        self.extender = extender;
        self
    }

    pub fn with_size_bound(mut self, size_bound: usize) -> Self {
        self.size_bound = size_bound;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn sig(&self) -> &Signature {
        &self.sig
    }

    pub fn sig_arc(&self) -> &Arc<Signature> {
        &self.sig
    }

    pub fn size_bound(&self) -> usize {
        self.size_bound
    }

    pub fn is_hereditary(&self) -> bool {
        self.hereditary
    }

    pub fn has_generator(&self) -> bool {
        self.generator.is_some()
    }

    pub(crate) fn extender(&self) -> &Extender {
        &self.extender
    }

    pub(crate) fn membership(&self) -> &Membership {
        &self.membership
    }

    pub fn contains(&self, s: &FinStructure) -> bool {
        s.sig() == &*self.sig && (self.membership)(s)
    }

    pub fn require_member(&self, s: &FinStructure) -> Result<()> {
        if self.contains(s) {
            Ok(())
        } else {
            Err(Error::NotMember(self.name.clone()))
        }
    }

    /// Member one-point extensions of `s` (the new point has index `s.size()`),
    /// sorted and deduplicated.
    pub fn one_point_extensions(&self, s: &FinStructure) -> Result<Vec<FinStructure>> {
        let mut out: Vec<FinStructure> = (self.extender)(s)?
            .into_iter()
            .filter(|x| self.contains(x))
            .collect();
        out.sort();
        out.dedup();
        Ok(out)
    }

    /// The members of size `n` up to isomorphism, as canonical forms in
    /// increasing order.
    pub fn members_of_size(&self, n: usize) -> Result<Arc<Vec<FinStructure>>> {
        if let Some(m) = self.cache.lock().unwrap().get(&n) {
            return Ok(m.clone());
        }
        let generated = Arc::new(self.generate(n)?);
        self.cache.lock().unwrap().insert(n, generated.clone());
        Ok(generated)
    }

    fn generate(&self, n: usize) -> Result<Vec<FinStructure>> {
        let Some(generator) = &self.generator else {
            return Err(Error::MissingGenerator(self.name.clone()));
        };
        let set: BTreeSet<FinStructure> = match generator {
            Generator::Hereditary => {
                if n == 0 {
                    let e = FinStructure::empty(self.sig.clone());
                    if self.contains(&e) {
                        [e].into_iter().collect()
                    } else {
                        BTreeSet::new()
                    }
                } else {
                    let smaller = self.members_of_size(n - 1)?;
                    let mut set = BTreeSet::new();
                    for m in smaller.iter() {
                        for x in (self.extender)(m)? {
                            if self.contains(&x) {
                                set.insert(canonical_form(&x).structure);
                            }
                        }
                    }
                    set
                }
            }
            Generator::Filtered(ambient) => ambient
                .members_of_size(n)?
                .iter()
                .filter(|m| self.contains(m))
                .cloned()
                .collect(),
            Generator::Catalog(list) => list
                .iter()
                .filter(|m| m.size() == n && self.contains(m))
                .map(|m| canonical_form(m).structure)
                .collect(),
        };
        Ok(set.into_iter().collect())
    }

    /// Members of every size up to `bound`, by size then canonical order.
    pub fn members_up_to(&self, bound: usize) -> Result<Vec<FinStructure>> {
        let mut out = Vec::new();
        for n in 0..=bound {
            out.extend(self.members_of_size(n)?.iter().cloned());
        }
        Ok(out)
    }

    /// Checks on random relabelings of `samples` that membership does not
    /// depend on labels. `trials` relabelings are drawn from a generator
    /// seeded with `seed`, so a failure is reproducible.
    pub fn spot_check_invariance(&self, samples: &[FinStructure], trials: usize, seed: u64) -> Result<()> {
        if samples.is_empty() {
            return Ok(());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..trials {
            let s = &samples[rng.gen_range(0..samples.len())];
            let mut perm: Vec<usize> = (0..s.size()).collect();
            perm.shuffle(&mut rng);
            if self.contains(s) != self.contains(&s.relabel(&perm)) {
                return Err(Error::NotIsoInvariant {
                    class: self.name.clone(),
                    seed,
                });
            }
        }
        Ok(())
    }

    /// Runs [`Self::spot_check_invariance`] on the members up to `max_size`
    /// and their candidate one-point extensions (which include non-members).
    pub fn spot_check(&self, max_size: usize, trials: usize, seed: u64) -> Result<()> {
        let mut samples = Vec::new();
        if self.generator.is_some() {
            for m in self.members_up_to(max_size)? {
                if m.size() < max_size {
                    if let Ok(ext) = (self.extender)(&m) {
                        samples.extend(ext.into_iter().take(16));
                    }
                }
                samples.push(m);
            }
        }
        self.spot_check_invariance(&samples, trials, seed)
    }
}

/// Number of relabelings per spot check of membership invariance.
pub const SPOT_CHECK_TRIALS: usize = 32;
