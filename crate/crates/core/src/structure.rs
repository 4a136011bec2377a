//! Finite relational structures over an ordered relational signature.
//!
//! A structure of size `n` lives on the universe `{0, …, n-1}`. Each symbol
//! owns a table of tuples, kept sorted lexicographically and free of
//! duplicates, so that two structures are equal exactly when they have the
//! same signature, size, and tables.

use std::fmt;
use std::sync::Arc;

use crate::embedding::Embedding;
use crate::error::{Error, Result};

pub type Tuple = Vec<usize>;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol {
    pub name: String,
    pub arity: usize,
}

/// An ordered list of relation symbols. Order is part of identity.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Signature {
    symbols: Vec<Symbol>,
}

pub(crate) fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

impl Signature {
    pub fn new<I, S>(symbols: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, usize)>,
        S: Into<String>,
    {
        let mut out: Vec<Symbol> = Vec::new();
        for (name, arity) in symbols {
            let name = name.into();
            if !is_identifier(&name) {
                return Err(Error::InvalidSignature(format!(
                    "`{name}` is not a valid symbol name"
                )));
            }
            if arity == 0 {
                return Err(Error::InvalidSignature(format!(
                    "symbol `{name}` has arity 0"
                )));
            }
            if out.iter().any(|s| s.name == name) {
                return Err(Error::InvalidSignature(format!(
                    "symbol `{name}` declared twice"
                )));
            }
            out.push(Symbol { name, arity });
        }
        Ok(Signature { symbols: out })
    }

    pub fn empty() -> Self {
        Signature::default()
    }

    /// `edge/2`
    pub fn graph() -> Self {
        Signature::new([("edge", 2)]).unwrap()
    }

    /// `lt/2`
    pub fn linorder() -> Self {
        Signature::new([("lt", 2)]).unwrap()
    }

    /// `edge/2 lt/2`
    pub fn ordered_graph() -> Self {
        Signature::new([("edge", 2), ("lt", 2)]).unwrap()
    }

    /// `arc/2`
    pub fn digraph() -> Self {
        Signature::new([("arc", 2)]).unwrap()
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s.name == name)
    }

    pub fn arity(&self, symbol: usize) -> usize {
        self.symbols[symbol].arity
    }

    /// True when every symbol of `self` occurs in `other` with the same arity.
    pub fn is_subsignature_of(&self, other: &Signature) -> bool {
        self.symbols.iter().all(|s| {
            other
                .index_of(&s.name)
                .is_some_and(|i| other.symbols[i].arity == s.arity)
        })
    }

    /// Symbols of `self` that are not in `base`, in `self`'s order.
    pub fn difference(&self, base: &Signature) -> Signature {
        Signature {
            symbols: self
                .symbols
                .iter()
                .filter(|s| base.index_of(&s.name).is_none())
                .cloned()
                .collect(),
        }
    }

    /// `self` followed by the symbols of `other` not already present.
    pub fn union(&self, other: &Signature) -> Result<Signature> {
        let mut symbols = self.symbols.clone();
        for s in &other.symbols {
            match self.index_of(&s.name) {
                Some(i) if self.symbols[i].arity != s.arity => {
                    return Err(Error::InvalidSignature(format!(
                        "symbol `{}` has arities {} and {}",
                        s.name, self.symbols[i].arity, s.arity
                    )))
                }
                Some(_) => {}
                None => symbols.push(s.clone()),
            }
        }
        Ok(Signature { symbols })
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .symbols
            .iter()
            .map(|s| format!("{}/{}", s.name, s.arity))
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// A finite relational structure on `{0, …, size-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FinStructure {
    sig: Arc<Signature>,
    size: usize,
    tables: Vec<Vec<Tuple>>,
}

impl FinStructure {
    /// Builds a structure, sorting each table. Rejects wrong arities,
    /// out-of-range points, and duplicate tuples.
    pub fn new(sig: impl Into<Arc<Signature>>, size: usize, tables: Vec<Vec<Tuple>>) -> Result<Self> {
        let sig = sig.into();
        if tables.len() != sig.len() {
            return Err(Error::InvalidStructure(format!(
                "expected {} tables, got {}",
                sig.len(),
                tables.len()
            )));
        }
        let mut sorted = Vec::with_capacity(tables.len());
        for (i, mut table) in tables.into_iter().enumerate() {
            let sym = &sig.symbols()[i];
            for t in &table {
                if t.len() != sym.arity {
                    return Err(Error::InvalidStructure(format!(
                        "tuple {t:?} has length {} but `{}` has arity {}",
                        t.len(),
                        sym.name,
                        sym.arity
                    )));
                }
                if let Some(&p) = t.iter().find(|&&p| p >= size) {
                    return Err(Error::OutOfRange { point: p, size });
                }
            }
            table.sort();
            if let Some(w) = table.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::InvalidStructure(format!(
                    "duplicate tuple {:?} in `{}`",
                    w[0], sym.name
                )));
            }
            sorted.push(table);
        }
        Ok(FinStructure {
            sig,
            size,
            tables: sorted,
        })
    }

    /// Builds a structure by evaluating `holds(symbol, tuple)` on every tuple.
    pub fn from_fn(
        sig: impl Into<Arc<Signature>>,
        size: usize,
        mut holds: impl FnMut(usize, &[usize]) -> bool,
    ) -> Self {
        let sig = sig.into();
        let mut tables = Vec::with_capacity(sig.len());
        for (i, sym) in sig.symbols().iter().enumerate() {
            let mut table = Vec::new();
            for_each_tuple(size, sym.arity, |t| {
                if holds(i, t) {
                    table.push(t.to_vec());
                }
            });
            tables.push(table);
        }
        FinStructure { sig, size, tables }
    }

    /// The structure with no points.
    pub fn empty(sig: impl Into<Arc<Signature>>) -> Self {
        let sig = sig.into();
        let tables = vec![Vec::new(); sig.len()];
        FinStructure {
            sig,
            size: 0,
            tables,
        }
    }

    pub(crate) fn from_sorted_tables(sig: Arc<Signature>, size: usize, tables: Vec<Vec<Tuple>>) -> Self {
        debug_assert!(tables.iter().all(|t| t.windows(2).all(|w| w[0] < w[1])));
        FinStructure { sig, size, tables }
    }

    pub fn sig(&self) -> &Signature {
        &self.sig
    }

    pub fn sig_arc(&self) -> &Arc<Signature> {
        &self.sig
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn tables(&self) -> &[Vec<Tuple>] {
        &self.tables
    }

    pub fn table(&self, symbol: usize) -> &[Tuple] {
        &self.tables[symbol]
    }

    pub fn holds(&self, symbol: usize, tuple: &[usize]) -> bool {
        self.tables[symbol]
            .binary_search_by(|t| t.as_slice().cmp(tuple))
            .is_ok()
    }

    pub fn same_signature(&self, other: &FinStructure) -> Result<()> {
        if self.sig == other.sig {
            Ok(())
        } else {
            Err(Error::SignatureMismatch(format!(
                "`{}` vs `{}`",
                self.sig, other.sig
            )))
        }
    }

    /// Renames every point `i` to `perm[i]`; `perm` must be a bijection.
    pub fn relabel(&self, perm: &[usize]) -> FinStructure {
        debug_assert_eq!(perm.len(), self.size);
        let tables = self
            .tables
            .iter()
            .map(|table| {
                let mut t: Vec<Tuple> = table
                    .iter()
                    .map(|tup| tup.iter().map(|&p| perm[p]).collect())
                    .collect();
                t.sort();
                t
            })
            .collect();
        FinStructure::from_sorted_tables(self.sig.clone(), self.size, tables)
    }

    /// The structure induced on `points` taken in the given order: point `i`
    /// of the result is `points[i]`. Returns the inclusion as well.
    pub fn induced_ordered(&self, points: &[usize]) -> Result<(FinStructure, Embedding)> {
        let mut position = vec![usize::MAX; self.size];
        for (i, &p) in points.iter().enumerate() {
            if p >= self.size {
                return Err(Error::OutOfRange {
                    point: p,
                    size: self.size,
                });
            }
            if position[p] != usize::MAX {
                return Err(Error::Precondition(format!("point {p} listed twice")));
            }
            position[p] = i;
        }
        let tables = self
            .tables
            .iter()
            .map(|table| {
                let mut t: Vec<Tuple> = table
                    .iter()
                    .filter(|tup| tup.iter().all(|&p| position[p] != usize::MAX))
                    .map(|tup| tup.iter().map(|&p| position[p]).collect())
                    .collect();
                t.sort();
                t
            })
            .collect();
        let sub = FinStructure::from_sorted_tables(self.sig.clone(), points.len(), tables);
        let inclusion = Embedding::from_parts(points.len(), self.size, points.to_vec());
        Ok((sub, inclusion))
    }

    /// The substructure on a set of points (relabelled in increasing order)
    /// together with its inclusion embedding.
    pub fn induced_substructure(&self, points: &[usize]) -> Result<(FinStructure, Embedding)> {
        let mut sorted = points.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        self.induced_ordered(&sorted)
    }

    /// Forgets every symbol not in `sig0`.
    pub fn reduct(&self, sig0: &Signature) -> Result<FinStructure> {
        if !sig0.is_subsignature_of(&self.sig) {
            return Err(Error::NotSubsignature(format!(
                "`{}` is not contained in `{}`",
                sig0, self.sig
            )));
        }
        let tables = sig0
            .symbols()
            .iter()
            .map(|s| self.tables[self.sig.index_of(&s.name).unwrap()].clone())
            .collect();
        Ok(FinStructure::from_sorted_tables(
            Arc::new(sig0.clone()),
            self.size,
            tables,
        ))
    }

    /// Combines two structures on the same universe into one over `sig`,
    /// taking each symbol's table from whichever part carries it.
    pub fn join(&self, extra: &FinStructure, sig: &Arc<Signature>) -> Result<FinStructure> {
        if self.size != extra.size {
            return Err(Error::InvalidStructure(format!(
                "cannot join structures of sizes {} and {}",
                self.size, extra.size
            )));
        }
        let mut tables = Vec::with_capacity(sig.len());
        for s in sig.symbols() {
            let table = if let Some(i) = self.sig.index_of(&s.name) {
                &self.tables[i]
            } else if let Some(i) = extra.sig.index_of(&s.name) {
                &extra.tables[i]
            } else {
                return Err(Error::NotSubsignature(format!(
                    "symbol `{}` is in neither part",
                    s.name
                )));
            };
            tables.push(table.clone());
        }
        Ok(FinStructure::from_sorted_tables(sig.clone(), self.size, tables))
    }

    /// Pulls the structure back along an injective map `map: [k] -> self`:
    /// the result holds `R(t)` iff `self` holds `R(map(t))`.
    pub fn pullback(&self, map: &[usize]) -> FinStructure {
        self.induced_ordered(map)
            .expect("pullback along an injective in-range map")
            .0
    }

    pub fn tuple_count(&self) -> usize {
        self.tables.iter().map(Vec::len).sum()
    }
}

/// Calls `f` on every tuple of length `arity` over `{0, …, n-1}` in
/// lexicographic order.
pub fn for_each_tuple(n: usize, arity: usize, mut f: impl FnMut(&[usize])) {
    if arity == 0 {
        f(&[]);
        return;
    }
    if n == 0 {
        return;
    }
    let mut t = vec![0usize; arity];
    loop {
        f(&t);
        let mut i = arity;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            t[i] += 1;
            if t[i] < n {
                break;
            }
            t[i] = 0;
        }
    }
}

/// Ready-made members of the standard classes.
pub mod build {
    use super::*;

    pub fn pure_set(n: usize) -> FinStructure {
        FinStructure::from_fn(Signature::empty(), n, |_, _| false)
    }

    /// `{0 < 1 < … < n-1}` in the `lt/2` signature.
    pub fn chain(n: usize) -> FinStructure {
        FinStructure::from_fn(Signature::linorder(), n, |_, t| t[0] < t[1])
    }

    pub fn graph(n: usize, edges: &[(usize, usize)]) -> FinStructure {
        let mut adj = vec![false; n * n];
        for &(a, b) in edges {
            assert!(a != b && a < n && b < n, "bad edge ({a},{b})");
            adj[a * n + b] = true;
            adj[b * n + a] = true;
        }
        FinStructure::from_fn(Signature::graph(), n, |_, t| adj[t[0] * n + t[1]])
    }

    pub fn complete_graph(n: usize) -> FinStructure {
        FinStructure::from_fn(Signature::graph(), n, |_, t| t[0] != t[1])
    }

    pub fn edgeless(n: usize) -> FinStructure {
        graph(n, &[])
    }

    /// The path `0 - 1 - … - (n-1)`.
    pub fn path(n: usize) -> FinStructure {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        graph(n, &edges)
    }

    pub fn cycle(n: usize) -> FinStructure {
        let mut edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        if n > 2 {
            edges.push((n - 1, 0));
        }
        graph(n, &edges)
    }

    /// A graph on `{0..n}` with the natural order added as `lt`.
    pub fn ordered_graph(n: usize, edges: &[(usize, usize)]) -> FinStructure {
        let g = graph(n, edges);
        FinStructure::from_fn(Signature::ordered_graph(), n, |s, t| match s {
            0 => g.holds(0, t),
            _ => t[0] < t[1],
        })
    }
}
