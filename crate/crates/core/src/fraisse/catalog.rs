//! Built-in classes and the class catalog file.
//!
//! ```text
//! class triangle_free
//! signature edge/2
//! base graph
//! size_bound 5
//! forbid
//! structure k3
//! signature edge/2
//! size 3
//! edge 0,1 0,2 1,0 1,2 2,0 2,1
//! end
//! endclass
//! ```
//!
//! A structure belongs to a declared class when it belongs to the base class
//! (if one is named) and none of the `forbid` structures embeds into it. A
//! class listing `member` blocks instead consists of exactly those
//! structures up to isomorphism.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use super::{ClassSpec, Extender, Generator};
use crate::canon::canonical_form;
use crate::embedding::embeds;
use crate::error::{Error, ParseError, Result};
use crate::structure::{build, is_identifier, FinStructure, Signature, Tuple};
use crate::text::{expect_keyword, parse_block_body, parse_signature, parse_usize, Lines, NamedStructure};

fn irreflexive_symmetric(s: &FinStructure, sym: usize) -> bool {
    s.table(sym)
        .iter()
        .all(|t| t[0] != t[1] && s.holds(sym, &[t[1], t[0]]))
}

fn is_linear_order(s: &FinStructure, sym: usize) -> bool {
    let n = s.size();
    if s.table(sym).len() != n * n.saturating_sub(1) / 2 {
        return false;
    }
    for i in 0..n {
        if s.holds(sym, &[i, i]) {
            return false;
        }
        for j in 0..n {
            if i != j && s.holds(sym, &[i, j]) == s.holds(sym, &[j, i]) {
                return false;
            }
        }
    }
    // total and antisymmetric with n(n-1)/2 pairs: transitivity remains
    for t in s.table(sym) {
        for u in s.table(sym) {
            if t[1] == u[0] && !s.holds(sym, &[t[0], u[1]]) {
                return false;
            }
        }
    }
    true
}

fn is_connected_graph(s: &FinStructure) -> bool {
    let n = s.size();
    if n == 0 {
        return false;
    }
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for t in s.table(0) {
            if t[0] == v && !seen[t[1]] {
                seen[t[1]] = true;
                stack.push(t[1]);
            }
        }
    }
    seen.into_iter().all(|x| x)
}

/// Number of points strictly below each point.
fn ranks(s: &FinStructure, sym: usize) -> Vec<usize> {
    let mut r = vec![0; s.size()];
    for t in s.table(sym) {
        r[t[1]] += 1;
    }
    r
}

fn extend_with(s: &FinStructure, extra: &[(usize, Tuple)]) -> Result<FinStructure> {
    let mut tables = s.tables().to_vec();
    for (sym, t) in extra {
        tables[*sym].push(t.clone());
    }
    FinStructure::new(s.sig_arc().clone(), s.size() + 1, tables)
}

/// Order positions for a new point `n`: the new point lies above exactly the
/// points of rank below `p`.
fn order_positions(s: &FinStructure, sym: usize) -> Vec<Vec<(usize, Tuple)>> {
    let n = s.size();
    let r = ranks(s, sym);
    (0..=n)
        .map(|p| {
            (0..n)
                .map(|i| if r[i] < p { (sym, vec![i, n]) } else { (sym, vec![n, i]) })
                .collect()
        })
        .collect()
}

fn neighbor_sets(n: usize, sym: usize) -> Vec<Vec<(usize, Tuple)>> {
    (0u64..1 << n)
        .map(|mask| {
            let mut out = Vec::new();
            for i in 0..n {
                if mask >> i & 1 == 1 {
                    out.push((sym, vec![i, n]));
                    out.push((sym, vec![n, i]));
                }
            }
            out
        })
        .collect()
}

fn set_extender() -> Extender {
    Arc::new(|s: &FinStructure| Ok(vec![extend_with(s, &[])?]))
}

fn linorder_extender() -> Extender {
    Arc::new(|s: &FinStructure| {
        order_positions(s, 0)
            .iter()
            .map(|extra| extend_with(s, extra))
            .collect()
    })
}

fn graph_extender() -> Extender {
    Arc::new(|s: &FinStructure| {
        neighbor_sets(s.size(), 0)
            .iter()
            .map(|extra| extend_with(s, extra))
            .collect()
    })
}

fn ordered_graph_extender() -> Extender {
    Arc::new(|s: &FinStructure| {
        let lt = s.sig().index_of("lt").expect("ordered graph signature");
        let edge = s.sig().index_of("edge").expect("ordered graph signature");
        let mut out = Vec::new();
        for pos in order_positions(s, lt) {
            for nb in neighbor_sets(s.size(), edge) {
                let mut extra = pos.clone();
                extra.extend(nb);
                out.push(extend_with(s, &extra)?);
            }
        }
        Ok(out)
    })
}

fn digraph_extender(tournament: bool) -> Extender {
    Arc::new(move |s: &FinStructure| {
        let n = s.size();
        let choices: u64 = if tournament { 2 } else { 4 };
        let total = choices.pow(n as u32);
        let mut out = Vec::with_capacity(total as usize);
        for code in 0..total {
            let mut c = code;
            let mut extra = Vec::new();
            for i in 0..n {
                let d = c % choices;
                c /= choices;
                let (out_arc, in_arc) = if tournament { (d == 0, d == 1) } else { (d & 1 == 1, d & 2 == 2) };
                if out_arc {
                    extra.push((0, vec![n, i]));
                }
                if in_arc {
                    extra.push((0, vec![i, n]));
                }
            }
            out.push(extend_with(s, &extra)?);
        }
        Ok(out)
    })
}

fn graph_class() -> ClassSpec {
    ClassSpec::new("graph", Signature::graph(), |s| irreflexive_symmetric(s, 0))
        .with_extender_arc(graph_extender())
        .with_generator(Generator::Hereditary)
        .hereditary()
        .with_size_bound(5)
}

/// Names of the built-in classes, in catalog order.
pub const BUILTIN_NAMES: &[&str] = &[
    "set",
    "linorder",
    "graph",
    "ordered_graph",
    "digraph",
    "tournament",
    "triangle_free",
    "even_graph",
    "connected_graph",
    "ap_fail",
];

/// A built-in class by name.
pub fn builtin(name: &str) -> Option<ClassSpec> {
    let spec = match name {
        "set" => ClassSpec::new("set", Signature::empty(), |_| true)
            .with_extender_arc(set_extender())
            .with_generator(Generator::Hereditary)
            .hereditary()
            .with_size_bound(6),
        "linorder" => ClassSpec::new("linorder", Signature::linorder(), |s| is_linear_order(s, 0))
            .with_extender_arc(linorder_extender())
            .with_generator(Generator::Hereditary)
            .hereditary()
            .with_size_bound(5),
        "graph" => graph_class(),
        "ordered_graph" => ClassSpec::new("ordered_graph", Signature::ordered_graph(), |s| {
            irreflexive_symmetric(s, 0) && is_linear_order(s, 1)
        })
        .with_extender_arc(ordered_graph_extender())
        .with_generator(Generator::Hereditary)
        .hereditary()
        .with_size_bound(4),
        "digraph" => ClassSpec::new("digraph", Signature::digraph(), |s| {
            s.table(0).iter().all(|t| t[0] != t[1])
        })
        .with_extender_arc(digraph_extender(false))
        .with_generator(Generator::Hereditary)
        .hereditary()
        .with_size_bound(3),
        "tournament" => ClassSpec::new("tournament", Signature::digraph(), |s| {
            let n = s.size();
            s.table(0).len() == n * n.saturating_sub(1) / 2
                && s.table(0).iter().all(|t| t[0] != t[1] && !s.holds(0, &[t[1], t[0]]))
        })
        .with_extender_arc(digraph_extender(true))
        .with_generator(Generator::Hereditary)
        .hereditary()
        .with_size_bound(4),
        "triangle_free" => {
            let k3 = build::complete_graph(3);
            ClassSpec::new("triangle_free", Signature::graph(), move |s| {
                irreflexive_symmetric(s, 0) && !embeds(&k3, s)
            })
            .with_extender_arc(graph_extender())
            .with_generator(Generator::Hereditary)
            .hereditary()
            .with_size_bound(5)
        }
        "even_graph" => ClassSpec::new("even_graph", Signature::graph(), |s| {
            irreflexive_symmetric(s, 0) && s.size() % 2 == 0
        })
        .with_extender_arc(graph_extender())
        .with_generator(Generator::Filtered(Arc::new(graph_class())))
        .with_size_bound(4),
        "connected_graph" => ClassSpec::new("connected_graph", Signature::graph(), |s| {
            irreflexive_symmetric(s, 0) && is_connected_graph(s)
        })
        .with_extender_arc(graph_extender())
        .with_generator(Generator::Filtered(Arc::new(graph_class())))
        .with_size_bound(4),
        "ap_fail" => explicit_class(
            "ap_fail",
            Arc::new(Signature::graph()),
            vec![build::complete_graph(1), build::complete_graph(2), build::edgeless(2)],
            Vec::new(),
        )
        .with_size_bound(2),
        _ => return None,
    };
    Some(spec)
}

fn explicit_class(
    name: &str,
    sig: Arc<Signature>,
    members: Vec<FinStructure>,
    forbidden: Vec<FinStructure>,
) -> ClassSpec {
    let forms: BTreeSet<FinStructure> = members.iter().map(|m| canonical_form(m).structure).collect();
    let forbidden_for_check = forbidden.clone();
    let mut spec = ClassSpec::new(name, (*sig).clone(), move |s| {
        forms.contains(&canonical_form(s).structure) && !forbidden_for_check.iter().any(|f| embeds(f, s))
    })
    .with_generator(Generator::Catalog(members));
    spec.sig = sig;
    spec
}

/// A class declaration read from a catalog file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassDecl {
    pub name: String,
    pub sig: Signature,
    pub size_bound: Option<usize>,
    pub base: Option<String>,
    pub forbidden: Vec<NamedStructure>,
    pub members: Vec<NamedStructure>,
}

/// Parses every `class ... endclass` block.
pub fn parse_catalog(text: &str) -> std::result::Result<Vec<ClassDecl>, ParseError> {
    let mut lines = Lines::new(text);
    let mut out: Vec<ClassDecl> = Vec::new();
    while let Some((ln, toks)) = lines.next_line() {
        expect_keyword(ln, &toks, "class", Some(1))?;
        let name = toks[1].text;
        if !is_identifier(name) {
            return Err(ParseError::new(ln, toks[1].column, format!("invalid class name `{name}`")));
        }
        if out.iter().any(|d| d.name == name) {
            return Err(ParseError::new(ln, toks[1].column, format!("class `{name}` declared twice")));
        }
        let (sl, st) = lines.expect_line("`signature`")?;
        let sig = parse_signature(sl, &st)?;
        let mut decl = ClassDecl {
            name: name.to_string(),
            sig,
            size_bound: None,
            base: None,
            forbidden: Vec::new(),
            members: Vec::new(),
        };
        loop {
            let (kl, kt) = lines.expect_line("a class item or `endclass`")?;
            match kt[0].text {
                "endclass" => {
                    expect_keyword(kl, &kt, "endclass", Some(0))?;
                    break;
                }
                "size_bound" => {
                    expect_keyword(kl, &kt, "size_bound", Some(1))?;
                    if decl.size_bound.is_some() {
                        return Err(ParseError::new(kl, 1, "`size_bound` given twice"));
                    }
                    decl.size_bound = Some(parse_usize(&kt[1], kl, "size bound")?);
                }
                "base" => {
                    expect_keyword(kl, &kt, "base", Some(1))?;
                    if decl.base.is_some() {
                        return Err(ParseError::new(kl, 1, "`base` given twice"));
                    }
                    decl.base = Some(kt[1].text.to_string());
                }
                kw @ ("forbid" | "member") => {
                    expect_keyword(kl, &kt, kw, Some(0))?;
                    let (hl, ht) = lines.expect_line("`structure`")?;
                    let block = parse_block_body(&mut lines, hl, &ht)?;
                    if block.structure.sig() != &decl.sig {
                        return Err(ParseError::new(
                            hl,
                            1,
                            format!("structure `{}` does not use the class signature", block.name),
                        ));
                    }
                    if kw == "forbid" {
                        decl.forbidden.push(block);
                    } else {
                        decl.members.push(block);
                    }
                }
                other => {
                    return Err(ParseError::new(kl, kt[0].column, format!("unexpected `{other}` in class block")));
                }
            }
        }
        out.push(decl);
    }
    Ok(out)
}

/// Built-in classes plus any declared in catalog files.
#[derive(Clone, Debug, Default)]
pub struct Catalog {
    declared: BTreeMap<String, Arc<ClassSpec>>,
}

impl Catalog {
    pub fn new() -> Self {
        Catalog::default()
    }

    pub fn get(&self, name: &str) -> Result<Arc<ClassSpec>> {
        if let Some(c) = self.declared.get(name) {
            return Ok(c.clone());
        }
        builtin(name)
            .map(Arc::new)
            .ok_or_else(|| Error::UnknownClass(name.to_string()))
    }

    pub fn names(&self) -> Vec<String> {
        let mut out: Vec<String> = BUILTIN_NAMES.iter().map(|s| s.to_string()).collect();
        out.extend(self.declared.keys().cloned());
        out
    }

    /// Parses `text` and adds its classes.
    pub fn load_str(&mut self, text: &str) -> Result<()> {
        for decl in parse_catalog(text)? {
            self.add(decl)?;
        }
        Ok(())
    }

    pub fn add(&mut self, decl: ClassDecl) -> Result<()> {
        if builtin(&decl.name).is_some() || self.declared.contains_key(&decl.name) {
            return Err(Error::InvalidSignature(format!("class `{}` already exists", decl.name)));
        }
        let spec = self.build(&decl)?;
        self.declared.insert(decl.name.clone(), Arc::new(spec));
        Ok(())
    }

    fn build(&self, decl: &ClassDecl) -> Result<ClassSpec> {
        let sig = Arc::new(decl.sig.clone());
        let forbidden: Vec<FinStructure> = decl.forbidden.iter().map(|f| f.structure.clone()).collect();
        let base = match &decl.base {
            Some(b) => {
                let base = self.get(b)?;
                if base.sig() != &decl.sig {
                    return Err(Error::SignatureMismatch(format!(
                        "class `{}` has signature {} but base `{b}` has {}",
                        decl.name,
                        decl.sig,
                        base.sig()
                    )));
                }
                Some(base)
            }
            None => None,
        };
        let mut spec = if !decl.members.is_empty() {
            let members = decl.members.iter().map(|m| m.structure.clone()).collect();
            let explicit = explicit_class(&decl.name, sig, members, forbidden);
            match base {
                Some(base) => {
                    let inner = explicit.membership().clone();
                    let mut s = ClassSpec::new(&decl.name, decl.sig.clone(), move |x| base.contains(x) && inner(x))
                        .with_generator(explicit.generator.clone().expect("explicit classes list members"));
                    s.sig = explicit.sig_arc().clone();
                    s
                }
                None => explicit,
            }
        } else {
            let hereditary = base.as_ref().is_none_or(|b| b.is_hereditary());
            let extender = base
                .as_ref()
                .map_or_else(|| Arc::new(super::generic_extensions) as Extender, |b| b.extender().clone());
            let generator = match &base {
                Some(b) if !hereditary => Generator::Filtered(b.clone()),
                _ => Generator::Hereditary,
            };
            let base_for_check = base.clone();
            let mut s = ClassSpec::new(&decl.name, decl.sig.clone(), move |x| {
                base_for_check.as_ref().is_none_or(|b| b.contains(x)) && !forbidden.iter().any(|f| embeds(f, x))
            })
            .with_extender_arc(extender)
            .with_generator(generator);
            if hereditary {
                s = s.hereditary();
            }
            if let Some(b) = &base {
                s = s.with_size_bound(b.size_bound());
            }
            s.sig = sig;
            s
        };
        if let Some(b) = decl.size_bound {
            spec = spec.with_size_bound(b);
        }
        Ok(spec)
    }
}
