//! Problems as certificate headers, and the computations behind them.
//!
//! A certificate starts with the fields and structures that pose the
//! problem. [`run`] answers a [`Request`] with a certificate holding that
//! header followed by the result; [`verify`] re-checks the result
//! independently where a direct check exists and then replays the run.

use std::time::Instant;

use super::{Certificate, Item};
use crate::convex::{check_ecrp_instance, ConvexInstance, VectorColoring};
use crate::embedding::{copies_of_tuple, embeds, span_of_tuple, Embedding};
use crate::error::{Error, Result};
use crate::flows::{
    all_subsets, build_orbit_system, check_expansion_vanthe, compare_surrogates, count_expansions,
    minimal_flow_window, ExpansionPair, ExpansionWitness, Side, Surrogate, WindowExpansionReport, WindowVerdict,
};
use crate::fraisse::catalog::Catalog;
use crate::fraisse::{
    build_limit_approximant, check_ap, check_hp, check_jep, AxiomResult, Chain, ClassSpec, SPOT_CHECK_TRIALS,
};
use crate::ramsey::oracle;
use crate::ramsey::{
    compute_degree, find_degree_witness, joint_arrows, joint_degree_witness, tuple_arrows, check_bad_coloring,
    Coloring, DegreeBounds, JointOutcome, JointTuple, SearchOptions, Verdict, WitnessOutcome,
};
use crate::rational::{format_rational, parse_nonnegative, Q};
use crate::structure::{FinStructure, Tuple};

pub const DEFAULT_SEED: u64 = 1;

/// Largest `log2` of the coloring count at which a Yes is cross-checked by
/// the enumeration oracle during verification.
const ORACLE_CROSS_CHECK_BITS: f64 = 22.0;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Request {
    CheckClass {
        class: String,
        bound: usize,
        seed: u64,
    },
    BuildLimit {
        class: String,
        steps: usize,
        horizon: usize,
    },
    CheckErp {
        class: String,
        a: FinStructure,
        tuple: Tuple,
        b: FinStructure,
        colors: usize,
        degree: usize,
        bound: usize,
    },
    Arrows {
        a: FinStructure,
        tuple: Tuple,
        b: FinStructure,
        c: FinStructure,
        colors: usize,
        degree: usize,
    },
    Degree {
        class: String,
        a: FinStructure,
        tuple: Tuple,
        bounds: DegreeBounds,
    },
    JointDegree {
        class: String,
        a: FinStructure,
        tuples: Vec<JointTuple>,
        b: FinStructure,
        colors: usize,
        bound: usize,
    },
    CheckEcrp {
        class: String,
        a: FinStructure,
        tuple: Tuple,
        b: FinStructure,
        c: FinStructure,
        colors: usize,
        epsilon: Q,
        guard: u64,
    },
    CountExpansions {
        base: String,
        expanded: String,
        a0: FinStructure,
    },
    CheckExpansion {
        base: String,
        expanded: String,
        a0: FinStructure,
        bound: usize,
    },
    WindowExpansion {
        base: String,
        expanded: String,
        window: FinStructure,
        side: Side,
        surrogate: Surrogate,
        max_subset: usize,
    },
    MinFlowWindow {
        base: String,
        expanded: String,
        window: FinStructure,
        n: usize,
        surrogate: Surrogate,
    },
    OrbitSystem {
        window: FinStructure,
        tuples: Vec<Tuple>,
    },
}

/// A finished run: the certificate, plus timing and search counters that
/// are kept out of it so certificates stay reproducible.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub certificate: Certificate,
    pub stats: Vec<(String, String)>,
}

fn malformed(msg: impl Into<String>) -> Error {
    Error::MalformedCertificate(msg.into())
}

pub(crate) fn format_tuple(t: &[usize]) -> String {
    if t.is_empty() {
        "-".into()
    } else {
        t.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
    }
}

pub(crate) fn parse_tuple(s: &str) -> Result<Tuple> {
    if s == "-" {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|p| {
            if p.is_empty() || !p.bytes().all(|b| b.is_ascii_digit()) {
                return Err(malformed(format!("bad tuple `{s}`")));
            }
            p.parse().map_err(|_| malformed(format!("bad tuple `{s}`")))
        })
        .collect()
}

fn parse_num<T: std::str::FromStr>(cert: &Certificate, key: &str) -> Result<T> {
    let v = cert.value(key)?;
    v.parse().map_err(|_| malformed(format!("field `{key}` has bad value `{v}`")))
}

fn parse_list<T: std::str::FromStr>(values: &[String]) -> Result<Vec<T>> {
    values
        .iter()
        .map(|v| v.parse().map_err(|_| malformed(format!("bad value `{v}`"))))
        .collect()
}

fn parse_side(s: &str) -> Result<Side> {
    match s {
        "right" => Ok(Side::Right),
        "left" => Ok(Side::Left),
        "two-sided" => Ok(Side::TwoSided),
        _ => Err(malformed(format!("unknown side `{s}`"))),
    }
}

fn parse_surrogate(s: &str) -> Result<Surrogate> {
    match s {
        "automorphisms" => Ok(Surrogate::WindowAutomorphisms),
        "partial-isomorphisms" => Ok(Surrogate::PartialIsomorphisms),
        _ => Err(malformed(format!("unknown surrogate `{s}`"))),
    }
}

impl Request {
    pub fn kind(&self) -> &'static str {
        match self {
            Request::CheckClass { .. } => "check-class",
            Request::BuildLimit { .. } => "build-limit",
            Request::CheckErp { .. } => "check-erp",
            Request::Arrows { .. } => "arrows",
            Request::Degree { .. } => "degree",
            Request::JointDegree { .. } => "joint-degree",
            Request::CheckEcrp { .. } => "check-ecrp",
            Request::CountExpansions { .. } => "count-expansions",
            Request::CheckExpansion { .. } => "check-expansion",
            Request::WindowExpansion { .. } => "window-expansion",
            Request::MinFlowWindow { .. } => "min-flow-window",
            Request::OrbitSystem { .. } => "orbit-system",
        }
    }

    /// The header items posing the problem.
    pub fn header(&self) -> Vec<Item> {
        let mut c = Certificate::new(self.kind(), Verdict::Unknown);
        match self {
            Request::CheckClass { class, bound, seed } => {
                c.push_field("class", [class]);
                c.push_field("bound", [bound]);
                c.push_field("seed", [seed]);
            }
            Request::BuildLimit { class, steps, horizon } => {
                c.push_field("class", [class]);
                c.push_field("steps", [steps]);
                c.push_field("horizon", [horizon]);
            }
            Request::CheckErp { class, a, tuple, b, colors, degree, bound } => {
                c.push_field("class", [class]);
                c.push_field("colors", [colors]);
                c.push_field("degree", [degree]);
                c.push_field("bound", [bound]);
                c.push_field("tuple", [format_tuple(tuple)]);
                c.push_structure("A", a);
                c.push_structure("B", b);
            }
            Request::Arrows { a, tuple, b, c: cs, colors, degree } => {
                c.push_field("colors", [colors]);
                c.push_field("degree", [degree]);
                c.push_field("tuple", [format_tuple(tuple)]);
                c.push_structure("A", a);
                c.push_structure("B", b);
                c.push_structure("C", cs);
            }
            Request::Degree { class, a, tuple, bounds } => {
                c.push_field("class", [class]);
                c.push_field("tuple", [format_tuple(tuple)]);
                c.push_field("b-size", [bounds.b_size]);
                c.push_field("max-colors", [bounds.colors]);
                c.push_field("c-size", [bounds.c_size]);
                c.push_structure("A", a);
            }
            Request::JointDegree { class, a, tuples, b, colors, bound } => {
                c.push_field("class", [class]);
                c.push_field("colors", [colors]);
                c.push_field("bound", [bound]);
                for t in tuples {
                    c.push_field("joint", [format_tuple(&t.tuple), t.k.to_string()]);
                }
                c.push_structure("A", a);
                c.push_structure("B", b);
            }
            Request::CheckEcrp { class, a, tuple, b, c: cs, colors, epsilon, guard } => {
                c.push_field("class", [class]);
                c.push_field("colors", [colors]);
                c.push_field("epsilon", [format_rational(epsilon)]);
                c.push_field("guard", [guard]);
                c.push_field("tuple", [format_tuple(tuple)]);
                c.push_structure("A", a);
                c.push_structure("B", b);
                c.push_structure("C", cs);
            }
            Request::CountExpansions { base, expanded, a0 } => {
                c.push_field("base", [base]);
                c.push_field("expanded", [expanded]);
                c.push_structure("A0", a0);
            }
            Request::CheckExpansion { base, expanded, a0, bound } => {
                c.push_field("base", [base]);
                c.push_field("expanded", [expanded]);
                c.push_field("bound", [bound]);
                c.push_structure("A0", a0);
            }
            Request::WindowExpansion { base, expanded, window, side, surrogate, max_subset } => {
                c.push_field("base", [base]);
                c.push_field("expanded", [expanded]);
                c.push_field("side", [side.as_str()]);
                c.push_field("surrogate", [surrogate.as_str()]);
                c.push_field("max-subset", [max_subset]);
                c.push_structure("window", window);
            }
            Request::MinFlowWindow { base, expanded, window, n, surrogate } => {
                c.push_field("base", [base]);
                c.push_field("expanded", [expanded]);
                c.push_field("level", [n]);
                c.push_field("surrogate", [surrogate.as_str()]);
                c.push_structure("window", window);
            }
            Request::OrbitSystem { window, tuples } => {
                for t in tuples {
                    c.push_field("tuple", [format_tuple(t)]);
                }
                c.push_structure("window", window);
            }
        }
        c.items
    }

    /// Reads the problem back from a certificate's header fields.
    pub fn from_certificate(cert: &Certificate) -> Result<Request> {
        let s = |name: &str| cert.structure(name).cloned();
        let text = |key: &str| cert.value(key).map(str::to_string);
        let tuple = || parse_tuple(cert.value("tuple")?);
        Ok(match cert.kind.as_str() {
            "check-class" => Request::CheckClass {
                class: text("class")?,
                bound: parse_num(cert, "bound")?,
                seed: parse_num(cert, "seed")?,
            },
            "build-limit" => Request::BuildLimit {
                class: text("class")?,
                steps: parse_num(cert, "steps")?,
                horizon: parse_num(cert, "horizon")?,
            },
            "check-erp" => Request::CheckErp {
                class: text("class")?,
                a: s("A")?,
                tuple: tuple()?,
                b: s("B")?,
                colors: parse_num(cert, "colors")?,
                degree: parse_num(cert, "degree")?,
                bound: parse_num(cert, "bound")?,
            },
            "arrows" => Request::Arrows {
                a: s("A")?,
                tuple: tuple()?,
                b: s("B")?,
                c: s("C")?,
                colors: parse_num(cert, "colors")?,
                degree: parse_num(cert, "degree")?,
            },
            "degree" => Request::Degree {
                class: text("class")?,
                a: s("A")?,
                tuple: tuple()?,
                bounds: DegreeBounds {
                    b_size: parse_num(cert, "b-size")?,
                    colors: parse_num(cert, "max-colors")?,
                    c_size: parse_num(cert, "c-size")?,
                },
            },
            "joint-degree" => Request::JointDegree {
                class: text("class")?,
                a: s("A")?,
                tuples: cert
                    .fields("joint")
                    .map(|v| match v {
                        [t, k] => Ok(JointTuple {
                            tuple: parse_tuple(t)?,
                            k: k.parse().map_err(|_| malformed(format!("bad degree `{k}`")))?,
                        }),
                        _ => Err(malformed("`joint` takes a tuple and a degree")),
                    })
                    .collect::<Result<_>>()?,
                b: s("B")?,
                colors: parse_num(cert, "colors")?,
                bound: parse_num(cert, "bound")?,
            },
            "check-ecrp" => Request::CheckEcrp {
                class: text("class")?,
                a: s("A")?,
                tuple: tuple()?,
                b: s("B")?,
                c: s("C")?,
                colors: parse_num(cert, "colors")?,
                epsilon: parse_nonnegative(cert.value("epsilon")?)?,
                guard: parse_num(cert, "guard")?,
            },
            "count-expansions" => Request::CountExpansions {
                base: text("base")?,
                expanded: text("expanded")?,
                a0: s("A0")?,
            },
            "check-expansion" => Request::CheckExpansion {
                base: text("base")?,
                expanded: text("expanded")?,
                a0: s("A0")?,
                bound: parse_num(cert, "bound")?,
            },
            "window-expansion" => Request::WindowExpansion {
                base: text("base")?,
                expanded: text("expanded")?,
                window: s("window")?,
                side: parse_side(cert.value("side")?)?,
                surrogate: parse_surrogate(cert.value("surrogate")?)?,
                max_subset: parse_num(cert, "max-subset")?,
            },
            "min-flow-window" => Request::MinFlowWindow {
                base: text("base")?,
                expanded: text("expanded")?,
                window: s("window")?,
                n: parse_num(cert, "level")?,
                surrogate: parse_surrogate(cert.value("surrogate")?)?,
            },
            "orbit-system" => Request::OrbitSystem {
                window: s("window")?,
                tuples: cert
                    .fields("tuple")
                    .map(|v| match v {
                        [t] => parse_tuple(t),
                        _ => Err(malformed("`tuple` takes one value")),
                    })
                    .collect::<Result<_>>()?,
            },
            other => return Err(malformed(format!("unknown certificate kind `{other}`"))),
        })
    }
}

fn pair(catalog: &Catalog, base: &str, expanded: &str) -> Result<ExpansionPair> {
    ExpansionPair::new(catalog.get(base)?, catalog.get(expanded)?)
}

fn copy_domain(a: &FinStructure, tuple: &[usize], c: &FinStructure) -> Result<Vec<Tuple>> {
    Ok(copies_of_tuple(a, tuple, c)?.into_iter().map(|t| t.image).collect())
}

fn window_verdict_text(r: &WindowExpansionReport) -> Vec<String> {
    match &r.verdict {
        WindowVerdict::Holds => vec!["holds".into()],
        WindowVerdict::Fails { a } => vec!["fails".into(), format_tuple(a)],
        WindowVerdict::Refused { .. } => vec!["refused".into()],
    }
}

/// Starting point of a limit construction: the empty structure when it is
/// a member, otherwise the least one-point member.
fn limit_start(k: &ClassSpec) -> Result<FinStructure> {
    let empty = FinStructure::empty(k.sig_arc().clone());
    if k.contains(&empty) {
        return Ok(empty);
    }
    k.members_of_size(1)?
        .first()
        .cloned()
        .ok_or_else(|| Error::Precondition(format!("class `{}` has no member of size at most 1", k.name())))
}

fn limit_chain(cert: &Certificate) -> Result<Chain> {
    let n: usize = parse_num(cert, "stages")?;
    let stages: Vec<FinStructure> = (0..n).map(|i| cert.structure(&format!("stage{i}")).cloned()).collect::<Result<_>>()?;
    let inclusions = stages
        .windows(2)
        .map(|w| Embedding::new(&w[0], &w[1], (0..w[0].size()).collect()))
        .collect::<Result<_>>()?;
    Ok(Chain { stages, inclusions })
}

/// Answers a request.
pub fn run(req: &Request, catalog: &Catalog) -> Result<Outcome> {
    let opts = SearchOptions::default();
    let started = Instant::now();
    let mut stats: Vec<(String, String)> = Vec::new();
    let mut cert = Certificate::new(req.kind(), Verdict::Unknown);
    cert.items = req.header();
    match req {
        Request::CheckClass { class, bound, seed } => {
            let k = catalog.get(class)?;
            let invariant = match k.spot_check(*bound, SPOT_CHECK_TRIALS, *seed) {
                Ok(()) => true,
                Err(Error::NotIsoInvariant { .. }) => false,
                Err(e) => return Err(e),
            };
            cert.push_field("invariance", [if invariant { "passes" } else { "fails" }]);
            let mut ok = invariant;
            match check_hp(&k, *bound)? {
                AxiomResult::HoldsUpTo(n) => cert.push_field("hp", ["holds-up-to".to_string(), n.to_string()]),
                AxiomResult::Fails(f) => {
                    ok = false;
                    cert.push_field("hp", ["fails"]);
                    cert.push_field("hp-subset", f.subset.iter());
                    cert.push_structure("hp-member", &f.member);
                }
            }
            match check_jep(&k, *bound)? {
                AxiomResult::HoldsUpTo(n) => cert.push_field("jep", ["holds-up-to".to_string(), n.to_string()]),
                AxiomResult::Fails(f) => {
                    ok = false;
                    cert.push_field("jep", ["fails".to_string(), f.search_bound.to_string()]);
                    cert.push_structure("jep-a", &f.a);
                    cert.push_structure("jep-b", &f.b);
                }
            }
            match check_ap(&k, *bound)? {
                AxiomResult::HoldsUpTo(n) => cert.push_field("ap", ["holds-up-to".to_string(), n.to_string()]),
                AxiomResult::Fails(span) => {
                    ok = false;
                    cert.push_field("ap", ["fails"]);
                    cert.push_field("ap-f1", span.f1.map().iter());
                    cert.push_field("ap-f2", span.f2.map().iter());
                    cert.push_structure("ap-a", &span.a);
                    cert.push_structure("ap-b1", &span.b1);
                    cert.push_structure("ap-b2", &span.b2);
                }
            }
            cert.verdict = if ok { Verdict::Yes } else { Verdict::No };
        }
        Request::BuildLimit { class, steps, horizon } => {
            let k = catalog.get(class)?;
            let chain = build_limit_approximant(&k, &limit_start(&k)?, *steps, *horizon)?;
            cert.push_field("stages", [chain.stages.len()]);
            for (i, s) in chain.stages.iter().enumerate() {
                cert.push_structure(&format!("stage{i}"), s);
            }
            cert.verdict = Verdict::Yes;
        }
        Request::CheckErp { class, a, tuple, b, colors, degree, bound } => {
            let k = catalog.get(class)?;
            k.require_member(a)?;
            k.require_member(b)?;
            match find_degree_witness(&k, a, tuple, b, *colors, *degree, *bound, &opts)? {
                WitnessOutcome::Found { c, verdict } => {
                    stats.push(("nodes".into(), verdict.stats.nodes.to_string()));
                    cert.verdict = Verdict::Yes;
                    cert.push_structure("C", &c);
                }
                WitnessOutcome::Unknown { tried, last_refutation, budget_exhausted } => {
                    cert.push_field("tried", [tried]);
                    cert.push_field("budget-exhausted", [budget_exhausted]);
                    if let Some((c, col)) = last_refutation {
                        cert.push_field("refutation-coloring", col.colors.iter());
                        cert.push_structure("refuted", &c);
                    }
                }
            }
        }
        Request::Arrows { a, tuple, b, c, colors, degree } => {
            let v = tuple_arrows(c, b, a, tuple, *colors, *degree, &opts)?;
            stats.push(("nodes".into(), v.stats.nodes.to_string()));
            cert.verdict = v.verdict;
            if let Some(col) = v.bad_coloring {
                cert.push_field("coloring", col.colors.iter());
            }
        }
        Request::Degree { class, a, tuple, bounds } => {
            let k = catalog.get(class)?;
            let v = compute_degree(&k, a, tuple, *bounds, &opts)?;
            cert.verdict = if v.complete { Verdict::Yes } else { Verdict::Unknown };
            cert.push_field("result-degree", [v.k]);
            cert.push_field("complete", [v.complete]);
            for (i, e) in v.upper.iter().enumerate() {
                cert.push_field("upper", [i, e.r, e.k]);
                cert.push_structure(&format!("upper{i}-b"), &e.b);
                cert.push_structure(&format!("upper{i}-c"), &e.c);
            }
            if let Some(low) = &v.lower {
                cert.push_field("lower", [low.r, low.k]);
                cert.push_structure("lower-b", &low.b);
                for (i, (c, col)) in low.refutations.iter().enumerate() {
                    cert.push_field("refutation", std::iter::once(i).chain(col.colors.iter().copied()));
                    cert.push_structure(&format!("refutation{i}"), c);
                }
            }
        }
        Request::JointDegree { class, a, tuples, b, colors, bound } => {
            let k = catalog.get(class)?;
            k.require_member(a)?;
            k.require_member(b)?;
            match joint_degree_witness(&k, a, tuples, b, *colors, *bound, &opts)? {
                JointOutcome::Found { c, by_induction } => {
                    cert.verdict = Verdict::Yes;
                    cert.push_field("by-induction", [by_induction]);
                    cert.push_structure("C", &c);
                }
                JointOutcome::Unknown => {}
            }
        }
        Request::CheckEcrp { class, a, tuple, b, c, colors, epsilon, guard } => {
            let k = catalog.get(class)?;
            let out = check_ecrp_instance(&k, a, tuple, b, c, *colors, epsilon, *guard)?;
            cert.verdict = out.verdict;
            match out.colorings {
                Some(n) => cert.push_field("colorings", [n]),
                None => cert.push_field("colorings", ["overflow"]),
            }
            if let Some(col) = out.counterexample {
                cert.push_field("coloring", col.values.iter());
            }
        }
        Request::CountExpansions { base, expanded, a0 } => {
            let p = pair(catalog, base, expanded)?;
            let count = count_expansions(a0, &p)?;
            cert.verdict = Verdict::Yes;
            cert.push_field("count", [count.count]);
            cert.push_field("labeled", [count.labeled]);
            for (i, r) in count.representatives.iter().enumerate() {
                cert.push_structure(&format!("expansion{i}"), r);
            }
        }
        Request::CheckExpansion { base, expanded, a0, bound } => {
            let p = pair(catalog, base, expanded)?;
            match check_expansion_vanthe(&p, a0, *bound)? {
                ExpansionWitness::Found { b0 } => {
                    cert.verdict = Verdict::Yes;
                    cert.push_structure("B0", &b0);
                }
                ExpansionWitness::Unknown { tried } => cert.push_field("tried", [tried]),
            }
        }
        Request::WindowExpansion { base, expanded, window, side, surrogate, max_subset } => {
            let p = pair(catalog, base, expanded)?;
            p.expanded.require_member(window)?;
            let family = all_subsets(window.size(), *max_subset);
            let cmp = compare_surrogates(window, p.base_sig(), *side, &family)?;
            cert.push_field("automorphisms", window_verdict_text(&cmp.automorphisms));
            cert.push_field("partial-isomorphisms", window_verdict_text(&cmp.partial));
            cert.push_field("agree", [cmp.agree()]);
            let chosen = match surrogate {
                Surrogate::WindowAutomorphisms => &cmp.automorphisms,
                Surrogate::PartialIsomorphisms => &cmp.partial,
            };
            cert.verdict = match &chosen.verdict {
                WindowVerdict::Holds => Verdict::Yes,
                WindowVerdict::Fails { .. } => Verdict::No,
                WindowVerdict::Refused { reason } => {
                    stats.push(("refusal".into(), reason.clone()));
                    Verdict::Unknown
                }
            };
            for (a, b) in &chosen.witnesses {
                let b = b.as_ref().map_or_else(|| "none".to_string(), |b| format_tuple(b));
                cert.push_field("witness", [format_tuple(a), b]);
            }
        }
        Request::MinFlowWindow { base, expanded, window, n, surrogate } => {
            let p = pair(catalog, base, expanded)?;
            let flow = minimal_flow_window(&p, window, *n, *surrogate)?;
            cert.verdict = Verdict::Yes;
            cert.push_field("points", [flow.points.len()]);
            for (i, pt) in flow.points.iter().enumerate() {
                cert.push_structure(&format!("point{i}"), pt);
            }
        }
        Request::OrbitSystem { window, tuples } => {
            let sys = build_orbit_system(window, tuples)?;
            let violation = sys.validate();
            cert.verdict = if violation.is_none() { Verdict::Yes } else { Verdict::No };
            for ((t, raw), f) in sys.index.iter().zip(&sys.raw_fibers).zip(&sys.fibers) {
                cert.push_field("fiber", [format_tuple(t), raw.len().to_string(), f.len().to_string()]);
            }
            for b in &sys.bonding {
                cert.push_field(
                    "bond",
                    [b.from, b.to, b.dropped].into_iter().chain(b.map.iter().copied()),
                );
            }
            cert.push_field("threads", [sys.threads()?.len()]);
            if let Some(v) = violation {
                stats.push(("violation".into(), v));
            }
        }
    }
    stats.push(("elapsed-ms".into(), started.elapsed().as_millis().to_string()));
    Ok(Outcome { certificate: cert, stats })
}

/// Checks that need no search: colorings that claim to be bad, members
/// that claim to be in a class, and so on. Returns the first violation.
fn direct_checks(req: &Request, cert: &Certificate, catalog: &Catalog) -> Result<Option<String>> {
    match req {
        Request::Arrows { a, tuple, b, c, colors, degree } => match cert.verdict {
            Verdict::No => {
                let Some(values) = cert.field("coloring") else {
                    return Ok(Some("a no verdict needs a bad coloring".into()));
                };
                let values = parse_list::<usize>(values)?;
                let col = Coloring {
                    r: *colors,
                    domain: copy_domain(a, tuple, c)?,
                    colors: values,
                };
                check_bad_coloring(c, b, a, tuple, *degree, &col)
            }
            Verdict::Yes => {
                let covers = (0..a.size()).all(|p| tuple.contains(&p));
                let n = copy_domain(a, tuple, c)?.len();
                let bits = n as f64 * (*colors.max(&1) as f64).log2();
                if covers && bits <= ORACLE_CROSS_CHECK_BITS {
                    if let Some((_, col)) = oracle::least_bad_coloring(c, b, a, tuple, *colors, *degree)? {
                        return Ok(Some(format!("enumeration finds a bad coloring {col:?}")));
                    }
                }
                Ok(None)
            }
            Verdict::Unknown => Ok(None),
        },
        Request::CheckErp { class, a, tuple, b, degree, .. } => {
            let k = catalog.get(class)?;
            if let Ok(c) = cert.structure("C") {
                if !k.contains(c) {
                    return Ok(Some("the witness is not a member of the class".into()));
                }
                if !embeds(b, c) {
                    return Ok(Some("B does not embed into the witness".into()));
                }
            }
            if let (Ok(c), Some(values)) = (cert.structure("refuted"), cert.field("refutation-coloring")) {
                let col = Coloring {
                    r: parse_num(cert, "colors")?,
                    domain: copy_domain(a, tuple, c)?,
                    colors: parse_list(values)?,
                };
                if let Some(why) = check_bad_coloring(c, b, a, tuple, *degree, &col)? {
                    return Ok(Some(format!("refutation: {why}")));
                }
            }
            Ok(None)
        }
        Request::Degree { class, a, tuple, .. } => {
            let k = catalog.get(class)?;
            let (span, pattern) = span_of_tuple(a, tuple)?;
            let span_tuple = pattern.pattern.clone();
            for n in cert.structures() {
                if n.name.starts_with("upper") && n.name.ends_with("-c") && !k.contains(&n.structure) {
                    return Ok(Some(format!("`{}` is not a member of the class", n.name)));
                }
            }
            if let Some(low) = cert.field("lower") {
                let [r, kk] = parse_list::<usize>(low)?[..] else {
                    return Err(malformed("`lower` takes two values"));
                };
                let lb = cert.structure("lower-b")?;
                for values in cert.fields("refutation") {
                    let values = parse_list::<usize>(values)?;
                    let Some((&i, colors)) = values.split_first() else {
                        return Err(malformed("empty refutation"));
                    };
                    let c = cert.structure(&format!("refutation{i}"))?;
                    let col = Coloring {
                        r,
                        domain: copy_domain(&span, &span_tuple, c)?,
                        colors: colors.to_vec(),
                    };
                    if let Some(why) = check_bad_coloring(c, lb, &span, &span_tuple, kk, &col)? {
                        return Ok(Some(format!("refutation {i}: {why}")));
                    }
                }
            }
            Ok(None)
        }
        Request::JointDegree { class, a, tuples, b, colors, .. } => {
            if let Ok(c) = cert.structure("C") {
                if !catalog.get(class)?.contains(c) {
                    return Ok(Some("the witness is not a member of the class".into()));
                }
                let (v, _) = joint_arrows(c, b, a, tuples, *colors, &SearchOptions::default())?;
                if v != Verdict::Yes {
                    return Ok(Some(format!("the witness does not arrow jointly (search says {v})")));
                }
            }
            Ok(None)
        }
        Request::CheckEcrp { a, tuple, b, c, colors, epsilon, .. } => {
            if let Some(values) = cert.field("coloring") {
                let inst = ConvexInstance::new(a, tuple, b, c)?;
                let col = VectorColoring::new(*colors, inst.domain.clone(), parse_list(values)?)?;
                if let Some(w) = inst.witness(&col, epsilon)? {
                    if inst.check_witness(&col, epsilon, &w)?.is_none() {
                        return Ok(Some("the reported coloring has a balanced witness".into()));
                    }
                }
            }
            Ok(None)
        }
        Request::CheckClass { class, .. } => {
            if let (Ok(m), Some(subset)) = (cert.structure("hp-member"), cert.field("hp-subset")) {
                let k = catalog.get(class)?;
                let subset: Vec<usize> = parse_list(subset)?;
                if !k.contains(m) {
                    return Ok(Some("the heredity counterexample is not a member".into()));
                }
                if k.contains(&m.induced_ordered(&subset)?.0) {
                    return Ok(Some("the heredity counterexample's subset spans a member".into()));
                }
            }
            Ok(None)
        }
        Request::BuildLimit { class, .. } => {
            let chain = limit_chain(cert)?;
            chain.validate()?;
            let k = catalog.get(class)?;
            if let Some(s) = chain.stages.iter().position(|s| !k.contains(s)) {
                return Ok(Some(format!("stage {s} is not a member")));
            }
            Ok(None)
        }
        Request::CountExpansions { base, expanded, a0 } => {
            let p = pair(catalog, base, expanded)?;
            for n in cert.structures().filter(|n| n.name.starts_with("expansion")) {
                if n.structure.reduct(p.base_sig())? != *a0 || !p.expanded.contains(&n.structure) {
                    return Ok(Some(format!("`{}` is not an expansion of A0 in the class", n.name)));
                }
            }
            Ok(None)
        }
        Request::CheckExpansion { base, .. } => {
            if let Ok(b0) = cert.structure("B0") {
                if !catalog.get(base)?.contains(b0) {
                    return Ok(Some("B0 is not a member of the base class".into()));
                }
            }
            Ok(None)
        }
        Request::MinFlowWindow { .. } | Request::WindowExpansion { .. } | Request::OrbitSystem { .. } => Ok(None),
    }
}

/// Re-checks a certificate. `Ok(None)` means it verifies; otherwise the
/// first violated requirement is returned.
pub fn verify(cert: &Certificate, catalog: &Catalog) -> Result<Option<String>> {
    let req = Request::from_certificate(cert)?;
    let header = req.header();
    if cert.items.len() < header.len() || cert.items[..header.len()] != header[..] {
        return Ok(Some("the header is not in canonical form".into()));
    }
    if let Some(why) = direct_checks(&req, cert, catalog)? {
        return Ok(Some(why));
    }
    let replay = run(&req, catalog)?.certificate;
    if replay != *cert {
        let (ours, theirs) = (replay.to_text(), cert.to_text());
        let (line, expected, found) = ours
            .lines()
            .zip(theirs.lines())
            .enumerate()
            .find(|(_, (x, y))| x != y)
            .map(|(i, (x, y))| (i + 1, x.to_string(), y.to_string()))
            .unwrap_or_else(|| {
                let n = ours.lines().count().min(theirs.lines().count());
                (n + 1, "end of certificate".into(), "more lines".into())
            });
        return Ok(Some(format!("replay differs at line {line}: expected `{expected}`, found `{found}`")));
    }
    Ok(None)
}
