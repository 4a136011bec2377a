//! Replayable records of verdicts.
//!
//! ```text
//! certificate arrows
//! verdict no
//! colors 2
//! degree 1
//! tuple 0,1
//! coloring 0 0 1 1 0 1 0 1 1 0
//! structure A
//! signature lt/2
//! size 2
//! lt 0,1
//! end
//! ...
//! endcertificate
//! ```
//!
//! After the `certificate` and `verdict` lines come field lines
//! (`<key> <value> ...`) and structure blocks in any order; the order is
//! kept on a round trip.

mod request;

use crate::error::{Error, ParseError, Result};
use crate::ramsey::Verdict;
use crate::structure::{is_identifier, FinStructure};
use crate::text::{expect_keyword, format_structure, parse_block_body, Lines, NamedStructure};

pub use request::{run, verify, Outcome, Request, DEFAULT_SEED};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Item {
    Field { key: String, values: Vec<String> },
    Structure(NamedStructure),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub kind: String,
    pub verdict: Verdict,
    pub items: Vec<Item>,
}

impl Certificate {
    pub fn new(kind: &str, verdict: Verdict) -> Self {
        Certificate {
            kind: kind.to_string(),
            verdict,
            items: Vec::new(),
        }
    }

    pub fn push_field<S: ToString>(&mut self, key: &str, values: impl IntoIterator<Item = S>) {
        self.items.push(Item::Field {
            key: key.to_string(),
            values: values.into_iter().map(|v| v.to_string()).collect(),
        });
    }

    pub fn push_structure(&mut self, name: &str, s: &FinStructure) {
        self.items.push(Item::Structure(NamedStructure {
            name: name.to_string(),
            structure: s.clone(),
        }));
    }

    /// Values of every field named `key`, in order.
    pub fn fields<'a>(&'a self, key: &str) -> impl Iterator<Item = &'a [String]> + 'a {
        let key = key.to_string();
        self.items.iter().filter_map(move |i| match i {
            Item::Field { key: k, values } if *k == key => Some(values.as_slice()),
            _ => None,
        })
    }

    pub fn field(&self, key: &str) -> Option<&[String]> {
        self.fields(key).next()
    }

    /// The single value of field `key`.
    pub fn value(&self, key: &str) -> Result<&str> {
        match self.field(key) {
            Some([v]) => Ok(v),
            Some(_) => Err(Error::MalformedCertificate(format!("field `{key}` takes one value"))),
            None => Err(Error::MalformedCertificate(format!("missing field `{key}`"))),
        }
    }

    pub fn structure(&self, name: &str) -> Result<&FinStructure> {
        self.items
            .iter()
            .find_map(|i| match i {
                Item::Structure(n) if n.name == name => Some(&n.structure),
                _ => None,
            })
            .ok_or_else(|| Error::MalformedCertificate(format!("missing structure `{name}`")))
    }

    pub fn structures(&self) -> impl Iterator<Item = &NamedStructure> {
        self.items.iter().filter_map(|i| match i {
            Item::Structure(n) => Some(n),
            _ => None,
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("certificate {}\nverdict {}\n", self.kind, self.verdict);
        for item in &self.items {
            match item {
                Item::Field { key, values } => {
                    out.push_str(key);
                    for v in values {
                        out.push(' ');
                        out.push_str(v);
                    }
                    out.push('\n');
                }
                Item::Structure(n) => out.push_str(&format_structure(&n.name, &n.structure)),
            }
        }
        out.push_str("endcertificate\n");
        out
    }
}

fn parse_verdict(line: usize, column: usize, text: &str) -> std::result::Result<Verdict, ParseError> {
    match text {
        "yes" => Ok(Verdict::Yes),
        "no" => Ok(Verdict::No),
        "unknown" => Ok(Verdict::Unknown),
        other => Err(ParseError::new(line, column, format!("unknown verdict `{other}`"))),
    }
}

/// Parses exactly one certificate.
pub fn parse_certificate(text: &str) -> std::result::Result<Certificate, ParseError> {
    let mut lines = Lines::new(text);
    let (hl, ht) = lines.expect_line("`certificate`")?;
    expect_keyword(hl, &ht, "certificate", Some(1))?;
    if !is_identifier(ht[1].text) {
        return Err(ParseError::new(hl, ht[1].column, format!("invalid kind `{}`", ht[1].text)));
    }
    let kind = ht[1].text.to_string();
    let (vl, vt) = lines.expect_line("`verdict`")?;
    expect_keyword(vl, &vt, "verdict", Some(1))?;
    let verdict = parse_verdict(vl, vt[1].column, vt[1].text)?;
    let mut items = Vec::new();
    loop {
        let (ln, toks) = lines.expect_line("a field, a structure or `endcertificate`")?;
        match toks[0].text {
            "endcertificate" => {
                if toks.len() > 1 {
                    return Err(ParseError::new(ln, toks[1].column, "unexpected token after `endcertificate`"));
                }
                break;
            }
            "structure" => items.push(Item::Structure(parse_block_body(&mut lines, ln, &toks)?)),
            key if is_identifier(key) && key != "end" && key != "verdict" && key != "certificate" => {
                items.push(Item::Field {
                    key: key.to_string(),
                    values: toks[1..].iter().map(|t| t.text.to_string()).collect(),
                })
            }
            other => return Err(ParseError::new(ln, toks[0].column, format!("unexpected `{other}`"))),
        }
    }
    if let Some((ln, toks)) = lines.next_line() {
        return Err(ParseError::new(ln, toks[0].column, "text after `endcertificate`"));
    }
    Ok(Certificate { kind, verdict, items })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::build;

    fn sample() -> Certificate {
        let mut c = Certificate::new("arrows", Verdict::No);
        c.push_field("colors", [2]);
        c.push_field("tuple", ["0,1"]);
        c.push_structure("A", &build::chain(2));
        c.push_field("coloring", [0, 1, 1]);
        c.push_structure("C", &build::path(3));
        c.push_field("empty", Vec::<String>::new());
        c
    }

    #[test]
    fn round_trip_keeps_order() {
        let c = sample();
        let text = c.to_text();
        assert_eq!(parse_certificate(&text).unwrap(), c);
        assert!(text.starts_with("certificate arrows\nverdict no\ncolors 2\ntuple 0,1\nstructure A\n"));
        assert_eq!(c.value("colors").unwrap(), "2");
        assert!(c.value("coloring").is_err());
        assert_eq!(c.structure("C").unwrap(), &build::path(3));
        assert!(c.structure("B").is_err());
    }

    #[test]
    fn positional_errors() {
        let e = parse_certificate("certificate arrows\nverdict maybe\nendcertificate\n").unwrap_err();
        assert_eq!((e.line, e.column), (2, 9));
        let e = parse_certificate("certificate arrows\nverdict yes\n").unwrap_err();
        assert_eq!(e.line, 3);
        let e = parse_certificate("certificate arrows\nverdict yes\nendcertificate\nextra\n").unwrap_err();
        assert_eq!(e.line, 4);
        let e = parse_certificate("certificate arrows\nverdict yes\n9lives 3\nendcertificate\n").unwrap_err();
        assert_eq!((e.line, e.column), (3, 1));
        let e = parse_certificate("certificate\n").unwrap_err();
        assert_eq!(e.line, 1);
        let e = parse_certificate("certificate a\nverdict yes\nstructure S\nsignature e/2\nsize 2\ne 0,5\nend\nendcertificate\n")
            .unwrap_err();
        assert_eq!((e.line, e.column), (6, 5));
    }
}
