//! The line-based structure format.
//!
//! ```text
//! structure p3
//! signature edge/2
//! size 3
//! edge 0,1 1,0 1,2 2,1
//! end
//! ```
//!
//! One block per structure. Symbol lines are emitted in signature order and
//! omitted when the table is empty. Blank lines and lines starting with `#`
//! are ignored between and inside blocks.

use std::sync::Arc;

use crate::error::ParseError;
use crate::structure::{is_identifier, FinStructure, Signature, Tuple};

/// Largest arity the parser accepts.
pub const MAX_ARITY: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedStructure {
    pub name: String,
    pub structure: FinStructure,
}

/// A whitespace-separated token with its 1-based column.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Token<'a> {
    pub text: &'a str,
    pub column: usize,
}

pub(crate) fn tokenize(line: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices() {
        if c == ' ' || c == '\t' {
            if let Some(s) = start.take() {
                out.push(Token {
                    text: &line[s..i],
                    column: line[..s].chars().count() + 1,
                });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push(Token {
            text: &line[s..],
            column: line[..s].chars().count() + 1,
        });
    }
    out
}

/// Iterates over meaningful lines, tracking line numbers.
pub(crate) struct Lines<'a> {
    lines: std::iter::Peekable<std::iter::Enumerate<std::str::Split<'a, char>>>,
    last_line: usize,
}

impl<'a> Lines<'a> {
    pub fn new(text: &'a str) -> Self {
        Lines {
            lines: text.split('\n').enumerate().peekable(),
            last_line: 0,
        }
    }

    fn skip_blank(&mut self) {
        while let Some((_, l)) = self.lines.peek() {
            let t = l.trim_start_matches([' ', '\t']);
            if t.is_empty() || t.starts_with('#') {
                self.lines.next();
            } else {
                break;
            }
        }
    }

    /// Next non-blank line as `(line number, tokens)`.
    pub fn next_line(&mut self) -> Option<(usize, Vec<Token<'a>>)> {
        self.skip_blank();
        let (i, l) = self.lines.next()?;
        self.last_line = i + 1;
        Some((i + 1, tokenize(l)))
    }

    pub fn expect_line(&mut self, what: &str) -> Result<(usize, Vec<Token<'a>>), ParseError> {
        let last = self.last_line;
        self.next_line()
            .ok_or_else(|| ParseError::new(last + 1, 1, format!("unexpected end of input, expected {what}")))
    }
}

pub(crate) fn parse_usize(tok: &Token<'_>, line: usize, what: &str) -> Result<usize, ParseError> {
    if tok.text.is_empty() || !tok.text.bytes().all(|b| b.is_ascii_digit()) {
        return Err(ParseError::new(line, tok.column, format!("expected {what}, found `{}`", tok.text)));
    }
    tok.text
        .parse()
        .map_err(|_| ParseError::new(line, tok.column, format!("{what} `{}` is too large", tok.text)))
}

pub(crate) fn expect_keyword(
    line: usize,
    tokens: &[Token<'_>],
    keyword: &str,
    args: Option<usize>,
) -> Result<(), ParseError> {
    match tokens.first() {
        Some(t) if t.text == keyword => {}
        Some(t) => {
            return Err(ParseError::new(
                line,
                t.column,
                format!("expected `{keyword}`, found `{}`", t.text),
            ))
        }
        None => return Err(ParseError::new(line, 1, format!("expected `{keyword}`"))),
    }
    if let Some(n) = args {
        if tokens.len() != n + 1 {
            let col = tokens.get(n + 1).map_or(tokens[0].column, |t| t.column);
            return Err(ParseError::new(
                line,
                col,
                format!("`{keyword}` takes {n} argument(s), found {}", tokens.len() - 1),
            ));
        }
    }
    Ok(())
}

pub(crate) fn parse_signature(line: usize, tokens: &[Token<'_>]) -> Result<Signature, ParseError> {
    expect_keyword(line, tokens, "signature", None)?;
    let mut symbols: Vec<(String, usize)> = Vec::new();
    for tok in &tokens[1..] {
        let Some((name, arity)) = tok.text.split_once('/') else {
            return Err(ParseError::new(line, tok.column, format!("expected `name/arity`, found `{}`", tok.text)));
        };
        if !is_identifier(name) {
            return Err(ParseError::new(line, tok.column, format!("invalid symbol name `{name}`")));
        }
        let arity_tok = Token {
            text: arity,
            column: tok.column + name.chars().count() + 1,
        };
        let arity = parse_usize(&arity_tok, line, "arity")?;
        if arity == 0 || arity > MAX_ARITY {
            return Err(ParseError::new(
                line,
                arity_tok.column,
                format!("arity must be between 1 and {MAX_ARITY}"),
            ));
        }
        if symbols.iter().any(|(n, _)| n == name) {
            return Err(ParseError::new(line, tok.column, format!("symbol `{name}` declared twice")));
        }
        symbols.push((name.to_string(), arity));
    }
    Ok(Signature::new(symbols).expect("validated above"))
}

fn parse_tuple(tok: &Token<'_>, line: usize, arity: usize, size: usize) -> Result<Tuple, ParseError> {
    let mut out = Vec::with_capacity(arity);
    let mut column = tok.column;
    for part in tok.text.split(',') {
        let t = Token { text: part, column };
        let p = parse_usize(&t, line, "point index")?;
        if p >= size {
            return Err(ParseError::new(line, column, format!("index {p} out of range for size {size}")));
        }
        out.push(p);
        column += part.chars().count() + 1;
    }
    if out.len() != arity {
        return Err(ParseError::new(
            line,
            tok.column,
            format!("tuple `{}` has {} entries, expected {arity}", tok.text, out.len()),
        ));
    }
    Ok(out)
}

/// Parses one block whose `structure <name>` header has already been read.
pub(crate) fn parse_block_body(
    lines: &mut Lines<'_>,
    header_line: usize,
    header: &[Token<'_>],
) -> Result<NamedStructure, ParseError> {
    expect_keyword(header_line, header, "structure", Some(1))?;
    let name = header[1].text.to_string();
    let (sl, st) = lines.expect_line("`signature`")?;
    let sig = Arc::new(parse_signature(sl, &st)?);
    let (zl, zt) = lines.expect_line("`size`")?;
    expect_keyword(zl, &zt, "size", Some(1))?;
    let size = parse_usize(&zt[1], zl, "size")?;
    let mut tables: Vec<Option<Vec<Tuple>>> = vec![None; sig.len()];
    loop {
        let (ln, toks) = lines.expect_line("a symbol line or `end`")?;
        let head = toks[0];
        if head.text == "end" {
            if toks.len() > 1 {
                return Err(ParseError::new(ln, toks[1].column, "unexpected token after `end`"));
            }
            break;
        }
        let Some(sym) = sig.index_of(head.text) else {
            return Err(ParseError::new(ln, head.column, format!("unknown symbol `{}`", head.text)));
        };
        if tables[sym].is_some() {
            return Err(ParseError::new(ln, head.column, format!("symbol `{}` listed twice", head.text)));
        }
        let arity = sig.arity(sym);
        let mut table: Vec<(Tuple, usize)> = Vec::with_capacity(toks.len() - 1);
        for tok in &toks[1..] {
            table.push((parse_tuple(tok, ln, arity, size)?, tok.column));
        }
        let mut sorted: Vec<&(Tuple, usize)> = table.iter().collect();
        sorted.sort();
        for w in sorted.windows(2) {
            if w[0].0 == w[1].0 {
                let col = w[0].1.max(w[1].1);
                return Err(ParseError::new(ln, col, format!("duplicate tuple {:?}", w[1].0)));
            }
        }
        tables[sym] = Some(sorted.into_iter().map(|(t, _)| t.clone()).collect());
    }
    let tables = tables.into_iter().map(Option::unwrap_or_default).collect();
    Ok(NamedStructure {
        name,
        structure: FinStructure::from_sorted_tables(sig, size, tables),
    })
}

/// Parses every block in `text`.
pub fn parse_structures(text: &str) -> Result<Vec<NamedStructure>, ParseError> {
    let mut lines = Lines::new(text);
    let mut out = Vec::new();
    while let Some((ln, toks)) = lines.next_line() {
        out.push(parse_block_body(&mut lines, ln, &toks)?);
    }
    Ok(out)
}

/// Parses a text holding exactly one block.
pub fn parse_structure(text: &str) -> Result<NamedStructure, ParseError> {
    let mut all = parse_structures(text)?;
    match all.len() {
        1 => Ok(all.pop().unwrap()),
        0 => Err(ParseError::new(1, 1, "no structure block found")),
        _ => Err(ParseError::new(1, 1, format!("expected one structure block, found {}", all.len()))),
    }
}

/// Emits one block, ending with a newline.
pub fn format_structure(name: &str, s: &FinStructure) -> String {
    let mut out = String::new();
    out.push_str("structure ");
    out.push_str(name);
    out.push('\n');
    out.push_str("signature");
    for sym in s.sig().symbols() {
        out.push_str(&format!(" {}/{}", sym.name, sym.arity));
    }
    out.push('\n');
    out.push_str(&format!("size {}\n", s.size()));
    for (i, sym) in s.sig().symbols().iter().enumerate() {
        let table = s.table(i);
        if table.is_empty() {
            continue;
        }
        out.push_str(&sym.name);
        for t in table {
            out.push(' ');
            let parts: Vec<String> = t.iter().map(usize::to_string).collect();
            out.push_str(&parts.join(","));
        }
        out.push('\n');
    }
    out.push_str("end\n");
    out
}
