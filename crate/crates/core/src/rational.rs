//! Exact rationals written as `p/q` or `p`, with no decimal point.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::ParseError;

pub type Q = BigRational;

fn parse_int(s: &str, column: usize, allow_sign: bool) -> Result<BigInt, ParseError> {
    let digits = if allow_sign { s.strip_prefix('-').unwrap_or(s) } else { s };
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(ParseError::new(1, column, format!("expected an integer, found `{s}`")));
    }
    s.parse::<BigInt>()
        .map_err(|e| ParseError::new(1, column, format!("bad integer `{s}`: {e}")))
}

/// Parses `p/q` or `p` (optionally negative). Decimals are rejected.
pub fn parse_rational(s: &str) -> Result<Q, ParseError> {
    match s.split_once('/') {
        None => Ok(Q::from_integer(parse_int(s, 1, true)?)),
        Some((p, q)) => {
            let num = parse_int(p, 1, true)?;
            let den = parse_int(q, p.chars().count() + 2, false)?;
            if den.is_zero() {
                return Err(ParseError::new(1, p.chars().count() + 2, "zero denominator"));
            }
            Ok(Q::new(num, den))
        }
    }
}

/// Writes `p/q` in lowest terms with a positive denominator.
pub fn format_rational(x: &Q) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Parses a non-negative rational.
pub fn parse_nonnegative(s: &str) -> Result<Q, ParseError> {
    let x = parse_rational(s)?;
    if x.is_negative() {
        return Err(ParseError::new(1, 1, format!("`{s}` is negative")));
    }
    Ok(x)
}
