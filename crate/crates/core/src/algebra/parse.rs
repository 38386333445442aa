//! Parser for the canonical polynomial text form.
//!
//! Grammar, with whitespace ignored:
//! ```text
//! poly   := ['-'] term (('+'|'-') term)*
//! term   := factor ('*' factor)*
//! factor := rational | variable
//! rational := digits ['/' digits]
//! variable := 'X' digits ['^' digits]
//! ```
//! Variable indices are 1-based in the text (`X1..Xn`).

use num_traits::One;

use super::poly::MultiPoly;
use super::scalar::{scalar_int, Scalar};
use crate::error::{Error, Result};

struct Cursor<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(src: &'a str) -> Self {
        Cursor {
            src,
            bytes: src.as_bytes(),
            pos: 0,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let b = self.peek()?;
        self.pos += 1;
        Some(b)
    }

    fn digits(&mut self) -> Result<&'a str> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(Error::Parse(format!(
                "expected digits at offset {} in `{}`",
                start, self.src
            )));
        }
        Ok(&self.src[start..self.pos])
    }
}

/// Parse canonical polynomial text into a polynomial in `num_vars` variables.
pub fn parse_poly(text: &str, num_vars: usize) -> Result<MultiPoly> {
    let mut cur = Cursor::new(text);
    let mut acc = MultiPoly::zero(num_vars);

    let mut sign = match cur.peek() {
        Some(b'-') => {
            cur.bump();
            -1
        }
        Some(b'+') => {
            cur.bump();
            1
        }
        Some(_) => 1,
        None => return Err(Error::Parse("empty polynomial text".into())),
    };

    loop {
        let term = parse_term(&mut cur, num_vars)?;
        let term = if sign < 0 { term.neg() } else { term };
        acc = acc.add(&term)?;

        match cur.peek() {
            None => break,
            Some(b'+') => {
                cur.bump();
                sign = 1;
            }
            Some(b'-') => {
                cur.bump();
                sign = -1;
            }
            Some(c) => {
                return Err(Error::Parse(format!(
                    "unexpected character `{}` at offset {} in `{}`",
                    c as char, cur.pos, cur.src
                )));
            }
        }
    }
    Ok(acc)
}

fn parse_term(cur: &mut Cursor<'_>, num_vars: usize) -> Result<MultiPoly> {
    let mut coeff = Scalar::one();
    let mut exps = vec![0u32; num_vars];
    loop {
        match cur.peek() {
            Some(b'X') => {
                cur.bump();
                let idx: usize = cur.digits()?.parse().map_err(|_| {
                    Error::Parse(format!("bad variable index in `{}`", cur.src))
                })?;
                if idx == 0 || idx > num_vars {
                    return Err(Error::Parse(format!(
                        "variable X{idx} out of range (expected X1..X{num_vars})"
                    )));
                }
                let mut exp = 1u32;
                if cur.peek() == Some(b'^') {
                    cur.bump();
                    exp = cur.digits()?.parse().map_err(|_| {
                        Error::Parse(format!("bad exponent in `{}`", cur.src))
                    })?;
                }
                exps[idx - 1] += exp;
            }
            Some(c) if c.is_ascii_digit() => {
                let num: i64 = cur.digits()?.parse().map_err(|_| {
                    Error::Parse(format!("coefficient too large in `{}`", cur.src))
                })?;
                let mut value = scalar_int(num);
                if cur.peek() == Some(b'/') {
                    cur.bump();
                    let den: i64 = cur.digits()?.parse().map_err(|_| {
                        Error::Parse(format!("denominator too large in `{}`", cur.src))
                    })?;
                    if den == 0 {
                        return Err(Error::Parse("zero denominator in coefficient".into()));
                    }
                    value /= scalar_int(den);
                }
                coeff *= value;
            }
            other => {
                return Err(Error::Parse(format!(
                    "expected a coefficient or variable, found {:?} in `{}`",
                    other.map(|c| c as char),
                    cur.src
                )));
            }
        }
        if cur.peek() == Some(b'*') {
            cur.bump();
        } else {
            break;
        }
    }
    MultiPoly::from_terms(num_vars, vec![(coeff, exps)])
}
