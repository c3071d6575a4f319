//! Text form of group-ring elements, e.g. `1 + s^-4 - 2*s^-2 - t^-1*s^-1`.

use num_bigint::BigInt;
use num_traits::{One, Signed};

use super::{display_cmp, GroupElement, GroupRingElement};
use crate::error::{Error, Result};

pub fn default_var_names(rank: usize) -> Vec<String> {
    match rank {
        1 => vec!["x".into()],
        _ => (1..=rank).map(|i| format!("x{i}")).collect(),
    }
}

fn format_monomial(g: &GroupElement, names: &[String]) -> String {
    let mut parts = Vec::new();
    for (e, name) in g.0.iter().zip(names) {
        match e {
            0 => {}
            1 => parts.push(name.clone()),
            _ => parts.push(format!("{name}^{e}")),
        }
    }
    parts.join("*")
}

pub(super) fn format_element(x: &GroupRingElement, names: &[String]) -> String {
    assert_eq!(names.len(), x.rank(), "one variable name per coordinate");
    if x.is_zero() {
        return "0".into();
    }
    let mut terms: Vec<_> = x.terms().collect();
    terms.sort_by(|a, b| display_cmp(a.0, b.0));
    let mut out = String::new();
    for (i, (g, c)) in terms.into_iter().enumerate() {
        let neg = c.is_negative();
        match (i, neg) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        let a = c.abs();
        let mono = format_monomial(g, names);
        if mono.is_empty() {
            out.push_str(&a.to_string());
        } else if a.is_one() {
            out.push_str(&mono);
        } else {
            out.push_str(&format!("{a}*{mono}"));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Name(String),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

fn err(msg: impl Into<String>) -> Error {
    Error::Parse { line: 0, msg: msg.into() }
}

fn lex(s: &str) -> Result<Vec<Tok>> {
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    let mut out = Vec::new();
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => { out.push(Tok::Plus); i += 1 }
            '-' => { out.push(Tok::Minus); i += 1 }
            '*' => { out.push(Tok::Star); i += 1 }
            '^' => { out.push(Tok::Caret); i += 1 }
            '(' => { out.push(Tok::LParen); i += 1 }
            ')' => { out.push(Tok::RParen); i += 1 }
            d if d.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let digits: String = chars[start..i].iter().collect();
                out.push(Tok::Int(digits.parse().map_err(|_| err("bad integer"))?));
            }
            a if a.is_alphabetic() || a == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push(Tok::Name(chars[start..i].iter().collect()));
            }
            other => return Err(err(format!("unexpected character {other:?}"))),
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    names: &'a [String],
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn exponent(&mut self) -> Result<i64> {
        let paren = self.peek() == Some(&Tok::LParen);
        if paren {
            self.pos += 1;
        }
        let neg = self.peek() == Some(&Tok::Minus);
        if neg {
            self.pos += 1;
        }
        let v = match self.next() {
            Some(Tok::Int(v)) => v,
            _ => return Err(err("expected integer exponent")),
        };
        if paren && self.next() != Some(Tok::RParen) {
            return Err(err("expected ')'"));
        }
        let v: i64 = v.try_into().map_err(|_| err("exponent too large"))?;
        Ok(if neg { -v } else { v })
    }

    /// One product of integers and powers of variables.
    fn term(&mut self) -> Result<(GroupElement, BigInt)> {
        let mut g = GroupElement::identity(self.names.len());
        let mut c = BigInt::one();
        loop {
            match self.next() {
                Some(Tok::Int(v)) => c *= v,
                Some(Tok::Name(n)) => {
                    let idx = self
                        .names
                        .iter()
                        .position(|x| *x == n)
                        .ok_or_else(|| err(format!("unknown variable {n}")))?;
                    let e = if self.peek() == Some(&Tok::Caret) {
                        self.pos += 1;
                        self.exponent()?
                    } else {
                        1
                    };
                    g.0[idx] += e;
                }
                _ => return Err(err("expected integer or variable")),
            }
            if self.peek() == Some(&Tok::Star) {
                self.pos += 1;
            } else {
                return Ok((g, c));
            }
        }
    }
}

pub(super) fn parse_element(s: &str, names: &[String]) -> Result<GroupRingElement> {
    let toks = lex(s)?;
    let mut p = Parser { toks, pos: 0, names };
    let mut out = GroupRingElement::zero(names.len());
    let mut first = true;
    while p.peek().is_some() || first {
        let sign = match p.peek() {
            Some(Tok::Plus) => { p.pos += 1; 1 }
            Some(Tok::Minus) => { p.pos += 1; -1 }
            _ if first => 1,
            Some(t) => return Err(err(format!("expected '+' or '-', found {t:?}"))),
            None => 1,
        };
        first = false;
        let (g, c) = p.term()?;
        out.add_term(g, c * sign);
    }
    Ok(out)
}

/// Parses an element preceded by an optional `vars: a b c` line. Lines
/// starting with `#` are ignored.
pub fn parse_with_header(s: &str) -> Result<(Vec<String>, GroupRingElement)> {
    let mut names: Option<Vec<String>> = None;
    let mut body = String::new();
    for line in s.lines() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        if let Some(rest) = t.strip_prefix("vars:") {
            names = Some(rest.split_whitespace().map(String::from).collect());
        } else {
            body.push_str(t);
            body.push(' ');
        }
    }
    let names = names.ok_or_else(|| err("missing 'vars:' line"))?;
    let body = if body.trim().is_empty() { "0".to_string() } else { body };
    if body.trim() == "0" {
        return Ok((names.clone(), GroupRingElement::zero(names.len())));
    }
    let x = parse_element(&body, &names)?;
    Ok((names, x))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names() -> Vec<String> {
        vec!["t".into(), "s".into()]
    }

    #[test]
    fn zero_prints_and_parses() {
        let z = GroupRingElement::zero(2);
        assert_eq!(format_element(&z, &names()), "0");
        assert_eq!(parse_element("0", &names()).unwrap(), z);
    }

    #[test]
    fn accepts_parenthesised_exponents_and_repeats() {
        let a = parse_element("t^(-2)*s*s", &names()).unwrap();
        let b = parse_element("t^-2*s^2", &names()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_unknown_variable() {
        assert!(parse_element("1 + u", &names()).is_err());
    }
}
