//! Expression grammar for `eval`:
//!
//! ```text
//! call  := name '(' arg (',' arg)* ')'
//! poly  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | atom ('^' int)?
//! atom  := int | 'q' | 'p' | 'i' | '(' poly ')'
//! ```
//!
//! Division is only by nonzero rational constants.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::phase_poly::{CRat, PhasePoly};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
#[error("parse error at position {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

fn err<T>(pos: usize, msg: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError { pos, msg: msg.into() })
}

/// A top-level call with its raw arguments and their byte offsets.
#[derive(Clone, Debug, PartialEq)]
pub struct Call {
    pub name: String,
    pub args: Vec<(String, usize)>,
}

pub fn parse_call(s: &str) -> Result<Call, ParseError> {
    let open = match s.find('(') {
        Some(i) => i,
        None => return err(s.len(), "expected '('"),
    };
    let name = s[..open].trim();
    if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return err(0, format!("bad function name '{}'", name));
    }
    let body_end = match s.rfind(')') {
        Some(i) if i > open => i,
        _ => return err(s.len(), "expected ')'"),
    };
    if !s[body_end + 1..].trim().is_empty() {
        return err(body_end + 1, "trailing input after ')'");
    }
    let mut args = Vec::new();
    let mut depth = 0i32;
    let mut start = open + 1;
    for (i, ch) in s[open + 1..body_end].char_indices() {
        let i = i + open + 1;
        match ch {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth < 0 {
                    return err(i, "unbalanced ')'");
                }
            }
            ',' if depth == 0 => {
                args.push((s[start..i].to_string(), start));
                start = i + 1;
            }
            _ => {}
        }
    }
    if depth != 0 {
        return err(body_end, "unbalanced '('");
    }
    args.push((s[start..body_end].to_string(), start));
    Ok(Call { name: name.to_string(), args })
}

struct Parser<'a> {
    s: &'a [u8],
    i: usize,
    base: usize,
}

impl Parser<'_> {
    fn pos(&self) -> usize {
        self.base + self.i
    }

    fn skip_ws(&mut self) {
        while self.i < self.s.len() && self.s[self.i].is_ascii_whitespace() {
            self.i += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.i).copied()
    }

    fn int(&mut self) -> Result<BigInt, ParseError> {
        self.skip_ws();
        let st = self.i;
        while self.i < self.s.len() && self.s[self.i].is_ascii_digit() {
            self.i += 1;
        }
        if st == self.i {
            return err(self.pos(), "expected an integer");
        }
        Ok(std::str::from_utf8(&self.s[st..self.i]).unwrap().parse().unwrap())
    }

    fn poly(&mut self) -> Result<PhasePoly, ParseError> {
        let mut acc = self.term()?;
        while let Some(c) = self.peek() {
            match c {
                b'+' => {
                    self.i += 1;
                    acc = acc.add(&self.term()?);
                }
                b'-' => {
                    self.i += 1;
                    acc = acc.sub(&self.term()?);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<PhasePoly, ParseError> {
        let mut acc = self.unary()?;
        while let Some(c) = self.peek() {
            match c {
                b'*' => {
                    self.i += 1;
                    acc = acc.mul(&self.unary()?);
                }
                b'/' => {
                    self.i += 1;
                    let at = self.pos();
                    let d = self.unary()?;
                    let c = constant_of(&d).filter(|c| c.im.is_zero() && !c.re.is_zero());
                    let Some(c) = c else { return err(at, "can only divide by a nonzero rational constant") };
                    acc = acc.scale(&CRat::real(c.re.recip()));
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<PhasePoly, ParseError> {
        if self.peek() == Some(b'-') {
            self.i += 1;
            return Ok(self.unary()?.neg());
        }
        let a = self.atom()?;
        if self.peek() == Some(b'^') {
            self.i += 1;
            let at = self.pos();
            let k = self.int()?;
            let k: u32 = match u32::try_from(k) {
                Ok(k) if k <= 64 => k,
                _ => return err(at, "exponent too large"),
            };
            return Ok(a.pow(k));
        }
        Ok(a)
    }

    fn atom(&mut self) -> Result<PhasePoly, ParseError> {
        let at = self.pos();
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let n = self.int()?;
                Ok(PhasePoly::constant(1, CRat::real(BigRational::from_integer(n))))
            }
            Some(b'(') => {
                self.i += 1;
                let v = self.poly()?;
                if self.peek() != Some(b')') {
                    return err(self.pos(), "expected ')'");
                }
                self.i += 1;
                Ok(v)
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let st = self.i;
                while self.i < self.s.len() && self.s[self.i].is_ascii_alphanumeric() {
                    self.i += 1;
                }
                match &self.s[st..self.i] {
                    b"q" => Ok(PhasePoly::q(1, 1)),
                    b"p" => Ok(PhasePoly::p(1, 1)),
                    b"i" => Ok(PhasePoly::constant(1, CRat::i())),
                    other => err(at, format!("undefined symbol '{}'", String::from_utf8_lossy(other))),
                }
            }
            Some(c) => err(at, format!("unexpected '{}'", c as char)),
            None => err(at, "unexpected end of input"),
        }
    }
}

fn constant_of(f: &PhasePoly) -> Option<CRat> {
    if f.is_zero() {
        return Some(CRat::zero());
    }
    match f.terms().iter().next() {
        Some((e, c)) if f.len() == 1 && e.iter().all(|&x| x == 0) => Some(c.clone()),
        _ => None,
    }
}

/// Polynomial in `q, p` (one degree of freedom); `base` offsets error positions.
pub fn parse_poly(s: &str, base: usize) -> Result<PhasePoly, ParseError> {
    let mut p = Parser { s: s.as_bytes(), i: 0, base };
    let v = p.poly()?;
    if p.peek().is_some() {
        return err(p.pos(), format!("unexpected '{}'", p.s[p.i] as char));
    }
    Ok(v)
}

/// Non-negative integer argument.
pub fn parse_index(s: &str, base: usize) -> Result<usize, ParseError> {
    let t = s.trim();
    let off = base + (s.len() - s.trim_start().len());
    t.parse().or_else(|_| err(off, format!("expected a non-negative integer, got '{}'", t)))
}

/// One for the constant polynomial `1`.
pub fn is_one(f: &PhasePoly) -> bool {
    constant_of(f).is_some_and(|c| c.re.is_one() && c.im.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_calls() {
        let c = parse_call("star(q, p)").unwrap();
        assert_eq!(c.name, "star");
        assert_eq!(c.args, vec![("q".to_string(), 5), (" p".to_string(), 7)]);
        let c = parse_call("symbol((q+p)^2)").unwrap();
        assert_eq!(c.args.len(), 1);
        assert!(parse_call("star(q, p").is_err());
        assert!(parse_call("star q").is_err());
    }

    #[test]
    fn parses_polynomials() {
        let f = parse_poly("q^2*p - 3/2 + i*p", 0).unwrap();
        let want = PhasePoly::qp(2, 1, CRat::one()).add(&PhasePoly::constant(1, CRat::frac(-3, 2))).add(&PhasePoly::qp(0, 1, CRat::i()));
        assert_eq!(f, want);
        assert!(is_one(&parse_poly("(1)", 0).unwrap()));
    }

    #[test]
    fn reports_positions() {
        let e = parse_poly("q + x", 10).unwrap_err();
        assert_eq!(e.pos, 14);
        assert!(e.msg.contains("undefined symbol"));
        assert_eq!(parse_poly("q / p", 0).unwrap_err().pos, 3);
        assert_eq!(parse_poly("q p", 0).unwrap_err().pos, 2);
    }
}
