//! Text exchange format.
//!
//! Monomials are generators joined by `*` with optional `^e` exponents:
//! `k2*K1^3*d(1,2)*D(1,2,3)^2`. Polynomials are signed sums of terms `c m`
//! where `c` is an integer or `p/q`; either part of a term may be omitted.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::generator::{Generator, RingContext};
use super::markset::MarkSet;
use super::monomial::Monomial;
use super::polynomial::Polynomial;
use super::Rational;
use crate::error::{Error, Result};

struct Cursor<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(s: &'a str) -> Self {
        Cursor { src: s.as_bytes(), pos: 0 }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { pos: self.pos, msg: msg.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, b: u8) -> Result<()> {
        if self.eat(b) {
            Ok(())
        } else {
            self.err(format!("expected '{}'", b as char))
        }
    }

    fn digits(&mut self) -> Result<&'a str> {
        let start = self.pos;
        while self.peek().is_some_and(|b| b.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected digits");
        }
        Ok(std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits"))
    }

    fn small(&mut self) -> Result<u32> {
        let at = self.pos;
        self.digits()?
            .parse::<u32>()
            .map_err(|e| Error::Parse { pos: at, msg: e.to_string() })
    }

    fn big(&mut self) -> Result<BigInt> {
        let at = self.pos;
        self.digits()?
            .parse::<BigInt>()
            .map_err(|e| Error::Parse { pos: at, msg: e.to_string() })
    }

    fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }
}

fn parse_generator(cur: &mut Cursor<'_>) -> Result<Generator> {
    match cur.peek() {
        Some(b'k') => {
            cur.pos += 1;
            let i = cur.small()?;
            if i == 0 {
                return cur.err("kappa index must be positive; k0 is the scalar 2g-2");
            }
            Ok(Generator::Kappa(i))
        }
        Some(b'K') => {
            cur.pos += 1;
            Ok(Generator::PointK(cur.small()?))
        }
        Some(b'd') => {
            cur.pos += 1;
            cur.expect(b'(')?;
            let i = cur.small()?;
            cur.expect(b',')?;
            let j = cur.small()?;
            cur.expect(b')')?;
            Generator::diag(i, j).map_err(|e| Error::Parse { pos: cur.pos, msg: e.to_string() })
        }
        Some(b'D') => {
            cur.pos += 1;
            cur.expect(b'(')?;
            let mut set = MarkSet::EMPTY;
            loop {
                let i = cur.small()?;
                if i == 0 || i > super::markset::MAX_MARKINGS {
                    return cur.err(format!("marking {i} out of range"));
                }
                if set.contains(i) {
                    return cur.err(format!("repeated marking {i}"));
                }
                set.insert(i);
                if !cur.eat(b',') {
                    break;
                }
            }
            cur.expect(b')')?;
            Generator::exc(set).map_err(|e| Error::Parse { pos: cur.pos, msg: e.to_string() })
        }
        _ => cur.err("expected a generator (kN, KN, d(i,j) or D(i,j,...))"),
    }
}

fn parse_monomial_at(cur: &mut Cursor<'_>) -> Result<Monomial> {
    let mut m = Monomial::one();
    loop {
        cur.skip_ws();
        if cur.eat(b'1') {
            // explicit unit factor
        } else {
            let g = parse_generator(cur)?;
            let mut e = 1;
            cur.skip_ws();
            if cur.eat(b'^') {
                cur.skip_ws();
                e = cur.small()?;
            }
            m.mul_generator(g, e);
        }
        cur.skip_ws();
        if !cur.eat(b'*') {
            break;
        }
    }
    Ok(m)
}

/// Parses a single monomial and validates it against `ctx`.
pub fn parse_monomial(ctx: &RingContext, s: &str) -> Result<Monomial> {
    let mut cur = Cursor::new(s);
    let m = parse_monomial_at(&mut cur)?;
    cur.skip_ws();
    if !cur.at_end() {
        return cur.err("trailing input");
    }
    m.check(ctx)?;
    Ok(m)
}

/// Parses a polynomial and validates it against `ctx`.
pub fn parse_polynomial(ctx: &RingContext, s: &str) -> Result<Polynomial> {
    let mut cur = Cursor::new(s);
    let mut out = Polynomial::zero();
    let mut first = true;
    loop {
        cur.skip_ws();
        if cur.at_end() {
            if first {
                return cur.err("empty polynomial");
            }
            break;
        }
        let mut negative = false;
        if !first {
            if cur.eat(b'+') {
            } else if cur.eat(b'-') {
                negative = true;
            } else {
                return cur.err("expected '+' or '-'");
            }
        }
        loop {
            cur.skip_ws();
            if cur.eat(b'-') {
                negative = !negative;
            } else if !cur.eat(b'+') {
                break;
            }
        }
        let (coef, monomial) = parse_term(&mut cur)?;
        let coef = if negative { -coef } else { coef };
        out.add_term(monomial, coef);
        first = false;
    }
    out.check(ctx)?;
    Ok(out)
}

fn parse_term(cur: &mut Cursor<'_>) -> Result<(Rational, Monomial)> {
    cur.skip_ws();
    let mut coef = Rational::one();
    let mut have_coef = false;
    if cur.peek().is_some_and(|b| b.is_ascii_digit()) {
        let num = cur.big()?;
        let mut den = BigInt::one();
        if cur.eat(b'/') {
            den = cur.big()?;
            if den.is_zero() {
                return cur.err("zero denominator");
            }
        }
        coef = Rational::new(num, den);
        have_coef = true;
        cur.skip_ws();
        cur.eat(b'*');
        cur.skip_ws();
    }
    let starts_monomial = matches!(cur.peek(), Some(b'k' | b'K' | b'd' | b'D'));
    if starts_monomial {
        return Ok((coef, parse_monomial_at(cur)?));
    }
    if !have_coef {
        return cur.err("expected a coefficient or monomial");
    }
    Ok((coef, Monomial::one()))
}
