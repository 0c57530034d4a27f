use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use super::generator::{Generator, RingContext};
use super::monomial::Monomial;
use super::Rational;
use crate::error::Result;

/// Exact-rational linear combination of monomials, kept canonical
/// (no zero coefficients, terms sorted by the monomial order).
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, Rational>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial::default()
    }

    pub fn one() -> Self {
        Polynomial::from_monomial(Monomial::one())
    }

    pub fn constant(c: Rational) -> Self {
        Polynomial::term(c, Monomial::one())
    }

    pub fn from_monomial(m: Monomial) -> Self {
        Polynomial::term(Rational::one(), m)
    }

    pub fn generator(g: Generator) -> Self {
        Polynomial::from_monomial(Monomial::generator(g))
    }

    pub fn term(c: Rational, m: Monomial) -> Self {
        let mut p = Polynomial::zero();
        p.add_term(m, c);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> impl Iterator<Item = (Monomial, Rational)> {
        self.terms.into_iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &Polynomial, c: &Rational) {
        if c.is_zero() {
            return;
        }
        for (m, x) in other.terms() {
            self.add_term(m.clone(), x * c);
        }
    }

    pub fn scale(&self, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero();
        }
        Polynomial { terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect() }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Polynomial {
        Polynomial { terms: self.terms.iter().map(|(t, x)| (t.mul(m), x.clone())).collect() }
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut out = Polynomial::one();
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    /// Degrees of the terms, if they all agree.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut it = self.terms.keys().map(Monomial::degree);
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    pub fn relabel(&self, perm: &[u32]) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in self.terms() {
            out.add_term(m.permute(perm), c.clone());
        }
        out
    }

    /// Drops every term containing `κ_i` with `i > g - 2`.
    pub fn kappa_truncate(&self, ctx: &RingContext) -> Polynomial {
        Polynomial {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.max_kappa().is_none_or(|i| i <= ctx.max_kappa()))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn check(&self, ctx: &RingContext) -> Result<()> {
        for m in self.terms.keys() {
            m.check(ctx)?;
        }
        Ok(())
    }
}

impl FromIterator<(Monomial, Rational)> for Polynomial {
    fn from_iter<T: IntoIterator<Item = (Monomial, Rational)>>(iter: T) -> Self {
        let mut p = Polynomial::zero();
        for (m, c) in iter {
            p.add_term(m, c);
        }
        p
    }
}

impl Add<&Polynomial> for &Polynomial {
    type Output = Polynomial;

    fn add(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        out.add_scaled(rhs, &Rational::one());
        out
    }
}

impl Sub<&Polynomial> for &Polynomial {
    type Output = Polynomial;

    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        out.add_scaled(rhs, &-Rational::one());
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;

    fn neg(self) -> Polynomial {
        self.scale(&-Rational::one())
    }
}

impl Mul<&Polynomial> for &Polynomial {
    type Output = Polynomial;

    fn mul(self, rhs: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (a, x) in self.terms() {
            for (b, y) in rhs.terms() {
                out.add_term(a.mul(b), x * y);
            }
        }
        out
    }
}

impl Add for Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: Polynomial) -> Polynomial {
        &self + &rhs
    }
}

impl Sub for Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: Polynomial) -> Polynomial {
        &self - &rhs
    }
}

impl Mul for Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: Polynomial) -> Polynomial {
        &self * &rhs
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}

pub(crate) fn fmt_rational(c: &Rational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (idx, (m, c)) in self.terms.iter().enumerate() {
            if idx > 0 {
                f.write_str(" + ")?;
            }
            if m.is_one() {
                f.write_str(&fmt_rational(c))?;
            } else if c.is_one() {
                write!(f, "{m}")?;
            } else if c.is_negative() && (-c).is_one() {
                write!(f, "-{m}")?;
            } else {
                write!(f, "{} {m}", fmt_rational(c))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
