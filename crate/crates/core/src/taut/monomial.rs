use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use super::generator::{Generator, RingContext};
use super::markset::MarkSet;
use crate::error::Result;

/// A product of generators with positive exponents. The empty product is the unit.
///
/// Monomials are ordered by degree first, then lexicographically on the
/// `(generator, exponent)` sequence.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    factors: BTreeMap<Generator, u32>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn generator(g: Generator) -> Self {
        Monomial::power(g, 1)
    }

    pub fn power(g: Generator, e: u32) -> Self {
        let mut m = Monomial::one();
        m.mul_generator(g, e);
        m
    }

    pub fn from_factors<I: IntoIterator<Item = (Generator, u32)>>(it: I) -> Self {
        let mut m = Monomial::one();
        for (g, e) in it {
            m.mul_generator(g, e);
        }
        m
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn factors(&self) -> impl Iterator<Item = (Generator, u32)> + '_ {
        self.factors.iter().map(|(g, e)| (*g, *e))
    }

    pub fn exponent(&self, g: &Generator) -> u32 {
        self.factors.get(g).copied().unwrap_or(0)
    }

    pub fn degree(&self) -> u32 {
        self.factors.iter().map(|(g, e)| g.degree() * e).sum()
    }

    pub fn mul_generator(&mut self, g: Generator, e: u32) {
        if e > 0 {
            *self.factors.entry(g).or_insert(0) += e;
        }
    }

    /// Lowers the exponent of `g` by `e`. Panics if the exponent is too small.
    pub fn div_generator(&mut self, g: &Generator, e: u32) {
        if e == 0 {
            return;
        }
        let cur = self.factors.get_mut(g).expect("dividing by absent generator");
        assert!(*cur >= e, "dividing {g} beyond its exponent");
        *cur -= e;
        if *cur == 0 {
            self.factors.remove(g);
        }
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = self.clone();
        for (g, e) in other.factors() {
            out.mul_generator(g, e);
        }
        out
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.factors.iter().all(|(g, e)| other.exponent(g) >= *e)
    }

    /// `other / self`, if `self` divides `other`.
    pub fn quotient_of(&self, other: &Monomial) -> Option<Monomial> {
        if !self.divides(other) {
            return None;
        }
        let mut out = other.clone();
        for (g, e) in self.factors() {
            out.div_generator(&g, e);
        }
        Some(out)
    }

    /// The factor built from kappa, point and diagonal classes.
    pub fn a_part(&self) -> Monomial {
        Monomial { factors: self.factors.iter().filter(|(g, _)| !g.is_exceptional()).map(|(g, e)| (*g, *e)).collect() }
    }

    /// The product of exceptional divisors.
    pub fn d_part(&self) -> Monomial {
        Monomial { factors: self.factors.iter().filter(|(g, _)| g.is_exceptional()).map(|(g, e)| (*g, *e)).collect() }
    }

    /// `(a(v), D(v))`.
    pub fn split(&self) -> (Monomial, Monomial) {
        (self.a_part(), self.d_part())
    }

    pub fn has_exceptional(&self) -> bool {
        self.factors.keys().any(Generator::is_exceptional)
    }

    /// Exceptional vertex sets with exponents, in canonical set order.
    pub fn exceptional_factors(&self) -> Vec<(MarkSet, u32)> {
        self.factors
            .iter()
            .filter_map(|(g, e)| match g {
                Generator::Exc(s) => Some((*s, *e)),
                _ => None,
            })
            .collect()
    }

    /// Markings referenced by the a-part.
    pub fn a_support(&self) -> MarkSet {
        self.factors
            .keys()
            .filter(|g| !g.is_exceptional())
            .fold(MarkSet::EMPTY, |acc, g| acc.union(g.support()))
    }

    pub fn permute(&self, perm: &[u32]) -> Monomial {
        Monomial::from_factors(self.factors().map(|(g, e)| (g.permute(perm), e)))
    }

    pub fn check(&self, ctx: &RingContext) -> Result<()> {
        for g in self.factors.keys() {
            g.check(ctx)?;
        }
        Ok(())
    }

    /// Largest kappa index present.
    pub fn max_kappa(&self) -> Option<u32> {
        self.factors
            .keys()
            .filter_map(|g| match g {
                Generator::Kappa(i) => Some(*i),
                _ => None,
            })
            .max()
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.factors.cmp(&other.factors))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return f.write_str("1");
        }
        for (idx, (g, e)) in self.factors.iter().enumerate() {
            if idx > 0 {
                f.write_str("*")?;
            }
            if *e == 1 {
                write!(f, "{g}")?;
            } else {
                write!(f, "{g}^{e}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
