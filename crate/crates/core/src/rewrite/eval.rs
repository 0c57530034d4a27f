//! Top-degree evaluation against the socle generator `κ_{g-2} ∏ K_i`.
//!
//! A class on `C_g^n` is pushed down to `M_g` one marking at a time. Forgetting
//! marking `j`:
//!
//! * on the diagonal `Δ_{i,j}` every class involving `j` restricts to the same
//!   class with `j` replaced by `i`, so `d_{i,j}^2 = -K_i d_{i,j}`,
//!   `K_j d_{i,j} = K_i d_{i,j}` and `d_{k,j} d_{i,j} = d_{k,i} d_{i,j}`; the
//!   projection restricted to `Δ_{i,j}` is an isomorphism, so `d_{i,j}` pushes
//!   forward to `1`;
//! * without a diagonal through `j`, `π_*(K_j^a) = κ_{a-1}`, with `κ_0 = 2g-2`
//!   and `π_*(1) = 0`.
//!
//! What remains is a κ monomial of degree `g-2`, read off from the κ table.

use std::collections::BTreeMap;

use num_traits::Zero;

use super::kappa::KappaTable;
use super::normalize::{Normalizer, NormalizerConfig};
use crate::error::{Error, Result};
use crate::taut::{rat, Generator, Monomial, Polynomial, Rational, RingContext};

pub struct Evaluator {
    ctx: RingContext,
    kappa: KappaTable,
    normalizer: Normalizer,
    generator_raw: Rational,
}

impl Evaluator {
    pub fn new(ctx: RingContext, kappa: KappaTable) -> Result<Self> {
        Self::with_config(ctx, kappa, NormalizerConfig::default())
    }

    pub fn with_config(ctx: RingContext, kappa: KappaTable, config: NormalizerConfig) -> Result<Self> {
        if kappa.genus() != ctx.g() {
            return Err(Error::KappaTable(format!(
                "table is for genus {}, context has genus {}",
                kappa.genus(),
                ctx.g()
            )));
        }
        let mut ev = Evaluator {
            normalizer: Normalizer::with_config(ctx, config),
            ctx,
            kappa,
            generator_raw: Rational::zero(),
        };
        let order: Vec<u32> = (1..=ev.ctx.n()).rev().collect();
        ev.generator_raw = ev.raw_contract(&socle_generator_a(&ev.ctx), &order)? * generator_scalar(&ev.ctx);
        Ok(ev)
    }

    /// Evaluator with the built-in κ table (genus 2 and 3).
    pub fn builtin(ctx: RingContext) -> Result<Self> {
        let table = KappaTable::resolve(ctx.g(), None)?;
        Self::new(ctx, table)
    }

    pub fn context(&self) -> &RingContext {
        &self.ctx
    }

    pub fn kappa_table(&self) -> &KappaTable {
        &self.kappa
    }

    pub fn normalizer(&self) -> &Normalizer {
        &self.normalizer
    }

    /// Unnormalized pushforward of an exceptional-free monomial, contracting the
    /// markings in `order` (which must list every marking once).
    pub fn raw_contract(&self, m: &Monomial, order: &[u32]) -> Result<Rational> {
        if m.has_exceptional() {
            return Err(Error::ResidualExceptional(m.clone()));
        }
        let g = self.ctx.g();
        let mut scalar = rat(1);
        let mut kappas: Vec<u32> = Vec::new();
        let mut points: BTreeMap<u32, u32> = BTreeMap::new();
        let mut diags: BTreeMap<(u32, u32), u32> = BTreeMap::new();
        for (gen, e) in m.factors() {
            match gen {
                Generator::Kappa(i) => kappas.extend(std::iter::repeat_n(i, e as usize)),
                Generator::PointK(i) => {
                    points.insert(i, e);
                }
                Generator::Diag(i, j) => {
                    diags.insert((i, j), e);
                }
                Generator::Exc(_) => unreachable!(),
            }
        }
        if kappas.iter().any(|&i| i > g - 2) {
            return Ok(Rational::zero());
        }
        for &j in order {
            let partners: Vec<u32> = diags
                .keys()
                .filter_map(|&(a, b)| if a == j { Some(b) } else if b == j { Some(a) } else { None })
                .collect();
            let a = points.remove(&j).unwrap_or(0);
            if let Some(&i0) = partners.iter().min() {
                let key = |x: u32, y: u32| (x.min(y), x.max(y));
                let e0 = diags.remove(&key(i0, j)).unwrap();
                // d^e = (-K)^{e-1} d on the diagonal
                if (e0 - 1) % 2 == 1 {
                    scalar = -scalar;
                }
                *points.entry(i0).or_insert(0) += (e0 - 1) + a;
                for &i in partners.iter().filter(|&&i| i != i0) {
                    let e = diags.remove(&key(i, j)).unwrap();
                    *diags.entry(key(i0, i)).or_insert(0) += e;
                }
            } else {
                match a {
                    0 => return Ok(Rational::zero()),
                    1 => scalar *= rat(2 * g as i64 - 2),
                    _ if a - 1 > g - 2 => return Ok(Rational::zero()),
                    _ => kappas.push(a - 1),
                }
            }
        }
        if !points.is_empty() || !diags.is_empty() {
            return Err(Error::InvalidGenerator(format!(
                "contraction order {order:?} does not cover the markings of {m}"
            )));
        }
        if kappas.iter().sum::<u32>() != g - 2 {
            return Ok(Rational::zero());
        }
        Ok(scalar * self.kappa.value(&kappas)?)
    }

    /// `eval_C`: exceptional-free monomial of degree `g-2+n`, normalized so the
    /// socle generator is `1`. Markings are contracted in descending order.
    pub fn eval_c(&self, m: &Monomial) -> Result<Rational> {
        let order: Vec<u32> = (1..=self.ctx.n()).rev().collect();
        self.eval_c_in_order(m, &order)
    }

    pub fn eval_c_in_order(&self, m: &Monomial, order: &[u32]) -> Result<Rational> {
        let top = self.ctx.top_degree();
        if m.degree() != top {
            return Err(Error::WrongDegree { expected: top, found: m.degree() });
        }
        m.check(&self.ctx)?;
        Ok(self.raw_contract(m, order)? / &self.generator_raw)
    }

    /// `eval_M`: normalize, then evaluate every (necessarily exceptional-free) term.
    pub fn eval_m(&self, p: &Polynomial) -> Result<Rational> {
        let top = self.ctx.top_degree();
        if p.is_zero() {
            return Ok(Rational::zero());
        }
        match p.homogeneous_degree() {
            Some(d) if d == top => {}
            _ => {
                let found = p.terms().map(|(m, _)| m.degree()).find(|&d| d != top).unwrap_or(top);
                return Err(Error::WrongDegree { expected: top, found });
            }
        }
        p.check(&self.ctx)?;
        let normal = self.normalizer.normalize(p)?;
        let mut total = Rational::zero();
        for (m, c) in normal.terms() {
            if m.has_exceptional() {
                return Err(Error::ResidualExceptional(m.clone()));
            }
            total += c * self.eval_c(m)?;
        }
        Ok(total)
    }

    pub fn eval_monomial(&self, m: &Monomial) -> Result<Rational> {
        self.eval_m(&Polynomial::from_monomial(m.clone()))
    }
}

/// The socle generator `κ_{g-2} ∏ K_i`; in genus 2 this is `2 ∏ K_i`.
pub fn socle_generator(ctx: &RingContext) -> Polynomial {
    Polynomial::term(generator_scalar(ctx), socle_generator_a(ctx))
}

fn socle_generator_a(ctx: &RingContext) -> Monomial {
    let mut m = Monomial::from_factors((1..=ctx.n()).map(|i| (Generator::PointK(i), 1)));
    if ctx.g() > 2 {
        m.mul_generator(Generator::Kappa(ctx.g() - 2), 1);
    }
    m
}

fn generator_scalar(ctx: &RingContext) -> Rational {
    if ctx.g() == 2 {
        rat(2)
    } else {
        rat(1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::taut::{parse_monomial, parse_polynomial, ratio};

    fn ev(g: u32, n: u32) -> Evaluator {
        Evaluator::builtin(RingContext::new(g, n).unwrap()).unwrap()
    }

    fn c(e: &Evaluator, s: &str) -> Rational {
        e.eval_c(&parse_monomial(e.context(), s).unwrap()).unwrap()
    }

    #[test]
    fn genus_two_two_points() {
        let e = ev(2, 2);
        assert_eq!(c(&e, "K1*K2"), ratio(1, 2));
        assert_eq!(c(&e, "K1^2"), rat(0));
        assert_eq!(c(&e, "K1*d(1,2)"), ratio(1, 4));
        assert_eq!(c(&e, "d(1,2)^2"), ratio(-1, 4));
        assert_eq!(e.generator_raw, rat(8));
    }

    #[test]
    fn generator_evaluates_to_one() {
        for (g, n) in [(2, 1), (2, 3), (3, 1), (3, 4)] {
            let e = ev(g, n);
            assert_eq!(e.eval_m(&socle_generator(e.context())).unwrap(), rat(1), "g={g} n={n}");
        }
    }

    #[test]
    fn exceptional_square_on_three_points() {
        let e = ev(2, 3);
        let lhs = e.eval_m(&parse_polynomial(e.context(), "K1*D(1,2,3)^2").unwrap()).unwrap();
        assert_eq!(lhs, -c(&e, "K1*d(1,2)*d(1,3)"));
        assert_eq!(lhs, ratio(-1, 8));
    }

    #[test]
    fn overlapping_product_is_zero() {
        let e = ev(2, 4);
        let p = parse_polynomial(e.context(), "K1*K4*D(1,2,3)*D(2,3,4)").unwrap();
        assert_eq!(e.eval_m(&p).unwrap(), rat(0));
    }

    #[test]
    fn rejects_wrong_degree_and_exceptional_input() {
        let e = ev(2, 2);
        let m = parse_monomial(e.context(), "K1").unwrap();
        assert!(matches!(e.eval_c(&m), Err(Error::WrongDegree { expected: 2, found: 1 })));
        let e = ev(2, 3);
        let m = parse_monomial(e.context(), "K1*D(1,2,3)^2").unwrap();
        assert!(matches!(e.eval_c(&m), Err(Error::ResidualExceptional(_))));
    }

    #[test]
    fn genus_four_uses_the_table() {
        let ctx = RingContext::new(4, 1).unwrap();
        let table = KappaTable::parse(4, "2=1\n1,1=32/3\n").unwrap();
        let e = Evaluator::new(ctx, table).unwrap();
        assert_eq!(c(&e, "k1^2*K1"), ratio(32, 3));
        assert_eq!(c(&e, "k2*K1"), rat(1));
        assert_eq!(c(&e, "k1*K1^2"), ratio(16, 9));
    }
}
