//! Reduction of tautological polynomials to combinations of standard monomials.
//!
//! Each monomial is rewritten by exactly one relation instance at a time; the
//! first applicable rule wins:
//!
//! 1. `κ_i` with `i > g-2` vanishes.
//! 2. Overlapping, non-nested exceptional sets vanish.
//! 3. Point and diagonal classes touching a root `J` migrate to `min J`.
//! 4. An a-part above the socle degree of `C_g^S` vanishes.
//! 5. Over-bound vertex exponents are lowered, deepest vertex first, then the
//!    largest exponent.
//! 6. Diagonal clusters are brought to star form centred at their minimum.
//!
//! A monomial to which no rule applies is standard (in complement mode).

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_traits::One;
use parking_lot::RwLock;

use super::relations::{self, sign, RelationInstance};
use crate::error::{Error, Result};
use crate::forest::{marking_set_s, ExceptionalForest, ForestOutcome, SetSMode};
use crate::taut::{format_rational, rat, Generator, MarkSet, Monomial, Polynomial, Rational, RingContext};

pub const DEFAULT_MAX_STEPS: u64 = 1_000_000;

/// Which effective point of a vertex serves as the pivot of its product relation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum PivotRule {
    #[default]
    Min,
    Max,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct NormalizerConfig {
    pub max_steps: u64,
    pub pivot: PivotRule,
}

impl Default for NormalizerConfig {
    fn default() -> Self {
        NormalizerConfig { max_steps: DEFAULT_MAX_STEPS, pivot: PivotRule::Min }
    }
}

/// One relation used in a rewrite: contributes `multiplier · instance.polynomial`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationUse {
    pub instance: RelationInstance,
    pub multiplier: Polynomial,
}

/// A single rewrite `m = result + Σ multiplier · relation`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub uses: Vec<RelationUse>,
    pub result: Polynomial,
}

impl Step {
    fn build(m: &Monomial, uses: Vec<(RelationInstance, Monomial, Rational)>) -> Step {
        let mut result = Polynomial::from_monomial(m.clone());
        let uses: Vec<RelationUse> = uses
            .into_iter()
            .map(|(instance, mult, c)| {
                let multiplier = Polynomial::term(c, mult);
                result = &result - &(&multiplier * &instance.polynomial);
                RelationUse { instance, multiplier }
            })
            .collect();
        debug_assert!(result.coefficient(m) != Rational::one(), "rewrite of {m} did not remove it");
        Step { uses, result }
    }
}

/// A rewrite applied during certified normalization, scaled by the coefficient
/// the monomial had at that point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertifiedStep {
    pub monomial: Monomial,
    pub coefficient: Rational,
    pub uses: Vec<RelationUse>,
}

/// Record of a normalization: `input - output = Σ multiplier · relation` over all steps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub input: Polynomial,
    pub output: Polynomial,
    pub steps: Vec<CertifiedStep>,
}

impl Certificate {
    /// The ideal element `Σ multiplier · relation` reconstructed from the steps.
    pub fn ideal_element(&self) -> Polynomial {
        let mut total = Polynomial::zero();
        for step in &self.steps {
            for u in &step.uses {
                total = &total + &(&u.multiplier * &u.instance.polynomial);
            }
        }
        total
    }

    /// Re-expands every recorded relation and checks `input - output` exactly.
    pub fn replay(&self) -> bool {
        self.ideal_element() == &self.input - &self.output
    }

    /// One line per rewrite step.
    pub fn to_lines(&self) -> Vec<String> {
        self.steps
            .iter()
            .enumerate()
            .map(|(idx, s)| {
                let uses: Vec<String> = s
                    .uses
                    .iter()
                    .map(|u| format!("({}) * [{}]", u.multiplier, u.instance))
                    .collect();
                format!("{idx}\t{} {}\t{}", format_rational(&s.coefficient), s.monomial, uses.join(" ; "))
            })
            .collect()
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# input: {}", self.input)?;
        writeln!(f, "# output: {}", self.output)?;
        for line in self.to_lines() {
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

/// Rewrites polynomials to standard form, memoizing normal forms of monomials.
///
/// The memo is shared between threads; a `Normalizer` can be used from a rayon pool.
pub struct Normalizer {
    ctx: RingContext,
    config: NormalizerConfig,
    memo: RwLock<HashMap<Monomial, Arc<Polynomial>>>,
}

impl Normalizer {
    pub fn new(ctx: RingContext) -> Self {
        Self::with_config(ctx, NormalizerConfig::default())
    }

    pub fn with_config(ctx: RingContext, config: NormalizerConfig) -> Self {
        Normalizer { ctx, config, memo: RwLock::new(HashMap::new()) }
    }

    pub fn context(&self) -> &RingContext {
        &self.ctx
    }

    pub fn config(&self) -> &NormalizerConfig {
        &self.config
    }

    /// Number of monomials whose normal form is cached.
    pub fn memo_len(&self) -> usize {
        self.memo.read().len()
    }

    /// The first applicable rewrite of `m`, or `None` when `m` is standard.
    pub fn rewrite_step(&self, m: &Monomial) -> Option<Step> {
        let ctx = &self.ctx;
        if let Some(i) = m.max_kappa().filter(|&i| i > ctx.max_kappa()) {
            let class = Monomial::generator(Generator::Kappa(i));
            let rel = relations::v1(ctx, class.clone(), MarkSet::EMPTY).expect("kappa above g-2");
            return Some(Step::build(m, vec![(rel, class.quotient_of(m).unwrap(), rat(1))]));
        }
        let forest = match ExceptionalForest::build(m) {
            ForestOutcome::Forest(f) => f,
            ForestOutcome::ZeroClass => return Some(self.overlap_step(m)),
        };
        if let Some(step) = self.migration_step(m, &forest) {
            return Some(step);
        }
        let a = m.a_part();
        let s = marking_set_s(&forest, ctx.n(), SetSMode::Complement);
        if a.degree() > ctx.max_kappa() + s.len() {
            let rel = relations::v1(ctx, a.clone(), s).expect("a-part supported on S");
            return Some(Step::build(m, vec![(rel, m.d_part(), rat(1))]));
        }
        if let Some(step) = self.exponent_step(m, &forest) {
            return Some(step);
        }
        self.diagonal_step(m, &a)
    }

    fn overlap_step(&self, m: &Monomial) -> Step {
        let sets = m.exceptional_factors();
        for (idx, (i, _)) in sets.iter().enumerate() {
            for (j, _) in &sets[idx + 1..] {
                if !i.compatible(*j) {
                    let rel = relations::v0(*i, *j);
                    let used = Monomial::from_factors([(Generator::Exc(*i), 1), (Generator::Exc(*j), 1)]);
                    return Step::build(m, vec![(rel, used.quotient_of(m).unwrap(), rat(1))]);
                }
            }
        }
        unreachable!("forest reported an overlap that is not there")
    }

    fn migration_step(&self, m: &Monomial, forest: &ExceptionalForest) -> Option<Step> {
        let ctx = &self.ctx;
        let root_of = |i: u32| {
            forest.root_containing(i).map(|r| {
                let set = forest.vertices()[r].set;
                (set, set.min().unwrap())
            })
        };
        let divide = |gens: &[Generator]| {
            let used = Monomial::from_factors(gens.iter().map(|g| (*g, 1)));
            used.quotient_of(m).expect("factors present in monomial")
        };
        for (g, _) in m.factors() {
            match g {
                Generator::PointK(i) => {
                    let Some((set, alpha)) = root_of(i) else { continue };
                    if alpha == i {
                        continue;
                    }
                    // K_i D = K_α D + (R1a(α,i) - R1a(i,α))
                    let mult = divide(&[g, Generator::Exc(set)]);
                    let fwd = relations::r1a(ctx, set, alpha, i).unwrap();
                    let back = relations::r1a(ctx, set, i, alpha).unwrap();
                    return Some(Step::build(m, vec![(fwd, mult.clone(), rat(1)), (back, mult, rat(-1))]));
                }
                Generator::Diag(i, j) => {
                    let ri = root_of(i);
                    let rj = root_of(j);
                    match (ri, rj) {
                        (Some((set, _)), Some((other, _))) if set == other => {
                            let mult = divide(&[g, Generator::Exc(set)]);
                            let rel = relations::r1a(ctx, set, i, j).unwrap();
                            return Some(Step::build(m, vec![(rel, mult, rat(1))]));
                        }
                        _ => {}
                    }
                    if let Some((set, alpha)) = ri.filter(|&(_, a)| a != i) {
                        let mult = divide(&[g, Generator::Exc(set)]);
                        let rel = relations::r1b(ctx, set, i, alpha, j).unwrap();
                        return Some(Step::build(m, vec![(rel, mult, rat(1))]));
                    }
                    if let Some((set, alpha)) = rj.filter(|&(_, a)| a != j) {
                        let mult = divide(&[g, Generator::Exc(set)]);
                        let rel = relations::r1b(ctx, set, j, alpha, i).unwrap();
                        return Some(Step::build(m, vec![(rel, mult, rat(1))]));
                    }
                }
                _ => {}
            }
        }
        None
    }

    fn exponent_step(&self, m: &Monomial, forest: &ExceptionalForest) -> Option<Step> {
        let verts = forest.vertices();
        let v = (0..forest.len())
            .filter(|&v| verts[v].exponent as i64 > forest.exponent_bound(v))
            .max_by_key(|&v| (forest.depth(v), verts[v].exponent, std::cmp::Reverse(v)))?;
        let set = verts[v].set;
        let children: Vec<MarkSet> = forest.children(v).iter().map(|&c| verts[c].set).collect();
        let free = set.difference(forest.children_union(v));
        let pool = if free.is_empty() { set } else { free };
        let pivot = match self.config.pivot {
            PivotRule::Min => pool.min().unwrap(),
            PivotRule::Max => pool.iter().last().unwrap(),
        };
        let b = forest.effective_points(v);
        let rel = relations::vertex_relation(&self.ctx, set, &children, pivot).expect("forest vertex is valid");
        let mut target = Monomial::power(Generator::Exc(set), b - 1);
        for c in &children {
            target.mul_generator(Generator::Exc(*c), 1);
        }
        let mult = target.quotient_of(m).expect("exponent exceeds bound");
        Some(Step::build(m, vec![(rel, mult, sign(b - 1))]))
    }

    fn diagonal_step(&self, m: &Monomial, a: &Monomial) -> Option<Step> {
        let diags: Vec<(u32, u32, u32)> = a
            .factors()
            .filter_map(|(g, e)| match g {
                Generator::Diag(i, j) => Some((i, j, e)),
                _ => None,
            })
            .collect();
        let d = |i: u32, j: u32| Generator::Diag(i, j);
        let divide = |used: Monomial| used.quotient_of(m).expect("factors present in monomial");
        if let Some(&(i, j, _)) = diags.iter().find(|x| x.2 >= 2) {
            let mult = divide(Monomial::power(d(i, j), 2));
            return Some(Step::build(m, vec![(relations::diag_self(i, j), mult, rat(1))]));
        }
        for (x, &(p1, q1, _)) in diags.iter().enumerate() {
            for &(p2, q2, _) in &diags[x + 1..] {
                let mut pts = [p1, q1, p2, q2];
                pts.sort_unstable();
                let shared = pts.windows(2).filter(|w| w[0] == w[1]).count();
                if shared != 1 {
                    continue;
                }
                let lo = pts[0];
                if p1 == lo && p2 == lo {
                    continue;
                }
                let mult = divide(Monomial::from_factors([(d(p1, q1), 1), (d(p2, q2), 1)]));
                let rel = relations::diag_transport((p1, q1), (p2, q2));
                return Some(Step::build(m, vec![(rel, mult, rat(1))]));
            }
        }
        for &(i, j, _) in &diags {
            if a.exponent(&Generator::PointK(j)) > 0 {
                let mult = divide(Monomial::from_factors([(Generator::PointK(j), 1), (d(i, j), 1)]));
                return Some(Step::build(m, vec![(relations::diag_point(i, j), mult, rat(1))]));
            }
        }
        None
    }

    /// Normal form of a single monomial, memoized.
    pub fn normal_form(&self, m: &Monomial) -> Result<Arc<Polynomial>> {
        let mut steps = 0;
        self.normal_form_counted(m, &mut steps)
    }

    fn normal_form_counted(&self, m: &Monomial, steps: &mut u64) -> Result<Arc<Polynomial>> {
        if let Some(p) = self.memo.read().get(m) {
            return Ok(p.clone());
        }
        let budget = self.config.max_steps;
        let exhausted = || Error::NonTermination { budget, monomial: m.clone() };
        // monomials whose rewrite is known but whose terms are not all resolved yet
        let mut pending: HashMap<Monomial, Polynomial> = HashMap::new();
        let mut stack = vec![m.clone()];
        while let Some(top) = stack.last().cloned() {
            if self.memo.read().contains_key(&top) {
                stack.pop();
                continue;
            }
            if !pending.contains_key(&top) {
                *steps += 1;
                if *steps > budget {
                    return Err(exhausted());
                }
                match self.rewrite_step(&top) {
                    None => {
                        let nf = Arc::new(Polynomial::from_monomial(top.clone()));
                        self.memo.write().insert(top, nf);
                        stack.pop();
                        continue;
                    }
                    Some(step) => {
                        pending.insert(top.clone(), step.result);
                    }
                }
            }
            let result = &pending[&top];
            let missing: Vec<Monomial> = {
                let memo = self.memo.read();
                result.terms().map(|(t, _)| t).filter(|t| !memo.contains_key(*t)).cloned().collect()
            };
            if missing.is_empty() {
                let result = pending.remove(&top).unwrap();
                let mut nf = Polynomial::zero();
                {
                    let memo = self.memo.read();
                    for (t, c) in result.terms() {
                        nf.add_scaled(&memo[t], c);
                    }
                }
                self.memo.write().insert(top, Arc::new(nf));
                stack.pop();
            } else {
                for t in missing {
                    if pending.contains_key(&t) {
                        // a monomial rewrote back into one of its own ancestors
                        return Err(exhausted());
                    }
                    stack.push(t);
                }
            }
        }
        Ok(self.memo.read()[m].clone())
    }

    /// Standard form of `p`. The step budget applies to the whole call.
    pub fn normalize(&self, p: &Polynomial) -> Result<Polynomial> {
        let mut steps = 0;
        let mut out = Polynomial::zero();
        for (m, c) in p.terms() {
            let nf = self.normal_form_counted(m, &mut steps)?;
            out.add_scaled(&nf, c);
        }
        Ok(out)
    }

    /// Normalizes without the memo, recording every rewrite.
    pub fn normalize_certified(&self, p: &Polynomial) -> Result<Certificate> {
        let mut current = p.clone();
        let mut standard: std::collections::HashSet<Monomial> = Default::default();
        let mut steps = Vec::new();
        loop {
            let mut found = None;
            for (m, c) in current.terms() {
                if standard.contains(m) {
                    continue;
                }
                match self.rewrite_step(m) {
                    Some(step) => {
                        found = Some((m.clone(), c.clone(), step));
                        break;
                    }
                    None => {
                        standard.insert(m.clone());
                    }
                }
            }
            let Some((m, c, step)) = found else { break };
            if steps.len() as u64 >= self.config.max_steps {
                return Err(Error::NonTermination { budget: self.config.max_steps, monomial: m });
            }
            current.add_term(m.clone(), -c.clone());
            current.add_scaled(&step.result, &c);
            let uses = step
                .uses
                .into_iter()
                .map(|u| RelationUse { multiplier: u.multiplier.scale(&c), instance: u.instance })
                .collect();
            steps.push(CertifiedStep { monomial: m, coefficient: c, uses });
        }
        Ok(Certificate { input: p.clone(), output: current, steps })
    }
}
