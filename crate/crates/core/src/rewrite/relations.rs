//! Relation families among tautological classes on the rational-tails space.
//!
//! Every instance carries the polynomial that vanishes; rewriting records
//! `(instance, multiplier)` pairs so a normalization can be replayed exactly.

use std::fmt;

use num_traits::One;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::taut::{rat, Generator, MarkSet, Monomial, Polynomial, Rational, RingContext};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Family {
    /// `(d_{i,j} + K_j) D_I` and its consequences inside one exceptional set.
    R1a,
    /// `(d_{i,k} - d_{j,k}) D_I` for `i, j ∈ I`, `k ∉ I`.
    R1b,
    /// Product relation over one exceptional set without nested sets.
    R2,
    /// Product relation over one exceptional set with nested blocks.
    R3,
    /// Overlapping exceptional sets.
    V0,
    /// Vanishing above the socle degree of `C_g^S`, including `κ_i` for `i > g-2`.
    V1,
    /// Diagonal identities on the fibred power of the universal curve.
    Diag,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum RelationParams {
    R1a { set: MarkSet, i: u32, j: u32 },
    R1b { set: MarkSet, i: u32, j: u32, k: u32 },
    R2 { set: MarkSet, pivot: u32 },
    /// Printed form: break points `r_1 < … < r_{k+1}` and a relabeling.
    R3 { breaks: Vec<u32>, perm: Vec<u32> },
    /// `∏_q (d_{p,q} - Σ_{J ⊇ I} D_J) · ∏ D_C` over the effective points `q ≠ p` of `I`.
    Vertex { set: MarkSet, children: Vec<MarkSet>, pivot: u32 },
    V0 { first: MarkSet, second: MarkSet },
    V1 { class: Monomial, s: MarkSet },
    DiagSelf { i: u32, j: u32 },
    DiagPoint { i: u32, j: u32 },
    DiagTransport { first: (u32, u32), second: (u32, u32) },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RelationInstance {
    pub family: Family,
    pub params: RelationParams,
    pub polynomial: Polynomial,
}

impl fmt::Display for RelationParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RelationParams::R1a { set, i, j } => write!(f, "R1a I={set} i={i} j={j}"),
            RelationParams::R1b { set, i, j, k } => write!(f, "R1b I={set} i={i} j={j} k={k}"),
            RelationParams::R2 { set, pivot } => write!(f, "R2 I={set} i={pivot}"),
            RelationParams::R3 { breaks, perm } => write!(f, "R3 r={breaks:?} sigma={perm:?}"),
            RelationParams::Vertex { set, children, pivot } => {
                write!(f, "R3 I={set} blocks={children:?} pivot={pivot}")
            }
            RelationParams::V0 { first, second } => write!(f, "V0 {first} {second}"),
            RelationParams::V1 { class, s } => write!(f, "V1 class={class} S={s}"),
            RelationParams::DiagSelf { i, j } => write!(f, "Diag self d({i},{j})"),
            RelationParams::DiagPoint { i, j } => write!(f, "Diag point d({i},{j})"),
            RelationParams::DiagTransport { first, second } => {
                write!(f, "Diag transport d({},{}) d({},{})", first.0, first.1, second.0, second.1)
            }
        }
    }
}

impl fmt::Display for RelationInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} : {} = 0", self.params, self.polynomial)
    }
}

fn gen(g: Generator) -> Polynomial {
    Polynomial::generator(g)
}

fn d(i: u32, j: u32) -> Polynomial {
    gen(Generator::diag(i, j).expect("distinct markings"))
}

fn k(i: u32) -> Polynomial {
    gen(Generator::PointK(i))
}

fn exc(s: MarkSet) -> Polynomial {
    gen(Generator::Exc(s))
}

/// `Σ_{I ⊆ J ⊆ {1..n}} D_J`.
pub fn superset_sum(ctx: &RingContext, set: MarkSet) -> Polynomial {
    let free = ctx.markings().difference(set);
    let mut out = Polynomial::zero();
    for extra in free.subsets() {
        out.add_term(Monomial::generator(Generator::Exc(set.union(extra))), Rational::one());
    }
    out
}

/// Two-point boundary class `d_{i,j} - Σ_{J ⊇ {i,j}, |J| >= 3} D_J`.
pub fn two_point_boundary(ctx: &RingContext, pair: MarkSet) -> Polynomial {
    let v = pair.to_vec();
    assert_eq!(v.len(), 2);
    let mut out = d(v[0], v[1]);
    let free = ctx.markings().difference(pair);
    for extra in free.subsets().filter(|e| !e.is_empty()) {
        out.add_term(Monomial::generator(Generator::Exc(pair.union(extra))), -Rational::one());
    }
    out
}

fn check_exceptional(ctx: &RingContext, set: MarkSet) -> Result<()> {
    ctx.exc(set).map(|_| ()).map_err(|e| Error::InvalidRelation(e.to_string()))
}

pub fn r1a(ctx: &RingContext, set: MarkSet, i: u32, j: u32) -> Result<RelationInstance> {
    check_exceptional(ctx, set)?;
    if i == j || !set.contains(i) || !set.contains(j) {
        return Err(Error::InvalidRelation(format!("R1a needs distinct i={i}, j={j} in {set}")));
    }
    Ok(RelationInstance {
        family: Family::R1a,
        params: RelationParams::R1a { set, i, j },
        polynomial: &(&d(i, j) + &k(j)) * &exc(set),
    })
}

pub fn r1b(ctx: &RingContext, set: MarkSet, i: u32, j: u32, kk: u32) -> Result<RelationInstance> {
    check_exceptional(ctx, set)?;
    if i == j || !set.contains(i) || !set.contains(j) || set.contains(kk) || !ctx.markings().contains(kk) {
        return Err(Error::InvalidRelation(format!("R1b needs i={i}, j={j} in {set} and k={kk} outside")));
    }
    Ok(RelationInstance {
        family: Family::R1b,
        params: RelationParams::R1b { set, i, j, k: kk },
        polynomial: &(&d(i, kk) - &d(j, kk)) * &exc(set),
    })
}

/// Every first-family instance for one exceptional set: all ordered pairs in `I`
/// for R1a, all `i ≠ j ∈ I`, `k ∉ I` for R1b.
pub fn instances_r1(ctx: &RingContext, set: MarkSet) -> Result<Vec<RelationInstance>> {
    check_exceptional(ctx, set)?;
    let mut out = Vec::new();
    for i in set.iter() {
        for j in set.iter().filter(|&j| j != i) {
            out.push(r1a(ctx, set, i, j)?);
        }
    }
    for i in set.iter() {
        for j in set.iter().filter(|&j| j != i) {
            for kk in ctx.markings().difference(set).iter() {
                out.push(r1b(ctx, set, i, j, kk)?);
            }
        }
    }
    Ok(out)
}

/// `∏_{j ∈ I, j ≠ i} (d_{i,j} - Σ_{J ⊇ I} D_J)`.
pub fn instance_r2(ctx: &RingContext, set: MarkSet, pivot: u32) -> Result<RelationInstance> {
    check_exceptional(ctx, set)?;
    if !set.contains(pivot) {
        return Err(Error::InvalidRelation(format!("pivot {pivot} not in {set}")));
    }
    let sum = superset_sum(ctx, set);
    let mut poly = Polynomial::one();
    for j in set.iter().filter(|&j| j != pivot) {
        poly = &poly * &(&d(pivot, j) - &sum);
    }
    Ok(RelationInstance { family: Family::R2, params: RelationParams::R2 { set, pivot }, polynomial: poly })
}

/// Third family in printed form: `P(-Σ_{I_0 ⊆ J} D_J) · ∏ D_{I_i}` with
/// `I_0 = {1..r_{k+1}}`, `I_i = {r_i+1..r_{i+1}}`, transported by `perm`
/// (`perm[i-1] = σ(i)`). Two-element blocks stand for the two-point boundary class.
pub fn instance_r3(ctx: &RingContext, breaks: &[u32], perm: &[u32]) -> Result<RelationInstance> {
    let n = ctx.n();
    if breaks.is_empty() || breaks[0] < 1 || breaks.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidRelation(format!("break points {breaks:?} must increase from 1")));
    }
    let top = *breaks.last().unwrap();
    if top > n || top < 3 {
        return Err(Error::InvalidRelation(format!("I_0 = {{1..{top}}} must have 3..={n} elements")));
    }
    if perm.len() != n as usize || (1..=n).any(|i| !perm.contains(&i)) {
        return Err(Error::InvalidRelation(format!("{perm:?} is not a permutation of 1..={n}")));
    }
    let r1 = breaks[0];
    let blocks: Vec<MarkSet> = breaks.windows(2).map(|w| (w[0] + 1..=w[1]).collect()).collect();
    if let Some(b) = blocks.iter().find(|b| b.len() == 1) {
        return Err(Error::InvalidRelation(format!("singleton block {b} has no boundary class")));
    }
    let i0: MarkSet = (1..=top).collect();
    let t = -&superset_sum(ctx, i0);
    let mut poly = Polynomial::one();
    for i in 2..=r1 {
        poly = &poly * &(&t + &d(1, i));
    }
    for w in breaks.windows(2) {
        poly = &poly * &(&t + &d(1, w[0] + 1));
    }
    for b in &blocks {
        let factor = if b.len() == 2 { two_point_boundary(ctx, *b) } else { exc(*b) };
        poly = &poly * &factor;
    }
    Ok(RelationInstance {
        family: Family::R3,
        params: RelationParams::R3 { breaks: breaks.to_vec(), perm: perm.to_vec() },
        polynomial: poly.relabel(perm),
    })
}

/// `∏_{q} (d_{p,q} - Σ_{J ⊇ I} D_J) · ∏_C D_C` where `C` runs over disjoint
/// exceptional blocks inside `I` and `q` over the markings of `I` outside every
/// block plus one representative (the minimum) per block, excluding `p` and the
/// block containing it. Equals the second family when there are no blocks and the
/// third family (relabeled) when `p` lies outside every block.
pub fn vertex_relation(
    ctx: &RingContext,
    set: MarkSet,
    children: &[MarkSet],
    pivot: u32,
) -> Result<RelationInstance> {
    check_exceptional(ctx, set)?;
    let mut covered = MarkSet::EMPTY;
    for c in children {
        check_exceptional(ctx, *c)?;
        if !c.is_proper_subset(set) || !c.is_disjoint(covered) {
            return Err(Error::InvalidRelation(format!("blocks {children:?} are not disjoint proper subsets of {set}")));
        }
        covered = covered.union(*c);
    }
    if !set.contains(pivot) {
        return Err(Error::InvalidRelation(format!("pivot {pivot} not in {set}")));
    }
    let mut targets: Vec<u32> = set.difference(covered).iter().filter(|&q| q != pivot).collect();
    targets.extend(children.iter().filter(|c| !c.contains(pivot)).map(|c| MarkSet::min(*c).unwrap()));
    let sum = superset_sum(ctx, set);
    let mut poly = Polynomial::one();
    for q in targets {
        poly = &poly * &(&d(pivot, q) - &sum);
    }
    for c in children {
        poly = &poly * &exc(*c);
    }
    let family = if children.is_empty() { Family::R2 } else { Family::R3 };
    Ok(RelationInstance {
        family,
        params: RelationParams::Vertex { set, children: children.to_vec(), pivot },
        polynomial: poly,
    })
}

pub fn v0(first: MarkSet, second: MarkSet) -> RelationInstance {
    RelationInstance {
        family: Family::V0,
        params: RelationParams::V0 { first, second },
        polynomial: &exc(first) * &exc(second),
    }
}

/// `class = 0` for a class pulled back from `C_g^S` above its socle degree.
pub fn v1(ctx: &RingContext, class: Monomial, s: MarkSet) -> Result<RelationInstance> {
    if class.has_exceptional() || !class.a_support().is_subset(s) || class.degree() <= ctx.max_kappa() + s.len() {
        return Err(Error::InvalidRelation(format!("{class} is not above the socle of C_g^{s}")));
    }
    Ok(RelationInstance {
        family: Family::V1,
        params: RelationParams::V1 { class: class.clone(), s },
        polynomial: Polynomial::from_monomial(class),
    })
}

/// `d_{i,j}^2 + K_i d_{i,j}`.
pub fn diag_self(i: u32, j: u32) -> RelationInstance {
    RelationInstance {
        family: Family::Diag,
        params: RelationParams::DiagSelf { i, j },
        polynomial: &(&d(i, j) + &k(i)) * &d(i, j),
    }
}

/// `(K_j - K_i) d_{i,j}`.
pub fn diag_point(i: u32, j: u32) -> RelationInstance {
    RelationInstance {
        family: Family::Diag,
        params: RelationParams::DiagPoint { i, j },
        polynomial: &(&k(j) - &k(i)) * &d(i, j),
    }
}

/// Two diagonals on three markings `p < q < r` equal `d_{p,q} d_{p,r}`.
pub fn diag_transport(first: (u32, u32), second: (u32, u32)) -> RelationInstance {
    let mut pts: Vec<u32> = vec![first.0, first.1, second.0, second.1];
    pts.sort_unstable();
    pts.dedup();
    assert_eq!(pts.len(), 3, "transport needs two diagonals sharing one marking");
    let lhs = &d(first.0, first.1) * &d(second.0, second.1);
    let rhs = &d(pts[0], pts[1]) * &d(pts[0], pts[2]);
    RelationInstance {
        family: Family::Diag,
        params: RelationParams::DiagTransport { first, second },
        polynomial: &lhs - &rhs,
    }
}

/// `(-1)^e` as a rational.
pub(crate) fn sign(e: u32) -> Rational {
    if e.is_multiple_of(2) {
        rat(1)
    } else {
        rat(-1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::taut::parse_polynomial;

    fn set(v: &[u32]) -> MarkSet {
        v.iter().copied().collect()
    }

    #[test]
    fn first_family_contents() {
        let ctx = RingContext::new(2, 4).unwrap();
        let all = instances_r1(&ctx, set(&[1, 2, 3])).unwrap();
        let polys: Vec<_> = all.iter().map(|r| r.polynomial.clone()).collect();
        assert!(polys.contains(&parse_polynomial(&ctx, "d(1,2)*D(1,2,3) + K2*D(1,2,3)").unwrap()));
        assert!(polys.contains(&parse_polynomial(&ctx, "d(1,4)*D(1,2,3) - d(2,4)*D(1,2,3)").unwrap()));
        assert_eq!(all.len(), 6 + 6);
    }

    #[test]
    fn second_family_on_three_points() {
        let ctx = RingContext::new(2, 3).unwrap();
        let r = instance_r2(&ctx, set(&[1, 2, 3]), 1).unwrap();
        let expected = parse_polynomial(
            &ctx,
            "d(1,2)*d(1,3) - d(1,2)*D(1,2,3) - d(1,3)*D(1,2,3) + D(1,2,3)^2",
        )
        .unwrap();
        assert_eq!(r.polynomial, expected);
    }

    #[test]
    fn superset_sum_on_four_points() {
        let ctx = RingContext::new(2, 4).unwrap();
        assert_eq!(
            superset_sum(&ctx, set(&[1, 2, 3])),
            parse_polynomial(&ctx, "D(1,2,3) + D(1,2,3,4)").unwrap()
        );
    }

    #[test]
    fn third_family_without_blocks_is_a_second_family_instance() {
        let ctx = RingContext::new(2, 3).unwrap();
        let r3 = instance_r3(&ctx, &[3], &[1, 2, 3]).unwrap();
        let r2 = instance_r2(&ctx, set(&[1, 2, 3]), 1).unwrap();
        // P(t) = (t + d12)(t + d13) with t = -D, i.e. the same product
        assert_eq!(r3.polynomial, r2.polynomial);
    }

    #[test]
    fn third_family_rejects_singleton_blocks() {
        let ctx = RingContext::new(2, 5).unwrap();
        assert!(instance_r3(&ctx, &[3, 4], &[1, 2, 3, 4, 5]).is_err());
        assert!(instance_r3(&ctx, &[2], &[1, 2, 3, 4, 5]).is_err());
        assert!(instance_r3(&ctx, &[2, 5], &[1, 2, 3, 4, 5]).is_ok());
    }

    #[test]
    fn vertex_relation_matches_printed_third_family() {
        let ctx = RingContext::new(2, 5).unwrap();
        // I_0 = {1..5}, block {3,4,5}, free points 1, 2
        let printed = instance_r3(&ctx, &[2, 5], &[1, 2, 3, 4, 5]).unwrap();
        let vertex = vertex_relation(&ctx, set(&[1, 2, 3, 4, 5]), &[set(&[3, 4, 5])], 1).unwrap();
        assert_eq!(printed.polynomial, vertex.polynomial);
    }

    #[test]
    fn v1_requires_degree_above_socle() {
        let ctx = RingContext::new(2, 3).unwrap();
        let m = crate::taut::parse_monomial(&ctx, "K1^2").unwrap();
        assert!(v1(&ctx, m.clone(), set(&[1])).is_ok());
        assert!(v1(&ctx, m, set(&[1, 2])).is_err());
    }
}
