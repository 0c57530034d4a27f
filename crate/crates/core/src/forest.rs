//! Combinatorics of exceptional parts: the containment forest of a product of
//! exceptional divisors, the marking set `S`, standardness, the filtration
//! level, the block preorders and enumeration of standard monomials.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::taut::{Generator, MarkSet, Monomial, RingContext};

/// How the marking set `S` treats markings outside every vertex.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SetSMode {
    /// `S = {root minima} ∪ ({1..n} \ ∪ vertices)`.
    #[default]
    Complement,
    /// `S = {root minima} ∪ (∩ vertices)`, the printed form.
    Literal,
}

impl SetSMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            SetSMode::Complement => "complement",
            SetSMode::Literal => "literal",
        }
    }
}

impl fmt::Display for SetSMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SetSMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "complement" => Ok(SetSMode::Complement),
            "literal" => Ok(SetSMode::Literal),
            other => Err(Error::InvalidContext(format!("unknown set-S mode {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Vertex {
    pub set: MarkSet,
    pub exponent: u32,
}

/// Directed graph of a product of exceptional divisors: one vertex per set,
/// an edge `I -> J` when `J` is a maximal proper subset of `I` among the vertices.
/// Roots are the vertices without incoming edges.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExceptionalForest {
    vertices: Vec<Vertex>,
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    roots: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ForestOutcome {
    Forest(ExceptionalForest),
    /// Two vertex sets overlap without nesting; the product vanishes.
    ZeroClass,
}

impl ForestOutcome {
    pub fn forest(self) -> Option<ExceptionalForest> {
        match self {
            ForestOutcome::Forest(f) => Some(f),
            ForestOutcome::ZeroClass => None,
        }
    }
}

impl ExceptionalForest {
    /// Builds the forest of the exceptional factors of `m` (other factors are ignored).
    pub fn build(m: &Monomial) -> ForestOutcome {
        let vertices: Vec<Vertex> = m
            .exceptional_factors()
            .into_iter()
            .map(|(set, exponent)| Vertex { set, exponent })
            .collect();
        for (i, a) in vertices.iter().enumerate() {
            for b in &vertices[i + 1..] {
                if !a.set.compatible(b.set) {
                    return ForestOutcome::ZeroClass;
                }
            }
        }
        ForestOutcome::Forest(Self::from_vertices(vertices))
    }

    fn from_vertices(vertices: Vec<Vertex>) -> Self {
        let count = vertices.len();
        let mut parent: Vec<Option<usize>> = vec![None; count];
        // vertices are sorted larger-first, so the last strict superset seen is the smallest
        for j in 0..count {
            for i in 0..j {
                if vertices[j].set.is_proper_subset(vertices[i].set) {
                    parent[j] = match parent[j] {
                        Some(p) if vertices[p].set.len() <= vertices[i].set.len() => Some(p),
                        _ => Some(i),
                    };
                }
            }
        }
        let mut children = vec![Vec::new(); count];
        let mut roots = Vec::new();
        for (j, p) in parent.iter().enumerate() {
            match p {
                Some(p) => children[*p].push(j),
                None => roots.push(j),
            }
        }
        ExceptionalForest { vertices, parent, children, roots }
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn roots(&self) -> &[usize] {
        &self.roots
    }

    pub fn root_sets(&self) -> impl Iterator<Item = MarkSet> + '_ {
        self.roots.iter().map(|&r| self.vertices[r].set)
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    /// Parent-to-child pairs.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.parent.iter().enumerate().filter_map(|(c, p)| p.map(|p| (p, c))).collect()
    }

    /// Number of outgoing edges.
    pub fn degree(&self, v: usize) -> u32 {
        self.children[v].len() as u32
    }

    pub fn children_union(&self, v: usize) -> MarkSet {
        self.children[v].iter().fold(MarkSet::EMPTY, |acc, &c| acc.union(self.vertices[c].set))
    }

    /// `|I| - |∪ children| + deg(I)`: the markings of `I` once each child collapses to a point.
    pub fn effective_points(&self, v: usize) -> u32 {
        let set = self.vertices[v].set;
        set.len() - self.children_union(v).len() + self.degree(v)
    }

    /// Upper bound on the exponent of a standard vertex.
    pub fn exponent_bound(&self, v: usize) -> i64 {
        let size = self.vertices[v].set.len() as i64;
        let eff = self.effective_points(v) as i64;
        (size - 2).min(eff - 2)
    }

    /// Union of all vertex sets.
    pub fn covered(&self) -> MarkSet {
        self.root_sets().fold(MarkSet::EMPTY, MarkSet::union)
    }

    pub fn depth(&self, v: usize) -> usize {
        let mut d = 0;
        let mut cur = v;
        while let Some(p) = self.parent[cur] {
            d += 1;
            cur = p;
        }
        d
    }

    /// The root whose set contains marking `i`.
    pub fn root_containing(&self, i: u32) -> Option<usize> {
        self.roots.iter().copied().find(|&r| self.vertices[r].set.contains(i))
    }

    /// `∪|I_r| + Σ deg(I_r)`, the sign exponent of a diagonal block.
    pub fn epsilon(&self) -> u32 {
        self.covered().len() + (0..self.len()).map(|v| self.degree(v)).sum::<u32>()
    }

    pub fn exponents_within_bounds(&self) -> bool {
        (0..self.len()).all(|v| (self.vertices[v].exponent as i64) <= self.exponent_bound(v))
    }

    /// The D-part monomial described by this forest.
    pub fn d_monomial(&self) -> Monomial {
        Monomial::from_factors(self.vertices.iter().map(|v| (Generator::Exc(v.set), v.exponent)))
    }

    /// Same vertex sets with new exponents (indexed like `vertices()`).
    pub fn with_exponents(&self, exponents: &[u32]) -> ExceptionalForest {
        let mut out = self.clone();
        for (v, e) in out.vertices.iter_mut().zip(exponents) {
            v.exponent = *e;
        }
        out
    }
}

/// The marking set `S` attached to a forest.
pub fn marking_set_s(forest: &ExceptionalForest, n: u32, mode: SetSMode) -> MarkSet {
    let reps: MarkSet = forest.root_sets().filter_map(MarkSet::min).collect();
    let rest = match mode {
        SetSMode::Complement => MarkSet::full(n).difference(forest.covered()),
        SetSMode::Literal => forest
            .vertices()
            .iter()
            .fold(MarkSet::full(n), |acc, v| acc.intersection(v.set)),
    };
    reps.union(rest)
}

/// `deg a(v) + Σ_roots |J_r| - s`.
pub fn filtration_level(a_degree: u32, forest: &ExceptionalForest) -> u32 {
    let sum: u32 = forest.root_sets().map(MarkSet::len).sum();
    a_degree + sum - forest.roots().len() as u32
}

/// `I < J`: `|J| < |I|`, or equal sizes with `I ≠ J`.
pub fn less_sets(i: MarkSet, j: MarkSet) -> bool {
    j.len() < i.len() || (i.len() == j.len() && i != j)
}

/// `w ≪ v`: every exceptional factor of `w` is less than every exceptional factor of `v`;
/// holds whenever `w` has no exceptional factor.
pub fn ll_monomials(w: &Monomial, v: &Monomial) -> bool {
    let wf = w.exceptional_factors();
    let vf = v.exceptional_factors();
    wf.iter().all(|(i, _)| vf.iter().all(|(j, _)| less_sets(*i, *j)))
}

/// True when the diagonal factors of `a` form stars centred at their smallest
/// marking, each diagonal appears once, and no point class sits on a star leaf.
pub fn is_cluster_canonical(a: &Monomial) -> bool {
    let mut leaves = MarkSet::EMPTY;
    let mut centers = MarkSet::EMPTY;
    for (g, e) in a.factors() {
        if let Generator::Diag(i, j) = g {
            if e != 1 || leaves.contains(j) {
                return false;
            }
            leaves.insert(j);
            centers.insert(i);
        }
    }
    if !leaves.is_disjoint(centers) {
        return false;
    }
    a.factors().all(|(g, _)| !matches!(g, Generator::PointK(i) if leaves.contains(i)))
}

/// A monomial that passed the standardness test, with its cached invariants.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StandardMonomial {
    monomial: Monomial,
    forest: ExceptionalForest,
    s: MarkSet,
    filtration: u32,
}

impl StandardMonomial {
    pub fn new(ctx: &RingContext, mode: SetSMode, m: Monomial) -> Option<Self> {
        let forest = standard_forest(ctx, mode, &m)?;
        let s = marking_set_s(&forest, ctx.n(), mode);
        let filtration = filtration_level(m.a_part().degree(), &forest);
        Some(StandardMonomial { monomial: m, forest, s, filtration })
    }

    pub fn monomial(&self) -> &Monomial {
        &self.monomial
    }

    pub fn forest(&self) -> &ExceptionalForest {
        &self.forest
    }

    pub fn marking_set(&self) -> MarkSet {
        self.s
    }

    pub fn filtration(&self) -> u32 {
        self.filtration
    }

    pub fn degree(&self) -> u32 {
        self.monomial.degree()
    }

    pub fn a_part(&self) -> Monomial {
        self.monomial.a_part()
    }

    pub fn d_part(&self) -> Monomial {
        self.monomial.d_part()
    }
}

fn standard_forest(ctx: &RingContext, mode: SetSMode, m: &Monomial) -> Option<ExceptionalForest> {
    if m.check(ctx).is_err() || m.max_kappa().is_some_and(|i| i > ctx.max_kappa()) {
        return None;
    }
    let forest = ExceptionalForest::build(m).forest()?;
    if !forest.exponents_within_bounds() {
        return None;
    }
    let s = marking_set_s(&forest, ctx.n(), mode);
    let a = m.a_part();
    if !a.a_support().is_subset(s) || a.degree() > ctx.max_kappa() + s.len() {
        return None;
    }
    is_cluster_canonical(&a).then_some(forest)
}

pub fn is_standard(ctx: &RingContext, mode: SetSMode, m: &Monomial) -> bool {
    standard_forest(ctx, mode, m).is_some()
}

/// Multisets of integers in `1..=max_part` summing to `total`, parts non-increasing.
pub fn partitions(total: u32, max_part: u32) -> Vec<Vec<u32>> {
    fn go(rem: u32, cap: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if rem == 0 {
            out.push(cur.clone());
            return;
        }
        for p in (1..=cap.min(rem)).rev() {
            cur.push(p);
            go(rem - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(total, max_part, &mut Vec::new(), &mut out);
    out
}

fn set_partitions(elems: &[u32]) -> Vec<Vec<Vec<u32>>> {
    fn go(elems: &[u32], idx: usize, cur: &mut Vec<Vec<u32>>, out: &mut Vec<Vec<Vec<u32>>>) {
        if idx == elems.len() {
            out.push(cur.clone());
            return;
        }
        for b in 0..cur.len() {
            cur[b].push(elems[idx]);
            go(elems, idx + 1, cur, out);
            cur[b].pop();
        }
        cur.push(vec![elems[idx]]);
        go(elems, idx + 1, cur, out);
        cur.pop();
    }
    let mut out = Vec::new();
    go(elems, 0, &mut Vec::new(), &mut out);
    out
}

fn weak_compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    fn go(rem: u32, left: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if left == 1 {
            cur.push(rem);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for x in 0..=rem {
            cur.push(x);
            go(rem - x, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if parts == 0 {
        if total == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    go(total, parts, &mut Vec::new(), &mut out);
    out
}

/// Canonical a-part monomials of the given degree supported on `s`:
/// a kappa multipartition, diagonal stars on disjoint blocks of `s`, and point
/// classes on block minima and on markings outside every block.
pub fn canonical_a_parts(ctx: &RingContext, s: MarkSet, degree: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    let elems = s.to_vec();
    for blocks in set_partitions(&elems) {
        let diag_degree: u32 = blocks.iter().map(|b| b.len() as u32 - 1).sum();
        if diag_degree > degree {
            continue;
        }
        let mut base = Monomial::one();
        for b in &blocks {
            for &x in &b[1..] {
                base.mul_generator(Generator::Diag(b[0], x), 1);
            }
        }
        let rest = degree - diag_degree;
        for kappa_degree in 0..=rest {
            let kparts = if kappa_degree == 0 {
                vec![Vec::new()]
            } else if ctx.max_kappa() == 0 {
                Vec::new()
            } else {
                partitions(kappa_degree, ctx.max_kappa())
            };
            let k_total = rest - kappa_degree;
            let comps = weak_compositions(k_total, blocks.len());
            for kp in &kparts {
                for comp in &comps {
                    let mut m = base.clone();
                    for &p in kp {
                        m.mul_generator(Generator::Kappa(p), 1);
                    }
                    for (b, &e) in blocks.iter().zip(comp) {
                        m.mul_generator(Generator::PointK(b[0]), e);
                    }
                    out.push(m);
                }
            }
        }
    }
    out.sort();
    out
}

/// Every nested family of exceptional sets in `{1..n}` whose vertices admit a
/// positive exponent, as forests with all exponents set to 1.
pub fn admissible_shapes(n: u32) -> Vec<ExceptionalForest> {
    let mut candidates: Vec<MarkSet> =
        MarkSet::full(n).subsets().filter(|s| s.len() >= 3).collect();
    candidates.sort();
    let mut out = Vec::new();
    let mut chosen = Vec::new();
    fn go(cands: &[MarkSet], idx: usize, chosen: &mut Vec<MarkSet>, out: &mut Vec<ExceptionalForest>) {
        if idx == cands.len() {
            let m = Monomial::from_factors(chosen.iter().map(|s| (Generator::Exc(*s), 1)));
            if let Some(f) = ExceptionalForest::build(&m).forest() {
                if (0..f.len()).all(|v| f.exponent_bound(v) >= 1) {
                    out.push(f);
                }
            }
            return;
        }
        go(cands, idx + 1, chosen, out);
        if chosen.iter().all(|c| c.compatible(cands[idx])) {
            chosen.push(cands[idx]);
            go(cands, idx + 1, chosen, out);
            chosen.pop();
        }
    }
    go(&candidates, 0, &mut chosen, &mut out);
    out
}

/// All standard exceptional parts: admissible shapes with every exponent in range.
pub fn standard_d_parts(n: u32) -> Vec<ExceptionalForest> {
    let mut out = Vec::new();
    for shape in admissible_shapes(n) {
        let bounds: Vec<u32> = (0..shape.len()).map(|v| shape.exponent_bound(v) as u32).collect();
        let mut exps = vec![1u32; shape.len()];
        loop {
            out.push(shape.with_exponents(&exps));
            let mut idx = 0;
            while idx < exps.len() {
                if exps[idx] < bounds[idx] {
                    exps[idx] += 1;
                    break;
                }
                exps[idx] = 1;
                idx += 1;
            }
            if idx == exps.len() {
                break;
            }
        }
    }
    out
}

/// Standard monomials of degree `k`, sorted by the monomial order.
pub fn enumerate_basis(ctx: &RingContext, mode: SetSMode, k: u32) -> Result<Vec<StandardMonomial>> {
    if k > ctx.top_degree() {
        return Err(Error::DegreeOutOfRange { k, top: ctx.top_degree() });
    }
    let mut seen = BTreeSet::new();
    for forest in standard_d_parts(ctx.n()) {
        let d = forest.d_monomial();
        let dd = d.degree();
        if dd > k {
            continue;
        }
        let s = marking_set_s(&forest, ctx.n(), mode);
        let ad = k - dd;
        if ad > ctx.max_kappa() + s.len() {
            continue;
        }
        for a in canonical_a_parts(ctx, s, ad) {
            seen.insert(a.mul(&d));
        }
    }
    Ok(seen
        .into_iter()
        .map(|m| StandardMonomial::new(ctx, mode, m).expect("enumerated monomial is standard"))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::taut::parse_monomial;

    fn set(v: &[u32]) -> MarkSet {
        v.iter().copied().collect()
    }

    fn forest(ctx: &RingContext, s: &str) -> ForestOutcome {
        ExceptionalForest::build(&parse_monomial(ctx, s).unwrap())
    }

    #[test]
    fn disjoint_vertices_are_two_roots() {
        let ctx = RingContext::new(2, 7).unwrap();
        let f = forest(&ctx, "D(1,2,3)*D(4,5,6,7)^2").forest().unwrap();
        assert_eq!(f.len(), 2);
        assert!(f.edges().is_empty());
        assert_eq!(f.roots().len(), 2);
        assert_eq!(marking_set_s(&f, 7, SetSMode::Complement), set(&[1, 4]));
    }

    #[test]
    fn nested_vertices_form_an_edge() {
        let ctx = RingContext::new(2, 5).unwrap();
        let f = forest(&ctx, "D(1,2,3,4,5)*D(1,2,3)").forest().unwrap();
        assert_eq!(f.edges(), vec![(0, 1)]);
        assert_eq!(f.roots(), &[0]);
        assert_eq!(f.degree(0), 1);
        assert_eq!(marking_set_s(&f, 5, SetSMode::Complement), set(&[1]));
        assert_eq!(filtration_level(0, &f), 4);
    }

    #[test]
    fn overlapping_vertices_vanish() {
        let ctx = RingContext::new(2, 5).unwrap();
        assert_eq!(forest(&ctx, "D(1,2,3)*D(3,4,5)"), ForestOutcome::ZeroClass);
    }

    #[test]
    fn marking_set_includes_untouched_markings() {
        let ctx = RingContext::new(2, 5).unwrap();
        let f = forest(&ctx, "D(1,2,3)").forest().unwrap();
        assert_eq!(marking_set_s(&f, 5, SetSMode::Complement), set(&[1, 4, 5]));
        assert_eq!(marking_set_s(&f, 5, SetSMode::Literal), set(&[1, 2, 3]));
    }

    #[test]
    fn standardness_examples() {
        let c3 = RingContext::new(3, 3).unwrap();
        assert!(!is_standard(&c3, SetSMode::Complement, &parse_monomial(&c3, "D(1,2,3)^2").unwrap()));
        assert!(is_standard(&c3, SetSMode::Complement, &parse_monomial(&c3, "K1*D(1,2,3)").unwrap()));
        assert!(!is_standard(&c3, SetSMode::Complement, &parse_monomial(&c3, "K2*D(1,2,3)").unwrap()));
        let c4 = RingContext::new(3, 4).unwrap();
        assert!(!is_standard(
            &c4,
            SetSMode::Complement,
            &parse_monomial(&c4, "D(1,2,3)*D(1,2,3,4)").unwrap()
        ));
        let c2 = RingContext::new(2, 2).unwrap();
        assert!(!is_standard(&c2, SetSMode::Complement, &parse_monomial(&c2, "K2*d(1,2)").unwrap()));
        assert!(!is_standard(&c2, SetSMode::Complement, &parse_monomial(&c2, "d(1,2)^2").unwrap()));
    }

    #[test]
    fn filtration_examples() {
        let c3 = RingContext::new(3, 3).unwrap();
        let v = StandardMonomial::new(&c3, SetSMode::Complement, parse_monomial(&c3, "k1").unwrap()).unwrap();
        assert_eq!(v.filtration(), 1);
        let v = StandardMonomial::new(&c3, SetSMode::Complement, parse_monomial(&c3, "D(1,2,3)").unwrap()).unwrap();
        assert_eq!(v.filtration(), 2);
    }

    #[test]
    fn preorder_examples() {
        assert!(less_sets(set(&[1, 2, 3, 4]), set(&[1, 2, 3])));
        assert!(!less_sets(set(&[1, 2, 3]), set(&[1, 2, 3, 4])));
        assert!(less_sets(set(&[1, 2, 3]), set(&[1, 2, 4])));
        assert!(less_sets(set(&[1, 2, 4]), set(&[1, 2, 3])));
        assert!(!less_sets(set(&[1, 2, 3]), set(&[1, 2, 3])));
        let ctx = RingContext::new(2, 4).unwrap();
        let w = parse_monomial(&ctx, "K1^2").unwrap();
        let v = parse_monomial(&ctx, "D(1,2,3)").unwrap();
        assert!(ll_monomials(&w, &v));
        assert!(!ll_monomials(&v, &v));
    }

    fn strings(v: &[StandardMonomial]) -> Vec<String> {
        v.iter().map(|s| s.monomial().to_string()).collect()
    }

    #[test]
    fn enumerate_small_cases() {
        let c = RingContext::new(2, 2).unwrap();
        assert_eq!(strings(&enumerate_basis(&c, SetSMode::Complement, 1).unwrap()), ["K1", "K2", "d(1,2)"]);
        assert_eq!(
            strings(&enumerate_basis(&c, SetSMode::Complement, 2).unwrap()),
            ["K1*K2", "K1*d(1,2)", "K1^2", "K2^2"]
        );
        let c = RingContext::new(2, 3).unwrap();
        assert_eq!(
            strings(&enumerate_basis(&c, SetSMode::Complement, 1).unwrap()),
            ["K1", "K2", "K3", "d(1,2)", "d(1,3)", "d(2,3)", "D(1,2,3)"]
        );
        assert!(enumerate_basis(&c, SetSMode::Complement, 4).is_err());
    }

    #[test]
    fn top_degree_basis_has_no_exceptional_part() {
        for g in 2..=4 {
            for n in 1..=5 {
                let ctx = RingContext::new(g, n).unwrap();
                for v in enumerate_basis(&ctx, SetSMode::Complement, ctx.top_degree()).unwrap() {
                    assert!(!v.monomial().has_exceptional(), "{}", v.monomial());
                }
            }
        }
    }

    #[test]
    fn shapes_need_room_for_an_exponent() {
        // {1..6} with children {1,2,3} and {4,5,6} has two effective points
        let shapes = admissible_shapes(6);
        let bad = Monomial::from_factors([
            (Generator::Exc(set(&[1, 2, 3, 4, 5, 6])), 1),
            (Generator::Exc(set(&[1, 2, 3])), 1),
            (Generator::Exc(set(&[4, 5, 6])), 1),
        ]);
        assert!(shapes.iter().all(|f| f.d_monomial() != bad));
        assert_eq!(admissible_shapes(3).len(), 2);
    }

    #[test]
    fn partitions_of_small_numbers() {
        assert_eq!(partitions(3, 3), vec![vec![3], vec![2, 1], vec![1, 1, 1]]);
        assert_eq!(partitions(3, 1), vec![vec![1, 1, 1]]);
        assert_eq!(partitions(0, 2), vec![Vec::<u32>::new()]);
    }
}
