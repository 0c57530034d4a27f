use std::collections::HashMap;

use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use super::matrix::{compress_perm, Block, MatrixJson, PairingMatrix};
use super::rank::rank;
use crate::error::{Error, Result};
use crate::forest::{ll_monomials, marking_set_s, ExceptionalForest, SetSMode, StandardMonomial};
use crate::rewrite::Evaluator;
use crate::taut::{format_rational, rat, MarkSet, Monomial, Rational, RingContext};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub row: usize,
    pub col: usize,
    pub row_label: String,
    pub col_label: String,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TriangularReport {
    /// Entries covered by the vanishing hypothesis in either orientation.
    pub predicted_zero: usize,
    pub violations: Vec<Violation>,
    /// Nonzero entries in blocks strictly below the diagonal, as `(row block, column block)`.
    pub subdiagonal_nonzero: Vec<(usize, usize)>,
}

impl TriangularReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty() && self.subdiagonal_nonzero.is_empty()
    }
}

/// `v ≪ w` with `p(w) + deg v` above the top degree.
fn predicts_zero(top: u32, v: &StandardMonomial, w: &StandardMonomial) -> bool {
    ll_monomials(v.monomial(), w.monomial()) && w.filtration() + v.degree() > top
}

/// Checks every entry the triangle vanishing statement covers (with the row
/// factor in either role) and every block strictly below the diagonal.
pub fn verify_triangular(m: &PairingMatrix) -> TriangularReport {
    let top = m.g - 2 + m.n;
    let mut predicted_zero = 0;
    let mut violations = Vec::new();
    for (i, v) in m.rows.iter().enumerate() {
        for (j, w) in m.cols.iter().enumerate() {
            if predicts_zero(top, v, w) || predicts_zero(top, w, v) {
                predicted_zero += 1;
                if !m.entries[i][j].is_zero() {
                    violations.push(Violation {
                        row: i,
                        col: j,
                        row_label: v.monomial().to_string(),
                        col_label: w.monomial().to_string(),
                        value: format_rational(&m.entries[i][j]),
                    });
                }
            }
        }
    }
    let mut subdiagonal_nonzero = Vec::new();
    for rb in 0..m.blocks.len() {
        for cb in 0..rb {
            if !m.is_zero_block(rb, cb) {
                subdiagonal_nonzero.push((rb, cb));
            }
        }
    }
    TriangularReport { predicted_zero, violations, subdiagonal_nonzero }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlockReport {
    #[serde(rename = "Dpart")]
    pub d_part: String,
    pub dual: String,
    #[serde(rename = "S")]
    pub s: MarkSet,
    pub epsilon: u32,
    pub rows: usize,
    pub cols: usize,
    /// `(-1)^ε (2g-2)^{n-|S|+1}`.
    pub predicted_constant: String,
    /// `(-1)^ε (2g-2)^{|S|-n}`, the constant observed under the socle normalization used here.
    pub refined_constant: String,
    /// `M_block / C_block`, absent when the reference block is zero.
    pub empirical_constant: Option<String>,
    pub proportional: bool,
    /// The empirical constant equals the predicted one or its inverse.
    pub matches_predicted: bool,
    pub matches_refined: bool,
    pub block_rank: usize,
    pub reference_rank: usize,
}

fn signed_power(epsilon: u32, base: i64, exp: i64) -> Rational {
    let b = rat(base);
    let mut v = if exp >= 0 { num_traits::pow(b, exp as usize) } else { num_traits::pow(b, (-exp) as usize).recip() };
    if epsilon % 2 == 1 {
        v = -v;
    }
    v
}

/// Reference evaluators on `C_g^s`, one per `s`.
pub struct ReferenceEvaluators<'a> {
    base: &'a Evaluator,
    by_size: parking_lot::Mutex<HashMap<u32, std::sync::Arc<Evaluator>>>,
}

impl<'a> ReferenceEvaluators<'a> {
    pub fn new(base: &'a Evaluator) -> Self {
        ReferenceEvaluators { base, by_size: Default::default() }
    }

    fn get(&self, s: u32) -> Result<std::sync::Arc<Evaluator>> {
        let mut map = self.by_size.lock();
        if let Some(e) = map.get(&s) {
            return Ok(e.clone());
        }
        let ctx = self.base.context().with_markings(s)?;
        let ev = std::sync::Arc::new(Evaluator::new(ctx, self.base.kappa_table().clone())?);
        map.insert(s, ev.clone());
        Ok(ev)
    }

    /// `eval_C` on `C_g^S` of `a · a'` after relabeling `S` to `1..|S|`; zero when
    /// the degree is not the top degree of `C_g^S`.
    pub fn pair(&self, s: MarkSet, a: &Monomial, b: &Monomial) -> Result<Rational> {
        let n = self.base.context().n();
        let ev = self.get(s.len())?;
        let prod = a.mul(b);
        if prod.degree() != ev.context().top_degree() || !prod.a_support().is_subset(s) {
            return Ok(Rational::zero());
        }
        ev.eval_c(&prod.permute(&compress_perm(n, s)))
    }
}

/// The marking set of a block label under the matrix's mode.
pub fn block_marking_set(ctx: &RingContext, mode: SetSMode, label: &Monomial) -> MarkSet {
    let forest = ExceptionalForest::build(label).forest().expect("block labels are forests");
    marking_set_s(&forest, ctx.n(), mode)
}

/// Compares one diagonal block with the pairing on `C_g^S` of its a-parts.
pub fn block_constant_report(
    m: &PairingMatrix,
    block: &Block,
    refs: &ReferenceEvaluators<'_>,
) -> Result<BlockReport> {
    let ctx = refs.base.context();
    let forest = ExceptionalForest::build(&block.label).forest().expect("block labels are forests");
    let s = marking_set_s(&forest, ctx.n(), m.mode);
    let epsilon = forest.epsilon();
    let two_g = 2 * ctx.g() as i64 - 2;
    let predicted = signed_power(epsilon, two_g, ctx.n() as i64 - s.len() as i64 + 1);
    let refined = signed_power(epsilon, two_g, s.len() as i64 - ctx.n() as i64);

    let mblock = m.block_entries(block);
    let mut cblock = Vec::with_capacity(block.rows.len());
    for v in &m.rows[block.rows.clone()] {
        let a = v.a_part();
        let row = m.cols[block.cols.clone()]
            .iter()
            .map(|w| refs.pair(s, &a, &w.a_part()))
            .collect::<Result<Vec<_>>>()?;
        cblock.push(row);
    }

    let pivot = cblock.iter().flatten().zip(mblock.iter().flatten()).find(|(c, _)| !c.is_zero());
    let (constant, proportional) = match pivot {
        Some((c, x)) => {
            let k = x / c;
            let ok = cblock.iter().flatten().zip(mblock.iter().flatten()).all(|(c, x)| &(c * &k) == x);
            (Some(k), ok)
        }
        None => (None, mblock.iter().flatten().all(Zero::is_zero)),
    };
    let matches = |target: &Rational| {
        constant.as_ref().is_some_and(|c| c == target || (!c.is_zero() && &c.recip() == target))
    };
    Ok(BlockReport {
        d_part: block.label.to_string(),
        dual: block.dual_label.to_string(),
        s,
        epsilon,
        rows: block.rows.len(),
        cols: block.cols.len(),
        predicted_constant: format_rational(&predicted),
        refined_constant: format_rational(&refined),
        empirical_constant: constant.as_ref().map(format_rational),
        proportional,
        matches_predicted: matches(&predicted),
        matches_refined: constant.as_ref() == Some(&refined),
        block_rank: rank(&mblock),
        reference_rank: rank(&cblock),
    })
}

/// Reports for all diagonal blocks with at least one row and one column.
pub fn block_reports(m: &PairingMatrix, ev: &Evaluator) -> Result<Vec<BlockReport>> {
    let refs = ReferenceEvaluators::new(ev);
    m.blocks
        .iter()
        .filter(|b| !b.rows.is_empty() && !b.cols.is_empty())
        .map(|b| block_constant_report(m, b, &refs))
        .collect()
}

/// Report for the block whose row label is `d_part`.
pub fn block_report_for(m: &PairingMatrix, ev: &Evaluator, d_part: &Monomial) -> Result<BlockReport> {
    let block = m
        .blocks
        .iter()
        .find(|b| &b.label == d_part && !b.rows.is_empty())
        .ok_or_else(|| Error::InvalidRelation(format!("no row block with D-part {d_part} in degree {}", m.k)))?;
    let refs = ReferenceEvaluators::new(ev);
    let report = block_constant_report(m, block, &refs)?;
    if !report.proportional {
        return Err(Error::ProportionalityFailure { label: report.d_part });
    }
    Ok(report)
}

pub fn matrix_json(m: &PairingMatrix, blocks: &[BlockReport]) -> serde_json::Value {
    serde_json::to_value(MatrixJson {
        g: m.g,
        n: m.n,
        k: m.k,
        rows: m.row_labels(),
        cols: m.col_labels(),
        entries: m.entry_strings(),
        blocks,
    })
    .expect("matrix serializes")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GorensteinReport {
    pub dims: Vec<usize>,
    pub palindromic: bool,
    pub bottom_is_one: bool,
    pub top_is_one: bool,
}

impl GorensteinReport {
    pub fn ok(&self) -> bool {
        self.palindromic && self.bottom_is_one && self.top_is_one
    }
}

/// All pairing matrices `k = 0..=g-2+n`, built in parallel.
pub fn all_matrices(ev: &Evaluator, mode: SetSMode) -> Result<Vec<PairingMatrix>> {
    let top = ev.context().top_degree();
    (0..=top).into_par_iter().map(|k| PairingMatrix::build(ev, mode, k)).collect()
}

pub fn gorenstein_from(matrices: &[PairingMatrix]) -> GorensteinReport {
    let dims: Vec<usize> = matrices.par_iter().map(PairingMatrix::rank).collect();
    let palindromic = dims.iter().eq(dims.iter().rev());
    GorensteinReport {
        bottom_is_one: dims.first() == Some(&1),
        top_is_one: dims.last() == Some(&1),
        palindromic,
        dims,
    }
}

/// `dim G^k` for every degree.
pub fn gorenstein_dims(ev: &Evaluator, mode: SetSMode) -> Result<GorensteinReport> {
    Ok(gorenstein_from(&all_matrices(ev, mode)?))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConjectureRow {
    pub k: u32,
    pub rank: usize,
    pub block_rank_sum: usize,
    pub subdiagonal_nonzero: usize,
    /// Diagonal blocks whose rank differs from the rank of their reference block.
    pub rank_deficient_blocks: Vec<String>,
    pub non_proportional_blocks: Vec<String>,
}

impl ConjectureRow {
    pub fn ok(&self) -> bool {
        self.rank == self.block_rank_sum
            && self.subdiagonal_nonzero == 0
            && self.rank_deficient_blocks.is_empty()
            && self.non_proportional_blocks.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConjectureReport {
    pub g: u32,
    pub n: u32,
    pub rows: Vec<ConjectureRow>,
}

impl ConjectureReport {
    pub fn ok(&self) -> bool {
        self.rows.iter().all(ConjectureRow::ok)
    }
}

/// Gorenstein-level check for one matrix given its block reports.
pub fn conjecture_row(m: &PairingMatrix, reports: &[BlockReport]) -> ConjectureRow {
    let block_rank_sum = m.blocks.iter().map(|b| rank(&m.block_entries(b))).sum();
    let tri = verify_triangular(m);
    ConjectureRow {
        k: m.k,
        rank: m.rank(),
        block_rank_sum,
        subdiagonal_nonzero: tri.subdiagonal_nonzero.len(),
        rank_deficient_blocks: reports
            .iter()
            .filter(|r| r.block_rank != r.reference_rank)
            .map(|r| r.d_part.clone())
            .collect(),
        non_proportional_blocks: reports.iter().filter(|r| !r.proportional).map(|r| r.d_part.clone()).collect(),
    }
}

pub fn conjecture_check(ev: &Evaluator, mode: SetSMode) -> Result<ConjectureReport> {
    let matrices = all_matrices(ev, mode)?;
    let rows = matrices
        .par_iter()
        .map(|m| Ok(conjecture_row(m, &block_reports(m, ev)?)))
        .collect::<Result<Vec<_>>>()?;
    let ctx = ev.context();
    Ok(ConjectureReport { g: ctx.g(), n: ctx.n(), rows })
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::taut::{parse_monomial, ratio};

    fn ev(g: u32, n: u32) -> Evaluator {
        Evaluator::builtin(RingContext::new(g, n).unwrap()).unwrap()
    }

    #[test]
    fn three_point_exceptional_block() {
        let e = ev(2, 3);
        let m = PairingMatrix::build(&e, SetSMode::Complement, 1).unwrap();
        let label = parse_monomial(e.context(), "D(1,2,3)").unwrap();
        let r = block_report_for(&m, &e, &label).unwrap();
        assert_eq!((r.rows, r.cols), (1, 1));
        assert_eq!(r.epsilon, 3);
        assert_eq!(r.predicted_constant, "-8");
        assert_eq!(r.empirical_constant.as_deref(), Some("-1/4"));
        assert!(r.proportional && r.matches_refined && !r.matches_predicted);
    }

    #[test]
    fn exceptional_free_block_has_constant_one() {
        let e = ev(2, 2);
        let m = PairingMatrix::build(&e, SetSMode::Complement, 1).unwrap();
        let r = block_report_for(&m, &e, &Monomial::one()).unwrap();
        assert_eq!(r.empirical_constant.as_deref(), Some("1"));
        assert_eq!(r.refined_constant, "1");
        assert_eq!(signed_power(3, 2, -2), ratio(-1, 4));
    }

    #[test]
    fn small_gorenstein_dims() {
        let r = gorenstein_dims(&ev(2, 1), SetSMode::Complement).unwrap();
        assert_eq!(r.dims, vec![1, 1]);
        let r = gorenstein_dims(&ev(2, 2), SetSMode::Complement).unwrap();
        assert_eq!(r.dims[1], 3);
        assert!(r.ok());
    }
}
