use std::collections::BTreeMap;
use std::ops::Range;

use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::forest::{enumerate_basis, ExceptionalForest, SetSMode, StandardMonomial};
use crate::rewrite::Evaluator;
use crate::taut::{format_rational, MarkSet, Monomial, Rational};

/// Complementary exponents `j_r = B_r - 1 - i_r` on the same vertex sets.
pub fn dual_forest(forest: &ExceptionalForest) -> ExceptionalForest {
    let exps: Vec<u32> = (0..forest.len())
        .map(|v| forest.effective_points(v) - 1 - forest.vertices()[v].exponent)
        .collect();
    forest.with_exponents(&exps)
}

/// The dual D-part of a standard monomial.
pub fn dual_d(v: &StandardMonomial) -> Monomial {
    dual_forest(v.forest()).d_monomial()
}

/// Dual of a bare D-part monomial; `None` if its sets overlap or an exponent
/// leaves the standard range.
pub fn dual_d_part(d: &Monomial) -> Option<Monomial> {
    let forest = ExceptionalForest::build(d).forest()?;
    forest.exponents_within_bounds().then(|| dual_forest(&forest).d_monomial())
}

/// Layout key of a D-part.
///
/// Compared first by the excess `Σ (i_r - j_r)` of the exponents over their
/// duals, which changes sign under [`dual_d_part`], then by the vertex sets in
/// set order with their exponents. The exceptional-free D-part has excess zero.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BlockKey {
    pub excess: i64,
    pub sets: Vec<(MarkSet, u32)>,
}

pub fn block_key(d: &Monomial) -> BlockKey {
    let forest = ExceptionalForest::build(d).forest().expect("block labels are forests");
    let excess = (0..forest.len())
        .map(|v| 2 * forest.vertices()[v].exponent as i64 + 1 - forest.effective_points(v) as i64)
        .sum();
    BlockKey { excess, sets: d.exceptional_factors() }
}

/// Rows sharing a D-part `label` against columns whose D-part is `dual_label`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub label: Monomial,
    pub dual_label: Monomial,
    pub rows: Range<usize>,
    pub cols: Range<usize>,
}

#[derive(Clone, Debug)]
pub struct PairingMatrix {
    pub g: u32,
    pub n: u32,
    pub k: u32,
    pub mode: SetSMode,
    pub rows: Vec<StandardMonomial>,
    pub cols: Vec<StandardMonomial>,
    pub entries: Vec<Vec<Rational>>,
    /// Diagonal blocks in layout order; block `b` occupies `rows[b]` × `cols[b]`.
    pub blocks: Vec<Block>,
}

impl PairingMatrix {
    /// Entries of `eval_M(row · col)` between the standard monomials of degree `k`
    /// and those of the complementary degree, laid out block by block.
    ///
    /// Blocks are ordered by decreasing [`block_key`] of their row label, which
    /// puts every block that must vanish below the diagonal. Within a block, monomials keep their
    /// enumeration order. Entries are computed in parallel on the current rayon pool.
    pub fn build(ev: &Evaluator, mode: SetSMode, k: u32) -> Result<Self> {
        let ctx = ev.context();
        let top = ctx.top_degree();
        if k > top {
            return Err(Error::DegreeOutOfRange { k, top });
        }
        let row_basis = enumerate_basis(ctx, mode, k)?;
        let col_basis = enumerate_basis(ctx, mode, top - k)?;

        let mut groups: BTreeMap<BlockKey, (Monomial, Vec<StandardMonomial>, Vec<StandardMonomial>)> =
            BTreeMap::new();
        for v in row_basis {
            let label = v.d_part();
            groups.entry(block_key(&label)).or_insert_with(|| (label, Vec::new(), Vec::new())).1.push(v);
        }
        for w in col_basis {
            let label = dual_d(&w);
            groups.entry(block_key(&label)).or_insert_with(|| (label, Vec::new(), Vec::new())).2.push(w);
        }

        let mut rows = Vec::new();
        let mut cols = Vec::new();
        let mut blocks = Vec::new();
        for (_, (label, r, c)) in groups.into_iter().rev() {
            let dual_label = dual_d_part(&label).expect("labels of standard monomials are standard");
            let rows_range = rows.len()..rows.len() + r.len();
            let cols_range = cols.len()..cols.len() + c.len();
            rows.extend(r);
            cols.extend(c);
            blocks.push(Block { label, dual_label, rows: rows_range, cols: cols_range });
        }

        let entries = rows
            .par_iter()
            .enumerate()
            .map(|(i, v)| {
                cols.iter()
                    .enumerate()
                    .map(|(j, w)| {
                        ev.eval_monomial(&v.monomial().mul(w.monomial()))
                            .map_err(|e| Error::Entry { row: i, col: j, source: Box::new(e) })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;

        Ok(PairingMatrix { g: ctx.g(), n: ctx.n(), k, mode, rows, cols, entries, blocks })
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows.len(), self.cols.len())
    }

    pub fn rank(&self) -> usize {
        super::rank::rank(&self.entries)
    }

    pub fn entry(&self, r: usize, c: usize) -> &Rational {
        &self.entries[r][c]
    }

    pub fn block_entries(&self, b: &Block) -> Vec<Vec<Rational>> {
        self.entries[b.rows.clone()].iter().map(|row| row[b.cols.clone()].to_vec()).collect()
    }

    /// Submatrix of row block `rb` against column block `cb`.
    pub fn sub_block(&self, rb: usize, cb: usize) -> Vec<Vec<Rational>> {
        let rows = self.blocks[rb].rows.clone();
        let cols = self.blocks[cb].cols.clone();
        self.entries[rows].iter().map(|row| row[cols.clone()].to_vec()).collect()
    }

    pub fn row_labels(&self) -> Vec<String> {
        self.rows.iter().map(|v| v.monomial().to_string()).collect()
    }

    pub fn col_labels(&self) -> Vec<String> {
        self.cols.iter().map(|v| v.monomial().to_string()).collect()
    }

    pub fn entry_strings(&self) -> Vec<Vec<String>> {
        self.entries.iter().map(|r| r.iter().map(format_rational).collect()).collect()
    }

    /// Comma-separated entries with a header of column labels and a leading row label.
    pub fn to_csv(&self) -> String {
        let quote = |s: &str| format!("\"{s}\"");
        let mut out = String::from("\"\"");
        for c in self.col_labels() {
            out.push(',');
            out.push_str(&quote(&c));
        }
        out.push('\n');
        for (label, row) in self.row_labels().iter().zip(self.entry_strings()) {
            out.push_str(&quote(label));
            for e in row {
                out.push(',');
                out.push_str(&e);
            }
            out.push('\n');
        }
        out
    }

    pub fn is_zero_block(&self, rb: usize, cb: usize) -> bool {
        self.sub_block(rb, cb).iter().flatten().all(Zero::is_zero)
    }
}

/// `{1..n}` relabeling sending the elements of `s` in order to `1..|s|`.
pub(crate) fn compress_perm(n: u32, s: MarkSet) -> Vec<u32> {
    let mut perm = vec![0; n as usize];
    let mut next = 1;
    for i in s.iter().chain(MarkSet::full(n).difference(s).iter()) {
        perm[i as usize - 1] = next;
        next += 1;
    }
    perm
}

#[derive(Serialize)]
pub(crate) struct MatrixJson<'a, B: Serialize> {
    pub g: u32,
    pub n: u32,
    pub k: u32,
    pub rows: Vec<String>,
    pub cols: Vec<String>,
    pub entries: Vec<Vec<String>>,
    pub blocks: &'a [B],
}
