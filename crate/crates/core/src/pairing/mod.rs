//! Intersection pairings between complementary-degree standard monomials.

mod matrix;
mod rank;
mod report;

pub use matrix::{block_key, dual_d, dual_d_part, dual_forest, Block, BlockKey, PairingMatrix};
pub use rank::rank;
pub use report::{
    all_matrices, block_constant_report, block_marking_set, block_report_for, block_reports, conjecture_check,
    conjecture_row, gorenstein_dims, gorenstein_from, matrix_json, verify_triangular, BlockReport, ConjectureReport,
    ConjectureRow, GorensteinReport, ReferenceEvaluators, TriangularReport, Violation,
};
