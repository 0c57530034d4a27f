use thiserror::Error;

use crate::taut::Monomial;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid ring context: {0}")]
    InvalidContext(String),

    #[error("invalid generator: {0}")]
    InvalidGenerator(String),

    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("degree {k} out of range 0..={top}")]
    DegreeOutOfRange { k: u32, top: u32 },

    #[error("expected degree {expected}, found {found}")]
    WrongDegree { expected: u32, found: u32 },

    #[error("monomial {0} still carries exceptional divisors after normalization")]
    ResidualExceptional(Monomial),

    #[error("rewrite budget of {budget} steps exhausted while reducing {monomial}")]
    NonTermination { budget: u64, monomial: Monomial },

    #[error("kappa table for genus {g} has no entry for partition {partition:?}")]
    MissingKappaEntry { g: u32, partition: Vec<u32> },

    #[error("kappa table: {0}")]
    KappaTable(String),

    #[error("rejected relation parameters: {0}")]
    InvalidRelation(String),

    #[error("block {label} is not proportional to its reference block")]
    ProportionalityFailure { label: String },

    #[error("{0}")]
    Io(String),

    #[error("evaluating entry ({row}, {col}): {source}")]
    Entry {
        row: usize,
        col: usize,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
