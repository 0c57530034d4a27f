//! Relations, normalization to standard monomials, and top-degree evaluation.

mod eval;
mod kappa;
mod normalize;
pub mod relations;

pub use eval::{socle_generator, Evaluator};
pub use kappa::KappaTable;
pub use normalize::{
    Certificate, CertifiedStep, Normalizer, NormalizerConfig, PivotRule, RelationUse, Step, DEFAULT_MAX_STEPS,
};
pub use relations::{Family, RelationInstance, RelationParams};
