//! Ranks of all pairing matrices and the block-structure check for small (g, n).
//!
//!     cargo run --release --example gorenstein_check

use tautring::forest::SetSMode;
use tautring::pairing::{conjecture_check, gorenstein_dims};
use tautring::rewrite::Evaluator;
use tautring::taut::RingContext;

fn main() -> tautring::Result<()> {
    for (g, n) in [(2, 1), (2, 2), (2, 3), (2, 4), (3, 1), (3, 2), (3, 3), (3, 4)] {
        let ev = Evaluator::builtin(RingContext::new(g, n)?)?;
        let dims = gorenstein_dims(&ev, SetSMode::Complement)?;
        let blocks = conjecture_check(&ev, SetSMode::Complement)?;
        println!("g={g} n={n}: dims {:?} gorenstein={} blocks={}", dims.dims, dims.ok(), blocks.ok());
    }
    Ok(())
}
