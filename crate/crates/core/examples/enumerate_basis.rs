//! Standard monomials of every degree for g = 2, n = 3, with their forests.
//!
//!     cargo run --example enumerate_basis

use tautring::forest::{enumerate_basis, SetSMode};
use tautring::taut::RingContext;

fn main() -> tautring::Result<()> {
    let ctx = RingContext::new(2, 3)?;
    for k in 0..=ctx.top_degree() {
        let basis = enumerate_basis(&ctx, SetSMode::Complement, k)?;
        println!("degree {k}: {} monomials", basis.len());
        for v in basis {
            let roots: Vec<String> = v.forest().root_sets().map(|s| s.to_string()).collect();
            println!("  {:<22} S={:<9} p={} roots=[{}]", v.monomial().to_string(), v.marking_set().to_string(), v.filtration(), roots.join(" "));
        }
    }
    Ok(())
}
