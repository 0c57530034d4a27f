//! Genus 4 needs the values of κ monomials on M_4, supplied as a table.
//!
//!     cargo run --example kappa_table -- examples/data/genus4_kappa.txt

use tautring::rewrite::{socle_generator, Evaluator, KappaTable};
use tautring::taut::{format_rational, parse_polynomial, RingContext};

fn main() -> tautring::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data/genus4_kappa.txt").into());
    let table = KappaTable::load(4, path.as_ref())?;
    print!("{}", table.to_text());
    let ctx = RingContext::new(4, 2)?;
    let ev = Evaluator::new(ctx, table)?;
    println!("socle generator -> {}", format_rational(&ev.eval_m(&socle_generator(&ctx))?));
    for c in ["k1^2*K1*K2", "k1*K1^2*K2", "K1^3*K2", "K1^2*d(1,2)^2"] {
        println!("eval_M({c}) = {}", format_rational(&ev.eval_m(&parse_polynomial(&ctx, c)?)?));
    }
    Ok(())
}
