//! The evaluation map on a few top-degree classes. The socle generator
//! `κ_{g-2} K_1 … K_n` evaluates to 1 by construction.

use tautring::rewrite::{socle_generator, Evaluator};
use tautring::taut::{format_rational, parse_polynomial, RingContext};

fn main() -> tautring::Result<()> {
    for (g, n, classes) in [
        (2, 2, &["K1*K2", "K1*d(1,2)", "K1^2", "d(1,2)^2"][..]),
        (2, 3, &["K1*D(1,2,3)^2", "K1*d(1,2)*d(1,3)", "K2*K3*D(1,2,3)"][..]),
        (3, 3, &["k1*K1*K2*K3", "K1^2*K2*K3", "k1*d(1,2)*d(1,3)*K1"][..]),
    ] {
        let ctx = RingContext::new(g, n)?;
        let ev = Evaluator::builtin(ctx)?;
        println!("g={g} n={n}: socle generator -> {}", format_rational(&ev.eval_m(&socle_generator(&ctx))?));
        for c in classes {
            let value = ev.eval_m(&parse_polynomial(&ctx, c)?)?;
            println!("  eval_M({c}) = {}", format_rational(&value));
        }
    }
    Ok(())
}
