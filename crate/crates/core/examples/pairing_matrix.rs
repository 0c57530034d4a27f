//! A pairing matrix with its block decomposition and block constants.
//!
//!     cargo run --release --example pairing_matrix -- 2 4 2

use tautring::forest::SetSMode;
use tautring::pairing::{block_reports, verify_triangular, PairingMatrix};
use tautring::rewrite::Evaluator;
use tautring::taut::RingContext;

fn main() -> tautring::Result<()> {
    let args: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let (g, n, k) = match args[..] {
        [g, n, k] => (g, n, k),
        _ => (2, 3, 1),
    };
    let ev = Evaluator::builtin(RingContext::new(g, n)?)?;
    let m = PairingMatrix::build(&ev, SetSMode::Complement, k)?;
    let (r, c) = m.shape();
    println!("g={g} n={n} k={k}: {r}x{c}, rank {}", m.rank());
    for b in &m.blocks {
        println!("  block {} against {}: rows {:?} cols {:?}", b.label, b.dual_label, b.rows, b.cols);
    }
    let tri = verify_triangular(&m);
    println!("predicted zeros {}, violations {}", tri.predicted_zero, tri.violations.len());
    for rep in block_reports(&m, &ev)? {
        println!(
            "  {}: S={} eps={} empirical={} predicted={} proportional={}",
            rep.d_part,
            rep.s,
            rep.epsilon,
            rep.empirical_constant.as_deref().unwrap_or("-"),
            rep.predicted_constant,
            rep.proportional
        );
    }
    Ok(())
}
