//! Reduce a polynomial to standard form and replay the certificate.
//!
//!     cargo run --example normalize_certificate -- "K1*D(1,2,3)^2 + d(1,2)*K3^2"

use tautring::rewrite::Normalizer;
use tautring::taut::{parse_polynomial, RingContext};

fn main() -> tautring::Result<()> {
    let input = std::env::args().nth(1).unwrap_or_else(|| "K1*D(1,2,3)^2 + d(1,2)*D(1,2,3)".into());
    let ctx = RingContext::new(2, 3)?;
    let p = parse_polynomial(&ctx, &input)?;
    let cert = Normalizer::new(ctx).normalize_certified(&p)?;
    print!("{cert}");
    println!("replays: {}", cert.replay());
    Ok(())
}
