//! The rewriting evaluator against the restriction oracle.

mod support;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use support::oracle::Oracle;
use rand::Rng;
use support::random::{random_laminar_monomial, random_monomial, random_near_socle};
use tautring::rewrite::relations::vertex_relation;
use tautring::rewrite::Evaluator;
use tautring::taut::{MarkSet, Polynomial, Rational, RingContext};

fn oracle_poly(o: &Oracle, n: u32, p: &Polynomial) -> Rational {
    p.terms().map(|(m, c)| c * o.evaluate(n, m)).sum()
}

#[test]
fn random_top_degree_monomials_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut total, mut total_nonzero) = (0, 0);
    for (g, n, samples) in [(2, 1, 10), (2, 2, 30), (2, 3, 60), (2, 4, 80), (2, 5, 60), (2, 6, 20), (3, 1, 10), (3, 2, 30), (3, 3, 60), (3, 4, 60), (3, 5, 30)] {
        let ctx = RingContext::new(g, n).unwrap();
        let ev = Evaluator::builtin(ctx).unwrap();
        let oracle = Oracle::builtin(g);
        let mut nonzero = 0;
        for _ in 0..samples {
            let m = match rng.gen_range(0..4) {
                0 | 1 => random_near_socle(&mut rng, &ctx),
                2 => random_laminar_monomial(&mut rng, &ctx, ctx.top_degree()),
                _ => random_monomial(&mut rng, &ctx, ctx.top_degree(), 3),
            };
            let ours = ev.eval_monomial(&m).unwrap();
            assert_eq!(ours, oracle.evaluate(n, &m), "g={g} n={n} m={m}");
            nonzero += usize::from(ours != Rational::from_integer(0.into()));
        }
        eprintln!("g={g} n={n}: {nonzero}/{samples} nonzero");
        total_nonzero += nonzero;
        total += samples;
    }
    assert!(total_nonzero * 4 >= total, "samples too degenerate: {total_nonzero}/{total} nonzero");
}

/// Vertex relations whose pivot sits inside a block, which the printed third
/// family does not cover, still vanish against every complementary monomial tried.
#[test]
fn vertex_relations_vanish() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let g = 2;
    let oracle = Oracle::builtin(g);
    let set = |v: &[u32]| v.iter().copied().collect::<MarkSet>();
    let cases: Vec<(u32, MarkSet, Vec<MarkSet>, u32)> = vec![
        (4, set(&[1, 2, 3, 4]), vec![set(&[1, 2, 3])], 4),
        (4, set(&[1, 2, 3, 4]), vec![set(&[1, 2, 3])], 1),
        (5, set(&[1, 2, 3, 4, 5]), vec![set(&[1, 2, 3])], 2),
        (6, set(&[1, 2, 3, 4, 5, 6]), vec![set(&[1, 2, 3]), set(&[4, 5, 6])], 1),
        (6, set(&[1, 2, 3, 4, 5, 6]), vec![set(&[1, 2, 3]), set(&[4, 5, 6])], 5),
        (5, set(&[1, 2, 3, 4]), vec![], 3),
    ];
    for (n, top, children, pivot) in cases {
        let ctx = RingContext::new(g, n).unwrap();
        let rel = vertex_relation(&ctx, top, &children, pivot).unwrap();
        let deg = rel.polynomial.homogeneous_degree().unwrap();
        let samples = if n >= 6 { 6 } else { 20 };
        for _ in 0..samples {
            let w = random_monomial(&mut rng, &ctx, ctx.top_degree() - deg, 2);
            let p = rel.polynomial.mul_monomial(&w);
            assert_eq!(oracle_poly(&oracle, n, &p), Rational::from_integer(0.into()), "{rel} times {w}");
        }
    }
}
