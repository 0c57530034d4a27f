#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use tautring::taut::{Generator, MarkSet, Monomial, RingContext};

/// All generators of the ring, exceptional divisors listed `exc_weight` times to
/// make products of nested or overlapping sets common.
pub fn generator_pool(ctx: &RingContext, exc_weight: usize) -> Vec<Generator> {
    let n = ctx.n();
    let mut pool = Vec::new();
    for i in 1..=ctx.max_kappa() {
        pool.push(Generator::Kappa(i));
    }
    for i in 1..=n {
        pool.push(Generator::PointK(i));
        for j in i + 1..=n {
            pool.push(Generator::Diag(i, j));
        }
    }
    for s in MarkSet::full(n).subsets().filter(|s| s.len() >= 3) {
        for _ in 0..exc_weight {
            pool.push(Generator::Exc(s));
        }
    }
    pool
}

/// Random monomial of exactly the given degree.
pub fn random_monomial<R: Rng>(rng: &mut R, ctx: &RingContext, degree: u32, exc_weight: usize) -> Monomial {
    let pool = generator_pool(ctx, exc_weight);
    let mut m = Monomial::one();
    let mut left = degree;
    while left > 0 {
        let g = *pool.iter().filter(|g| g.degree() <= left).collect::<Vec<_>>().choose(rng).unwrap();
        m.mul_generator(*g, 1);
        left -= g.degree();
    }
    m
}

/// Random permutation of `1..=n` in the `perm[i-1] = σ(i)` convention.
pub fn random_perm<R: Rng>(rng: &mut R, n: u32) -> Vec<u32> {
    let mut p: Vec<u32> = (1..=n).collect();
    p.shuffle(rng);
    p
}

/// Random monomial whose exceptional sets are pairwise nested or disjoint.
pub fn random_laminar_monomial<R: Rng>(rng: &mut R, ctx: &RingContext, degree: u32) -> Monomial {
    let sets: Vec<MarkSet> = MarkSet::full(ctx.n()).subsets().filter(|s| s.len() >= 3).collect();
    let mut m = Monomial::one();
    let mut chosen: Vec<MarkSet> = Vec::new();
    let mut left = degree;
    if !sets.is_empty() {
        let wanted = rng.gen_range(0..=degree);
        for _ in 0..wanted {
            let pick = *sets.choose(rng).unwrap();
            if chosen.contains(&pick) || chosen.iter().all(|c| c.compatible(pick)) {
                chosen.push(pick);
                m.mul_generator(Generator::Exc(pick), 1);
                left -= 1;
            }
        }
    }
    m.mul(&random_monomial(rng, ctx, left, 0))
}

/// The socle monomial `κ_{g-2} K_1 … K_n` with each point class replaced, with
/// probability one half, by a random divisor (exceptional sets kept laminar).
pub fn random_near_socle<R: Rng>(rng: &mut R, ctx: &RingContext) -> Monomial {
    let n = ctx.n();
    let sets: Vec<MarkSet> = MarkSet::full(n).subsets().filter(|s| s.len() >= 3).collect();
    let mut m = Monomial::one();
    if ctx.g() > 2 {
        m.mul_generator(Generator::Kappa(ctx.g() - 2), 1);
    }
    let mut chosen: Vec<MarkSet> = Vec::new();
    for i in 1..=n {
        let mut g = Generator::PointK(i);
        if rng.gen_bool(0.5) {
            match rng.gen_range(0..3) {
                0 if !sets.is_empty() => {
                    let pick = *sets.choose(rng).unwrap();
                    if chosen.contains(&pick) || chosen.iter().all(|c| c.compatible(pick)) {
                        chosen.push(pick);
                        g = Generator::Exc(pick);
                    }
                }
                1 if n >= 2 => {
                    let mut j = rng.gen_range(1..=n);
                    while j == i {
                        j = rng.gen_range(1..=n);
                    }
                    g = Generator::Diag(i.min(j), i.max(j));
                }
                _ => g = Generator::PointK(rng.gen_range(1..=n)),
            }
        }
        m.mul_generator(g, 1);
    }
    m
}
