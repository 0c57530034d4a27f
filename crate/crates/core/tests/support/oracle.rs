//! Independent top-degree evaluator for the rational-tails space.
//!
//! Instead of rewriting to standard monomials, each exceptional divisor `D_I` is
//! handled by restriction: `D_I` is the product of a rational-tails space with
//! markings `(P \ I) ∪ {b}` and `M_{0, I ∪ {s}}`. Generators restrict factor by
//! factor, the self-intersection of `D_I` is `-ψ_b - ψ_s`, and genus-zero integrals
//! are computed by restricting to boundary divisors until only ψ classes remain.
//! Exceptional-free genus-g classes are pushed forward one marking at a time in
//! ascending label order.

#![allow(dead_code)]

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use tautring::taut::{Generator, Monomial, Rational};

type Mask = u64;

fn bit(l: u32) -> Mask {
    1u64 << l
}

fn labels(m: Mask) -> impl Iterator<Item = u32> {
    let mut bits = m;
    std::iter::from_fn(move || {
        if bits == 0 {
            None
        } else {
            let l = bits.trailing_zeros();
            bits &= bits - 1;
            Some(l)
        }
    })
}

fn fresh(used: Mask) -> u32 {
    (!used).trailing_zeros()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Gen {
    Kappa(u32),
    K(u32),
    Diag(u32, u32),
    Exc(Mask),
}

fn diag(a: u32, b: u32) -> Gen {
    assert_ne!(a, b);
    Gen::Diag(a.min(b), a.max(b))
}

type Mon = BTreeMap<Gen, u32>;
type Poly = BTreeMap<Mon, Rational>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Gen0 {
    Psi(u32),
    Bdy(Mask),
}

type Mon0 = BTreeMap<Gen0, u32>;

fn add<K: Ord + Clone>(p: &mut BTreeMap<K, Rational>, k: K, c: Rational) {
    if c.is_zero() {
        return;
    }
    let e = p.entry(k.clone()).or_insert_with(Rational::zero);
    *e += c;
    if e.is_zero() {
        p.remove(&k);
    }
}

fn mul_gen<G: Ord + Copy>(m: &mut BTreeMap<G, u32>, g: G, e: u32) {
    if e > 0 {
        *m.entry(g).or_insert(0) += e;
    }
}

fn gen_degree(g: &Gen) -> u32 {
    match g {
        Gen::Kappa(i) => *i,
        _ => 1,
    }
}

/// Restriction of a class to `D_I`: sum of (genus-side monomial, genus-zero monomial) pairs.
type Split = BTreeMap<(Mon, Mon0), Rational>;

fn split_one() -> Split {
    let mut s = Split::new();
    s.insert((Mon::new(), Mon0::new()), Rational::one());
    s
}

fn split_mul(a: &Split, b: &Split) -> Split {
    let mut out = Split::new();
    for ((g1, z1), c1) in a {
        for ((g2, z2), c2) in b {
            let mut g = g1.clone();
            for (k, e) in g2 {
                mul_gen(&mut g, *k, *e);
            }
            let mut z = z1.clone();
            for (k, e) in z2 {
                mul_gen(&mut z, *k, *e);
            }
            add(&mut out, (g, z), c1 * c2);
        }
    }
    out
}

fn split_genus(terms: &[(Gen, i64)]) -> Split {
    let mut s = Split::new();
    for (g, c) in terms {
        let mut m = Mon::new();
        mul_gen(&mut m, *g, 1);
        add(&mut s, (m, Mon0::new()), Rational::from_integer((*c).into()));
    }
    s
}

pub struct Oracle {
    g: u32,
    kappa: BTreeMap<Vec<u32>, Rational>,
}

impl Oracle {
    /// `kappa` maps kappa partitions of `g - 2` (parts non-increasing) to their value.
    pub fn new(g: u32, kappa: BTreeMap<Vec<u32>, Rational>) -> Self {
        Oracle { g, kappa }
    }

    pub fn builtin(g: u32) -> Self {
        let mut kappa = BTreeMap::new();
        match g {
            2 => {
                kappa.insert(vec![], Rational::one());
            }
            3 => {
                kappa.insert(vec![1], Rational::one());
            }
            _ => panic!("no built-in kappa values for genus {g}"),
        }
        Oracle::new(g, kappa)
    }

    fn kappa0(&self) -> Rational {
        Rational::from_integer((2 * self.g as i64 - 2).into())
    }

    /// Value of a top-degree monomial on `n` markings, normalised so that
    /// `κ_{g-2} ∏ K_i` evaluates to 1.
    pub fn evaluate(&self, n: u32, m: &Monomial) -> Rational {
        let points: Mask = (1..=n).fold(0, |acc, i| acc | bit(i));
        let mon = self.import(m);
        let raw = self.raw(points, &mon);
        raw / self.generator_raw(points)
    }

    fn generator_raw(&self, points: Mask) -> Rational {
        let mut gen = Mon::new();
        for l in labels(points) {
            mul_gen(&mut gen, Gen::K(l), 1);
        }
        let mut scale = Rational::one();
        if self.g == 2 {
            scale = self.kappa0();
        } else {
            mul_gen(&mut gen, Gen::Kappa(self.g - 2), 1);
        }
        scale * self.raw(points, &gen)
    }

    fn import(&self, m: &Monomial) -> Mon {
        let mut out = Mon::new();
        for (g, e) in m.factors() {
            let gen = match g {
                Generator::Kappa(i) => Gen::Kappa(i),
                Generator::PointK(i) => Gen::K(i),
                Generator::Diag(i, j) => Gen::Diag(i, j),
                Generator::Exc(s) => Gen::Exc(s.iter().fold(0, |acc, i| acc | bit(i))),
            };
            mul_gen(&mut out, gen, e);
        }
        out
    }

    /// Pushforward of a class on the rational-tails space with marking labels
    /// `points`, expressed in units of the kappa table.
    fn raw(&self, points: Mask, m: &Mon) -> Rational {
        let exc = m.keys().find_map(|g| match g {
            Gen::Exc(s) => Some(*s),
            _ => None,
        });
        let Some(set) = exc else {
            return self.raw_free(points, m.clone());
        };
        let b = fresh(points);
        let star = fresh(points | set);
        let genus_points = (points & !set) | bit(b);
        let zero_labels = set | bit(star);

        let mut rest = m.clone();
        let e = rest.get_mut(&Gen::Exc(set)).unwrap();
        *e -= 1;
        if *e == 0 {
            rest.remove(&Gen::Exc(set));
        }

        let mut acc = split_one();
        for (g, e) in &rest {
            let r = self.restrict(*g, set, b, star, genus_points);
            for _ in 0..*e {
                acc = split_mul(&acc, &r);
                if acc.is_empty() {
                    return Rational::zero();
                }
            }
        }
        let genus_top = self.g - 2 + genus_points.count_ones();
        let zero_top = zero_labels.count_ones() - 3;
        let mut total = Rational::zero();
        for ((gm, zm), c) in acc {
            let gd: u32 = gm.iter().map(|(g, e)| gen_degree(g) * e).sum();
            let zd: u32 = zm.values().sum();
            if gd != genus_top || zd != zero_top {
                continue;
            }
            let z = integrate_zero(zero_labels, star, &zm);
            if z.is_zero() {
                continue;
            }
            total += c * z * self.raw(genus_points, &gm);
        }
        total
    }

    fn psi_genus(&self, b: u32, genus_points: Mask) -> Split {
        // ψ_b = K_b + Σ_c d(b,c) - Σ_{J ∋ b, |J| >= 3} (|J| - 2) D_J
        let mut terms = vec![(Gen::K(b), 1i64)];
        for c in labels(genus_points & !bit(b)) {
            terms.push((diag(b, c), 1));
        }
        for j in subsets_containing(genus_points, bit(b), 3) {
            terms.push((Gen::Exc(j), -(j.count_ones() as i64 - 2)));
        }
        split_genus(&terms)
    }

    fn delta_genus(&self, a: u32, c: u32, genus_points: Mask) -> Split {
        // two-point boundary class d(a,c) - Σ_{J ⊇ {a,c}, |J| >= 3} D_J
        let mut terms = vec![(diag(a, c), 1i64)];
        for j in subsets_containing(genus_points, bit(a) | bit(c), 3) {
            terms.push((Gen::Exc(j), -1));
        }
        split_genus(&terms)
    }

    fn restrict(&self, g: Gen, set: Mask, b: u32, star: u32, genus_points: Mask) -> Split {
        let inside = |l: u32| set & bit(l) != 0;
        match g {
            Gen::Kappa(i) => split_genus(&[(Gen::Kappa(i), 1)]),
            Gen::K(a) => split_genus(&[(Gen::K(if inside(a) { b } else { a }), 1)]),
            Gen::Diag(a, c) => match (inside(a), inside(c)) {
                (true, true) => split_genus(&[(Gen::K(b), -1)]),
                (true, false) => split_genus(&[(diag(b, c), 1)]),
                (false, true) => split_genus(&[(diag(a, b), 1)]),
                (false, false) => split_genus(&[(diag(a, c), 1)]),
            },
            Gen::Exc(j) => {
                if j == set {
                    let mut normal = Split::new();
                    for (k, c) in self.psi_genus(b, genus_points) {
                        add(&mut normal, k, -c);
                    }
                    let mut z = Mon0::new();
                    mul_gen(&mut z, Gen0::Psi(star), 1);
                    add(&mut normal, (Mon::new(), z), -Rational::one());
                    normal
                } else if j & set == set {
                    let image = (j & !set) | bit(b);
                    if image.count_ones() == 2 {
                        let c = labels(j & !set).next().unwrap();
                        self.delta_genus(b, c, genus_points)
                    } else {
                        split_genus(&[(Gen::Exc(image), 1)])
                    }
                } else if j & set == j {
                    let mut s = Split::new();
                    let mut z = Mon0::new();
                    mul_gen(&mut z, Gen0::Bdy(j), 1);
                    s.insert((Mon::new(), z), Rational::one());
                    s
                } else if j & set == 0 {
                    split_genus(&[(Gen::Exc(j), 1)])
                } else {
                    Split::new()
                }
            }
        }
    }

    /// Pushforward of an exceptional-free monomial, contracting the smallest label first.
    fn raw_free(&self, points: Mask, m: Mon) -> Rational {
        let mut coef = Rational::one();
        let mut m = m;
        let mut pts = points;
        while pts != 0 {
            let p = pts.trailing_zeros();
            pts &= pts - 1;
            let partners: Vec<(u32, u32)> = m
                .iter()
                .filter_map(|(g, e)| match g {
                    Gen::Diag(a, c) if *a == p => Some((*c, *e)),
                    Gen::Diag(a, c) if *c == p => Some((*a, *e)),
                    _ => None,
                })
                .collect();
            let kp = m.remove(&Gen::K(p)).unwrap_or(0);
            if let Some(&(c0, _)) = partners.iter().min() {
                for (c, e) in &partners {
                    m.remove(&diag(p, *c));
                    if *c == c0 {
                        // d^e = d·(-K)^{e-1}, K_p = K_{c0} on the diagonal, then push d forward
                        if (e - 1) % 2 == 1 {
                            coef = -coef;
                        }
                        mul_gen(&mut m, Gen::K(c0), e - 1);
                    } else {
                        mul_gen(&mut m, diag(c0, *c), *e);
                    }
                }
                mul_gen(&mut m, Gen::K(c0), kp);
            } else {
                if kp == 0 {
                    return Rational::zero();
                }
                let idx = kp - 1;
                if idx == 0 {
                    coef *= self.kappa0();
                } else if idx > self.g - 2 {
                    return Rational::zero();
                } else {
                    mul_gen(&mut m, Gen::Kappa(idx), 1);
                }
            }
        }
        let mut partition: Vec<u32> = Vec::new();
        for (g, e) in &m {
            match g {
                Gen::Kappa(i) => partition.extend(std::iter::repeat_n(*i, *e as usize)),
                other => panic!("leftover generator {other:?}"),
            }
        }
        partition.sort_unstable_by(|a, b| b.cmp(a));
        let deg: u32 = partition.iter().sum();
        if deg != self.g - 2 {
            return Rational::zero();
        }
        coef * self.kappa.get(&partition).cloned().expect("kappa value")
    }
}

fn subsets_containing(universe: Mask, must: Mask, min_size: u32) -> Vec<Mask> {
    let free = universe & !must;
    let mut out = Vec::new();
    let mut sub: Mask = 0;
    loop {
        let s = sub | must;
        if s.count_ones() >= min_size {
            out.push(s);
        }
        if sub == free {
            break;
        }
        sub = sub.wrapping_sub(free) & free;
    }
    out
}

fn factorial(n: u32) -> Rational {
    (1..=n as i64).fold(Rational::one(), |acc, k| acc * Rational::from_integer(k.into()))
}

/// `∫_{M_{0, labels}}` of a monomial in ψ classes and boundary divisors `Bdy(B)`
/// (`B` avoids `reference`).
fn integrate_zero(labels_mask: Mask, reference: u32, m: &Mon0) -> Rational {
    let count = labels_mask.count_ones();
    let deg: u32 = m.values().sum();
    if count < 3 || deg != count - 3 {
        return Rational::zero();
    }
    let bdy = m.keys().find_map(|g| match g {
        Gen0::Bdy(b) => Some(*b),
        _ => None,
    });
    let Some(side) = bdy else {
        let mut denom = Rational::one();
        for e in m.values() {
            denom *= factorial(*e);
        }
        return factorial(count - 3) / denom;
    };
    let h = fresh(labels_mask);
    let left = side | bit(h);
    let right = (labels_mask & !side) | bit(h);

    let mut rest = m.clone();
    let e = rest.get_mut(&Gen0::Bdy(side)).unwrap();
    *e -= 1;
    if *e == 0 {
        rest.remove(&Gen0::Bdy(side));
    }
    // pairs (left monomial, right monomial)
    let mut acc: BTreeMap<(Mon0, Mon0), Rational> = BTreeMap::new();
    acc.insert((Mon0::new(), Mon0::new()), Rational::one());
    for (g, e) in &rest {
        let mut r: BTreeMap<(Mon0, Mon0), Rational> = BTreeMap::new();
        let single = |g: Gen0, on_left: bool| {
            let mut m = Mon0::new();
            mul_gen(&mut m, g, 1);
            if on_left {
                (m, Mon0::new())
            } else {
                (Mon0::new(), m)
            }
        };
        match *g {
            Gen0::Psi(x) => {
                r.insert(single(Gen0::Psi(x), side & bit(x) != 0), Rational::one());
            }
            Gen0::Bdy(c) => {
                if c == side {
                    r.insert(single(Gen0::Psi(h), true), -Rational::one());
                    r.insert(single(Gen0::Psi(h), false), -Rational::one());
                } else if c & side == c {
                    r.insert(single(Gen0::Bdy(c), true), Rational::one());
                } else if c & side == side {
                    r.insert(single(Gen0::Bdy((c & !side) | bit(h)), false), Rational::one());
                } else if c & side == 0 {
                    r.insert(single(Gen0::Bdy(c), false), Rational::one());
                }
            }
        }
        for _ in 0..*e {
            let mut next = BTreeMap::new();
            for ((l1, r1), c1) in &acc {
                for ((l2, r2), c2) in &r {
                    let mut l = l1.clone();
                    for (k, e) in l2 {
                        mul_gen(&mut l, *k, *e);
                    }
                    let mut rr = r1.clone();
                    for (k, e) in r2 {
                        mul_gen(&mut rr, *k, *e);
                    }
                    add(&mut next, (l, rr), c1 * c2);
                }
            }
            acc = next;
        }
    }
    let mut total = Rational::zero();
    for ((l, r), c) in acc {
        let a = integrate_zero(left, h, &l);
        if a.is_zero() {
            continue;
        }
        total += c * a * integrate_zero(right, reference, &r);
    }
    total
}
