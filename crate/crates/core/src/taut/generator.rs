use std::fmt;

use serde::{Deserialize, Serialize};

use super::markset::{MarkSet, MAX_MARKINGS};
use crate::error::{Error, Result};

/// Genus and number of markings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RingContext {
    g: u32,
    n: u32,
}

impl RingContext {
    pub fn new(g: u32, n: u32) -> Result<Self> {
        if g < 2 {
            return Err(Error::InvalidContext(format!("genus must be at least 2, got {g}")));
        }
        if !(1..=MAX_MARKINGS).contains(&n) {
            return Err(Error::InvalidContext(format!(
                "number of markings must lie in 1..={MAX_MARKINGS}, got {n}"
            )));
        }
        Ok(RingContext { g, n })
    }

    pub fn g(&self) -> u32 {
        self.g
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Degree of the one-dimensional socle, `g - 2 + n`.
    pub fn top_degree(&self) -> u32 {
        self.g - 2 + self.n
    }

    /// Largest kappa index that is not identically zero.
    pub fn max_kappa(&self) -> u32 {
        self.g - 2
    }

    pub fn markings(&self) -> MarkSet {
        MarkSet::full(self.n)
    }

    /// The same genus with a different number of markings.
    pub fn with_markings(&self, n: u32) -> Result<Self> {
        RingContext::new(self.g, n)
    }

    pub fn kappa(&self, i: u32) -> Result<Generator> {
        if i < 1 || i > self.max_kappa() {
            return Err(Error::InvalidGenerator(format!(
                "kappa index {i} outside 1..={} for genus {}",
                self.max_kappa(),
                self.g
            )));
        }
        Ok(Generator::Kappa(i))
    }

    pub fn point_k(&self, i: u32) -> Result<Generator> {
        self.check_marking(i)?;
        Ok(Generator::PointK(i))
    }

    pub fn diag(&self, i: u32, j: u32) -> Result<Generator> {
        self.check_marking(i)?;
        self.check_marking(j)?;
        Generator::diag(i, j)
    }

    pub fn exc(&self, set: MarkSet) -> Result<Generator> {
        if !set.is_subset(self.markings()) {
            return Err(Error::InvalidGenerator(format!("{set} is not a subset of 1..={}", self.n)));
        }
        Generator::exc(set)
    }

    fn check_marking(&self, i: u32) -> Result<()> {
        if i < 1 || i > self.n {
            return Err(Error::InvalidGenerator(format!("marking {i} outside 1..={}", self.n)));
        }
        Ok(())
    }
}

/// One generator of the tautological ring of the rational-tails space.
///
/// `Diag(i, j)` always has `i < j` and denotes the pull-back of the diagonal class
/// from the fibred power of the universal curve. `Exc(I)` is the exceptional
/// divisor with `|I| >= 3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Generator {
    Kappa(u32),
    PointK(u32),
    Diag(u32, u32),
    Exc(MarkSet),
}

impl Generator {
    pub fn diag(i: u32, j: u32) -> Result<Self> {
        match i.cmp(&j) {
            std::cmp::Ordering::Less => Ok(Generator::Diag(i, j)),
            std::cmp::Ordering::Greater => Ok(Generator::Diag(j, i)),
            std::cmp::Ordering::Equal => {
                Err(Error::InvalidGenerator(format!("diagonal needs distinct markings, got d({i},{i})")))
            }
        }
    }

    pub fn exc(set: MarkSet) -> Result<Self> {
        if set.len() < 3 {
            return Err(Error::InvalidGenerator(format!(
                "exceptional divisor needs at least 3 markings, got {set}"
            )));
        }
        Ok(Generator::Exc(set))
    }

    pub fn degree(&self) -> u32 {
        match self {
            Generator::Kappa(i) => *i,
            _ => 1,
        }
    }

    pub fn is_exceptional(&self) -> bool {
        matches!(self, Generator::Exc(_))
    }

    /// Markings the generator refers to.
    pub fn support(&self) -> MarkSet {
        match *self {
            Generator::Kappa(_) => MarkSet::EMPTY,
            Generator::PointK(i) => MarkSet::singleton(i),
            Generator::Diag(i, j) => MarkSet::singleton(i).union(MarkSet::singleton(j)),
            Generator::Exc(s) => s,
        }
    }

    /// Transport along `perm[i-1] = σ(i)`.
    pub fn permute(&self, perm: &[u32]) -> Self {
        let p = |i: u32| perm[(i - 1) as usize];
        match *self {
            Generator::Kappa(i) => Generator::Kappa(i),
            Generator::PointK(i) => Generator::PointK(p(i)),
            Generator::Diag(i, j) => {
                let (a, b) = (p(i), p(j));
                Generator::Diag(a.min(b), a.max(b))
            }
            Generator::Exc(s) => Generator::Exc(s.permute(perm)),
        }
    }

    pub fn check(&self, ctx: &RingContext) -> Result<()> {
        match *self {
            Generator::Kappa(i) if i >= 1 => Ok(()),
            Generator::Kappa(i) => Err(Error::InvalidGenerator(format!("kappa index {i}"))),
            Generator::PointK(i) => ctx.point_k(i).map(|_| ()),
            Generator::Diag(i, j) if i < j => ctx.diag(i, j).map(|_| ()),
            Generator::Diag(i, j) => Err(Error::InvalidGenerator(format!("unsorted diagonal d({i},{j})"))),
            Generator::Exc(s) => ctx.exc(s).map(|_| ()),
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::Kappa(i) => write!(f, "k{i}"),
            Generator::PointK(i) => write!(f, "K{i}"),
            Generator::Diag(i, j) => write!(f, "d({i},{j})"),
            Generator::Exc(s) => {
                f.write_str("D(")?;
                for (idx, i) in s.iter().enumerate() {
                    if idx > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{i}")?;
                }
                f.write_str(")")
            }
        }
    }
}
