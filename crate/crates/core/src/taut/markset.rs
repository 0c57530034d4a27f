use std::cmp::Ordering;
use std::fmt;

use serde::{Serialize, Serializer};

/// A subset of the markings `{1..n}`, stored as a bitmask (bit `i-1` for marking `i`).
///
/// Ordering: larger sets first, then lexicographic on the ascending element list.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct MarkSet(u32);

pub const MAX_MARKINGS: u32 = 31;

impl MarkSet {
    pub const EMPTY: MarkSet = MarkSet(0);

    pub fn from_bits(bits: u32) -> Self {
        MarkSet(bits)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    /// `{1..n}`.
    pub fn full(n: u32) -> Self {
        if n == 0 {
            MarkSet(0)
        } else {
            MarkSet(u32::MAX >> (32 - n))
        }
    }

    pub fn singleton(i: u32) -> Self {
        debug_assert!((1..=MAX_MARKINGS).contains(&i));
        MarkSet(1 << (i - 1))
    }

    pub fn len(self) -> u32 {
        self.0.count_ones()
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, i: u32) -> bool {
        (1..=MAX_MARKINGS).contains(&i) && self.0 & (1 << (i - 1)) != 0
    }

    pub fn insert(&mut self, i: u32) {
        self.0 |= 1 << (i - 1);
    }

    pub fn remove(&mut self, i: u32) {
        self.0 &= !(1 << (i - 1));
    }

    pub fn union(self, other: Self) -> Self {
        MarkSet(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        MarkSet(self.0 & other.0)
    }

    pub fn difference(self, other: Self) -> Self {
        MarkSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_proper_subset(self, other: Self) -> bool {
        self.is_subset(other) && self != other
    }

    pub fn is_disjoint(self, other: Self) -> bool {
        self.0 & other.0 == 0
    }

    /// Nested or disjoint.
    pub fn compatible(self, other: Self) -> bool {
        self.is_disjoint(other) || self.is_subset(other) || other.is_subset(self)
    }

    pub fn min(self) -> Option<u32> {
        (self.0 != 0).then(|| self.0.trailing_zeros() + 1)
    }

    pub fn iter(self) -> impl Iterator<Item = u32> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let i = bits.trailing_zeros();
                bits &= bits - 1;
                Some(i + 1)
            }
        })
    }

    pub fn to_vec(self) -> Vec<u32> {
        self.iter().collect()
    }

    /// Image under a permutation given as `perm[i-1] = σ(i)`.
    pub fn permute(self, perm: &[u32]) -> Self {
        self.iter().map(|i| perm[(i - 1) as usize]).collect()
    }

    /// All subsets of `self`, in increasing bitmask order.
    pub fn subsets(self) -> impl Iterator<Item = MarkSet> {
        let full = self.0;
        let mut sub: u32 = 0;
        let mut done = false;
        std::iter::from_fn(move || {
            if done {
                return None;
            }
            let out = MarkSet(sub);
            if sub == full {
                done = true;
            } else {
                sub = (sub.wrapping_sub(full)) & full;
            }
            Some(out)
        })
    }
}

impl FromIterator<u32> for MarkSet {
    fn from_iter<T: IntoIterator<Item = u32>>(iter: T) -> Self {
        let mut s = MarkSet::EMPTY;
        for i in iter {
            s.insert(i);
        }
        s
    }
}

impl Ord for MarkSet {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .len()
            .cmp(&self.len())
            .then_with(|| self.iter().cmp(other.iter()))
    }
}

impl PartialOrd for MarkSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for MarkSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (idx, i) in self.iter().enumerate() {
            if idx > 0 {
                f.write_str(",")?;
            }
            write!(f, "{i}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for MarkSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for MarkSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter())
    }
}
