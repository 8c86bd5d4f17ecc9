//! Fixed-width sets of small indices.
//!
//! Every structure in this crate is finite and small, so events, nodes and
//! prime indices are all addressed through a single 128-bit set type.

use std::fmt;

/// Largest number of elements a [`BitSet`] can hold.
pub const MAX_ELEMENTS: usize = 128;

/// A set of indices in `0..128`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct BitSet(u128);

impl BitSet {
    pub const EMPTY: BitSet = BitSet(0);

    pub fn new() -> Self {
        BitSet(0)
    }

    pub fn singleton(i: usize) -> Self {
        debug_assert!(i < MAX_ELEMENTS);
        BitSet(1u128 << i)
    }

    /// The set `{0, .., n-1}`.
    pub fn full(n: usize) -> Self {
        debug_assert!(n <= MAX_ELEMENTS);
        if n == MAX_ELEMENTS {
            BitSet(u128::MAX)
        } else {
            BitSet((1u128 << n) - 1)
        }
    }

    pub fn from_bits(bits: u128) -> Self {
        BitSet(bits)
    }

    pub fn bits(self) -> u128 {
        self.0
    }

    pub fn contains(self, i: usize) -> bool {
        i < MAX_ELEMENTS && self.0 & (1u128 << i) != 0
    }

    pub fn insert(&mut self, i: usize) {
        debug_assert!(i < MAX_ELEMENTS);
        self.0 |= 1u128 << i;
    }

    pub fn remove(&mut self, i: usize) {
        self.0 &= !(1u128 << i);
    }

    pub fn with(self, i: usize) -> Self {
        BitSet(self.0 | (1u128 << i))
    }

    pub fn without(self, i: usize) -> Self {
        BitSet(self.0 & !(1u128 << i))
    }

    pub fn union(self, other: BitSet) -> Self {
        BitSet(self.0 | other.0)
    }

    pub fn intersection(self, other: BitSet) -> Self {
        BitSet(self.0 & other.0)
    }

    pub fn difference(self, other: BitSet) -> Self {
        BitSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: BitSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: BitSet) -> bool {
        self.0 & other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Smallest element, if any.
    pub fn first(self) -> Option<usize> {
        if self.0 == 0 {
            None
        } else {
            Some(self.0.trailing_zeros() as usize)
        }
    }

    pub fn iter(self) -> BitIter {
        BitIter(self.0)
    }

    /// All subsets of `self`, including the empty set and `self`.
    pub fn subsets(self) -> Subsets {
        Subsets {
            universe: self.0,
            next: Some(0),
        }
    }

    /// Image of the set under an index map; indices mapped to `None` are dropped.
    pub fn map(self, f: impl Fn(usize) -> Option<usize>) -> BitSet {
        let mut out = BitSet::EMPTY;
        for i in self.iter() {
            if let Some(j) = f(i) {
                out.insert(j);
            }
        }
        out
    }

    /// Sort key used for deterministic output: by size, then by ascending members.
    pub fn sort_key(self) -> (usize, Vec<usize>) {
        (self.len(), self.iter().collect())
    }
}

impl FromIterator<usize> for BitSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = BitSet::EMPTY;
        for i in iter {
            s.insert(i);
        }
        s
    }
}

impl fmt::Debug for BitSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

pub struct BitIter(u128);

impl Iterator for BitIter {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(i)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for BitIter {}

/// Iterator over the subsets of a bit set (Gosper-free submask walk).
pub struct Subsets {
    universe: u128,
    next: Option<u128>,
}

impl Iterator for Subsets {
    type Item = BitSet;

    fn next(&mut self) -> Option<BitSet> {
        let cur = self.next?;
        self.next = if cur == self.universe {
            None
        } else {
            Some((cur.wrapping_sub(self.universe)) & self.universe)
        };
        Some(BitSet(cur))
    }
}

/// Sort sets deterministically (by size, then members) and remove duplicates.
pub fn sort_sets(sets: &mut Vec<BitSet>) {
    sets.sort_by_key(|s| s.sort_key());
    sets.dedup();
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subsets_enumerates_all() {
        let s: BitSet = [1, 4, 7].into_iter().collect();
        let subs: Vec<_> = s.subsets().collect();
        assert_eq!(subs.len(), 8);
        assert!(subs.iter().all(|x| x.is_subset(s)));
        assert_eq!(BitSet::EMPTY.subsets().count(), 1);
    }

    #[test]
    fn high_bits() {
        let mut s = BitSet::EMPTY;
        s.insert(127);
        s.insert(64);
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![64, 127]);
        assert_eq!(BitSet::full(128).len(), 128);
        assert_eq!(s.first(), Some(64));
    }
}
