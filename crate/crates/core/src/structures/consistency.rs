use crate::bitset::{sort_sets, BitSet};

/// A subset-closed consistency relation, stored by its maximal members.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Consistency {
    generators: Vec<BitSet>,
}

impl Consistency {
    /// Every subset of `0..n` is consistent.
    pub fn all(n: usize) -> Self {
        Consistency {
            generators: vec![BitSet::full(n)],
        }
    }

    /// The downward closure of `sets`; non-maximal inputs are discarded.
    pub fn from_generators(sets: impl IntoIterator<Item = BitSet>) -> Self {
        let mut sets: Vec<BitSet> = sets.into_iter().collect();
        sort_sets(&mut sets);
        let maximal: Vec<BitSet> = sets
            .iter()
            .filter(|s| !sets.iter().any(|t| t != *s && s.is_subset(*t)))
            .copied()
            .collect();
        Consistency {
            generators: if maximal.is_empty() {
                vec![BitSet::EMPTY]
            } else {
                maximal
            },
        }
    }

    pub fn contains(&self, set: BitSet) -> bool {
        self.generators.iter().any(|g| set.is_subset(*g))
    }

    /// Maximal consistent sets, in deterministic order.
    pub fn generators(&self) -> &[BitSet] {
        &self.generators
    }

    pub fn is_total(&self, n: usize) -> bool {
        self.contains(BitSet::full(n))
    }

    /// Re-index through `f`, dropping elements mapped to `None`.
    pub fn map(&self, f: impl Fn(usize) -> Option<usize>) -> Consistency {
        Consistency::from_generators(self.generators.iter().map(|g| g.map(&f)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_are_maximal() {
        let ab: BitSet = [0, 1].into_iter().collect();
        let a = BitSet::singleton(0);
        let c = BitSet::singleton(2);
        let con = Consistency::from_generators([a, ab, c]);
        assert_eq!(con.generators(), &[c, ab]);
        assert!(con.contains(BitSet::EMPTY));
        assert!(!con.contains([0, 2].into_iter().collect()));
        assert!(Consistency::from_generators([]).contains(BitSet::EMPTY));
    }
}
