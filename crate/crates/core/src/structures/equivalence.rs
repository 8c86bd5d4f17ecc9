use crate::bitset::BitSet;

/// An equivalence relation on `0..n`, stored as a class representative per element.
///
/// The representative of a class is its smallest member.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Equivalence {
    rep: Vec<usize>,
}

impl Equivalence {
    pub fn identity(n: usize) -> Self {
        Equivalence {
            rep: (0..n).collect(),
        }
    }

    /// Build from (possibly overlapping) classes; overlapping classes are merged.
    pub fn from_classes(n: usize, classes: &[BitSet]) -> Self {
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut i: usize) -> usize {
            while parent[i] != i {
                parent[i] = parent[parent[i]];
                i = parent[i];
            }
            i
        }
        for class in classes {
            let mut members = class.iter().filter(|&i| i < n);
            if let Some(first) = members.next() {
                for other in members {
                    let (a, b) = (find(&mut parent, first), find(&mut parent, other));
                    if a != b {
                        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                        parent[hi] = lo;
                    }
                }
            }
        }
        let rep = (0..n).map(|i| find(&mut parent, i)).collect();
        Equivalence { rep }
    }

    /// Build from a class key per element: elements with equal keys are equivalent.
    pub fn from_keys<K: Eq + std::hash::Hash>(keys: &[K]) -> Self {
        let mut first: std::collections::HashMap<&K, usize> = std::collections::HashMap::new();
        let rep = keys
            .iter()
            .enumerate()
            .map(|(i, k)| *first.entry(k).or_insert(i))
            .collect();
        Equivalence { rep }
    }

    pub fn len(&self) -> usize {
        self.rep.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rep.is_empty()
    }

    pub fn rep(&self, i: usize) -> usize {
        self.rep[i]
    }

    pub fn equiv(&self, i: usize, j: usize) -> bool {
        self.rep[i] == self.rep[j]
    }

    pub fn class_of(&self, i: usize) -> BitSet {
        let r = self.rep[i];
        (0..self.rep.len()).filter(|&j| self.rep[j] == r).collect()
    }

    /// All classes, ordered by their smallest member.
    pub fn classes(&self) -> Vec<BitSet> {
        let mut out: Vec<BitSet> = Vec::new();
        let mut slot = vec![usize::MAX; self.rep.len()];
        for i in 0..self.rep.len() {
            let r = self.rep[i];
            if slot[r] == usize::MAX {
                slot[r] = out.len();
                out.push(BitSet::EMPTY);
            }
            out[slot[r]].insert(i);
        }
        out
    }

    /// Classes with more than one member.
    pub fn nontrivial_classes(&self) -> Vec<BitSet> {
        self.classes().into_iter().filter(|c| c.len() > 1).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.rep.iter().enumerate().all(|(i, &r)| i == r)
    }

    /// Whether no two distinct members of `set` are equivalent.
    pub fn is_unambiguous(&self, set: BitSet) -> bool {
        let mut seen = BitSet::EMPTY;
        for i in set.iter() {
            let r = self.rep[i];
            if seen.contains(r) {
                return false;
            }
            seen.insert(r);
        }
        true
    }

    /// Representatives of the classes met by `set`.
    pub fn class_set(&self, set: BitSet) -> BitSet {
        set.iter().map(|i| self.rep[i]).collect()
    }

    /// Whether `set` is a union of classes.
    pub fn is_closed(&self, set: BitSet) -> bool {
        set.iter().all(|i| self.class_of(i).is_subset(set))
    }

    /// Restrict to the listed old indices; new index `k` is `kept[k]`.
    pub fn restrict(&self, kept: &[usize]) -> Equivalence {
        let keys: Vec<usize> = kept.iter().map(|&i| self.rep[i]).collect();
        Equivalence::from_keys(&keys)
    }

    pub(crate) fn is_well_formed(&self) -> bool {
        self.rep
            .iter()
            .enumerate()
            .all(|(i, &r)| r <= i && self.rep[r] == r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merging_overlapping_classes() {
        let a: BitSet = [0, 2].into_iter().collect();
        let b: BitSet = [2, 3].into_iter().collect();
        let eq = Equivalence::from_classes(5, &[a, b]);
        assert!(eq.equiv(0, 3));
        assert!(!eq.equiv(0, 1));
        assert_eq!(eq.classes().len(), 3);
        assert!(eq.is_well_formed());
        assert!(!eq.is_unambiguous([0, 3].into_iter().collect()));
        assert!(eq.is_unambiguous([0, 1].into_iter().collect()));
    }

    #[test]
    fn restrict_keeps_classes() {
        let eq = Equivalence::from_classes(4, &[[1, 3].into_iter().collect()]);
        let r = eq.restrict(&[1, 2, 3]);
        assert!(r.equiv(0, 2));
        assert!(!r.equiv(0, 1));
    }
}
