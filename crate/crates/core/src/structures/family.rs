use std::collections::HashSet;

use crate::bitset::{sort_sets, BitSet};
use crate::error::Result;

use super::{name_order, Equivalence};

/// A family of configurations with an equivalence on its events.
#[derive(Debug, Clone)]
pub struct EquivFamily {
    names: Vec<String>,
    configs: Vec<BitSet>,
    index: HashSet<BitSet>,
    equiv: Equivalence,
}

impl PartialEq for EquivFamily {
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names && self.configs == other.configs && self.equiv == other.equiv
    }
}

impl Eq for EquivFamily {}

impl EquivFamily {
    /// Build from configurations over `names`; `equiv` defaults to the identity.
    pub fn new(
        names: Vec<String>,
        configs: Vec<BitSet>,
        equiv: Option<Equivalence>,
    ) -> Result<EquivFamily> {
        let perm = name_order(&names)?;
        let n = names.len();
        let equiv = equiv.unwrap_or_else(|| Equivalence::identity(n));
        let mut sorted_names = vec![String::new(); n];
        let mut keys = vec![0; n];
        for old in 0..n {
            sorted_names[perm[old]] = names[old].clone();
            keys[perm[old]] = equiv.rep(old);
        }
        let configs = configs
            .into_iter()
            .map(|c| c.map(|i| perm.get(i).copied()))
            .collect();
        Ok(EquivFamily::from_sorted(
            sorted_names,
            configs,
            Equivalence::from_keys(&keys),
        ))
    }

    /// Build from names already in sorted order.
    pub(crate) fn from_sorted(
        names: Vec<String>,
        mut configs: Vec<BitSet>,
        equiv: Equivalence,
    ) -> EquivFamily {
        sort_sets(&mut configs);
        let index = configs.iter().copied().collect();
        EquivFamily {
            names,
            configs,
            index,
            equiv,
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, e: usize) -> &str {
        &self.names[e]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.binary_search_by(|n| n.as_str().cmp(name)).ok()
    }

    /// Configurations in deterministic order (by size, then members).
    pub fn configs(&self) -> &[BitSet] {
        &self.configs
    }

    pub fn contains(&self, x: BitSet) -> bool {
        self.index.contains(&x)
    }

    pub fn equiv(&self) -> &Equivalence {
        &self.equiv
    }

    pub fn with_equiv(&self, equiv: Equivalence) -> EquivFamily {
        assert_eq!(equiv.len(), self.len());
        EquivFamily {
            equiv,
            ..self.clone()
        }
    }

    /// Union of all configurations.
    pub fn support(&self) -> BitSet {
        self.configs.iter().fold(BitSet::EMPTY, |a, c| a.union(*c))
    }

    pub fn maximal_configs(&self) -> Vec<BitSet> {
        self.configs
            .iter()
            .filter(|x| !self.configs.iter().any(|y| y != *x && x.is_subset(*y)))
            .copied()
            .collect()
    }

    /// Whether some configuration contains `set`.
    pub fn is_compatible(&self, set: BitSet) -> bool {
        self.configs.iter().any(|c| set.is_subset(*c))
    }

    /// Configurations contained in `x`.
    pub fn subconfigs(&self, x: BitSet) -> impl Iterator<Item = BitSet> + '_ {
        self.configs.iter().copied().filter(move |y| y.is_subset(x))
    }

    /// Drop events occurring in no configuration.
    pub fn restrict_to_support(&self) -> EquivFamily {
        let support = self.support();
        if support == BitSet::full(self.len()) {
            return self.clone();
        }
        self.restrict(support)
    }

    /// Keep only the events in `keep`; configurations are intersected with it.
    pub(crate) fn restrict(&self, keep: BitSet) -> EquivFamily {
        let kept: Vec<usize> = keep.iter().collect();
        let mut index = vec![None; self.len()];
        for (k, &e) in kept.iter().enumerate() {
            index[e] = Some(k);
        }
        EquivFamily::from_sorted(
            kept.iter().map(|&e| self.names[e].clone()).collect(),
            self.configs.iter().map(|c| c.map(|i| index[i])).collect(),
            self.equiv.restrict(&kept),
        )
    }

    /// Render a set of events as `{a,b}`.
    pub fn format_set(&self, set: BitSet) -> String {
        super::format_set(&self.names, set)
    }
}

/// Configurations `x` containing an event `e` such that `x` is the only
/// configuration `y` with `e ∈ y ⊆ x`.
pub fn irreducibles(f: &EquivFamily) -> Vec<BitSet> {
    f.configs()
        .iter()
        .copied()
        .filter(|&x| {
            x.iter()
                .any(|e| f.subconfigs(x).filter(|y| y.contains(e)).all(|y| y == x))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn singleton_irreducible() {
        let f = EquivFamily::new(
            vec!["a".into()],
            vec![BitSet::EMPTY, BitSet::singleton(0)],
            None,
        )
        .unwrap();
        assert_eq!(irreducibles(&f), vec![BitSet::singleton(0)]);
    }

    #[test]
    fn new_sorts_names_and_configs() {
        let f = EquivFamily::new(
            vec!["b".into(), "a".into()],
            vec![BitSet::full(2), BitSet::singleton(0), BitSet::EMPTY],
            None,
        )
        .unwrap();
        assert_eq!(f.names(), &["a", "b"]);
        assert_eq!(f.configs()[1], BitSet::singleton(1));
        assert!(f.contains(BitSet::full(2)));
    }

    #[test]
    fn support_restriction() {
        let f = EquivFamily::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![BitSet::EMPTY, BitSet::singleton(2)],
            None,
        )
        .unwrap();
        let r = f.restrict_to_support();
        assert_eq!(r.names(), &["c"]);
        assert_eq!(r.configs(), &[BitSet::EMPTY, BitSet::singleton(0)]);
    }
}
