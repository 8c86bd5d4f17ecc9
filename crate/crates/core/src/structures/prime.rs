use std::collections::HashSet;

use crate::bitset::{sort_sets, BitSet};
use crate::caps::Caps;
use crate::error::{Error, Result};

use super::{name_order, Consistency, EquivFamily, Equivalence};

/// A prime event structure: events, a causal partial order and a consistency relation.
///
/// Events are kept sorted by name, so index order is name order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PrimeES {
    names: Vec<String>,
    /// `down[e]` is `[e]`, including `e` itself.
    down: Vec<BitSet>,
    con: Consistency,
}

impl PrimeES {
    /// Build from strict causal pairs `(a, b)` meaning `a < b`; the order is transitively closed.
    ///
    /// `con` lists generating consistent sets; `None` makes every set consistent.
    pub fn new(
        names: Vec<String>,
        lt: &[(usize, usize)],
        con: Option<Vec<BitSet>>,
    ) -> Result<PrimeES> {
        let n = names.len();
        let mut down: Vec<BitSet> = (0..n).map(BitSet::singleton).collect();
        for &(a, b) in lt {
            down[b].insert(a);
        }
        close_transitively(&mut down);
        let con = match con {
            Some(sets) => Consistency::from_generators(sets),
            None => Consistency::all(n),
        };
        PrimeES::from_parts(names, down, con)
    }

    /// Build from already closed down-sets, sorting events by name.
    pub(crate) fn from_parts(
        names: Vec<String>,
        down: Vec<BitSet>,
        con: Consistency,
    ) -> Result<PrimeES> {
        let perm = name_order(&names)?;
        let n = names.len();
        let mut sorted_names = vec![String::new(); n];
        let mut sorted_down = vec![BitSet::EMPTY; n];
        for old in 0..n {
            sorted_names[perm[old]] = names[old].clone();
            sorted_down[perm[old]] = down[old].map(|i| Some(perm[i]));
        }
        Ok(PrimeES {
            names: sorted_names,
            down: sorted_down,
            con: con.map(|i| Some(perm[i])),
        })
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

    pub fn events(&self) -> BitSet {
        BitSet::full(self.len())
    }

    /// `a ≤ b`.
    pub fn le(&self, a: usize, b: usize) -> bool {
        self.down[b].contains(a)
    }

    /// `[e]`.
    pub fn down(&self, e: usize) -> BitSet {
        self.down[e]
    }

    /// `[e)`.
    pub fn strict_down(&self, e: usize) -> BitSet {
        self.down[e].without(e)
    }

    /// Immediate predecessors of `e`.
    pub fn covers(&self, e: usize) -> BitSet {
        let below = self.strict_down(e);
        below
            .iter()
            .filter(|&a| !below.iter().any(|b| b != a && self.down[b].contains(a)))
            .collect()
    }

    pub fn con(&self) -> &Consistency {
        &self.con
    }

    pub fn is_consistent(&self, set: BitSet) -> bool {
        self.con.contains(set)
    }

    pub fn down_closure(&self, set: BitSet) -> BitSet {
        set.iter()
            .fold(BitSet::EMPTY, |acc, e| acc.union(self.down[e]))
    }

    pub fn is_down_closed(&self, set: BitSet) -> bool {
        set.iter().all(|e| self.down[e].is_subset(set))
    }

    /// Maximal elements of `set` with respect to `≤`.
    pub fn maximal(&self, set: BitSet) -> BitSet {
        set.iter()
            .filter(|&e| !set.iter().any(|f| f != e && self.down[f].contains(e)))
            .collect()
    }

    /// Length of the longest chain ending at `e`, minus one.
    pub fn depth(&self, e: usize) -> usize {
        self.strict_down(e)
            .iter()
            .map(|a| self.depth(a) + 1)
            .max()
            .unwrap_or(0)
    }

    /// All down-closed consistent sets, in deterministic order.
    pub fn configurations(&self, caps: &Caps) -> Result<Vec<BitSet>> {
        let n = self.len();
        let mut seen: HashSet<BitSet> = HashSet::from([BitSet::EMPTY]);
        let mut stack = vec![BitSet::EMPTY];
        while let Some(x) = stack.pop() {
            for e in 0..n {
                if x.contains(e) || !self.strict_down(e).is_subset(x) {
                    continue;
                }
                let y = x.with(e);
                if self.con.contains(y) && seen.insert(y) {
                    if seen.len() > caps.configs {
                        return Err(Error::ConfigExplosion { cap: caps.configs });
                    }
                    stack.push(y);
                }
            }
        }
        let mut out: Vec<BitSet> = seen.into_iter().collect();
        sort_sets(&mut out);
        Ok(out)
    }

    /// Restrict to the events in `keep`, with the induced order and consistency.
    pub fn restrict(&self, keep: BitSet) -> PrimeES {
        let kept: Vec<usize> = keep.iter().collect();
        let mut index = vec![None; self.len()];
        for (k, &e) in kept.iter().enumerate() {
            index[e] = Some(k);
        }
        PrimeES {
            names: kept.iter().map(|&e| self.names[e].clone()).collect(),
            down: kept
                .iter()
                .map(|&e| self.down[e].map(|i| index[i]))
                .collect(),
            con: self.con.map(|i| index[i]),
        }
    }
}

/// Close reflexive down-sets under transitivity.
pub(crate) fn close_transitively(down: &mut [BitSet]) {
    loop {
        let mut changed = false;
        for b in 0..down.len() {
            let mut acc = down[b];
            for a in down[b].iter() {
                acc = acc.union(down[a]);
            }
            if acc != down[b] {
                down[b] = acc;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
}

/// A prime event structure with an equivalence relation on events.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Ese {
    prime: PrimeES,
    equiv: Equivalence,
}

impl Ese {
    pub fn new(prime: PrimeES, equiv: Equivalence) -> Ese {
        assert_eq!(
            prime.len(),
            equiv.len(),
            "equivalence must cover the events"
        );
        Ese { prime, equiv }
    }

    /// Build from strict causal pairs, generating consistent sets and nontrivial classes.
    pub fn build(
        names: Vec<String>,
        lt: &[(usize, usize)],
        con: Option<Vec<BitSet>>,
        classes: &[BitSet],
    ) -> Result<Ese> {
        let n = names.len();
        let keys: Vec<usize> = {
            let eq = Equivalence::from_classes(n, classes);
            (0..n).map(|i| eq.rep(i)).collect()
        };
        let perm = name_order(&names)?;
        let prime = PrimeES::new(names, lt, con)?;
        let mut sorted_keys = vec![0; n];
        for old in 0..n {
            sorted_keys[perm[old]] = keys[old];
        }
        Ok(Ese {
            prime,
            equiv: Equivalence::from_keys(&sorted_keys),
        })
    }

    pub fn with_identity(prime: PrimeES) -> Ese {
        let n = prime.len();
        Ese {
            prime,
            equiv: Equivalence::identity(n),
        }
    }

    pub fn prime(&self) -> &PrimeES {
        &self.prime
    }

    pub fn into_prime(self) -> PrimeES {
        self.prime
    }

    pub fn equiv(&self) -> &Equivalence {
        &self.equiv
    }

    pub fn len(&self) -> usize {
        self.prime.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prime.is_empty()
    }

    pub fn names(&self) -> &[String] {
        self.prime.names()
    }

    pub fn name(&self, e: usize) -> &str {
        self.prime.name(e)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.prime.index_of(name)
    }

    /// The equivalence family of configurations.
    pub fn family(&self, caps: &Caps) -> Result<EquivFamily> {
        let configs = self.prime.configurations(caps)?;
        Ok(EquivFamily::from_sorted(
            self.prime.names().to_vec(),
            configs,
            self.equiv.clone(),
        ))
    }

    /// Restrict to the events in `keep`.
    pub fn restrict(&self, keep: BitSet) -> Ese {
        let kept: Vec<usize> = keep.iter().collect();
        Ese {
            prime: self.prime.restrict(keep),
            equiv: self.equiv.restrict(&kept),
        }
    }
}

/// The equivalence family `(C(p), ≡)` of an ese.
pub fn configurations_ese(p: &Ese, caps: &Caps) -> Result<EquivFamily> {
    p.family(caps)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(ns: &[&str]) -> Vec<String> {
        ns.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn events_are_sorted_by_name() {
        // d, a with a < d given in reverse name order
        let p = PrimeES::new(names(&["d", "a"]), &[(1, 0)], None).unwrap();
        assert_eq!(p.names(), &["a", "d"]);
        assert!(p.le(0, 1));
        assert!(!p.le(1, 0));
    }

    #[test]
    fn chain_configurations() {
        let p = PrimeES::new(names(&["a", "d"]), &[(0, 1)], None).unwrap();
        let configs = p.configurations(&Caps::default()).unwrap();
        assert_eq!(
            configs,
            vec![BitSet::EMPTY, BitSet::singleton(0), BitSet::full(2)]
        );
    }

    #[test]
    fn transitive_closure_and_covers() {
        let p = PrimeES::new(names(&["a", "b", "c"]), &[(0, 1), (1, 2)], None).unwrap();
        assert!(p.le(0, 2));
        assert_eq!(p.covers(2), BitSet::singleton(1));
        assert_eq!(p.depth(2), 2);
    }

    #[test]
    fn empty_ese_has_one_configuration() {
        let p = Ese::build(vec![], &[], None, &[]).unwrap();
        let f = p.family(&Caps::default()).unwrap();
        assert_eq!(f.configs(), &[BitSet::EMPTY]);
    }

    #[test]
    fn conflict_limits_configurations() {
        let p = PrimeES::new(
            names(&["a", "b"]),
            &[],
            Some(vec![BitSet::singleton(0), BitSet::singleton(1)]),
        )
        .unwrap();
        assert_eq!(p.configurations(&Caps::default()).unwrap().len(), 3);
        let caps = Caps {
            configs: 2,
            ..Caps::default()
        };
        assert!(matches!(
            p.configurations(&caps),
            Err(Error::ConfigExplosion { cap: 2 })
        ));
    }
}
