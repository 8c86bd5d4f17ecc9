use std::collections::HashSet;

use crate::bitset::{sort_sets, BitSet, MAX_ELEMENTS};
use crate::error::{Error, Result};
use crate::structures::{close_transitively, EquivFamily};

/// A finite labelled partial order: node `n` carries the family event `label(n)`.
///
/// Node identity is internal; only the labels and the order are semantic.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Realisation {
    labels: Vec<usize>,
    /// `down[n]` is `[n]`, including `n`.
    down: Vec<BitSet>,
}

impl Realisation {
    /// Build from labels and strict pairs `(a, b)` meaning `a < b`, closed transitively.
    pub fn new(labels: Vec<usize>, lt: &[(usize, usize)]) -> Result<Realisation> {
        if labels.len() > MAX_ELEMENTS {
            return Err(Error::TooManyEvents {
                count: labels.len(),
                max: MAX_ELEMENTS,
            });
        }
        let mut down: Vec<BitSet> = (0..labels.len()).map(BitSet::singleton).collect();
        for &(a, b) in lt {
            if a >= labels.len() || b >= labels.len() {
                return Err(Error::Parse(format!("order pair ({a},{b}) out of range")));
            }
            down[b].insert(a);
        }
        close_transitively(&mut down);
        for n in 0..labels.len() {
            if down[n].iter().any(|m| m != n && down[m].contains(n)) {
                return Err(Error::Parse("realisation order has a cycle".into()));
            }
        }
        Ok(Realisation { labels, down })
    }

    /// Build from reflexive, transitively closed down-sets.
    pub(crate) fn from_down(labels: Vec<usize>, down: Vec<BitSet>) -> Realisation {
        debug_assert_eq!(labels.len(), down.len());
        Realisation { labels, down }
    }

    /// A chain realisation `labels[0] < labels[1] < ...`.
    pub fn chain(labels: &[usize]) -> Realisation {
        let down = (0..labels.len()).map(|i| BitSet::full(i + 1)).collect();
        Realisation {
            labels: labels.to_vec(),
            down,
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn nodes(&self) -> BitSet {
        BitSet::full(self.len())
    }

    pub fn label(&self, n: usize) -> usize {
        self.labels[n]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// `[n]`.
    pub fn down(&self, n: usize) -> BitSet {
        self.down[n]
    }

    /// `[n)`.
    pub fn strict_down(&self, n: usize) -> BitSet {
        self.down[n].without(n)
    }

    pub fn le(&self, a: usize, b: usize) -> bool {
        self.down[b].contains(a)
    }

    /// Nodes strictly above `n`.
    pub fn strict_up(&self, n: usize) -> BitSet {
        (0..self.len())
            .filter(|&m| m != n && self.down[m].contains(n))
            .collect()
    }

    /// Immediate predecessors of `n`.
    /// Add a node labelled `label` whose strict past is the down-closed set `past`.
    pub fn extend(&self, label: usize, past: BitSet) -> Realisation {
        let mut labels = self.labels.clone();
        let mut down = self.down.clone();
        labels.push(label);
        down.push(past.with(self.len()));
        Realisation { labels, down }
    }

    /// Drop the covering pair `a < b`; the result is still a partial order.
    pub fn without_cover(&self, a: usize, b: usize) -> Realisation {
        debug_assert!(self.covers(b).contains(a));
        let mut down = self.down.clone();
        down[b].remove(a);
        Realisation {
            labels: self.labels.clone(),
            down,
        }
    }

    pub fn covers(&self, n: usize) -> BitSet {
        let below = self.strict_down(n);
        below
            .iter()
            .filter(|&a| !below.iter().any(|b| b != a && self.down[b].contains(a)))
            .collect()
    }

    /// Number of pairs `a ≤ b`, reflexive ones included.
    pub fn order_size(&self) -> usize {
        self.down.iter().map(|d| d.len()).sum()
    }

    /// The unique node above every other node, if any.
    pub fn top(&self) -> Option<usize> {
        let all = self.nodes();
        (0..self.len()).find(|&n| self.down[n] == all)
    }

    pub fn is_down_closed(&self, set: BitSet) -> bool {
        set.iter().all(|n| self.down[n].is_subset(set))
    }

    pub fn down_closure(&self, set: BitSet) -> BitSet {
        set.iter().fold(BitSet::EMPTY, |a, n| a.union(self.down[n]))
    }

    /// Image of a set of nodes under the labelling.
    pub fn image(&self, set: BitSet) -> BitSet {
        set.iter().map(|n| self.labels[n]).collect()
    }

    /// Down-closed subsets of `within` (which must itself be down-closed), in deterministic order.
    pub fn down_sets_within(&self, within: BitSet) -> Vec<BitSet> {
        let mut seen: HashSet<BitSet> = HashSet::from([BitSet::EMPTY]);
        let mut stack = vec![BitSet::EMPTY];
        while let Some(x) = stack.pop() {
            for n in within.difference(x).iter() {
                if self.strict_down(n).is_subset(x) {
                    let y = x.with(n);
                    if seen.insert(y) {
                        stack.push(y);
                    }
                }
            }
        }
        let mut out: Vec<BitSet> = seen.into_iter().collect();
        sort_sets(&mut out);
        out
    }

    /// All down-closed subsets of the carrier.
    pub fn down_sets(&self) -> Vec<BitSet> {
        self.down_sets_within(self.nodes())
    }

    /// The sub-realisation on `keep` with the restricted order; node `k` of the
    /// result is the `k`-th smallest member of `keep`.
    pub fn restrict(&self, keep: BitSet) -> Realisation {
        let kept: Vec<usize> = keep.iter().collect();
        let mut index = vec![None; self.len()];
        for (k, &n) in kept.iter().enumerate() {
            index[n] = Some(k);
        }
        Realisation {
            labels: kept.iter().map(|&n| self.labels[n]).collect(),
            down: kept
                .iter()
                .map(|&n| self.down[n].map(|m| index[m]))
                .collect(),
        }
    }

    /// Renumber nodes: old node `n` becomes `order.position(n)`.
    pub fn reorder(&self, order: &[usize]) -> Realisation {
        let mut index = vec![0; self.len()];
        for (k, &n) in order.iter().enumerate() {
            index[n] = k;
        }
        Realisation {
            labels: order.iter().map(|&n| self.labels[n]).collect(),
            down: order
                .iter()
                .map(|&n| self.down[n].map(|m| Some(index[m])))
                .collect(),
        }
    }

    /// Injective as a function to events.
    pub fn is_injective(&self) -> bool {
        self.image(self.nodes()).len() == self.len()
    }

    pub(crate) fn down_vec(&self) -> &[BitSet] {
        &self.down
    }
}

/// Whether every down-closed subset of the carrier images to a configuration.
pub fn is_realisation(r: &Realisation, f: &EquivFamily) -> bool {
    r.labels().iter().all(|&l| l < f.len())
        && r.down_sets().into_iter().all(|x| f.contains(r.image(x)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::caps::Caps;
    use crate::fixtures;

    #[test]
    fn docs_realisations() {
        let f = fixtures::docs_family(&Caps::default());
        let (a, b, d) = (0, 1, 2);
        assert!(is_realisation(&Realisation::chain(&[a]), &f));
        assert!(is_realisation(&Realisation::chain(&[a, b, d]), &f));
        assert!(!is_realisation(&Realisation::chain(&[d]), &f));
    }

    #[test]
    fn cycles_rejected() {
        assert!(Realisation::new(vec![0, 1], &[(0, 1), (1, 0)]).is_err());
    }

    #[test]
    fn down_sets_of_v() {
        let r = Realisation::new(vec![0, 1, 2], &[(0, 2), (1, 2)]).unwrap();
        assert_eq!(r.down_sets().len(), 5);
        assert_eq!(r.top(), Some(2));
        assert_eq!(r.covers(2), [0, 1].into_iter().collect());
    }
}
