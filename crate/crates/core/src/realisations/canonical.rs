//! Canonical codes of labelled posets.
//!
//! The code of a labelled poset is the lexicographically least sequence of
//! entries `(key, positions of all strict predecessors)` over its linear
//! extensions. Two labelled posets have equal codes iff they are isomorphic.

use std::cmp::Ordering;

use crate::bitset::BitSet;

use super::Realisation;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalPosetCode(Vec<(usize, BitSet)>);

impl CanonicalPosetCode {
    pub fn entries(&self) -> &[(usize, BitSet)] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Rebuild the labelled poset the code describes, in code order.
    pub fn decode(&self) -> Realisation {
        let labels = self.0.iter().map(|(k, _)| *k).collect();
        let down = self
            .0
            .iter()
            .enumerate()
            .map(|(i, (_, preds))| preds.with(i))
            .collect();
        Realisation::from_down(labels, down)
    }
}

/// Canonical code using the node labels as keys.
pub fn canonical_code(r: &Realisation) -> CanonicalPosetCode {
    canonical_order(r, r.labels()).0
}

/// Canonical code and the linear extension attaining it, under arbitrary node keys.
pub fn canonical_order(r: &Realisation, keys: &[usize]) -> (CanonicalPosetCode, Vec<usize>) {
    let mut search = Search {
        r,
        keys,
        ups: (0..r.len()).map(|n| r.strict_up(n)).collect(),
        best: None,
    };
    let mut pos = vec![usize::MAX; r.len()];
    search.run(&mut Vec::new(), &mut Vec::new(), &mut pos, BitSet::EMPTY);
    let (code, order) = search.best.expect("search always completes one extension");
    (CanonicalPosetCode(code), order)
}

/// The realisation renumbered along its canonical linear extension.
pub fn canonical_form(r: &Realisation) -> (CanonicalPosetCode, Realisation) {
    let (code, order) = canonical_order(r, r.labels());
    (code, r.reorder(&order))
}

struct Search<'a> {
    r: &'a Realisation,
    keys: &'a [usize],
    ups: Vec<BitSet>,
    best: Option<(Vec<(usize, BitSet)>, Vec<usize>)>,
}

impl Search<'_> {
    fn entry(&self, n: usize, pos: &[usize]) -> (usize, BitSet) {
        (
            self.keys[n],
            self.r.strict_down(n).iter().map(|m| pos[m]).collect(),
        )
    }

    fn run(
        &mut self,
        code: &mut Vec<(usize, BitSet)>,
        order: &mut Vec<usize>,
        pos: &mut Vec<usize>,
        placed: BitSet,
    ) {
        let len = code.len();
        if let Some((best, _)) = &self.best {
            match code[..].cmp(&best[..len]) {
                Ordering::Greater => return,
                Ordering::Equal if len == self.r.len() => return,
                _ => {}
            }
        }
        if len == self.r.len() {
            self.best = Some((code.clone(), order.clone()));
            return;
        }
        let ready: Vec<usize> = self
            .r
            .nodes()
            .difference(placed)
            .iter()
            .filter(|&n| self.r.strict_down(n).is_subset(placed))
            .collect();
        let entries: Vec<(usize, BitSet)> = ready.iter().map(|&n| self.entry(n, pos)).collect();
        let least = *entries
            .iter()
            .min()
            .expect("a finite poset always has a ready node");
        let mut tried: Vec<BitSet> = Vec::new();
        for (k, &n) in ready.iter().enumerate() {
            if entries[k] != least || tried.contains(&self.ups[n]) {
                continue;
            }
            tried.push(self.ups[n]);
            pos[n] = len;
            code.push(least);
            order.push(n);
            self.run(code, order, pos, placed.with(n));
            order.pop();
            code.pop();
            pos[n] = usize::MAX;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn isomorphic_posets_share_codes() {
        // a < c, b isolated, written in two node orders
        let r1 = Realisation::new(vec![0, 1, 2], &[(0, 2)]).unwrap();
        let r2 = Realisation::new(vec![2, 1, 0], &[(2, 0)]).unwrap();
        assert_eq!(canonical_code(&r1), canonical_code(&r2));
        let r3 = Realisation::new(vec![0, 1, 2], &[(1, 2)]).unwrap();
        assert_ne!(canonical_code(&r1), canonical_code(&r3));
    }

    #[test]
    fn decode_round_trip() {
        let r = Realisation::new(vec![3, 1, 1, 0], &[(1, 0), (2, 0), (3, 1)]).unwrap();
        let (code, form) = canonical_form(&r);
        assert_eq!(code.decode(), form);
        assert_eq!(canonical_code(&form), code);
    }

    #[test]
    fn symmetric_branches_resolved() {
        // two c-nodes over a shared a, only one of them below d
        let r = Realisation::new(vec![0, 2, 2, 3], &[(0, 1), (0, 2), (1, 3)]).unwrap();
        let s = Realisation::new(vec![0, 2, 2, 3], &[(0, 1), (0, 2), (2, 3)]).unwrap();
        assert_eq!(canonical_code(&r), canonical_code(&s));
    }
}
