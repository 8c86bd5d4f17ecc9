use std::collections::HashSet;

use crate::bitset::{sort_sets, BitSet, MAX_ELEMENTS};
use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::structures::EquivFamily;

use super::{canonical_form, is_realisation_map, CanonicalPosetCode, Realisation, RealisationMap};

/// The prime extremal realisations of a family, one per isomorphism class.
///
/// Prime `p` has top label `labels[p]` and strict past `below[p]`, a set of
/// primes; its realisation has carrier `below[p] ∪ {p}` ordered by inclusion of pasts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeSet {
    pub labels: Vec<usize>,
    pub below: Vec<BitSet>,
}

impl PrimeSet {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// `[p]`.
    pub fn down(&self, p: usize) -> BitSet {
        self.below[p].with(p)
    }

    /// Top labels of a set of primes.
    pub fn image(&self, set: BitSet) -> BitSet {
        set.iter().map(|p| self.labels[p]).collect()
    }

    /// The extremal realisation with carrier `x`, a down-closed set of primes.
    /// Node `k` is the `k`-th smallest member of `x`.
    pub fn realisation_of(&self, x: BitSet) -> Realisation {
        let members: Vec<usize> = x.iter().collect();
        let mut index = vec![None; self.len()];
        for (k, &p) in members.iter().enumerate() {
            index[p] = Some(k);
        }
        Realisation::from_down(
            members.iter().map(|&p| self.labels[p]).collect(),
            members
                .iter()
                .map(|&p| self.down(p).map(|q| index[q]))
                .collect(),
        )
    }

    /// Down-closed sets of primes whose image is a configuration.
    pub fn configurations(&self, f: &EquivFamily, caps: &Caps) -> Result<Vec<BitSet>> {
        let mut seen: HashSet<BitSet> = HashSet::from([BitSet::EMPTY]);
        let mut stack = vec![BitSet::EMPTY];
        while let Some(x) = stack.pop() {
            for p in 0..self.len() {
                if !x.contains(p) && self.below[p].is_subset(x) {
                    let y = x.with(p);
                    if f.contains(self.image(y)) && seen.insert(y) {
                        if seen.len() > caps.configs {
                            return Err(Error::ConfigExplosion { cap: caps.configs });
                        }
                        stack.push(y);
                    }
                }
            }
        }
        let mut out: Vec<BitSet> = seen.into_iter().collect();
        sort_sets(&mut out);
        Ok(out)
    }

    /// Renumber primes; `order[k]` is the old index of new prime `k`.
    pub(crate) fn reorder(&self, order: &[usize]) -> PrimeSet {
        let mut index = vec![0; self.len()];
        for (k, &p) in order.iter().enumerate() {
            index[p] = k;
        }
        PrimeSet {
            labels: order.iter().map(|&p| self.labels[p]).collect(),
            below: order
                .iter()
                .map(|&p| self.below[p].map(|q| Some(index[q])))
                .collect(),
        }
    }
}

/// Enumerate prime extremals depth by depth.
///
/// A prime with strict past `x` and top label `e` exists iff `x` is a
/// configuration of the primes found so far, `max(x) ∪ {e}` is a configuration
/// of `f`, and no proper down-closed `X ⊊ x` has `max(X) ∪ {e}` a configuration.
/// Primes are returned sorted by size, then canonical code.
pub fn prime_set(f: &EquivFamily, caps: &Caps) -> Result<PrimeSet> {
    caps.check_events(f.len())?;
    let mut primes = PrimeSet {
        labels: Vec::new(),
        below: Vec::new(),
    };
    let mut tried: HashSet<(BitSet, usize)> = HashSet::new();
    loop {
        let configs = primes.configurations(f, caps)?;
        let mut added = Vec::new();
        for &x in &configs {
            let mx = primes.image(x);
            for e in 0..f.len() {
                if !tried.insert((x, e)) || !f.contains(mx.with(e)) {
                    continue;
                }
                let redundant = configs
                    .iter()
                    .any(|&y| y != x && y.is_subset(x) && f.contains(primes.image(y).with(e)));
                if !redundant {
                    added.push((e, x));
                }
            }
        }
        if added.is_empty() {
            break;
        }
        if primes.len() + added.len() > MAX_ELEMENTS {
            return Err(Error::SearchExplosion {
                what: "prime extremal realisations",
                cap: MAX_ELEMENTS,
            });
        }
        for (e, x) in added {
            primes.labels.push(e);
            primes.below.push(x);
        }
    }
    let codes: Vec<(usize, CanonicalPosetCode)> = (0..primes.len())
        .map(|p| {
            let down = primes.down(p);
            (down.len(), canonical_form(&primes.realisation_of(down)).0)
        })
        .collect();
    let mut order: Vec<usize> = (0..primes.len()).collect();
    order.sort_by(|&a, &b| codes[a].cmp(&codes[b]));
    Ok(primes.reorder(&order))
}

/// Canonical representatives of the prime extremal realisations of `f`.
pub fn enumerate_prime_extremals(f: &EquivFamily, caps: &Caps) -> Result<Vec<Realisation>> {
    let primes = prime_set(f, caps)?;
    Ok((0..primes.len())
        .map(|p| canonical_form(&primes.realisation_of(primes.down(p))).1)
        .collect())
}

/// The unique realisation map `r1 ⪰ r2` between extremal realisations, if any.
///
/// Its inverse is a rigid embedding of `r2` onto a down-closed part of `r1`,
/// built node by node: each node of `r2` must go to the node of `r1` with the
/// same label whose strict past is the image of its own.
pub fn map_between_extremals(r1: &Realisation, r2: &Realisation) -> Option<RealisationMap> {
    let mut order: Vec<usize> = (0..r2.len()).collect();
    order.sort_by_key(|&n| r2.down(n).len());
    let mut embed: Vec<Option<usize>> = vec![None; r2.len()];
    let mut used = BitSet::EMPTY;
    for n in order {
        let past: BitSet = r2
            .strict_down(n)
            .iter()
            .map(|m| embed[m].expect("pasts are embedded first"))
            .collect();
        let target = (0..r1.len()).find(|&m| {
            !used.contains(m) && r1.label(m) == r2.label(n) && r1.strict_down(m) == past
        })?;
        embed[n] = Some(target);
        used.insert(target);
    }
    let mut table = vec![None; r1.len()];
    for (n, m) in embed.iter().enumerate() {
        table[m.expect("every node embedded")] = Some(n);
    }
    let map = RealisationMap::new(table);
    is_realisation_map(&map, r1, r2).then_some(map)
}

/// The order of extremal realisations, one canonical representative per class.
#[derive(Debug, Clone)]
pub struct ExtremalOrder {
    pub elements: Vec<Realisation>,
    /// `below[j]` lists every `i` with `elements[i] ⪯ elements[j]`, including `j`.
    pub below: Vec<Vec<usize>>,
}

impl ExtremalOrder {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn le(&self, i: usize, j: usize) -> bool {
        self.below[j].contains(&i)
    }

    /// Elements whose representative has a top node.
    pub fn with_top(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| self.elements[i].top().is_some())
            .collect()
    }

    /// Least upper bound of a set of elements, if it exists.
    pub fn join(&self, set: &[usize]) -> Option<usize> {
        let uppers: Vec<usize> = (0..self.len())
            .filter(|&z| set.iter().all(|&x| self.le(x, z)))
            .collect();
        uppers
            .iter()
            .copied()
            .find(|&z| uppers.iter().all(|&u| self.le(z, u)))
    }

    /// Complete primes: elements `p` above the bottom such that `p ⊑ x ⊔ y`
    /// forces `p ⊑ x` or `p ⊑ y` for every compatible pair.
    pub fn complete_primes(&self) -> Vec<usize> {
        let bottom = self.join(&[]);
        (0..self.len())
            .filter(|&p| Some(p) != bottom)
            .filter(|&p| {
                (0..self.len()).all(|x| {
                    (0..self.len()).all(|y| match self.join(&[x, y]) {
                        Some(z) if self.le(p, z) => self.le(p, x) || self.le(p, y),
                        _ => true,
                    })
                })
            })
            .collect()
    }

    /// Finite prime-algebraicity: compatible pairs have joins and every element
    /// is the join of the complete primes below it.
    pub fn is_prime_algebraic(&self) -> bool {
        let n = self.len();
        if self.join(&[]).is_none() {
            return false;
        }
        for x in 0..n {
            for y in 0..n {
                let compatible = (0..n).any(|z| self.le(x, z) && self.le(y, z));
                if compatible && self.join(&[x, y]).is_none() {
                    return false;
                }
            }
        }
        let primes = self.complete_primes();
        (0..n).all(|x| {
            let below: Vec<usize> = primes.iter().copied().filter(|&p| self.le(p, x)).collect();
            self.join(&below) == Some(x)
        })
    }
}

/// All extremal classes of `f`, ordered by the existence of realisation maps.
///
/// Classes are the realisations carried by configurations of the prime
/// extremals; the order is decided independently by searching for maps.
pub fn extremal_order(f: &EquivFamily, caps: &Caps) -> Result<ExtremalOrder> {
    let primes = prime_set(f, caps)?;
    let configs = primes.configurations(f, caps)?;
    let elements: Vec<Realisation> = configs
        .iter()
        .map(|&x| canonical_form(&primes.realisation_of(x)).1)
        .collect();
    let below = (0..elements.len())
        .map(|j| {
            (0..elements.len())
                .filter(|&i| {
                    elements[i].len() <= elements[j].len()
                        && map_between_extremals(&elements[j], &elements[i]).is_some()
                })
                .collect()
        })
        .collect();
    Ok(ExtremalOrder { elements, below })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::realisations::is_extremal;

    #[test]
    fn docs_primes() {
        let f = fixtures::docs_family(&Caps::default());
        let primes = enumerate_prime_extremals(&f, &Caps::default()).unwrap();
        assert_eq!(primes.len(), 4);
        assert!(primes
            .iter()
            .all(|p| is_extremal(p, &f) && p.top().is_some()));
        let shapes: Vec<Vec<usize>> = primes.iter().map(|p| p.labels().to_vec()).collect();
        assert_eq!(shapes, vec![vec![0], vec![1], vec![0, 2], vec![1, 2]]);
    }

    #[test]
    fn map_drops_top() {
        let f = fixtures::docs_family(&Caps::default());
        let primes = enumerate_prime_extremals(&f, &Caps::default()).unwrap();
        let (a, ad) = (&primes[0], &primes[2]);
        let m = map_between_extremals(ad, a).unwrap();
        assert_eq!(m.table(), &[Some(0), None]);
        assert!(map_between_extremals(a, ad).is_none());
        assert_eq!(
            map_between_extremals(ad, ad),
            Some(RealisationMap::identity(2))
        );
    }

    #[test]
    fn trivial_family_order() {
        let f = EquivFamily::new(vec![], vec![BitSet::EMPTY], None).unwrap();
        let order = extremal_order(&f, &Caps::default()).unwrap();
        assert_eq!(order.len(), 1);
        assert!(order.is_prime_algebraic());
        assert!(order.complete_primes().is_empty());
    }
}
