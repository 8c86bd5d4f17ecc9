use std::collections::HashSet;

use crate::bitset::BitSet;
use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::structures::EquivFamily;

use super::{canonical_code, is_realisation, Realisation, RealisationMap};

/// Extremality by its local characterisation: no node has a proper down-closed
/// part of its past that already enables it, and no two nodes share both their
/// strict past and their label.
pub fn is_extremal(r: &Realisation, f: &EquivFamily) -> bool {
    first_detachment(r, f).is_none() && first_twins(r).is_none()
}

fn first_detachment(r: &Realisation, f: &EquivFamily) -> Option<(usize, BitSet)> {
    (0..r.len()).find_map(|n| {
        let past = r.strict_down(n);
        r.down_sets_within(past)
            .into_iter()
            .find(|&x| x != past && f.contains(r.image(x.with(n))))
            .map(|x| (n, x))
    })
}

fn first_twins(r: &Realisation) -> Option<(usize, usize)> {
    (0..r.len()).find_map(|n| {
        (n + 1..r.len())
            .find(|&m| r.label(n) == r.label(m) && r.strict_down(n) == r.strict_down(m))
            .map(|m| (n, m))
    })
}

/// Extremality by definition: no total realisation map out of `r` fails to be
/// an isomorphism. Searches every coarser realisation reachable by a total map.
pub fn is_extremal_by_definition(r: &Realisation, f: &EquivFamily, caps: &Caps) -> Result<bool> {
    // Bijective coarsenings weaken the order; realisation-hood only gets harder
    // as the order weakens, so dropping a single covering pair is enough.
    for b in 0..r.len() {
        for a in r.covers(b).iter() {
            let weaker = r.without_cover(a, b);
            if is_realisation(&weaker, f) {
                return Ok(false);
            }
        }
    }
    let mut budget = Budget {
        used: 0,
        cap: caps.search,
    };
    let mut found = false;
    for_each_label_partition(r, &mut budget, &mut |blocks, block_of, budget| {
        if coarsening_exists(r, f, blocks, block_of, budget)? {
            found = true;
            return Ok(false);
        }
        Ok(true)
    })?;
    Ok(!found)
}

struct Budget {
    used: usize,
    cap: usize,
}

impl Budget {
    fn spend(&mut self) -> Result<()> {
        self.used += 1;
        if self.used > self.cap {
            Err(Error::SearchExplosion {
                what: "coarser realisations",
                cap: self.cap,
            })
        } else {
            Ok(())
        }
    }
}

/// Visit every partition of the nodes into label-homogeneous blocks with at
/// least one block of two or more nodes. The visitor returns `false` to stop.
fn for_each_label_partition(
    r: &Realisation,
    budget: &mut Budget,
    visit: &mut dyn FnMut(&[usize], &[usize], &mut Budget) -> Result<bool>,
) -> Result<()> {
    fn go(
        r: &Realisation,
        n: usize,
        block_of: &mut Vec<usize>,
        block_labels: &mut Vec<usize>,
        budget: &mut Budget,
        visit: &mut dyn FnMut(&[usize], &[usize], &mut Budget) -> Result<bool>,
    ) -> Result<bool> {
        if n == r.len() {
            if block_labels.len() == r.len() {
                return Ok(true);
            }
            budget.spend()?;
            let blocks: Vec<usize> = block_labels.clone();
            return visit(&blocks, block_of, budget);
        }
        let label = r.label(n);
        for b in 0..block_labels.len() {
            if block_labels[b] == label {
                block_of.push(b);
                let go_on = go(r, n + 1, block_of, block_labels, budget, visit)?;
                block_of.pop();
                if !go_on {
                    return Ok(false);
                }
            }
        }
        block_labels.push(label);
        block_of.push(block_labels.len() - 1);
        let go_on = go(r, n + 1, block_of, block_labels, budget, visit)?;
        block_of.pop();
        block_labels.pop();
        Ok(go_on)
    }
    go(r, 0, &mut Vec::new(), &mut Vec::new(), budget, visit)?;
    Ok(())
}

/// Whether the blocks carry an order making the quotient a realisation that
/// the quotient map preserves down-closed subsets into.
///
/// A block `b` may only sit above blocks in `M(b)`, the blocks met by the past
/// of every member. Placing blocks one at a time, each above everything of
/// `M(b)` already placed, yields the strongest admissible order for that
/// placement sequence, and stronger orders have fewer down-closed sets.
fn coarsening_exists(
    r: &Realisation,
    f: &EquivFamily,
    block_labels: &[usize],
    block_of: &[usize],
    budget: &mut Budget,
) -> Result<bool> {
    let k = block_labels.len();
    let image_of = |n: usize| -> BitSet { r.down(n).iter().map(|m| block_of[m]).collect() };
    let mut allowed = vec![BitSet::full(k); k];
    for n in 0..r.len() {
        let b = block_of[n];
        allowed[b] = allowed[b].intersection(image_of(n));
    }
    for (b, a) in allowed.iter_mut().enumerate() {
        a.remove(b);
    }
    let events = |blocks: BitSet| -> BitSet { blocks.iter().map(|b| block_labels[b]).collect() };

    struct Dfs<'a> {
        k: usize,
        allowed: &'a [BitSet],
        f: &'a EquivFamily,
        failed: HashSet<Vec<BitSet>>,
    }
    impl Dfs<'_> {
        fn run(
            &mut self,
            placed: BitSet,
            downs: &mut Vec<BitSet>,
            down_sets: &[BitSet],
            events: &dyn Fn(BitSet) -> BitSet,
            budget: &mut Budget,
        ) -> Result<bool> {
            if placed == BitSet::full(self.k) {
                return Ok(true);
            }
            if self.failed.contains(downs) {
                return Ok(false);
            }
            budget.spend()?;
            for b in BitSet::full(self.k).difference(placed).iter() {
                let below = self.allowed[b].intersection(placed);
                let fresh: Vec<BitSet> = down_sets
                    .iter()
                    .filter(|y| below.is_subset(**y))
                    .map(|y| y.with(b))
                    .collect();
                if fresh.iter().all(|y| self.f.contains(events(*y))) {
                    let mut next = down_sets.to_vec();
                    next.extend(fresh);
                    downs[b] = below.with(b);
                    let ok = self.run(placed.with(b), downs, &next, events, budget)?;
                    downs[b] = BitSet::EMPTY;
                    if ok {
                        return Ok(true);
                    }
                }
            }
            self.failed.insert(downs.clone());
            Ok(false)
        }
    }
    let mut dfs = Dfs {
        k,
        allowed: &allowed,
        f,
        failed: HashSet::new(),
    };
    let mut downs = vec![BitSet::EMPTY; k];
    dfs.run(BitSet::EMPTY, &mut downs, &[BitSet::EMPTY], &events, budget)
}

/// A coarsening together with the total map witnessing it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coarsening {
    pub result: Realisation,
    /// Total realisation map from the input onto `result`.
    pub map: RealisationMap,
}

/// Coarsen to an extremal realisation by repeated one-step coarsenings,
/// always taking the candidate with the least canonical code.
pub fn coarsen_to_extremal(r: &Realisation, f: &EquivFamily) -> Realisation {
    coarsen_with_map(r, f).result
}

/// As [`coarsen_to_extremal`], also returning the total map from `r`.
pub fn coarsen_with_map(r: &Realisation, f: &EquivFamily) -> Coarsening {
    let mut current = r.clone();
    let mut map = RealisationMap::identity(r.len());
    loop {
        let best = one_step_coarsenings(&current, f)
            .into_iter()
            .min_by_key(|(next, _)| canonical_code(next));
        match best {
            None => {
                return Coarsening {
                    result: current,
                    map,
                }
            }
            Some((next, step)) => {
                map = map.then(&step);
                current = next;
            }
        }
    }
}

/// Every coarsening by a single twin merge or a single detachment.
fn one_step_coarsenings(r: &Realisation, f: &EquivFamily) -> Vec<(Realisation, RealisationMap)> {
    let mut out = Vec::new();
    for n in 0..r.len() {
        for m in n + 1..r.len() {
            if r.label(n) == r.label(m) && r.strict_down(n) == r.strict_down(m) {
                out.push(merge(r, n, m));
            }
        }
    }
    for n in 0..r.len() {
        let past = r.strict_down(n);
        for x in r.down_sets_within(past) {
            if x != past && f.contains(r.image(x.with(n))) {
                let mut down = r.down_vec().to_vec();
                down[n] = x.with(n);
                out.push((
                    Realisation::from_down(r.labels().to_vec(), down),
                    RealisationMap::identity(r.len()),
                ));
            }
        }
    }
    out
}

/// Identify twin `m` with `n`; everything above `m` ends up above `n`.
fn merge(r: &Realisation, n: usize, m: usize) -> (Realisation, RealisationMap) {
    let mut down = r.down_vec().to_vec();
    for d in down.iter_mut() {
        if d.contains(m) {
            *d = d.without(m).with(n);
        }
    }
    let merged = Realisation::from_down(r.labels().to_vec(), down);
    let keep = r.nodes().without(m);
    let result = merged.restrict(keep);
    let shift = |k: usize| if k > m { k - 1 } else { k };
    let table = (0..r.len())
        .map(|k| Some(if k == m { shift(n) } else { shift(k) }))
        .collect();
    (result, RealisationMap::new(table))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::realisations::{canonical_form, is_realisation_map};

    #[test]
    fn chain_over_docs_coarsens_to_d_above_a() {
        let f = fixtures::docs_family(&Caps::default());
        let (a, b, d) = (0, 1, 2);
        let r = Realisation::chain(&[a, b, d]);
        assert!(!is_extremal(&r, &f));
        assert!(!is_extremal_by_definition(&r, &f, &Caps::default()).unwrap());
        let c = coarsen_with_map(&r, &f);
        assert!(is_extremal(&c.result, &f));
        assert!(is_realisation_map(&c.map, &r, &c.result));
        let expected = Realisation::new(vec![a, b, d], &[(0, 2)]).unwrap();
        assert_eq!(canonical_form(&c.result).0, canonical_form(&expected).0);
    }

    #[test]
    fn one_node_is_extremal() {
        let f = fixtures::docs_family(&Caps::default());
        let r = Realisation::chain(&[0]);
        assert!(is_extremal(&r, &f));
        assert!(is_extremal_by_definition(&r, &f, &Caps::default()).unwrap());
        assert_eq!(coarsen_to_extremal(&r, &f), r);
    }

    #[test]
    fn twins_merge() {
        // two parallel a-nodes over a family where a is initial
        let f = fixtures::docs_family(&Caps::default());
        let r = Realisation::new(vec![0, 0], &[]).unwrap();
        assert!(is_realisation(&r, &f));
        assert!(!is_extremal(&r, &f));
        assert!(!is_extremal_by_definition(&r, &f, &Caps::default()).unwrap());
        let c = coarsen_with_map(&r, &f);
        assert_eq!(c.result.len(), 1);
        assert!(is_realisation_map(&c.map, &r, &c.result));
    }
}
