use std::collections::HashSet;

use crate::bitset::{sort_sets, BitSet};
use crate::caps::Caps;
use crate::error::{Error, Result};

use super::{name_order, Consistency, EquivFamily, Equivalence};

/// A minimal enabling `set ⊢ event`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Enabling {
    pub set: BitSet,
    pub event: usize,
}

/// A general event structure `(E, Con, ⊢)`.
///
/// Only minimal enablings are stored: `X ⊢ e` holds iff `X` is consistent
/// and contains the set of some stored enabling of `e`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GeneralES {
    names: Vec<String>,
    con: Consistency,
    enabling: Vec<Enabling>,
}

impl GeneralES {
    pub fn new(
        names: Vec<String>,
        con: Option<Vec<BitSet>>,
        enabling: Vec<Enabling>,
    ) -> Result<GeneralES> {
        let n = names.len();
        let con = match con {
            Some(sets) => Consistency::from_generators(sets),
            None => Consistency::all(n),
        };
        GeneralES::from_parts(names, con, enabling)
    }

    pub(crate) fn from_parts(
        names: Vec<String>,
        con: Consistency,
        enabling: Vec<Enabling>,
    ) -> Result<GeneralES> {
        let perm = name_order(&names)?;
        let n = names.len();
        let mut sorted_names = vec![String::new(); n];
        for old in 0..n {
            sorted_names[perm[old]] = names[old].clone();
        }
        let enabling = enabling
            .into_iter()
            .map(|en| Enabling {
                set: en.set.map(|i| Some(perm[i])),
                event: perm[en.event],
            })
            .collect();
        Ok(GeneralES {
            names: sorted_names,
            con: con.map(|i| Some(perm[i])),
            enabling: minimise(enabling),
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

    pub fn con(&self) -> &Consistency {
        &self.con
    }

    pub fn is_consistent(&self, set: BitSet) -> bool {
        self.con.contains(set)
    }

    /// Minimal enablings, sorted by event then set.
    pub fn enablings(&self) -> &[Enabling] {
        &self.enabling
    }

    /// `x ⊢ e`.
    pub fn enables(&self, x: BitSet, e: usize) -> bool {
        self.con.contains(x)
            && self
                .enabling
                .iter()
                .any(|en| en.event == e && en.set.is_subset(x))
    }

    /// Consistent secured sets, in deterministic order.
    pub fn configuration_sets(&self, caps: &Caps) -> Result<Vec<BitSet>> {
        let n = self.len();
        let mut seen: HashSet<BitSet> = HashSet::from([BitSet::EMPTY]);
        let mut stack = vec![BitSet::EMPTY];
        while let Some(x) = stack.pop() {
            for e in 0..n {
                if x.contains(e) {
                    continue;
                }
                let y = x.with(e);
                if self.con.contains(y) && self.enables(x, e) && seen.insert(y) {
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
}

fn minimise(mut enabling: Vec<Enabling>) -> Vec<Enabling> {
    enabling.sort_by_key(|en| (en.event, en.set.sort_key()));
    enabling.dedup();
    let all = enabling.clone();
    enabling.retain(|en| {
        !all.iter().any(|other| {
            other.event == en.event && other.set != en.set && other.set.is_subset(en.set)
        })
    });
    enabling
}

/// The family of configurations of `g`, with identity equivalence.
///
/// The underlying set is restricted to the events occurring in some configuration.
pub fn configurations(g: &GeneralES, caps: &Caps) -> Result<EquivFamily> {
    caps.check_events(g.len())?;
    let sets = g.configuration_sets(caps)?;
    let n = g.len();
    Ok(
        EquivFamily::from_sorted(g.names().to_vec(), sets, Equivalence::identity(n))
            .restrict_to_support(),
    )
}

/// `fam(g)`: the configurations of `g` as an equivalence family.
pub fn fam(g: &GeneralES, caps: &Caps) -> Result<EquivFamily> {
    configurations(g, caps)
}

/// The canonical general event structure of a family with identity equivalence.
///
/// `X ∈ Con` iff `X` is contained in a configuration; `X ⊢ a` iff some
/// configuration `y` has `a ∈ y ⊆ X ∪ {a}`.
pub fn fam_to_ges(f: &EquivFamily) -> GeneralES {
    let con = Consistency::from_generators(f.maximal_configs());
    let mut enabling = Vec::new();
    for &y in f.configs() {
        for a in y.iter() {
            enabling.push(Enabling {
                set: y.without(a),
                event: a,
            });
        }
    }
    GeneralES {
        names: f.names().to_vec(),
        con,
        enabling: minimise(enabling),
    }
}

/// The three repleteness clauses.
pub fn is_replete(g: &GeneralES, caps: &Caps) -> Result<bool> {
    let configs = g.configuration_sets(caps)?;
    let every_event_enabled = (0..g.len()).all(|e| {
        g.enablings()
            .iter()
            .any(|en| en.event == e && g.is_consistent(en.set))
    });
    let con_covered = g
        .con()
        .generators()
        .iter()
        .all(|x| configs.iter().any(|c| x.is_subset(*c)));
    let enablings_witnessed = g
        .enablings()
        .iter()
        .filter(|en| g.is_consistent(en.set))
        .all(|en| {
            let bound = en.set.with(en.event);
            configs
                .iter()
                .any(|c| c.contains(en.event) && c.is_subset(bound))
        });
    Ok(every_event_enabled && con_covered && enablings_witnessed)
}
