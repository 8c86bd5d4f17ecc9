use std::fmt;

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::realisations::PrimeSet;
use crate::structures::{Consistency, EquivFamily, Equivalence, Ese, PrimeES, StructureMap};
use crate::unfolding::prime_names;

/// Why a family fails to be stable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StabilityWitness {
    /// `x, y ⊆ z` with `z` unambiguous but `x ∩ y` not a configuration.
    Intersection { x: BitSet, y: BitSet, z: BitSet },
    /// `event ∈ config` with no unambiguous configuration between them.
    Uncovered { event: usize, config: BitSet },
}

impl StabilityWitness {
    pub fn describe(&self, f: &EquivFamily) -> String {
        match self {
            StabilityWitness::Intersection { x, y, z } => format!(
                "{} and {} lie in unambiguous {} but their intersection is no configuration",
                f.format_set(*x),
                f.format_set(*y),
                f.format_set(*z)
            ),
            StabilityWitness::Uncovered { event, config } => format!(
                "{} in {} has no unambiguous configuration between",
                f.name(*event),
                f.format_set(*config)
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilityReport {
    pub stable: bool,
    pub witnesses: Vec<StabilityWitness>,
}

impl fmt::Display for StabilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", if self.stable { "stable" } else { "not stable" })
    }
}

/// Whether `x` holds no two distinct equivalent events.
pub fn is_unambiguous(f: &EquivFamily, x: BitSet) -> bool {
    f.equiv().is_unambiguous(x)
}

/// Check both stability clauses, collecting every witness.
pub fn is_stable_ef(f: &EquivFamily) -> StabilityReport {
    let configs = f.configs();
    let unambiguous: Vec<BitSet> = configs
        .iter()
        .copied()
        .filter(|&z| is_unambiguous(f, z))
        .collect();
    let mut witnesses = Vec::new();
    for &z in &unambiguous {
        let below: Vec<BitSet> = configs.iter().copied().filter(|x| x.is_subset(z)).collect();
        for (i, &x) in below.iter().enumerate() {
            for &y in &below[i + 1..] {
                if !f.contains(x.intersection(y)) {
                    witnesses.push(StabilityWitness::Intersection { x, y, z });
                }
            }
        }
    }
    for &x in configs {
        for a in x.iter() {
            if !unambiguous.iter().any(|z| z.contains(a) && z.is_subset(x)) {
                witnesses.push(StabilityWitness::Uncovered {
                    event: a,
                    config: x,
                });
            }
        }
    }
    StabilityReport {
        stable: witnesses.is_empty(),
        witnesses,
    }
}

fn require_stable(f: &EquivFamily) -> Result<()> {
    if is_stable_ef(f).stable {
        Ok(())
    } else {
        Err(Error::NotStable)
    }
}

/// The unambiguous configurations, with identity equivalence.
pub fn unamb(f: &EquivFamily) -> Result<EquivFamily> {
    require_stable(f)?;
    let configs = f
        .configs()
        .iter()
        .copied()
        .filter(|&x| is_unambiguous(f, x))
        .collect();
    EquivFamily::new(
        f.names().to_vec(),
        configs,
        Some(Equivalence::identity(f.len())),
    )
}

/// The configurations that are unions of unambiguous configurations.
pub fn stable_part(f: &EquivFamily) -> EquivFamily {
    let unambiguous: Vec<BitSet> = f
        .configs()
        .iter()
        .copied()
        .filter(|&z| is_unambiguous(f, z))
        .collect();
    let configs = f
        .configs()
        .iter()
        .copied()
        .filter(|&x| {
            let covered = unambiguous
                .iter()
                .filter(|z| z.is_subset(x))
                .fold(BitSet::EMPTY, |acc, z| acc.union(*z));
            covered == x
        })
        .collect();
    EquivFamily::new(f.names().to_vec(), configs, Some(f.equiv().clone()))
        .expect("subfamily of a valid family")
}

/// An edc built from the prime configurations of a stable family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrResult {
    pub ese: Ese,
    /// `carriers[p]` is the prime configuration behind event `p`.
    pub carriers: Vec<BitSet>,
    /// Each prime configuration goes to its top event.
    pub counit: StructureMap,
}

/// `[a]_x`: the least configuration containing `a` inside `x`.
pub fn prime_configuration(f: &EquivFamily, a: usize, x: BitSet) -> BitSet {
    f.configs()
        .iter()
        .filter(|y| y.contains(a) && y.is_subset(x))
        .fold(x, |acc, y| acc.intersection(*y))
}

/// `Pr(f)`: events are the prime configurations `[a]_x` of unambiguous `x`,
/// ordered by inclusion, equivalent when their tops are, and consistent when
/// their union is a configuration.
pub fn pr(f: &EquivFamily) -> Result<PrResult> {
    require_stable(f)?;
    let mut primes: Vec<(usize, BitSet)> = Vec::new();
    for &x in f.configs().iter().filter(|&&x| is_unambiguous(f, x)) {
        for a in x.iter() {
            let p = (a, prime_configuration(f, a, x));
            if !primes.contains(&p) {
                primes.push(p);
            }
        }
    }
    primes.sort_by(|(a, s), (b, t)| s.sort_key().cmp(&t.sort_key()).then(a.cmp(b)));
    let n = primes.len();
    if n > crate::bitset::MAX_ELEMENTS {
        return Err(Error::TooManyEvents {
            count: n,
            max: crate::bitset::MAX_ELEMENTS,
        });
    }
    let below: Vec<BitSet> = primes
        .iter()
        .map(|(_, s)| {
            (0..n)
                .filter(|&q| primes[q].1 != *s && primes[q].1.is_subset(*s))
                .collect()
        })
        .collect();
    let system = PrimeSet {
        labels: primes.iter().map(|(a, _)| *a).collect(),
        below: below.clone(),
    };
    let names = prime_names(&system, f.names());
    let down: Vec<BitSet> = (0..n).map(|p| below[p].with(p)).collect();
    let con = Consistency::from_generators(f.maximal_configs().iter().map(|&m| {
        (0..n)
            .filter(|&p| primes[p].1.is_subset(m))
            .collect::<BitSet>()
    }));
    let prime = PrimeES::from_parts(names.clone(), down, con)?;
    let keys: Vec<usize> = {
        // reindex the top-event keys into the name-sorted order
        let mut keys = vec![0; n];
        for (old, name) in names.iter().enumerate() {
            let new = prime.index_of(name).expect("names survive sorting");
            keys[new] = f.equiv().rep(primes[old].0);
        }
        keys
    };
    let ese = Ese::new(prime, Equivalence::from_keys(&keys));
    let mut carriers = vec![BitSet::EMPTY; n];
    let mut tops = vec![None; n];
    for (old, name) in names.iter().enumerate() {
        let new = ese.index_of(name).expect("names survive sorting");
        carriers[new] = primes[old].1;
        tops[new] = Some(primes[old].0);
    }
    Ok(PrResult {
        ese,
        carriers,
        counit: StructureMap::new(tops),
    })
}
