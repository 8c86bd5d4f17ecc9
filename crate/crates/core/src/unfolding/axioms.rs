use std::collections::HashSet;
use std::fmt;

use crate::bitset::BitSet;
use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::structures::Ese;

/// The structural axioms characterising unfoldings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axiom {
    A,
    B,
    C,
    D,
    DPrime,
    D1,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axiom::A => "(A)",
            Axiom::B => "(B)",
            Axiom::C => "(C)",
            Axiom::D => "(D)",
            Axiom::DPrime => "(D')",
            Axiom::D1 => "(D1)",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StructuralAxioms {
    pub a: bool,
    pub b: bool,
    pub c: bool,
    pub d: bool,
    pub d_prime: bool,
    pub d1: bool,
}

impl StructuralAxioms {
    /// The first of (A), (B), (C), (D) that fails.
    pub fn first_failure(&self) -> Option<Axiom> {
        [
            (self.a, Axiom::A),
            (self.b, Axiom::B),
            (self.c, Axiom::C),
            (self.d, Axiom::D),
        ]
        .into_iter()
        .find(|(ok, _)| !ok)
        .map(|(_, ax)| ax)
    }

    pub fn all_abcd(&self) -> bool {
        self.first_failure().is_none()
    }
}

/// Decide each axiom by direct quantification over the finite structure.
pub fn check_structural_axioms(p: &Ese, caps: &Caps) -> Result<StructuralAxioms> {
    let configs = p.prime().configurations(caps)?;
    let config_set: HashSet<BitSet> = configs.iter().copied().collect();
    Ok(StructuralAxioms {
        a: axiom_a(p, &configs, caps)?,
        b: axiom_b(p),
        c: axiom_c(p),
        d: axiom_d(p, &configs, &config_set, false),
        d_prime: axiom_d_prime(p, &configs, &config_set),
        d1: axiom_d(p, &configs, &config_set, true),
    })
}

/// (A): a down-closed set with the same classes as a configuration is a configuration.
fn axiom_a(p: &Ese, configs: &[BitSet], caps: &Caps) -> Result<bool> {
    let eq = p.equiv();
    let config_classes: HashSet<BitSet> = configs.iter().map(|&y| eq.class_set(y)).collect();
    let prime = p.prime();
    let n = p.len();
    let mut seen: HashSet<BitSet> = HashSet::from([BitSet::EMPTY]);
    let mut stack = vec![BitSet::EMPTY];
    while let Some(x) = stack.pop() {
        if !prime.is_consistent(x) && config_classes.contains(&eq.class_set(x)) {
            return Ok(false);
        }
        for e in 0..n {
            if !x.contains(e) && prime.strict_down(e).is_subset(x) {
                let y = x.with(e);
                // only sets whose classes stay within some configuration's classes can matter
                if config_classes.iter().any(|c| eq.class_set(y).is_subset(*c)) && seen.insert(y) {
                    if seen.len() > caps.search {
                        return Err(Error::SearchExplosion {
                            what: "down-closed sets for axiom (A)",
                            cap: caps.search,
                        });
                    }
                    stack.push(y);
                }
            }
        }
    }
    Ok(true)
}

/// (B): equivalent events with the same strict past are equal.
fn axiom_b(p: &Ese) -> bool {
    let prime = p.prime();
    (0..p.len()).all(|a| {
        (a + 1..p.len())
            .all(|b| !(p.equiv().equiv(a, b) && prime.strict_down(a) == prime.strict_down(b)))
    })
}

/// (C): for `p ≡ q`, a down-closed `X ⊆ [p)` whose classes cover `[q)` is `[p)`.
fn axiom_c(p: &Ese) -> bool {
    let prime = p.prime();
    let eq = p.equiv();
    for a in 0..p.len() {
        let past = prime.strict_down(a);
        for b in eq.class_of(a).iter() {
            let needed = eq.class_set(prime.strict_down(b));
            for x in past.subsets() {
                if x != past && prime.is_down_closed(x) && needed.is_subset(eq.class_set(x)) {
                    return false;
                }
            }
        }
    }
    true
}

/// (D), or (D1) when `unambiguous_only`.
fn axiom_d(
    p: &Ese,
    configs: &[BitSet],
    config_set: &HashSet<BitSet>,
    unambiguous_only: bool,
) -> bool {
    let prime = p.prime();
    let eq = p.equiv();
    for &x in configs {
        if unambiguous_only && !eq.is_unambiguous(x) {
            continue;
        }
        let x_classes = eq.class_set(x);
        for t in 0..p.len() {
            let xt = x.union(prime.down(t));
            if !config_set.contains(&xt) || eq.class_set(xt) != x_classes.with(eq.rep(t)) {
                continue;
            }
            if !eq
                .class_of(t)
                .iter()
                .any(|q| config_set.contains(&x.with(q)))
            {
                return false;
            }
        }
    }
    true
}

/// (D'): if `x` extends by `t` and `y ≡ x`, then `y` extends by some `p ≡ t`.
fn axiom_d_prime(p: &Ese, configs: &[BitSet], config_set: &HashSet<BitSet>) -> bool {
    let prime = p.prime();
    let eq = p.equiv();
    let mut by_classes: std::collections::HashMap<BitSet, Vec<BitSet>> =
        std::collections::HashMap::new();
    for &y in configs {
        by_classes.entry(eq.class_set(y)).or_default().push(y);
    }
    for &x in configs {
        let peers = &by_classes[&eq.class_set(x)];
        for t in 0..p.len() {
            if x.contains(t)
                || !prime.strict_down(t).is_subset(x)
                || !config_set.contains(&x.with(t))
            {
                continue;
            }
            for &y in peers {
                if !eq
                    .class_of(t)
                    .iter()
                    .any(|q| config_set.contains(&y.with(q)))
                {
                    return false;
                }
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn b_fails_for_parallel_equivalent_roots() {
        let p = Ese::build(vec!["a".into(), "b".into()], &[], None, &[BitSet::full(2)]).unwrap();
        let ax = check_structural_axioms(&p, &Caps::default()).unwrap();
        assert!(!ax.b);
        assert_eq!(ax.first_failure(), Some(Axiom::B));
    }

    #[test]
    fn identity_prime_satisfies_all() {
        let p = Ese::build(vec!["a".into(), "b".into()], &[(0, 1)], None, &[]).unwrap();
        let ax = check_structural_axioms(&p, &Caps::default()).unwrap();
        assert!(ax.all_abcd() && ax.d_prime && ax.d1);
    }
}
