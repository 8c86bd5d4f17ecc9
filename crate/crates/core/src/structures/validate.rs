use std::collections::HashSet;
use std::fmt;

use crate::bitset::BitSet;

use super::{format_set, EquivFamily, Ese, GeneralES, PrimeES, StructureRef};

/// Reports beyond this many per axiom are summarised in one trailing entry.
const REPORTS_PER_AXIOM: usize = 32;

/// A failed well-formedness or map condition, with its witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub axiom: &'static str,
    pub witness: String,
}

impl Violation {
    pub fn new(axiom: &'static str, witness: impl Into<String>) -> Self {
        Violation {
            axiom,
            witness: witness.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.axiom, self.witness)
    }
}

struct Reports {
    out: Vec<Violation>,
    counts: Vec<(&'static str, usize)>,
}

impl Reports {
    fn new() -> Self {
        Reports {
            out: Vec::new(),
            counts: Vec::new(),
        }
    }

    fn push(&mut self, axiom: &'static str, witness: impl FnOnce() -> String) {
        let slot = match self.counts.iter().position(|(a, _)| *a == axiom) {
            Some(i) => i,
            None => {
                self.counts.push((axiom, 0));
                self.counts.len() - 1
            }
        };
        self.counts[slot].1 += 1;
        if self.counts[slot].1 <= REPORTS_PER_AXIOM {
            self.out.push(Violation::new(axiom, witness()));
        }
    }

    fn finish(mut self) -> Vec<Violation> {
        for (axiom, count) in self.counts {
            if count > REPORTS_PER_AXIOM {
                self.out.push(Violation::new(
                    axiom,
                    format!("{} further violations omitted", count - REPORTS_PER_AXIOM),
                ));
            }
        }
        self.out
    }
}

/// All violated invariants of a structure; empty iff it is well formed.
pub fn validate_structure<'a>(s: impl Into<StructureRef<'a>>) -> Vec<Violation> {
    let mut r = Reports::new();
    match s.into() {
        StructureRef::Prime(p) => prime_violations(p, &mut r),
        StructureRef::Ese(p) => ese_violations(p, &mut r),
        StructureRef::General(g) => general_violations(g, &mut r),
        StructureRef::Family(f) => family_violations(f, &mut r),
    }
    r.finish()
}

fn prime_violations(p: &PrimeES, r: &mut Reports) {
    let n = p.len();
    let names = p.names();
    for e in 0..n {
        if !p.le(e, e) {
            r.push("reflexivity", || {
                format!("{} is not below itself", names[e])
            });
        }
        for a in p.strict_down(e).iter() {
            if p.le(e, a) {
                if a < e {
                    r.push("antisymmetry", || {
                        format!("{} ≤ {} ≤ {}", names[a], names[e], names[a])
                    });
                }
            } else if !p.strict_down(a).is_subset(p.down(e)) {
                r.push("transitivity", || {
                    format!("predecessors of {} are not below {}", names[a], names[e])
                });
            }
        }
        if !p.is_consistent(BitSet::singleton(e)) {
            r.push("singleton-consistency", || {
                format!("{{{}}} is not consistent", names[e])
            });
        }
    }
    for &x in p.con().generators() {
        let closure = p.down_closure(x);
        if !p.is_consistent(closure) {
            r.push("predecessor-closure", || {
                format!(
                    "{} is consistent but its down-closure {} is not",
                    format_set(names, x),
                    format_set(names, closure)
                )
            });
        }
    }
}

fn ese_violations(p: &Ese, r: &mut Reports) {
    prime_violations(p.prime(), r);
    if p.equiv().len() != p.len() || !p.equiv().is_well_formed() {
        r.push("equivalence", || {
            "equivalence does not partition the events".to_string()
        });
    }
}

fn general_violations(g: &GeneralES, r: &mut Reports) {
    for en in g.enablings() {
        if !g.is_consistent(en.set) {
            r.push("enabling-consistency", || {
                format!(
                    "{} ⊢ {} with inconsistent premise",
                    format_set(g.names(), en.set),
                    g.name(en.event)
                )
            });
        }
    }
}

fn family_violations(f: &EquivFamily, r: &mut Reports) {
    let configs = f.configs();
    let n = f.len();
    if !f.contains(BitSet::EMPTY) {
        r.push("contains-empty", || "∅ is not a configuration".to_string());
    }
    if !f.equiv().is_well_formed() || f.equiv().len() != n {
        r.push("equivalence", || {
            "equivalence does not partition the events".to_string()
        });
    }
    let support = f.support();
    if !support.is_subset(BitSet::full(n)) {
        r.push("underlying-set", || {
            "a configuration mentions an unknown event".to_string()
        });
    }
    for e in BitSet::full(n).difference(support).iter() {
        r.push("underlying-set", || {
            format!("{} occurs in no configuration", f.name(e))
        });
    }

    let maximal = f.maximal_configs();
    for (i, &x) in configs.iter().enumerate() {
        for &y in &configs[i + 1..] {
            let u = x.union(y);
            if !f.contains(u) && maximal.iter().any(|m| u.is_subset(*m)) {
                r.push("union-closure", || {
                    format!(
                        "{} and {} are compatible but their union is not a configuration",
                        f.format_set(x),
                        f.format_set(y)
                    )
                });
            }
        }
    }

    let reachable = reachable_configs(f);
    for &x in configs {
        let secured = reachable
            .iter()
            .filter(|y| y.is_subset(x))
            .fold(BitSet::EMPTY, |a, y| a.union(*y));
        for e in x.difference(secured).iter() {
            r.push("securing", || {
                format!("{} has no securing chain in {}", f.name(e), f.format_set(x))
            });
        }
        let subs: Vec<BitSet> = f.subconfigs(x).collect();
        let members: Vec<usize> = x.iter().collect();
        for (k, &a) in members.iter().enumerate() {
            for &b in &members[k + 1..] {
                if !subs.iter().any(|y| y.contains(a) != y.contains(b)) {
                    r.push("coincidence-freeness", || {
                        format!(
                            "{} and {} are not separated inside {}",
                            f.name(a),
                            f.name(b),
                            f.format_set(x)
                        )
                    });
                }
            }
        }
    }
}

/// Configurations reachable from ∅ by adding one event at a time within the family.
pub(crate) fn reachable_configs(f: &EquivFamily) -> Vec<BitSet> {
    let n = f.len();
    let mut seen: HashSet<BitSet> = HashSet::new();
    if !f.contains(BitSet::EMPTY) {
        return Vec::new();
    }
    seen.insert(BitSet::EMPTY);
    let mut stack = vec![BitSet::EMPTY];
    while let Some(x) = stack.pop() {
        for e in 0..n {
            if !x.contains(e) {
                let y = x.with(e);
                if f.contains(y) && seen.insert(y) {
                    stack.push(y);
                }
            }
        }
    }
    seen.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::Enabling;

    fn names(ns: &[&str]) -> Vec<String> {
        ns.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn docs_is_valid() {
        let en = |set: &[usize], event| Enabling {
            set: set.iter().copied().collect(),
            event,
        };
        let g = GeneralES::new(
            names(&["a", "b", "d"]),
            None,
            vec![en(&[], 0), en(&[], 1), en(&[0], 2), en(&[1], 2)],
        )
        .unwrap();
        assert!(validate_structure(&g).is_empty());
    }

    #[test]
    fn predecessor_closure_fails() {
        let p = PrimeES::new(
            names(&["a", "b"]),
            &[(0, 1)],
            Some(vec![BitSet::singleton(0), BitSet::singleton(1)]),
        )
        .unwrap();
        let v = validate_structure(&p);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].axiom, "predecessor-closure");
    }

    #[test]
    fn coincidence_reported() {
        let f = EquivFamily::new(
            names(&["a", "b"]),
            vec![BitSet::EMPTY, BitSet::full(2)],
            None,
        )
        .unwrap();
        let v = validate_structure(&f);
        assert!(v.iter().any(|v| v.axiom == "coincidence-freeness"));
    }

    #[test]
    fn cycle_is_antisymmetry_violation() {
        let p = PrimeES::new(names(&["a", "b"]), &[(0, 1), (1, 0)], None).unwrap();
        let v = validate_structure(&p);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].axiom, "antisymmetry");
    }

    #[test]
    fn union_closure_and_securing() {
        // {a}, {b} compatible under {a,b,c} but {a,b} missing; {c} unsecured in {c}? no: {c} reachable.
        let f = EquivFamily::new(
            names(&["a", "b", "c"]),
            vec![
                BitSet::EMPTY,
                BitSet::singleton(0),
                BitSet::singleton(1),
                [0, 2].into_iter().collect(),
                BitSet::full(3),
            ],
            None,
        )
        .unwrap();
        let v = validate_structure(&f);
        assert!(v.iter().any(|v| v.axiom == "union-closure"));
        let g = EquivFamily::new(
            names(&["a", "b"]),
            vec![BitSet::EMPTY, BitSet::full(2), BitSet::singleton(1)],
            None,
        )
        .unwrap();
        assert!(validate_structure(&g).is_empty());
    }
}
