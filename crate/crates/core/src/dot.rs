//! Graphviz export. Causality is drawn as arrows along covering pairs and
//! equivalence as undirected triple lines between consecutive class members.

use std::fmt::Write;

use crate::bitset::BitSet;
use crate::realisations::Realisation;
use crate::structures::{format_set, Equivalence, StructureRef};

const EQUIV_STYLE: &str = "dir=none, color=\"black:white:black:white:black\", constraint=false";

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

struct Graph {
    out: String,
}

impl Graph {
    fn new(name: &str) -> Graph {
        let mut out = String::new();
        writeln!(out, "digraph {} {{", quote(name)).unwrap();
        writeln!(out, "  rankdir=BT;").unwrap();
        writeln!(out, "  node [shape=plaintext];").unwrap();
        Graph { out }
    }

    fn node(&mut self, id: &str, label: Option<&str>) {
        match label {
            Some(l) => writeln!(self.out, "  {} [label={}];", quote(id), quote(l)).unwrap(),
            None => writeln!(self.out, "  {};", quote(id)).unwrap(),
        }
    }

    fn edge(&mut self, from: &str, to: &str, attrs: &str) {
        if attrs.is_empty() {
            writeln!(self.out, "  {} -> {};", quote(from), quote(to)).unwrap();
        } else {
            writeln!(self.out, "  {} -> {} [{attrs}];", quote(from), quote(to)).unwrap();
        }
    }

    fn equiv(&mut self, ids: &[String], equiv: &Equivalence) {
        for class in equiv.nontrivial_classes() {
            let members: Vec<usize> = class.iter().collect();
            for w in members.windows(2) {
                self.edge(&ids[w[0]], &ids[w[1]], EQUIV_STYLE);
            }
        }
    }

    fn finish(mut self) -> String {
        self.out.push_str("}\n");
        self.out
    }
}

fn covers(down: impl Fn(usize) -> BitSet, e: usize) -> BitSet {
    let strict = down(e).without(e);
    strict
        .iter()
        .filter(|&a| !strict.iter().any(|b| b != a && down(b).contains(a)))
        .collect()
}

/// DOT for any structure. Families are drawn as their configuration order.
pub fn structure_dot(s: StructureRef<'_>, name: &str) -> String {
    let mut g = Graph::new(name);
    let names = s.names().to_vec();
    match s {
        StructureRef::Prime(_) | StructureRef::Ese(_) => {
            let (prime, equiv) = match s {
                StructureRef::Prime(p) => (p, None),
                StructureRef::Ese(p) => (p.prime(), Some(p.equiv())),
                _ => unreachable!(),
            };
            for n in &names {
                g.node(n, None);
            }
            for e in 0..prime.len() {
                for a in covers(|x| prime.down(x), e).iter() {
                    g.edge(&names[a], &names[e], "");
                }
            }
            if let Some(equiv) = equiv {
                g.equiv(&names, equiv);
            }
        }
        StructureRef::General(ges) => {
            for n in &names {
                g.node(n, None);
            }
            for (k, en) in ges.enablings().iter().enumerate() {
                let target = &names[en.event];
                match en.set.len() {
                    0 => {}
                    1 => g.edge(&names[en.set.iter().next().unwrap()], target, ""),
                    _ => {
                        let hub = format!("enabling {k}");
                        writeln!(g.out, "  {} [shape=point, label=\"\"];", quote(&hub)).unwrap();
                        for a in en.set.iter() {
                            g.edge(&names[a], &hub, "arrowhead=none");
                        }
                        g.edge(&hub, target, "");
                    }
                }
            }
        }
        StructureRef::Family(f) => {
            let ids: Vec<String> = f.configs().iter().map(|&x| format_set(&names, x)).collect();
            for id in &ids {
                g.node(id, None);
            }
            for (j, &y) in f.configs().iter().enumerate() {
                for (i, &x) in f.configs().iter().enumerate() {
                    if x.is_subset(y)
                        && x != y
                        && !f
                            .configs()
                            .iter()
                            .any(|&z| z != x && z != y && x.is_subset(z) && z.is_subset(y))
                    {
                        let added = format_set(&names, y.difference(x));
                        g.edge(&ids[i], &ids[j], &format!("label={}", quote(&added)));
                    }
                }
            }
        }
    }
    g.finish()
}

/// DOT for a realisation; nodes are labelled by event names.
pub fn realisation_dot(r: &Realisation, events: &[String], name: &str) -> String {
    let mut g = Graph::new(name);
    let ids: Vec<String> = (0..r.len()).map(|n| format!("n{n}")).collect();
    for n in 0..r.len() {
        g.node(&ids[n], Some(&events[r.label(n)]));
    }
    for n in 0..r.len() {
        for m in r.covers(n).iter() {
            g.edge(&ids[m], &ids[n], "");
        }
    }
    g.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::caps::Caps;
    use crate::fixtures;
    use crate::structures::{GeneralES, PrimeES};
    use crate::unfolding::er;

    fn count(dot: &str, needle: &str) -> usize {
        dot.lines().filter(|l| l.contains(needle)).count()
    }

    #[test]
    fn docs_unfolding() {
        let u = er(&fixtures::docs_family(&Caps::default()), &Caps::default()).unwrap();
        let dot = structure_dot(StructureRef::Ese(&u.ese), "docs");
        assert_eq!(count(&dot, " -> ") - count(&dot, "dir=none"), 2);
        assert_eq!(count(&dot, "dir=none"), 1);
        assert_eq!(count(&dot, ";") - count(&dot, " -> ") - 2, 4);
        assert!(dot.contains("\"d_a\" -> \"d_b\" [dir=none"));
    }

    #[test]
    fn empty_graph() {
        let p = PrimeES::new(vec![], &[], None).unwrap();
        assert_eq!(
            structure_dot(StructureRef::Prime(&p), "empty"),
            "digraph \"empty\" {\n  rankdir=BT;\n  node [shape=plaintext];\n}\n"
        );
        let g = GeneralES::new(vec![], None, vec![]).unwrap();
        assert!(!structure_dot(StructureRef::General(&g), "empty").contains("->"));
    }

    #[test]
    fn e1_shape() {
        let r = fixtures::e1();
        let events = fixtures::e0().names().to_vec();
        let dot = realisation_dot(&r, &events, "E1");
        assert_eq!(count(&dot, "label="), 4);
        // a -> c -> d with b -> d on the side
        assert_eq!(count(&dot, " -> "), 3);
    }

    #[test]
    fn enabling_hubs() {
        let dot = structure_dot(StructureRef::General(&fixtures::f0()), "f0");
        assert!(dot.contains("shape=point"));
    }

    #[test]
    fn quoting() {
        assert_eq!(quote("a\"b"), "\"a\\\"b\"");
    }
}
