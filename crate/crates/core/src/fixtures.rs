//! The shipped example structures, compiled in.

use crate::caps::Caps;
use crate::io::{
    map_from_table, parse_map_doc, parse_realisation_doc, parse_structure, realisation_from_doc,
};
use crate::realisations::Realisation;
use crate::structures::{fam, EquivFamily, Ese, GeneralES, Structure, StructureMap};

pub const DOCS: &str = include_str!("../../../fixtures/docs.ges.json");
pub const E0: &str = include_str!("../../../fixtures/e0.ges.json");
pub const F0: &str = include_str!("../../../fixtures/f0.ges.json");
pub const NONINJ: &str = include_str!("../../../fixtures/noninj.ges.json");
pub const BLOCKED: &str = include_str!("../../../fixtures/blocked.ges.json");
pub const EX53: &str = include_str!("../../../fixtures/ex53.ese.json");
pub const E1: &str = include_str!("../../../fixtures/e1.real.json");
pub const E2: &str = include_str!("../../../fixtures/e2.real.json");
pub const F1: &str = include_str!("../../../fixtures/f1.real.json");
pub const APPB_A: &str = include_str!("../../../fixtures/appb_a.ese.json");
pub const APPB_B: &str = include_str!("../../../fixtures/appb_b.ese.json");
pub const APPB_C: &str = include_str!("../../../fixtures/appb_c.ese.json");
pub const APPB_P: &str = include_str!("../../../fixtures/appb_p.ese.json");
pub const APPB_D: &str = include_str!("../../../fixtures/appb_d.ese.json");
pub const APPB_BP: &str = include_str!("../../../fixtures/appb_bp.ese.json");
pub const APPB_E: &str = include_str!("../../../fixtures/appb_e.ese.json");
pub const APPB_F: &str = include_str!("../../../fixtures/appb_f.ese.json");
pub const APPB_MAP_F: &str = include_str!("../../../fixtures/appb_map_f.map.json");
pub const APPB_MAP_G: &str = include_str!("../../../fixtures/appb_map_g.map.json");

/// Every structure fixture as `(file name, text)`.
pub const STRUCTURES: &[(&str, &str)] = &[
    ("docs.ges.json", DOCS),
    ("e0.ges.json", E0),
    ("f0.ges.json", F0),
    ("noninj.ges.json", NONINJ),
    ("blocked.ges.json", BLOCKED),
    ("ex53.ese.json", EX53),
    ("appb_a.ese.json", APPB_A),
    ("appb_b.ese.json", APPB_B),
    ("appb_c.ese.json", APPB_C),
    ("appb_p.ese.json", APPB_P),
    ("appb_d.ese.json", APPB_D),
    ("appb_bp.ese.json", APPB_BP),
    ("appb_e.ese.json", APPB_E),
    ("appb_f.ese.json", APPB_F),
];

pub fn structure(text: &str) -> Structure {
    parse_structure(text).expect("fixtures parse")
}

fn general(text: &str) -> GeneralES {
    match structure(text) {
        Structure::General(g) => g,
        other => panic!("expected a general event structure, found {}", other.kind()),
    }
}

fn ese(text: &str) -> Ese {
    match structure(text) {
        Structure::Ese(p) => p,
        other => panic!("expected an ese, found {}", other.kind()),
    }
}

pub fn docs() -> GeneralES {
    general(DOCS)
}

pub fn e0() -> GeneralES {
    general(E0)
}

pub fn f0() -> GeneralES {
    general(F0)
}

pub fn noninj() -> GeneralES {
    general(NONINJ)
}

/// A general event structure that is not replete: `{a, c}` is consistent but lies in no configuration.
pub fn blocked() -> GeneralES {
    general(BLOCKED)
}

pub fn ex53() -> Ese {
    ese(EX53)
}

pub fn docs_family(caps: &Caps) -> EquivFamily {
    fam(&docs(), caps).expect("fixture within caps")
}

fn realisation(text: &str, over: &GeneralES) -> Realisation {
    let doc = parse_realisation_doc(text).expect("fixtures parse");
    realisation_from_doc(&doc, over.names()).expect("fixture realisation resolves")
}

pub fn e1() -> Realisation {
    realisation(E1, &e0())
}

pub fn e2() -> Realisation {
    realisation(E2, &e0())
}

pub fn f1() -> Realisation {
    realisation(F1, &f0())
}

pub fn appb_a() -> Ese {
    ese(APPB_A)
}

pub fn appb_b() -> Ese {
    ese(APPB_B)
}

pub fn appb_c() -> Ese {
    ese(APPB_C)
}

pub fn appb_p() -> Ese {
    ese(APPB_P)
}

pub fn appb_d() -> Ese {
    ese(APPB_D)
}

pub fn appb_bp() -> Ese {
    ese(APPB_BP)
}

pub fn appb_e() -> Ese {
    ese(APPB_E)
}

pub fn appb_f() -> Ese {
    ese(APPB_F)
}

fn map(text: &str, source: &Ese, target: &Ese) -> StructureMap {
    let doc = parse_map_doc(text).expect("fixtures parse");
    map_from_table(&doc.table, source.names(), target.names()).expect("fixture map resolves")
}

/// `f: A → C`.
pub fn appb_map_f() -> StructureMap {
    map(APPB_MAP_F, &appb_a(), &appb_c())
}

/// `g: B → C`.
pub fn appb_map_g() -> StructureMap {
    map(APPB_MAP_G, &appb_b(), &appb_c())
}

/// The map between two structures sending each event to the event named by
/// its leading letter.
pub fn by_lettering(source: &[String], target: &[String]) -> StructureMap {
    StructureMap::new(
        source
            .iter()
            .map(|s| {
                target
                    .iter()
                    .position(|t| t == s)
                    .or_else(|| {
                        target
                            .iter()
                            .position(|t| t.trim_end_matches('\'') == s.trim_end_matches('\''))
                    })
                    .or_else(|| {
                        target
                            .iter()
                            .position(|t| t.chars().next() == s.chars().next())
                    })
            })
            .collect(),
    )
}

/// Every structure fixture as an equivalence family.
pub fn families(caps: &Caps) -> Vec<(&'static str, EquivFamily)> {
    STRUCTURES
        .iter()
        .map(|(name, text)| {
            (
                *name,
                structure(text)
                    .to_family(caps)
                    .expect("fixture within caps"),
            )
        })
        .collect()
}
