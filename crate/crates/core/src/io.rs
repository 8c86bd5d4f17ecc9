//! JSON file formats for structures, maps and realisations.
//!
//! ```json
//! {"kind": "ese", "events": ["a", "b"], "le": [["a", "b"]], "con": [["a", "b"]], "equiv": []}
//! {"kind": "general", "events": ["a", "d"], "enabling": [{"set": [], "event": "a"}, {"set": ["a"], "event": "d"}]}
//! {"kind": "family", "events": ["a"], "configs": [[], ["a"]], "equiv": []}
//! {"kind": "map", "source": "a.json", "target": "b.json", "table": {"a": "x"}}
//! ```
//!
//! `le` lists strict pairs (closed transitively on input, written out in full);
//! an absent `con` makes every set consistent.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::realisations::Realisation;
use crate::structures::{
    Enabling, EquivFamily, Equivalence, Ese, GeneralES, PrimeES, Structure, StructureMap,
    StructureRef,
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureDoc {
    pub kind: String,
    pub events: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub le: Option<Vec<(String, String)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub con: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub equiv: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub enabling: Option<Vec<EnablingDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub configs: Option<Vec<Vec<String>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnablingDoc {
    pub set: Vec<String>,
    pub event: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapDoc {
    #[serde(default = "map_kind")]
    pub kind: String,
    pub source: String,
    pub target: String,
    pub table: BTreeMap<String, String>,
}

fn map_kind() -> String {
    "map".into()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RealisationDoc {
    pub kind: String,
    /// Path of the family the realisation lives over, relative to this file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub over: Option<String>,
    pub nodes: Vec<String>,
    pub labels: BTreeMap<String, String>,
    #[serde(default)]
    pub le: Vec<(String, String)>,
}

struct Names<'a> {
    index: HashMap<&'a str, usize>,
}

impl<'a> Names<'a> {
    fn new(names: &'a [String]) -> Result<Self> {
        let mut index = HashMap::new();
        for (i, n) in names.iter().enumerate() {
            if n.is_empty() || n.chars().any(char::is_whitespace) {
                return Err(Error::Parse(format!(
                    "event name `{n}` must be a nonempty token"
                )));
            }
            if index.insert(n.as_str(), i).is_some() {
                return Err(Error::DuplicateEvent(n.clone()));
            }
        }
        Ok(Names { index })
    }

    fn get(&self, name: &str) -> Result<usize> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownEvent(name.to_string()))
    }

    fn set(&self, names: &[String]) -> Result<BitSet> {
        names.iter().map(|n| self.get(n)).collect()
    }

    fn sets(&self, sets: &[Vec<String>]) -> Result<Vec<BitSet>> {
        sets.iter().map(|s| self.set(s)).collect()
    }
}

fn reject(doc: &StructureDoc, fields: &[(&str, bool)]) -> Result<()> {
    for (name, present) in fields {
        if *present {
            return Err(Error::Parse(format!(
                "field `{name}` is not allowed for kind `{}`",
                doc.kind
            )));
        }
    }
    Ok(())
}

/// Parse a structure document.
pub fn parse_structure(text: &str) -> Result<Structure> {
    let doc: StructureDoc = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    structure_from_doc(&doc)
}

pub fn structure_from_doc(doc: &StructureDoc) -> Result<Structure> {
    let names = Names::new(&doc.events)?;
    let n = doc.events.len();
    let lt = || -> Result<Vec<(usize, usize)>> {
        doc.le
            .iter()
            .flatten()
            .map(|(a, b)| Ok((names.get(a)?, names.get(b)?)))
            .collect()
    };
    let con =
        || -> Result<Option<Vec<BitSet>>> { doc.con.as_ref().map(|c| names.sets(c)).transpose() };
    let classes = || -> Result<Vec<BitSet>> { names.sets(doc.equiv.as_deref().unwrap_or(&[])) };
    match doc.kind.as_str() {
        "prime" => {
            reject(
                doc,
                &[
                    ("equiv", doc.equiv.is_some()),
                    ("enabling", doc.enabling.is_some()),
                    ("configs", doc.configs.is_some()),
                ],
            )?;
            Ok(Structure::Prime(PrimeES::new(
                doc.events.clone(),
                &lt()?,
                con()?,
            )?))
        }
        "ese" => {
            reject(
                doc,
                &[
                    ("enabling", doc.enabling.is_some()),
                    ("configs", doc.configs.is_some()),
                ],
            )?;
            Ok(Structure::Ese(Ese::build(
                doc.events.clone(),
                &lt()?,
                con()?,
                &classes()?,
            )?))
        }
        "general" => {
            reject(
                doc,
                &[
                    ("le", doc.le.is_some()),
                    ("equiv", doc.equiv.is_some()),
                    ("configs", doc.configs.is_some()),
                ],
            )?;
            let enabling = doc
                .enabling
                .iter()
                .flatten()
                .map(|en| {
                    Ok(Enabling {
                        set: names.set(&en.set)?,
                        event: names.get(&en.event)?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Structure::General(GeneralES::new(
                doc.events.clone(),
                con()?,
                enabling,
            )?))
        }
        "family" => {
            reject(
                doc,
                &[
                    ("le", doc.le.is_some()),
                    ("con", doc.con.is_some()),
                    ("enabling", doc.enabling.is_some()),
                ],
            )?;
            let configs = names.sets(doc.configs.as_deref().unwrap_or(&[]))?;
            let equiv = Equivalence::from_classes(n, &classes()?);
            Ok(Structure::Family(EquivFamily::new(
                doc.events.clone(),
                configs,
                Some(equiv),
            )?))
        }
        other => Err(Error::Parse(format!("unknown structure kind `{other}`"))),
    }
}

fn names_of(names: &[String], set: BitSet) -> Vec<String> {
    set.iter().map(|i| names[i].clone()).collect()
}

fn lt_pairs(names: &[String], p: &PrimeES) -> Vec<(String, String)> {
    let mut out = Vec::new();
    for b in 0..p.len() {
        for a in p.strict_down(b).iter() {
            out.push((a, b));
        }
    }
    out.sort();
    out.into_iter()
        .map(|(a, b)| (names[a].clone(), names[b].clone()))
        .collect()
}

fn con_doc(
    names: &[String],
    con: &crate::structures::Consistency,
    n: usize,
) -> Option<Vec<Vec<String>>> {
    if con.is_total(n) {
        None
    } else {
        Some(
            con.generators()
                .iter()
                .map(|g| names_of(names, *g))
                .collect(),
        )
    }
}

fn equiv_doc(names: &[String], eq: &Equivalence) -> Vec<Vec<String>> {
    eq.nontrivial_classes()
        .iter()
        .map(|c| names_of(names, *c))
        .collect()
}

/// The document describing a structure.
pub fn structure_to_doc<'a>(s: impl Into<StructureRef<'a>>) -> StructureDoc {
    let s = s.into();
    let names = s.names();
    let mut doc = StructureDoc {
        kind: s.kind().to_string(),
        events: names.to_vec(),
        le: None,
        con: None,
        equiv: None,
        enabling: None,
        configs: None,
    };
    match s {
        StructureRef::Prime(p) => {
            doc.le = Some(lt_pairs(names, p));
            doc.con = con_doc(names, p.con(), p.len());
        }
        StructureRef::Ese(p) => {
            doc.le = Some(lt_pairs(names, p.prime()));
            doc.con = con_doc(names, p.prime().con(), p.len());
            doc.equiv = Some(equiv_doc(names, p.equiv()));
        }
        StructureRef::General(g) => {
            doc.con = con_doc(names, g.con(), g.len());
            doc.enabling = Some(
                g.enablings()
                    .iter()
                    .map(|en| EnablingDoc {
                        set: names_of(names, en.set),
                        event: names[en.event].clone(),
                    })
                    .collect(),
            );
        }
        StructureRef::Family(f) => {
            doc.configs = Some(f.configs().iter().map(|c| names_of(names, *c)).collect());
            doc.equiv = Some(equiv_doc(names, f.equiv()));
        }
    }
    doc
}

/// Pretty JSON for a structure, with a trailing newline.
pub fn structure_to_json<'a>(s: impl Into<StructureRef<'a>>) -> String {
    let mut text =
        serde_json::to_string_pretty(&structure_to_doc(s)).expect("documents always serialise");
    text.push('\n');
    text
}

pub fn parse_map_doc(text: &str) -> Result<MapDoc> {
    let doc: MapDoc = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    if doc.kind != "map" {
        return Err(Error::Parse(format!(
            "expected kind `map`, found `{}`",
            doc.kind
        )));
    }
    Ok(doc)
}

/// Resolve a name table against source and target event names.
pub fn map_from_table(
    table: &BTreeMap<String, String>,
    source: &[String],
    target: &[String],
) -> Result<StructureMap> {
    let src = Names::new(source)?;
    let tgt = Names::new(target)?;
    let mut out = vec![None; source.len()];
    for (a, b) in table {
        out[src.get(a)?] = Some(tgt.get(b)?);
    }
    Ok(StructureMap::new(out))
}

pub fn map_to_table(
    m: &StructureMap,
    source: &[String],
    target: &[String],
) -> BTreeMap<String, String> {
    m.table()
        .iter()
        .enumerate()
        .filter_map(|(i, t)| t.map(|j| (source[i].clone(), target[j].clone())))
        .collect()
}

/// Node names for a realisation: the label name, suffixed by a counter when repeated.
pub fn realisation_node_names(r: &Realisation, events: &[String]) -> Vec<String> {
    let mut total: HashMap<usize, usize> = HashMap::new();
    for &l in r.labels() {
        *total.entry(l).or_default() += 1;
    }
    let mut seen: HashMap<usize, usize> = HashMap::new();
    r.labels()
        .iter()
        .map(|&l| {
            let k = seen.entry(l).or_default();
            *k += 1;
            if total[&l] > 1 {
                format!("{}{}", events[l], k)
            } else {
                events[l].clone()
            }
        })
        .collect()
}

pub fn realisation_to_doc(
    r: &Realisation,
    events: &[String],
    over: Option<String>,
) -> RealisationDoc {
    let nodes = realisation_node_names(r, events);
    let mut le = Vec::new();
    for b in 0..r.len() {
        for a in r.strict_down(b).iter() {
            le.push((nodes[a].clone(), nodes[b].clone()));
        }
    }
    RealisationDoc {
        kind: "realisation".into(),
        over,
        labels: (0..r.len())
            .map(|n| (nodes[n].clone(), events[r.label(n)].clone()))
            .collect(),
        nodes,
        le,
    }
}

pub fn parse_realisation_doc(text: &str) -> Result<RealisationDoc> {
    let doc: RealisationDoc =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    if doc.kind != "realisation" {
        return Err(Error::Parse(format!(
            "expected kind `realisation`, found `{}`",
            doc.kind
        )));
    }
    Ok(doc)
}

/// Resolve a realisation document against the events of its family.
pub fn realisation_from_doc(doc: &RealisationDoc, events: &[String]) -> Result<Realisation> {
    let nodes = Names::new(&doc.nodes)?;
    let ev = Names::new(events)?;
    let labels = doc
        .nodes
        .iter()
        .map(|n| {
            let l = doc
                .labels
                .get(n)
                .ok_or_else(|| Error::Parse(format!("node `{n}` has no label")))?;
            ev.get(l)
        })
        .collect::<Result<Vec<_>>>()?;
    let lt = doc
        .le
        .iter()
        .map(|(a, b)| Ok((nodes.get(a)?, nodes.get(b)?)))
        .collect::<Result<Vec<_>>>()?;
    Realisation::new(labels, &lt)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_ese() {
        let text = r#"{"kind":"ese","events":["b","a","c"],"le":[["a","c"]],"equiv":[["a","b"]]}"#;
        let s = parse_structure(text).unwrap();
        let out = structure_to_json(&s);
        assert_eq!(parse_structure(&out).unwrap(), s);
        assert!(out.contains("\"equiv\""));
    }

    #[test]
    fn unknown_event_is_reported() {
        let text = r#"{"kind":"prime","events":["a"],"le":[["a","z"]]}"#;
        assert!(matches!(parse_structure(text), Err(Error::UnknownEvent(e)) if e == "z"));
    }

    #[test]
    fn wrong_fields_rejected() {
        let text = r#"{"kind":"general","events":["a"],"le":[]}"#;
        assert!(matches!(parse_structure(text), Err(Error::Parse(_))));
        assert!(parse_structure(r#"{"kind":"prime","events":["a"],"bogus":1}"#).is_err());
    }

    #[test]
    fn map_tables() {
        let src = vec!["a".to_string(), "b".to_string()];
        let tgt = vec!["x".to_string()];
        let table: BTreeMap<String, String> = [("a".to_string(), "x".to_string())].into();
        let m = map_from_table(&table, &src, &tgt).unwrap();
        assert_eq!(m.table(), &[Some(0), None]);
        assert_eq!(map_to_table(&m, &src, &tgt), table);
    }

    #[test]
    fn every_fixture_round_trips() {
        for (name, text) in crate::fixtures::STRUCTURES {
            let s = parse_structure(text).unwrap();
            let out = structure_to_json(&s);
            assert_eq!(parse_structure(&out).unwrap(), s, "{name}");
            assert_eq!(
                structure_to_json(&parse_structure(&out).unwrap()),
                out,
                "{name}"
            );
        }
        for text in [
            crate::fixtures::E1,
            crate::fixtures::E2,
            crate::fixtures::F1,
        ] {
            let doc = parse_realisation_doc(text).unwrap();
            let events: Vec<String> = ["a", "b", "c", "d"].map(String::from).to_vec();
            let r = realisation_from_doc(&doc, &events).unwrap();
            let back = realisation_to_doc(&r, &events, doc.over.clone());
            assert_eq!(realisation_from_doc(&back, &events).unwrap(), r);
        }
    }
}
