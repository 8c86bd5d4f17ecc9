//! The data model: prime event structures, ese's, general event structures,
//! equivalence families, and maps between them.

mod consistency;
mod equivalence;
mod family;
mod general;
mod maps;
mod prime;
mod validate;

pub use consistency::Consistency;
pub use equivalence::Equivalence;
pub use family::{irreducibles, EquivFamily};
pub use general::{configurations, fam, fam_to_ges, is_replete, Enabling, GeneralES};
pub use maps::{
    ese_map_violations, family_map_violations, map_equiv, validate_map, Category, StructureMap,
};
pub use prime::{configurations_ese, Ese, PrimeES};
pub use validate::{validate_structure, Violation};

pub(crate) use prime::close_transitively;

use crate::bitset::{BitSet, MAX_ELEMENTS};
use crate::error::{Error, Result};

/// A borrowed structure of any kind.
#[derive(Debug, Clone, Copy)]
pub enum StructureRef<'a> {
    Prime(&'a PrimeES),
    Ese(&'a Ese),
    General(&'a GeneralES),
    Family(&'a EquivFamily),
}

impl StructureRef<'_> {
    pub fn kind(&self) -> &'static str {
        match self {
            StructureRef::Prime(_) => "prime",
            StructureRef::Ese(_) => "ese",
            StructureRef::General(_) => "general",
            StructureRef::Family(_) => "family",
        }
    }

    pub fn names(&self) -> &[String] {
        match self {
            StructureRef::Prime(p) => p.names(),
            StructureRef::Ese(p) => p.names(),
            StructureRef::General(g) => g.names(),
            StructureRef::Family(f) => f.names(),
        }
    }

    pub fn len(&self) -> usize {
        self.names().len()
    }

    pub fn is_empty(&self) -> bool {
        self.names().is_empty()
    }
}

impl<'a> From<&'a PrimeES> for StructureRef<'a> {
    fn from(p: &'a PrimeES) -> Self {
        StructureRef::Prime(p)
    }
}

impl<'a> From<&'a Ese> for StructureRef<'a> {
    fn from(p: &'a Ese) -> Self {
        StructureRef::Ese(p)
    }
}

impl<'a> From<&'a GeneralES> for StructureRef<'a> {
    fn from(g: &'a GeneralES) -> Self {
        StructureRef::General(g)
    }
}

impl<'a> From<&'a EquivFamily> for StructureRef<'a> {
    fn from(f: &'a EquivFamily) -> Self {
        StructureRef::Family(f)
    }
}

/// An owned structure of any kind.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Structure {
    Prime(PrimeES),
    Ese(Ese),
    General(GeneralES),
    Family(EquivFamily),
}

impl Structure {
    pub fn as_ref(&self) -> StructureRef<'_> {
        match self {
            Structure::Prime(p) => StructureRef::Prime(p),
            Structure::Ese(p) => StructureRef::Ese(p),
            Structure::General(g) => StructureRef::General(g),
            Structure::Family(f) => StructureRef::Family(f),
        }
    }

    pub fn kind(&self) -> &'static str {
        self.as_ref().kind()
    }

    pub fn names(&self) -> &[String] {
        match self {
            Structure::Prime(p) => p.names(),
            Structure::Ese(p) => p.names(),
            Structure::General(g) => g.names(),
            Structure::Family(f) => f.names(),
        }
    }

    /// The equivalence family of configurations of any kind of structure.
    pub fn to_family(&self, caps: &crate::caps::Caps) -> Result<EquivFamily> {
        match self {
            Structure::Prime(p) => Ese::with_identity(p.clone()).family(caps),
            Structure::Ese(p) => p.family(caps),
            Structure::General(g) => fam(g, caps),
            Structure::Family(f) => Ok(f.clone()),
        }
    }
}

impl<'a> From<&'a Structure> for StructureRef<'a> {
    fn from(s: &'a Structure) -> Self {
        s.as_ref()
    }
}

/// Position of each name in sorted order; rejects duplicates and oversized inputs.
pub(crate) fn name_order(names: &[String]) -> Result<Vec<usize>> {
    if names.len() > MAX_ELEMENTS {
        return Err(Error::TooManyEvents {
            count: names.len(),
            max: MAX_ELEMENTS,
        });
    }
    let mut order: Vec<usize> = (0..names.len()).collect();
    order.sort_by(|&a, &b| names[a].cmp(&names[b]));
    if let Some(w) = order.windows(2).find(|w| names[w[0]] == names[w[1]]) {
        return Err(Error::DuplicateEvent(names[w[0]].clone()));
    }
    let mut perm = vec![0; names.len()];
    for (new, &old) in order.iter().enumerate() {
        perm[old] = new;
    }
    Ok(perm)
}

/// Render a set of events as `{a,b}`.
pub fn format_set(names: &[String], set: BitSet) -> String {
    let parts: Vec<&str> = set
        .iter()
        .map(|i| names.get(i).map(String::as_str).unwrap_or("?"))
        .collect();
    format!("{{{}}}", parts.join(","))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicate_names_rejected() {
        let r = name_order(&["a".into(), "b".into(), "a".into()]);
        assert!(matches!(r, Err(Error::DuplicateEvent(n)) if n == "a"));
    }
}
