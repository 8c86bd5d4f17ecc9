use std::borrow::Cow;
use std::fmt;
use std::str::FromStr;

use crate::bitset::BitSet;
use crate::caps::Caps;
use crate::error::{Error, Result};

use super::{format_set, EquivFamily, Equivalence, Ese, StructureRef, Violation};

/// A partial function between event indices; `None` means undefined.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StructureMap {
    table: Vec<Option<usize>>,
}

impl StructureMap {
    pub fn new(table: Vec<Option<usize>>) -> Self {
        StructureMap { table }
    }

    pub fn identity(n: usize) -> Self {
        StructureMap {
            table: (0..n).map(Some).collect(),
        }
    }

    pub fn undefined(n: usize) -> Self {
        StructureMap {
            table: vec![None; n],
        }
    }

    /// Number of source events.
    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn get(&self, i: usize) -> Option<usize> {
        self.table[i]
    }

    pub fn table(&self) -> &[Option<usize>] {
        &self.table
    }

    pub fn domain(&self) -> BitSet {
        (0..self.table.len())
            .filter(|&i| self.table[i].is_some())
            .collect()
    }

    pub fn is_total(&self) -> bool {
        self.table.iter().all(Option::is_some)
    }

    /// Direct image of a set.
    pub fn image(&self, set: BitSet) -> BitSet {
        set.map(|i| self.table[i])
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &StructureMap) -> StructureMap {
        StructureMap {
            table: self
                .table
                .iter()
                .map(|t| t.and_then(|j| other.table[j]))
                .collect(),
        }
    }

    /// Whether `self` is injective on the defined part of `set`.
    pub fn is_injective_on(&self, set: BitSet) -> bool {
        let mut seen = BitSet::EMPTY;
        for i in set.iter() {
            if let Some(j) = self.table[i] {
                if seen.contains(j) {
                    return false;
                }
                seen.insert(j);
            }
        }
        true
    }
}

/// The categories in which a map can be checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Category {
    /// Equivalence families.
    Family,
    /// General event structures.
    General,
    /// Ese's.
    Ese,
    /// Prime event structures.
    Prime,
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Category::Family => "family",
            Category::General => "general",
            Category::Ese => "ese",
            Category::Prime => "prime",
        })
    }
}

impl FromStr for Category {
    type Err = Error;

    fn from_str(s: &str) -> Result<Category> {
        match s {
            "family" | "fam" => Ok(Category::Family),
            "general" | "ges" => Ok(Category::General),
            "ese" => Ok(Category::Ese),
            "prime" => Ok(Category::Prime),
            other => Err(Error::Parse(format!("unknown category `{other}`"))),
        }
    }
}

/// Check whether `m` is a map from `src` to `tgt` in `category`.
pub fn validate_map(
    m: &StructureMap,
    src: StructureRef<'_>,
    tgt: StructureRef<'_>,
    category: Category,
    caps: &Caps,
) -> Result<Vec<Violation>> {
    let expected = match category {
        Category::Family => "family, ese or prime",
        Category::General => "general",
        Category::Ese => "ese or prime",
        Category::Prime => "prime",
    };
    let accepts = |s: &StructureRef<'_>| match category {
        Category::Family => !matches!(s, StructureRef::General(_)),
        Category::General => matches!(s, StructureRef::General(_)),
        Category::Ese => matches!(s, StructureRef::Prime(_) | StructureRef::Ese(_)),
        Category::Prime => matches!(s, StructureRef::Prime(_)),
    };
    for s in [&src, &tgt] {
        if !accepts(s) {
            return Err(Error::KindMismatch {
                expected,
                found: s.kind(),
            });
        }
    }
    if let Some(v) = shape_violation(m, src.len(), tgt.len()) {
        return Ok(vec![v]);
    }
    if let (StructureRef::General(g), StructureRef::General(h)) = (src, tgt) {
        return Ok(general_map_violations(m, g, h));
    }
    let a = family_of(src, caps)?;
    let b = family_of(tgt, caps)?;
    Ok(family_map_violations(m, &a, &b))
}

fn family_of<'a>(s: StructureRef<'a>, caps: &Caps) -> Result<Cow<'a, EquivFamily>> {
    Ok(match s {
        StructureRef::Family(f) => Cow::Borrowed(f),
        StructureRef::Ese(p) => Cow::Owned(p.family(caps)?),
        StructureRef::Prime(p) => Cow::Owned(Ese::with_identity(p.clone()).family(caps)?),
        StructureRef::General(_) => unreachable!("general structures are checked directly"),
    })
}

fn shape_violation(m: &StructureMap, src_len: usize, tgt_len: usize) -> Option<Violation> {
    if m.len() != src_len {
        return Some(Violation::new(
            "map-domain",
            format!("table covers {} events, source has {src_len}", m.len()),
        ));
    }
    m.table()
        .iter()
        .flatten()
        .find(|&&j| j >= tgt_len)
        .map(|j| Violation::new("map-range", format!("target index {j} out of range")))
}

/// Violations of the equivalence family map conditions.
pub fn family_map_violations(m: &StructureMap, a: &EquivFamily, b: &EquivFamily) -> Vec<Violation> {
    let mut out = Vec::new();
    for class in a.equiv().nontrivial_classes() {
        let images: Vec<Option<usize>> = class.iter().map(|i| m.get(i)).collect();
        let all_undefined = images.iter().all(Option::is_none);
        let all_equiv = images.iter().all(Option::is_some)
            && images
                .windows(2)
                .all(|w| b.equiv().equiv(w[0].unwrap(), w[1].unwrap()));
        if !(all_undefined || all_equiv) {
            out.push(Violation::new(
                "equivalence-preservation",
                format!("class {} is not sent to one class", a.format_set(class)),
            ));
        }
    }
    for &x in a.configs() {
        let fx = m.image(x);
        if !b.contains(fx) {
            out.push(Violation::new(
                "configuration-image",
                format!("{} maps to {}", a.format_set(x), b.format_set(fx)),
            ));
        }
        if let Some((p, q)) = reflection_failure(m, x, a.equiv(), b.equiv()) {
            out.push(Violation::new(
                "equivalence-reflection",
                format!(
                    "{} and {} in {} have equivalent images",
                    a.name(p),
                    a.name(q),
                    a.format_set(x)
                ),
            ));
        }
    }
    out
}

fn reflection_failure(
    m: &StructureMap,
    x: BitSet,
    src: &Equivalence,
    tgt: &Equivalence,
) -> Option<(usize, usize)> {
    let members: Vec<usize> = x.iter().collect();
    for (k, &p) in members.iter().enumerate() {
        for &q in &members[k + 1..] {
            if let (Some(fp), Some(fq)) = (m.get(p), m.get(q)) {
                if tgt.equiv(fp, fq) && !src.equiv(p, q) {
                    return Some((p, q));
                }
            }
        }
    }
    None
}

fn general_map_violations(
    m: &StructureMap,
    g: &super::GeneralES,
    h: &super::GeneralES,
) -> Vec<Violation> {
    let mut out = Vec::new();
    for &x in g.con().generators() {
        let fx = m.image(x);
        if !h.is_consistent(fx) {
            out.push(Violation::new(
                "consistency-image",
                format!(
                    "{} maps to inconsistent {}",
                    format_set(g.names(), x),
                    format_set(h.names(), fx)
                ),
            ));
        }
        if !m.is_injective_on(x) {
            out.push(Violation::new(
                "local-injectivity",
                format!("not injective on consistent {}", format_set(g.names(), x)),
            ));
        }
    }
    for en in g.enablings() {
        if !g.is_consistent(en.set) {
            continue;
        }
        if let Some(fe) = m.get(en.event) {
            let fx = m.image(en.set);
            if !h.enables(fx, fe) {
                out.push(Violation::new(
                    "enabling-preservation",
                    format!(
                        "{} ⊢ {} but not {} ⊢ {}",
                        format_set(g.names(), en.set),
                        g.name(en.event),
                        format_set(h.names(), fx),
                        h.name(fe)
                    ),
                ));
            }
        }
    }
    out
}

/// The structural characterisation of ese maps: ≡ preserved, consistent sets
/// map to consistent sets reflecting ≡, and `q ≤ f(p)` is witnessed below `p`.
pub fn ese_map_violations(m: &StructureMap, p: &Ese, q: &Ese) -> Vec<Violation> {
    if let Some(v) = shape_violation(m, p.len(), q.len()) {
        return vec![v];
    }
    let mut out = Vec::new();
    for class in p.equiv().nontrivial_classes() {
        let images: Vec<Option<usize>> = class.iter().map(|i| m.get(i)).collect();
        let ok = images.iter().all(Option::is_none)
            || (images.iter().all(Option::is_some)
                && images
                    .windows(2)
                    .all(|w| q.equiv().equiv(w[0].unwrap(), w[1].unwrap())));
        if !ok {
            out.push(Violation::new(
                "equivalence-preservation",
                format!(
                    "class {} is not sent to one class",
                    format_set(p.names(), class)
                ),
            ));
        }
    }
    for &x in p.prime().con().generators() {
        let fx = m.image(x);
        if !q.prime().is_consistent(fx) {
            out.push(Violation::new(
                "consistency-image",
                format!(
                    "{} maps to inconsistent {}",
                    format_set(p.names(), x),
                    format_set(q.names(), fx)
                ),
            ));
        }
        if let Some((a, b)) = reflection_failure(m, x, p.equiv(), q.equiv()) {
            out.push(Violation::new(
                "equivalence-reflection",
                format!("{} and {} have equivalent images", p.name(a), p.name(b)),
            ));
        }
    }
    for e in 0..p.len() {
        if let Some(fe) = m.get(e) {
            let reached = m.image(p.prime().down(e));
            let needed = q.prime().down(fe);
            if !needed.is_subset(reached) {
                out.push(Violation::new(
                    "causal-reflection",
                    format!(
                        "{} below {} has no preimage below {}",
                        format_set(q.names(), needed.difference(reached)),
                        q.name(fe),
                        p.name(e)
                    ),
                ));
            }
        }
    }
    out
}

/// Equidefined with pointwise equivalent results in the target.
pub fn map_equiv(m1: &StructureMap, m2: &StructureMap, target: &Equivalence) -> bool {
    m1.len() == m2.len()
        && m1
            .table()
            .iter()
            .zip(m2.table())
            .all(|(a, b)| match (a, b) {
                (None, None) => true,
                (Some(x), Some(y)) => target.equiv(*x, *y),
                _ => false,
            })
}
