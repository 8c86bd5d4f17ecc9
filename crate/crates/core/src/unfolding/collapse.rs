use crate::bitset::BitSet;
use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::structures::{fam, Enabling, EquivFamily, GeneralES, StructureMap};

use super::{er, UnfoldResult};

/// `col(f)` with the assignment of events to the class events.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Collapse {
    pub ges: GeneralES,
    /// `class_of[a]` is the event of `ges` standing for the class of `a`.
    pub class_of: Vec<usize>,
}

/// Name of an equivalence class: the member name, or `{a,b}` for several members.
fn class_name(f: &EquivFamily, class: BitSet) -> String {
    if class.len() == 1 {
        f.name(class.first().expect("nonempty")).to_string()
    } else {
        f.format_set(class)
    }
}

/// The collapse of a family to a general event structure on its classes.
///
/// `X ∈ Con` iff `X ⊆ y≡` for a configuration `y`; `X ⊢ e` iff
/// `e ∈ y≡ ⊆ X ∪ {e}` for a configuration `y`.
pub fn col(f: &EquivFamily) -> Collapse {
    let classes = f.equiv().classes();
    let raw_names: Vec<String> = classes.iter().map(|&c| class_name(f, c)).collect();
    let mut raw_class_of = vec![0; f.len()];
    for (k, c) in classes.iter().enumerate() {
        for a in c.iter() {
            raw_class_of[a] = k;
        }
    }
    let lift = |y: BitSet| -> BitSet { y.iter().map(|a| raw_class_of[a]).collect() };
    let lifted: Vec<BitSet> = f.configs().iter().map(|&y| lift(y)).collect();
    let maximal: Vec<BitSet> = lifted
        .iter()
        .copied()
        .filter(|&x| !lifted.iter().any(|&y| y != x && x.is_subset(y)))
        .collect();
    let mut enabling = Vec::new();
    for &y in &lifted {
        for e in y.iter() {
            enabling.push(Enabling {
                set: y.without(e),
                event: e,
            });
        }
    }
    let ges = GeneralES::new(raw_names.clone(), Some(maximal), enabling)
        .expect("class names are distinct");
    let class_of = raw_class_of
        .iter()
        .map(|&k| {
            ges.index_of(&raw_names[k])
                .expect("class names survive the build")
        })
        .collect();
    Collapse { ges, class_of }
}

/// The unit `η: f → fam(col(f))`, sending each event to its class.
pub fn col_unit(c: &Collapse, caps: &Caps) -> Result<(EquivFamily, StructureMap)> {
    let target = fam(&c.ges, caps)?;
    let table = c
        .class_of
        .iter()
        .map(|&k| target.index_of(c.ges.name(k)))
        .collect();
    Ok((target, StructureMap::new(table)))
}

/// The map `k: col(f) → b` with `fam(k) ∘ η = m`, for `m: f → fam(b)`.
///
/// `fam_b` must be `fam(b)`, whose events are the securable events of `b`.
pub fn factor_through_unit(
    f: &EquivFamily,
    c: &Collapse,
    b: &GeneralES,
    fam_b: &EquivFamily,
    m: &StructureMap,
) -> Result<StructureMap> {
    if m.len() != f.len() {
        return Err(Error::InvalidMap(format!(
            "map has {} entries for {} events",
            m.len(),
            f.len()
        )));
    }
    let mut table: Vec<Option<Option<usize>>> = vec![None; c.ges.len()];
    for a in 0..f.len() {
        let value = match m.get(a) {
            Some(t) => Some(
                b.index_of(fam_b.name(t))
                    .ok_or_else(|| Error::UnknownEvent(fam_b.name(t).to_string()))?,
            ),
            None => None,
        };
        let slot = &mut table[c.class_of[a]];
        match slot {
            None => *slot = Some(value),
            Some(v) if *v == value => {}
            Some(_) => {
                return Err(Error::InvalidMap(format!(
                    "`{}` and an equivalent event have different images",
                    f.name(a)
                )))
            }
        }
    }
    Ok(StructureMap::new(
        table.into_iter().map(Option::flatten).collect(),
    ))
}

/// The counit `col(fam(g)) → g`, sending each singleton class to its event.
pub fn collapse_counit(g: &GeneralES, caps: &Caps) -> Result<(Collapse, StructureMap)> {
    let c = col(&fam(g, caps)?);
    let table = (0..c.ges.len())
        .map(|k| g.index_of(c.ges.name(k)))
        .collect();
    Ok((c, StructureMap::new(table)))
}

/// Whether `k` is an isomorphism of general event structures: a bijection
/// under which consistency and minimal consistent enablings correspond.
pub fn is_general_iso(k: &StructureMap, g: &GeneralES, h: &GeneralES) -> bool {
    if g.len() != h.len()
        || k.len() != g.len()
        || !k.is_total()
        || k.image(BitSet::full(g.len())).len() != h.len()
    {
        return false;
    }
    let mapped = crate::structures::Consistency::from_generators(
        g.con().generators().iter().map(|&x| k.image(x)),
    );
    if mapped != *h.con() {
        return false;
    }
    let enablings = |s: &GeneralES, f: &dyn Fn(BitSet, usize) -> (BitSet, usize)| {
        let mut out: Vec<(BitSet, usize)> = s
            .enablings()
            .iter()
            .filter(|en| s.is_consistent(en.set))
            .map(|en| f(en.set, en.event))
            .collect();
        out.sort();
        out
    };
    let ours = enablings(g, &|x, e| (k.image(x), k.get(e).expect("total")));
    let theirs = enablings(h, &|x, e| (x, e));
    ours == theirs
}

/// The causal unfolding of a general event structure: `er(fam(g))`.
pub fn causal_unfolding(g: &GeneralES, caps: &Caps) -> Result<UnfoldResult> {
    er(&fam(g, caps)?, caps)
}
