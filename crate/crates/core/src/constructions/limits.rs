use std::collections::HashSet;
use std::fmt;

use crate::bitset::{sort_sets, BitSet, MAX_ELEMENTS};
use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::structures::{EquivFamily, Equivalence, Ese, StructureMap};

use super::{pr, stable_part};

/// An event of a product: a left event, a right event, or both.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PairEvent {
    pub left: Option<usize>,
    pub right: Option<usize>,
}

impl PairEvent {
    pub fn new(left: Option<usize>, right: Option<usize>) -> Option<PairEvent> {
        (left.is_some() || right.is_some()).then_some(PairEvent { left, right })
    }

    /// `(a,b)`, with `*` for a missing side.
    pub fn display<'a>(&self, left: &'a [String], right: &'a [String]) -> impl fmt::Display + 'a {
        let l = self.left.map_or("*", |a| left[a].as_str());
        let r = self.right.map_or("*", |b| right[b].as_str());
        format!("({l},{r})")
    }
}

/// A family over pair events with its two projections.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairFamily {
    pub family: EquivFamily,
    /// `pairs[e]` is the pair behind event `e` of `family`.
    pub pairs: Vec<PairEvent>,
    pub left: StructureMap,
    pub right: StructureMap,
}

fn equiv_side(eq: &Equivalence, a: Option<usize>, b: Option<usize>) -> bool {
    match (a, b) {
        (Some(a), Some(b)) => eq.equiv(a, b),
        (None, None) => true,
        _ => false,
    }
}

struct Spec<'a> {
    fa: &'a EquivFamily,
    fb: &'a EquivFamily,
    pairs: Vec<PairEvent>,
    /// The product clause relating equivalence on either side to equivalence of pairs.
    reflect: bool,
}

impl Spec<'_> {
    fn left(&self, x: BitSet) -> BitSet {
        x.iter().filter_map(|c| self.pairs[c].left).collect()
    }

    fn right(&self, x: BitSet) -> BitSet {
        x.iter().filter_map(|c| self.pairs[c].right).collect()
    }

    fn pair_equiv(&self, c: usize, d: usize) -> bool {
        let (p, q) = (self.pairs[c], self.pairs[d]);
        equiv_side(self.fa.equiv(), p.left, q.left) && equiv_side(self.fb.equiv(), p.right, q.right)
    }

    fn reflects(&self, c: usize, d: usize) -> bool {
        let (p, q) = (self.pairs[c], self.pairs[d]);
        let related = matches!((p.left, q.left), (Some(a), Some(b)) if self.fa.equiv().equiv(a, b))
            || matches!((p.right, q.right), (Some(a), Some(b)) if self.fb.equiv().equiv(a, b));
        !related || self.pair_equiv(c, d)
    }

    /// Projections are configurations and, for products, the reflection clause holds.
    fn admissible(&self, x: BitSet) -> bool {
        self.fa.contains(self.left(x))
            && self.fb.contains(self.right(x))
            && (!self.reflect || x.iter().all(|c| x.iter().all(|d| self.reflects(c, d))))
    }

    /// Every admissible set secured by chains of admissible prefixes.
    ///
    /// Single-event extensions reach the securable sets; pairwise unions then
    /// reach the rest, since admissible sets below an admissible set are
    /// closed under union.
    fn configurations(&self, caps: &Caps) -> Result<Vec<BitSet>> {
        let n = self.pairs.len();
        let mut seen: HashSet<BitSet> = HashSet::from([BitSet::EMPTY]);
        let mut stack = vec![BitSet::EMPTY];
        let grow = |seen: &mut HashSet<BitSet>, stack: &mut Vec<BitSet>, y: BitSet| -> Result<()> {
            if seen.insert(y) {
                if seen.len() > caps.configs {
                    return Err(Error::ConfigExplosion { cap: caps.configs });
                }
                stack.push(y);
            }
            Ok(())
        };
        while let Some(x) = stack.pop() {
            for c in 0..n {
                if !x.contains(c) && self.admissible(x.with(c)) {
                    grow(&mut seen, &mut stack, x.with(c))?;
                }
            }
        }
        let mut frontier: Vec<BitSet> = seen.iter().copied().collect();
        while !frontier.is_empty() {
            let all: Vec<BitSet> = seen.iter().copied().collect();
            let mut next = Vec::new();
            for &x in &frontier {
                for &y in &all {
                    let u = x.union(y);
                    if !seen.contains(&u) && self.admissible(u) {
                        let mut unused = Vec::new();
                        grow(&mut seen, &mut unused, u)?;
                        next.push(u);
                    }
                }
            }
            frontier = next;
        }
        let mut out: Vec<BitSet> = seen.into_iter().collect();
        sort_sets(&mut out);
        Ok(out)
    }

    fn build(self, caps: &Caps) -> Result<PairFamily> {
        if self.pairs.len() > MAX_ELEMENTS {
            return Err(Error::TooManyEvents {
                count: self.pairs.len(),
                max: MAX_ELEMENTS,
            });
        }
        let configs = self.configurations(caps)?;
        let n = self.pairs.len();
        let mut raw_names: Vec<String> = self
            .pairs
            .iter()
            .map(|p| p.display(self.fa.names(), self.fb.names()).to_string())
            .collect();
        let mut used = HashSet::new();
        for name in raw_names.iter_mut() {
            while !used.insert(name.clone()) {
                name.push('\'');
            }
        }
        let keys: Vec<usize> = (0..n)
            .map(|c| (0..n).find(|&d| self.pair_equiv(c, d)).expect("reflexive"))
            .collect();
        let family = EquivFamily::new(
            raw_names.clone(),
            configs.clone(),
            Some(Equivalence::from_keys(&keys)),
        )?;
        // relabel pairs into the family's name order
        let mut pairs = vec![self.pairs[0]; n.max(1)];
        pairs.truncate(n);
        for (old, name) in raw_names.iter().enumerate() {
            pairs[family.index_of(name).expect("names survive sorting")] = self.pairs[old];
        }
        let left = StructureMap::new(pairs.iter().map(|p| p.left).collect());
        let right = StructureMap::new(pairs.iter().map(|p| p.right).collect());
        Ok(PairFamily {
            family,
            pairs,
            left,
            right,
        })
    }
}

/// The product of two families over the partial product of their events.
pub fn product_ef(fa: &EquivFamily, fb: &EquivFamily, caps: &Caps) -> Result<PairFamily> {
    let mut pairs = Vec::new();
    for a in 0..fa.len() {
        pairs.push(PairEvent {
            left: Some(a),
            right: None,
        });
    }
    for b in 0..fb.len() {
        pairs.push(PairEvent {
            left: None,
            right: Some(b),
        });
    }
    for a in 0..fa.len() {
        for b in 0..fb.len() {
            pairs.push(PairEvent {
                left: Some(a),
                right: Some(b),
            });
        }
    }
    Spec {
        fa,
        fb,
        pairs,
        reflect: true,
    }
    .build(caps)
}

fn check_total(m: &StructureMap, source: &EquivFamily, what: &str) -> Result<()> {
    if m.len() != source.len() || !m.is_total() {
        return Err(Error::InvalidMap(format!(
            "{what} must be a total map on its source"
        )));
    }
    Ok(())
}

fn span(
    fa: &EquivFamily,
    m1: &StructureMap,
    fb: &EquivFamily,
    m2: &StructureMap,
    matches: impl Fn(usize, usize) -> bool,
    caps: &Caps,
) -> Result<PairFamily> {
    check_total(m1, fa, "left map")?;
    check_total(m2, fb, "right map")?;
    let mut pairs = Vec::new();
    for a in 0..fa.len() {
        for b in 0..fb.len() {
            if matches(m1.get(a).expect("total"), m2.get(b).expect("total")) {
                pairs.push(PairEvent {
                    left: Some(a),
                    right: Some(b),
                });
            }
        }
    }
    Spec {
        fa,
        fb,
        pairs,
        reflect: false,
    }
    .build(caps)
}

/// The pullback of total maps `m1: fa → fc` and `m2: fb → fc`.
pub fn pullback_ef(
    fa: &EquivFamily,
    m1: &StructureMap,
    fb: &EquivFamily,
    m2: &StructureMap,
    caps: &Caps,
) -> Result<PairFamily> {
    span(fa, m1, fb, m2, |x, y| x == y, caps)
}

/// The pseudo pullback, pairing events whose images are equivalent in `fc`.
pub fn pseudo_pullback_ef(
    fa: &EquivFamily,
    m1: &StructureMap,
    fb: &EquivFamily,
    m2: &StructureMap,
    fc: &EquivFamily,
    caps: &Caps,
) -> Result<PairFamily> {
    span(fa, m1, fb, m2, |x, y| fc.equiv().equiv(x, y), caps)
}

/// Restrict a pair family to unions of unambiguous configurations.
pub fn stable_pairs(p: PairFamily) -> PairFamily {
    PairFamily {
        family: stable_part(&p.family),
        ..p
    }
}

/// An edc with two projections.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdcSpan {
    pub ese: Ese,
    pub left: StructureMap,
    pub right: StructureMap,
}

fn edc_span(p: PairFamily) -> Result<EdcSpan> {
    let p = stable_pairs(p);
    let prime = pr(&p.family)?;
    Ok(EdcSpan {
        left: prime.counit.then(&p.left),
        right: prime.counit.then(&p.right),
        ese: prime.ese,
    })
}

/// The pullback of total maps of edc's: `Pr` of the stable pullback of their families.
pub fn pullback_edc(
    a: &Ese,
    m1: &StructureMap,
    b: &Ese,
    m2: &StructureMap,
    caps: &Caps,
) -> Result<EdcSpan> {
    edc_span(pullback_ef(
        &a.family(caps)?,
        m1,
        &b.family(caps)?,
        m2,
        caps,
    )?)
}

/// The pseudo pullback of total maps of edc's into `c`.
pub fn pseudo_pullback_edc(
    a: &Ese,
    m1: &StructureMap,
    b: &Ese,
    m2: &StructureMap,
    c: &Ese,
    caps: &Caps,
) -> Result<EdcSpan> {
    edc_span(pseudo_pullback_ef(
        &a.family(caps)?,
        m1,
        &b.family(caps)?,
        m2,
        &c.family(caps)?,
        caps,
    )?)
}
