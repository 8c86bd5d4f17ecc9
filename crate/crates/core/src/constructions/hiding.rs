use crate::bitset::BitSet;
use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::structures::{Consistency, Ese, PrimeES, StructureMap};

/// The projection of `p` on an equivalence-closed set of visible events.
pub fn hide(p: &Ese, visible: BitSet) -> Result<Ese> {
    let missing: Vec<String> = visible
        .iter()
        .flat_map(|e| p.equiv().class_of(e).difference(visible).iter())
        .map(|e| p.name(e).to_string())
        .collect();
    if !missing.is_empty() {
        return Err(Error::NotEquivClosed { missing });
    }
    Ok(p.restrict(visible))
}

/// A partial map split as a projection onto its domain followed by a total map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialFactorisation {
    /// `p` projected on the domain of definition.
    pub hidden: Ese,
    /// Partial: each defined event goes to itself.
    pub projection: StructureMap,
    /// Total: the defined part.
    pub defined: StructureMap,
}

/// Factor `m: p → q` through the projection on its domain of definition.
pub fn factor_partial_map(p: &Ese, m: &StructureMap) -> Result<PartialFactorisation> {
    let domain = m.domain();
    let hidden = hide(p, domain)?;
    let mut projection = vec![None; p.len()];
    for (k, e) in domain.iter().enumerate() {
        projection[e] = Some(k);
    }
    Ok(PartialFactorisation {
        hidden,
        projection: StructureMap::new(projection),
        defined: StructureMap::new(domain.iter().map(|e| m.get(e)).collect()),
    })
}

/// The three axioms on equivalent events.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AxReport {
    /// Equivalent events are never consistent together.
    pub ax0: bool,
    /// No event depends on two equivalent events.
    pub ax1: bool,
    /// No event depends on an equivalent event.
    pub ax2: bool,
}

impl AxReport {
    /// The strongest level satisfied, if any.
    pub fn level(&self) -> Option<u8> {
        if self.ax0 {
            Some(0)
        } else if self.ax1 {
            Some(1)
        } else if self.ax2 {
            Some(2)
        } else {
            None
        }
    }
}

fn distinct_equivalent_pair(p: &Ese, set: BitSet) -> Option<(usize, usize)> {
    set.iter().find_map(|a| {
        set.iter()
            .find(|&b| b > a && p.equiv().equiv(a, b))
            .map(|b| (a, b))
    })
}

fn obeys_ax1(p: &Ese, e: usize) -> bool {
    distinct_equivalent_pair(p, p.prime().down(e)).is_none()
}

fn obeys_ax2(p: &Ese, e: usize) -> bool {
    p.prime()
        .strict_down(e)
        .iter()
        .all(|d| !p.equiv().equiv(d, e))
}

pub fn check_ax(p: &Ese) -> AxReport {
    let ax0 = p
        .prime()
        .con()
        .generators()
        .iter()
        .all(|&g| distinct_equivalent_pair(p, g).is_none());
    AxReport {
        ax0,
        ax1: (0..p.len()).all(|e| obeys_ax1(p, e)),
        ax2: (0..p.len()).all(|e| obeys_ax2(p, e)),
    }
}

/// The right adjoint to the inclusion of the level-`level` subcategory.
///
/// Keeps the events whose every predecessor obeys the axiom. At level 0 a set
/// stays consistent only when its down-closure holds no two equivalent events.
pub fn restrict_to_ax(p: &Ese, level: u8, caps: &Caps) -> Result<Ese> {
    let prime = p.prime();
    let obeys = |e: usize| match level {
        0 | 1 => obeys_ax1(p, e),
        _ => obeys_ax2(p, e),
    };
    let keep: BitSet = (0..p.len())
        .filter(|&e| prime.down(e).iter().all(obeys))
        .collect();
    let kept = p.restrict(keep);
    if level > 0 {
        return Ok(kept);
    }
    let mut generators = Vec::new();
    for &g in kept.prime().con().generators() {
        unambiguous_down_sets(&kept, g, caps, &mut generators)?;
    }
    let prime = PrimeES::from_parts(
        kept.names().to_vec(),
        (0..kept.len()).map(|e| kept.prime().down(e)).collect(),
        Consistency::from_generators(generators),
    )?;
    Ok(Ese::new(prime, kept.equiv().clone()))
}

/// Maximal down-closed subsets of `g` holding no two equivalent events.
fn unambiguous_down_sets(p: &Ese, g: BitSet, caps: &Caps, out: &mut Vec<BitSet>) -> Result<()> {
    let prime = p.prime();
    let mut order: Vec<usize> = g.iter().collect();
    order.sort_by_key(|&e| prime.down(e).len());
    let mut found: Vec<BitSet> = Vec::new();
    let mut steps = 0usize;
    let mut stack = vec![(0usize, BitSet::EMPTY)];
    while let Some((i, x)) = stack.pop() {
        steps += 1;
        if steps > caps.search {
            return Err(Error::SearchExplosion {
                what: "unambiguous consistent sets",
                cap: caps.search,
            });
        }
        if i == order.len() {
            found.push(x);
            continue;
        }
        let e = order[i];
        let fits = prime.strict_down(e).is_subset(x) && x.iter().all(|d| !p.equiv().equiv(d, e));
        stack.push((i + 1, x));
        if fits {
            stack.push((i + 1, x.with(e)));
        }
    }
    out.extend(
        found
            .iter()
            .copied()
            .filter(|&x| !found.iter().any(|&y| y != x && x.is_subset(y))),
    );
    Ok(())
}

/// Drop the equivalence.
pub fn forget_equiv(p: &Ese) -> PrimeES {
    p.prime().clone()
}

/// Adjoin the identity equivalence.
pub fn with_identity_equiv(p: &PrimeES) -> Ese {
    Ese::with_identity(p.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::unfolding::causal_unfolding;

    fn caps() -> Caps {
        Caps::default()
    }

    fn docs_unfolding() -> Ese {
        causal_unfolding(&fixtures::docs(), &caps()).unwrap().ese
    }

    #[test]
    fn hide_extremes() {
        let p = fixtures::ex53();
        assert_eq!(hide(&p, BitSet::full(p.len())).unwrap(), p);
        assert!(hide(&p, BitSet::EMPTY).unwrap().is_empty());
        assert!(matches!(
            hide(&p, BitSet::singleton(2)),
            Err(Error::NotEquivClosed { .. })
        ));
    }

    #[test]
    fn hide_docs_tops() {
        let p = docs_unfolding();
        let h = hide(&p, [2, 3].into_iter().collect()).unwrap();
        assert_eq!(h.len(), 2);
        assert!(!h.prime().le(0, 1) && !h.prime().le(1, 0));
        assert!(h.prime().is_consistent(BitSet::full(2)));
        assert!(h.equiv().equiv(0, 1));
    }

    #[test]
    fn factor_partial() {
        let p = docs_unfolding();
        let m = StructureMap::new(vec![Some(0), None, None, None]);
        let fac = factor_partial_map(&p, &m).unwrap();
        assert_eq!(fac.hidden.len(), 1);
        assert!(fac.defined.is_total());
        assert_eq!(fac.projection.then(&fac.defined), m);
        let total = StructureMap::identity(4);
        let fac = factor_partial_map(&p, &total).unwrap();
        assert_eq!(fac.hidden, p);
        assert_eq!(fac.defined, total);
        let none = factor_partial_map(&p, &StructureMap::undefined(4)).unwrap();
        assert!(none.hidden.is_empty() && none.defined.is_empty());
    }

    #[test]
    fn docs_axioms() {
        let ax = check_ax(&docs_unfolding());
        assert_eq!((ax.ax0, ax.ax1, ax.ax2), (false, true, true));
        let ax = check_ax(&with_identity_equiv(fixtures::ex53().prime()));
        assert_eq!((ax.ax0, ax.ax1, ax.ax2), (true, true, true));
    }

    #[test]
    fn noninj_fails_ax1_and_restriction_drops_prime() {
        let p = causal_unfolding(&fixtures::noninj(), &caps()).unwrap().ese;
        assert!(!check_ax(&p).ax1);
        assert!(check_ax(&p).ax2);
        let r = restrict_to_ax(&p, 1, &caps()).unwrap();
        assert!(check_ax(&r).ax1);
        let dropped: Vec<&str> = p
            .names()
            .iter()
            .map(String::as_str)
            .filter(|n| r.index_of(n).is_none())
            .collect();
        assert_eq!(
            dropped,
            ["f_d_c_a+e_c_b", "f_d_c_b+e_c_a"],
            "{:?}",
            p.names()
        );
    }

    #[test]
    fn level_zero_purges_consistency() {
        let p = docs_unfolding();
        let r = restrict_to_ax(&p, 0, &caps()).unwrap();
        assert_eq!(r.len(), 4);
        assert!(!r.prime().is_consistent([2, 3].into_iter().collect()));
        assert!(r.prime().is_consistent([0, 1, 2].into_iter().collect()));
        assert!(check_ax(&r).ax0);
        assert_eq!(restrict_to_ax(&r, 0, &caps()).unwrap(), r);
    }

    #[test]
    fn forget_round_trip() {
        let p = fixtures::ex53().prime().clone();
        assert_eq!(forget_equiv(&with_identity_equiv(&p)), p);
        let q = forget_equiv(&docs_unfolding());
        assert_eq!(q.len(), 4);
        assert!(q.is_consistent([2, 3].into_iter().collect()));
    }
}
