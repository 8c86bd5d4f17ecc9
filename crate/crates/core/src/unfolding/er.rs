use std::collections::{HashMap, HashSet};

use crate::bitset::BitSet;
use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::realisations::{
    canonical_code, canonical_form, is_extremal, is_realisation, prime_set, PrimeSet, Realisation,
};
use crate::structures::{validate_map, Category, EquivFamily, Ese, StructureMap};

use super::{check_structural_axioms, col};
use crate::structures::fam;

/// The causal unfolding of a family.
#[derive(Debug, Clone)]
pub struct UnfoldResult {
    pub ese: Ese,
    /// Prime extremals indexed by event of `ese`, in canonical form.
    pub primes: Vec<Realisation>,
    /// The same primes as a down-closed system indexed by event of `ese`.
    pub prime_set: PrimeSet,
    /// `ε`: each event goes to the label of its top node.
    pub counit: StructureMap,
}

/// Readable names for primes, in their given order.
///
/// A prime keeps its top label when no other prime shares it or when it has
/// no predecessors; otherwise it is `label_pred1+pred2` over its immediate
/// predecessors. Clashes get a trailing `'`.
pub fn prime_names(primes: &PrimeSet, events: &[String]) -> Vec<String> {
    let mut count: HashMap<usize, usize> = HashMap::new();
    for &l in &primes.labels {
        *count.entry(l).or_default() += 1;
    }
    let mut names: Vec<String> = Vec::with_capacity(primes.len());
    let mut used: HashSet<String> = HashSet::new();
    for p in 0..primes.len() {
        let label = &events[primes.labels[p]];
        let below = primes.below[p];
        let mut name = if count[&primes.labels[p]] == 1 || below.is_empty() {
            label.clone()
        } else {
            let mut preds: Vec<&str> = below
                .iter()
                .filter(|&q| !below.iter().any(|r| primes.below[r].contains(q)))
                .map(|q| names[q].as_str())
                .collect();
            preds.sort_unstable();
            format!("{label}_{}", preds.join("+"))
        };
        while used.contains(&name) {
            name.push('\'');
        }
        used.insert(name.clone());
        names.push(name);
    }
    names
}

/// Maximal down-closed sets of primes whose tops form a configuration.
fn consistent_generators(primes: &PrimeSet, f: &EquivFamily, caps: &Caps) -> Result<Vec<BitSet>> {
    let maximal = f.maximal_configs();
    let compatible = |x: BitSet| maximal.iter().any(|m| x.is_subset(*m));
    let mut seen: HashSet<BitSet> = HashSet::from([BitSet::EMPTY]);
    let mut stack = vec![BitSet::EMPTY];
    let mut members = vec![BitSet::EMPTY];
    while let Some(x) = stack.pop() {
        for p in 0..primes.len() {
            if x.contains(p) || !primes.below[p].is_subset(x) {
                continue;
            }
            let y = x.with(p);
            let image = primes.image(y);
            if compatible(image) && seen.insert(y) {
                if seen.len() > caps.configs {
                    return Err(Error::ConfigExplosion { cap: caps.configs });
                }
                if f.contains(image) {
                    members.push(y);
                }
                stack.push(y);
            }
        }
    }
    Ok(members
        .iter()
        .copied()
        .filter(|&x| !members.iter().any(|&y| y != x && x.is_subset(y)))
        .collect())
}

/// `er(f)`: events are the prime extremals of `f` up to isomorphism, ordered by
/// rigid embedding; a set is consistent when the tops of its down-closure form
/// a configuration; primes are equivalent when their tops are.
pub fn er(f: &EquivFamily, caps: &Caps) -> Result<UnfoldResult> {
    let primes = prime_set(f, caps)?;
    let names = prime_names(&primes, f.names());
    let mut lt = Vec::new();
    for p in 0..primes.len() {
        for q in primes.below[p].iter() {
            lt.push((q, p));
        }
    }
    let con = consistent_generators(&primes, f, caps)?;
    let keys: Vec<usize> = primes.labels.iter().map(|&l| f.equiv().rep(l)).collect();
    let classes: Vec<BitSet> = {
        let mut by_key: HashMap<usize, BitSet> = HashMap::new();
        for (p, &k) in keys.iter().enumerate() {
            by_key.entry(k).or_default().insert(p);
        }
        by_key.into_values().collect()
    };
    let ese = Ese::build(names.clone(), &lt, Some(con), &classes)?;
    // ese events are sorted by name; order[k] is the prime behind event k
    let order: Vec<usize> = (0..ese.len())
        .map(|k| {
            names
                .iter()
                .position(|n| n == ese.name(k))
                .expect("names survive the build")
        })
        .collect();
    let prime_set = primes.reorder(&order);
    let realisations = (0..prime_set.len())
        .map(|p| canonical_form(&prime_set.realisation_of(prime_set.down(p))).1)
        .collect();
    let counit = StructureMap::new(prime_set.labels.iter().map(|&l| Some(l)).collect());
    Ok(UnfoldResult {
        ese,
        primes: realisations,
        prime_set,
        counit,
    })
}

/// Whether the counit is a map of families from the unfolding's configurations to `f`.
pub fn counit_check(f: &EquivFamily, u: &UnfoldResult, caps: &Caps) -> Result<bool> {
    let source = u.ese.family(caps)?;
    Ok(validate_map(
        &u.counit,
        (&source).into(),
        f.into(),
        Category::Family,
        caps,
    )?
    .is_empty())
}

/// The map `h: q → er(f)` with `ε ∘ h = m`, built depth by depth.
///
/// Each event `e` with `m(e)` defined goes to a prime with top label `m(e)`
/// sitting over part of `h[e)` that yields an extremal realisation when placed
/// above it; ties go to the least canonical code. Failing that, it shares the
/// prime of an equivalent event below it.
pub fn factor_through_counit(
    q: &Ese,
    f: &EquivFamily,
    u: &UnfoldResult,
    m: &StructureMap,
) -> Result<StructureMap> {
    let prime = q.prime();
    if m.len() != q.len() {
        return Err(Error::InvalidMap(format!(
            "map has {} entries for {} events",
            m.len(),
            q.len()
        )));
    }
    let primes = &u.prime_set;
    let mut order: Vec<usize> = (0..q.len()).collect();
    order.sort_by_key(|&e| prime.depth(e));
    let mut h: Vec<Option<usize>> = vec![None; q.len()];
    let codes: Vec<_> = u.primes.iter().map(canonical_code).collect();
    for e in order {
        let Some(target) = m.get(e) else { continue };
        let past: BitSet = prime.strict_down(e).iter().filter_map(|d| h[d]).collect();
        let x = primes.realisation_of(past);
        let members: Vec<usize> = past.iter().collect();
        let mut best: Option<usize> = None;
        for p in 0..primes.len() {
            if primes.labels[p] != target || past.contains(p) || !primes.below[p].is_subset(past) {
                continue;
            }
            let mut down: Vec<BitSet> = (0..x.len()).map(|n| x.down(n)).collect();
            let top = x.len();
            let under: BitSet = (0..members.len())
                .filter(|&k| primes.below[p].contains(members[k]))
                .collect();
            down.push(under.with(top));
            let mut labels = x.labels().to_vec();
            labels.push(target);
            let rho = Realisation::from_down(labels, down);
            if best.map_or(true, |b| codes[p] < codes[b])
                && is_realisation(&rho, f)
                && is_extremal(&rho, f)
            {
                best = Some(p);
            }
        }
        // an event equivalent to one below it may share that event's prime
        let shared = || {
            prime
                .strict_down(e)
                .iter()
                .filter(|&d| q.equiv().equiv(d, e))
                .find_map(|d| h[d].filter(|&p| primes.labels[p] == target))
        };
        match best.or_else(shared) {
            Some(p) => h[e] = Some(p),
            None => {
                return Err(Error::InvalidMap(format!(
                    "no prime extremal extends the history of `{}`",
                    q.name(e)
                )))
            }
        }
    }
    Ok(StructureMap::new(h))
}

/// The unit at an ese together with the unfolding it lands in.
#[derive(Debug, Clone)]
pub struct UnitIso {
    pub unfolding: UnfoldResult,
    /// Each event goes to the prime whose carrier is its down-closure.
    pub map: StructureMap,
}

pub(crate) fn match_primes(p: &Ese, u: &UnfoldResult, keys: &[usize]) -> Result<StructureMap> {
    let by_code: HashMap<_, usize> = u
        .primes
        .iter()
        .enumerate()
        .map(|(k, r)| (canonical_code(r), k))
        .collect();
    let prime = p.prime();
    let table = (0..p.len())
        .map(|e| {
            let down = prime.down(e);
            let members: Vec<usize> = down.iter().collect();
            let index = |d: usize| members.iter().position(|&m| m == d);
            let r = Realisation::from_down(
                members.iter().map(|&d| keys[d]).collect(),
                members.iter().map(|&d| prime.down(d).map(index)).collect(),
            );
            by_code.get(&canonical_code(&r)).copied().ok_or_else(|| {
                Error::InvalidMap(format!(
                    "no prime extremal matches the history of `{}`",
                    p.name(e)
                ))
            })
        })
        .collect::<Result<Vec<usize>>>()?;
    Ok(StructureMap::new(table.into_iter().map(Some).collect()))
}

/// The unit `p → er(C(p))`, sending each event to the realisation carried by `[e]`.
pub fn unit_iso_ese(p: &Ese, caps: &Caps) -> Result<UnitIso> {
    let family = p.family(caps)?;
    let unfolding = er(&family, caps)?;
    let keys: Vec<usize> = (0..p.len()).collect();
    let map = match_primes(p, &unfolding, &keys)?;
    Ok(UnitIso { unfolding, map })
}

/// For `p` satisfying (A)–(D): the map into `er(fam(col(C(p))))` sending each
/// event to the realisation carried by `[e]` labelled by equivalence classes.
pub fn rebuild_iso(p: &Ese, caps: &Caps) -> Result<UnitIso> {
    if let Some(ax) = check_structural_axioms(p, caps)?.first_failure() {
        return Err(Error::AxiomsFailed(ax));
    }
    let collapsed = col(&p.family(caps)?);
    let family = fam(&collapsed.ges, caps)?;
    let unfolding = er(&family, caps)?;
    let keys = (0..p.len())
        .map(|e| {
            let name = &collapsed.ges.names()[collapsed.class_of[e]];
            family.index_of(name).ok_or_else(|| {
                Error::InvalidMap(format!("class `{name}` occurs in no configuration"))
            })
        })
        .collect::<Result<Vec<usize>>>()?;
    let map = match_primes(p, &unfolding, &keys)?;
    Ok(UnitIso { unfolding, map })
}

/// Whether a map between ese's is an isomorphism: bijective, with order,
/// consistency and equivalence preserved and reflected.
pub fn is_ese_iso(m: &StructureMap, p: &Ese, q: &Ese) -> bool {
    if p.len() != q.len() || !m.is_total() || m.image(BitSet::full(p.len())).len() != q.len() {
        return false;
    }
    let t = |e: usize| m.get(e).expect("total");
    let order =
        (0..p.len()).all(|a| (0..p.len()).all(|b| p.prime().le(a, b) == q.prime().le(t(a), t(b))));
    let equiv = (0..p.len())
        .all(|a| (0..p.len()).all(|b| p.equiv().equiv(a, b) == q.equiv().equiv(t(a), t(b))));
    let con = p
        .prime()
        .con()
        .generators()
        .iter()
        .all(|&g| q.prime().is_consistent(m.image(g)))
        && q.prime().con().generators().iter().all(|&g| {
            let pre: BitSet = (0..p.len()).filter(|&e| g.contains(t(e))).collect();
            p.prime().is_consistent(pre)
        });
    order && equiv && con
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::realisations::extremal_order;
    use crate::structures::{ese_map_violations, map_equiv, PrimeES};

    fn caps() -> Caps {
        Caps::default()
    }

    fn names(e: &Ese) -> Vec<&str> {
        e.names().iter().map(String::as_str).collect()
    }

    #[test]
    fn docs_unfolding() {
        let f = fixtures::docs_family(&caps());
        let u = er(&f, &caps()).unwrap();
        assert_eq!(names(&u.ese), ["a", "b", "d_a", "d_b"]);
        let (a, b, da, db) = (0, 1, 2, 3);
        assert!(u.ese.prime().le(a, da) && u.ese.prime().le(b, db));
        assert!(!u.ese.prime().le(a, db) && !u.ese.prime().le(b, da));
        assert!(u.ese.equiv().equiv(da, db));
        assert!(u.ese.prime().con().is_total(4));
        assert!(counit_check(&f, &u, &caps()).unwrap());
        assert_eq!(u.counit.table(), &[Some(0), Some(1), Some(2), Some(2)]);
    }

    #[test]
    fn e0_unfolding_matches_worked_ese() {
        let f = fam(&fixtures::e0(), &caps()).unwrap();
        let u = er(&f, &caps()).unwrap();
        assert_eq!(
            names(&u.ese),
            ["a", "b", "c_a", "c_b", "d_a+c_b", "d_b+c_a"]
        );
        let expected = fixtures::ex53();
        let m = StructureMap::new(vec![Some(0), Some(1), Some(2), Some(3), Some(5), Some(4)]);
        assert!(is_ese_iso(&m, &expected, &u.ese));
        assert!(counit_check(&f, &u, &caps()).unwrap());
    }

    #[test]
    fn empty_family_unfolds_to_empty() {
        let f = EquivFamily::new(vec![], vec![BitSet::EMPTY], None).unwrap();
        let u = er(&f, &caps()).unwrap();
        assert!(u.ese.is_empty());
        assert!(counit_check(&f, &u, &caps()).unwrap());
    }

    #[test]
    fn configurations_match_extremal_order() {
        for g in [
            fixtures::docs(),
            fixtures::e0(),
            fixtures::f0(),
            fixtures::noninj(),
        ] {
            let f = fam(&g, &caps()).unwrap();
            let u = er(&f, &caps()).unwrap();
            let configs = u.ese.family(&caps()).unwrap();
            let order = extremal_order(&f, &caps()).unwrap();
            assert_eq!(configs.configs().len(), order.len());
            assert_eq!(
                u.prime_set.configurations(&f, &caps()).unwrap(),
                configs.configs()
            );
        }
    }

    #[test]
    fn factor_docs_lettering() {
        let f = fixtures::docs_family(&caps());
        let u = er(&f, &caps()).unwrap();
        let q = Ese::with_identity(
            PrimeES::new(
                vec!["a".into(), "b".into(), "d".into()],
                &[(0, 2), (1, 2)],
                None,
            )
            .unwrap(),
        );
        let m = StructureMap::identity(3);
        let h = factor_through_counit(&q, &f, &u, &m).unwrap();
        assert_eq!(h.then(&u.counit), m);
        assert!(ese_map_violations(&h, &q, &u.ese).is_empty());
        assert_eq!(h.get(2), Some(2));
    }

    #[test]
    fn factor_counit_is_identity_up_to_equiv() {
        for g in [fixtures::docs(), fixtures::e0(), fixtures::noninj()] {
            let f = fam(&g, &caps()).unwrap();
            let u = er(&f, &caps()).unwrap();
            let h = factor_through_counit(&u.ese, &f, &u, &u.counit).unwrap();
            assert_eq!(h.then(&u.counit), u.counit);
            assert!(map_equiv(
                &h,
                &StructureMap::identity(u.ese.len()),
                u.ese.equiv()
            ));
        }
    }

    #[test]
    fn unit_is_iso() {
        for p in [fixtures::ex53(), fixtures::appb_a(), fixtures::appb_bp()] {
            let unit = unit_iso_ese(&p, &caps()).unwrap();
            assert!(is_ese_iso(&unit.map, &p, &unit.unfolding.ese));
        }
    }

    #[test]
    fn rebuild_from_axioms() {
        let f = fixtures::docs_family(&caps());
        let u = er(&f, &caps()).unwrap();
        let r = rebuild_iso(&u.ese, &caps()).unwrap();
        assert!(is_ese_iso(&r.map, &u.ese, &r.unfolding.ese));
        let bad = Ese::build(
            vec!["a".into(), "b".into()],
            &[],
            None,
            &[[0, 1].into_iter().collect()],
        )
        .unwrap();
        assert!(matches!(
            rebuild_iso(&bad, &caps()),
            Err(Error::AxiomsFailed(crate::unfolding::Axiom::B))
        ));
    }

    #[test]
    fn names_of_docs_primes() {
        let f = fixtures::docs_family(&caps());
        let primes = prime_set(&f, &caps()).unwrap();
        assert_eq!(prime_names(&primes, f.names()), ["a", "b", "d_a", "d_b"]);
    }

    #[test]
    fn equivalent_successor_shares_a_prime() {
        // a < b with a ≡ b, both sent to a
        let q = Ese::build(
            vec!["a".into(), "b".into()],
            &[(0, 1)],
            None,
            &[BitSet::full(2)],
        )
        .unwrap();
        let f = fam(&fixtures::e0(), &caps()).unwrap();
        let u = er(&f, &caps()).unwrap();
        let m = StructureMap::new(vec![Some(0), Some(0)]);
        let h = factor_through_counit(&q, &f, &u, &m).unwrap();
        assert_eq!(h.get(0), h.get(1));
        assert!(ese_map_violations(&h, &q, &u.ese).is_empty());
        assert_eq!(h.then(&u.counit), m);
    }
}
