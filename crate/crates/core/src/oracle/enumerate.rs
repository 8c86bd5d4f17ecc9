use std::borrow::Cow;

use crate::bitset::BitSet;
use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::realisations::{
    canonical_form, is_realisation_map, CanonicalPosetCode, Realisation, RealisationMap,
};
use crate::structures::{
    ese_map_violations, family_map_violations, validate_map, Category, EquivFamily, Equivalence,
    Ese, StructureMap, StructureRef,
};

/// Per-event candidate filter: `allowed(e, v)` decides whether `e ↦ v` may be tried.
pub type CandidateFilter<'a> = &'a dyn Fn(usize, Option<usize>) -> bool;

/// Every valid map from `src` to `tgt` in `category`, in lexicographic order
/// of tables along the assignment order (undefined first).
pub fn enumerate_maps(
    src: StructureRef<'_>,
    tgt: StructureRef<'_>,
    category: Category,
    caps: &Caps,
) -> Result<Vec<StructureMap>> {
    for n in [src.len(), tgt.len()] {
        if n > caps.oracle_events {
            return Err(Error::TooManyEvents {
                count: n,
                max: caps.oracle_events,
            });
        }
    }
    enumerate_maps_where(src, tgt, category, caps, &|_, _| true)
}

/// As [`enumerate_maps`], restricted to assignments passing `allowed`. Only
/// the source size is capped; the filter is expected to tame the target.
pub fn enumerate_maps_where(
    src: StructureRef<'_>,
    tgt: StructureRef<'_>,
    category: Category,
    caps: &Caps,
    allowed: CandidateFilter<'_>,
) -> Result<Vec<StructureMap>> {
    if src.len() > caps.oracle_events {
        return Err(Error::TooManyEvents {
            count: src.len(),
            max: caps.oracle_events,
        });
    }
    check_kinds(src, tgt, category)?;
    let search = Search::new(src, tgt, category, caps)?;
    search.run(allowed)
}

fn check_kinds(src: StructureRef<'_>, tgt: StructureRef<'_>, category: Category) -> Result<()> {
    let (expected, accepts): (&'static str, fn(&StructureRef<'_>) -> bool) = match category {
        Category::Family => ("family, ese or prime", |s| {
            !matches!(s, StructureRef::General(_))
        }),
        Category::General => ("general", |s| matches!(s, StructureRef::General(_))),
        Category::Ese => ("ese or prime", |s| {
            matches!(s, StructureRef::Prime(_) | StructureRef::Ese(_))
        }),
        Category::Prime => ("prime", |s| matches!(s, StructureRef::Prime(_))),
    };
    match [src, tgt].into_iter().find(|s| !accepts(s)) {
        Some(s) => Err(Error::KindMismatch {
            expected,
            found: s.kind(),
        }),
        None => Ok(()),
    }
}

enum Leaf<'a> {
    General(StructureRef<'a>, StructureRef<'a>),
    Family(Cow<'a, EquivFamily>, Cow<'a, EquivFamily>),
}

struct Search<'a> {
    n: usize,
    m: usize,
    order: Vec<usize>,
    groups: Vec<BitSet>,
    src_equiv: Equivalence,
    tgt_equiv: Equivalence,
    group_ok: Box<dyn Fn(BitSet) -> bool + 'a>,
    causal: Option<(Cow<'a, Ese>, Cow<'a, Ese>)>,
    leaf: Leaf<'a>,
    caps: Caps,
}

fn as_ese(s: StructureRef<'_>) -> Option<Cow<'_, Ese>> {
    match s {
        StructureRef::Ese(p) => Some(Cow::Borrowed(p)),
        StructureRef::Prime(p) => Some(Cow::Owned(Ese::with_identity(p.clone()))),
        _ => None,
    }
}

fn as_family<'a>(s: StructureRef<'a>, caps: &Caps) -> Result<Cow<'a, EquivFamily>> {
    Ok(match s {
        StructureRef::Family(f) => Cow::Borrowed(f),
        StructureRef::Ese(p) => Cow::Owned(p.family(caps)?),
        StructureRef::Prime(p) => Cow::Owned(Ese::with_identity(p.clone()).family(caps)?),
        StructureRef::General(_) => unreachable!("general structures are checked directly"),
    })
}

impl<'a> Search<'a> {
    fn new(
        src: StructureRef<'a>,
        tgt: StructureRef<'a>,
        category: Category,
        caps: &Caps,
    ) -> Result<Search<'a>> {
        let (n, m) = (src.len(), tgt.len());
        if let (StructureRef::General(g), StructureRef::General(h)) = (src, tgt) {
            let h = h.clone();
            return Ok(Search {
                n,
                m,
                order: (0..n).collect(),
                groups: g.con().generators().to_vec(),
                src_equiv: Equivalence::identity(n),
                tgt_equiv: Equivalence::identity(m),
                group_ok: Box::new(move |x| h.is_consistent(x)),
                causal: None,
                leaf: Leaf::General(src, tgt),
                caps: *caps,
            });
        }
        let fa = as_family(src, caps)?;
        let fb = as_family(tgt, caps)?;
        let (src_equiv, tgt_equiv) = (fa.equiv().clone(), fb.equiv().clone());
        let causal = match (category, as_ese(src), as_ese(tgt)) {
            (Category::Ese | Category::Prime, Some(p), Some(q)) => Some((p, q)),
            _ => None,
        };
        let (order, groups, group_ok): (Vec<usize>, Vec<BitSet>, Box<dyn Fn(BitSet) -> bool>) =
            match &causal {
                Some((p, q)) => {
                    let mut order: Vec<usize> = (0..n).collect();
                    order.sort_by_key(|&e| (p.prime().depth(e), e));
                    let q = q.prime().clone();
                    (
                        order,
                        p.prime().con().generators().to_vec(),
                        Box::new(move |x| q.is_consistent(x)),
                    )
                }
                None => {
                    let target = fb.clone().into_owned();
                    (
                        (0..n).collect(),
                        fa.maximal_configs(),
                        Box::new(move |x| target.is_compatible(x)),
                    )
                }
            };
        Ok(Search {
            n,
            m,
            order,
            groups,
            src_equiv,
            tgt_equiv,
            group_ok,
            causal,
            leaf: Leaf::Family(fa, fb),
            caps: *caps,
        })
    }

    fn run(&self, allowed: CandidateFilter<'_>) -> Result<Vec<StructureMap>> {
        let mut state = State {
            table: vec![None; self.n],
            assigned: BitSet::EMPTY,
            steps: 0,
            out: Vec::new(),
        };
        self.go(0, &mut state, allowed)?;
        Ok(state.out)
    }

    fn go(&self, k: usize, st: &mut State, allowed: CandidateFilter<'_>) -> Result<()> {
        st.steps += 1;
        if st.steps > self.caps.search {
            return Err(Error::SearchExplosion {
                what: "structure maps",
                cap: self.caps.search,
            });
        }
        if k == self.n {
            let map = StructureMap::new(st.table.clone());
            if self.accepts(&map)? {
                st.out.push(map);
                if st.out.len() > self.caps.maps {
                    return Err(Error::SearchExplosion {
                        what: "structure maps",
                        cap: self.caps.maps,
                    });
                }
            }
            return Ok(());
        }
        let e = self.order[k];
        for v in std::iter::once(None).chain((0..self.m).map(Some)) {
            if !allowed(e, v) || !self.consistent_with(st, e, v) {
                continue;
            }
            st.table[e] = v;
            st.assigned.insert(e);
            let ok = self.groups_hold(st, e) && self.causal_holds(st, e);
            if ok {
                self.go(k + 1, st, allowed)?;
            }
            st.assigned.remove(e);
            st.table[e] = None;
        }
        Ok(())
    }

    /// ≡-preservation against already assigned events.
    fn consistent_with(&self, st: &State, e: usize, v: Option<usize>) -> bool {
        self.src_equiv
            .class_of(e)
            .intersection(st.assigned)
            .iter()
            .all(|a| match (st.table[a], v) {
                (None, None) => true,
                (Some(x), Some(y)) => self.tgt_equiv.equiv(x, y),
                _ => false,
            })
    }

    /// Image compatibility and ≡-reflection on every group containing `e`.
    fn groups_hold(&self, st: &State, e: usize) -> bool {
        let Some(fe) = st.table[e] else {
            return true;
        };
        self.groups.iter().filter(|x| x.contains(e)).all(|&x| {
            let done = x.intersection(st.assigned);
            let image: BitSet = done.iter().filter_map(|a| st.table[a]).collect();
            (self.group_ok)(image)
                && done.without(e).iter().all(|a| match st.table[a] {
                    Some(fa) => !self.tgt_equiv.equiv(fa, fe) || self.src_equiv.equiv(a, e),
                    None => true,
                })
        })
    }

    /// `[f(e)] ⊆ f[e]`, decidable once the past of `e` is assigned.
    fn causal_holds(&self, st: &State, e: usize) -> bool {
        match (&self.causal, st.table[e]) {
            (Some((p, q)), Some(fe)) => {
                let reached: BitSet = p
                    .prime()
                    .down(e)
                    .iter()
                    .filter_map(|a| st.table[a])
                    .collect();
                q.prime().down(fe).is_subset(reached)
            }
            _ => true,
        }
    }

    fn accepts(&self, map: &StructureMap) -> Result<bool> {
        Ok(match &self.leaf {
            Leaf::General(g, h) => {
                validate_map(map, *g, *h, Category::General, &self.caps)?.is_empty()
            }
            Leaf::Family(a, b) => {
                let ese_ok = match &self.causal {
                    Some((p, q)) => ese_map_violations(map, p, q).is_empty(),
                    None => true,
                };
                ese_ok && family_map_violations(map, a, b).is_empty()
            }
        })
    }
}

struct State {
    table: Vec<Option<usize>>,
    assigned: BitSet,
    steps: usize,
    out: Vec<StructureMap>,
}

/// `{a->x, b->*}`, with `*` for undefined.
pub fn format_map(m: &StructureMap, src: &[String], tgt: &[String]) -> String {
    let parts: Vec<String> = (0..m.len())
        .map(|e| format!("{}->{}", src[e], m.get(e).map_or("*", |t| tgt[t].as_str())))
        .collect();
    format!("{{{}}}", parts.join(", "))
}

/// Every realisation map `r → s`, by brute force over partial functions.
pub fn enumerate_realisation_maps(
    r: &Realisation,
    s: &Realisation,
    caps: &Caps,
) -> Result<Vec<RealisationMap>> {
    if r.len() > caps.oracle_events || s.len() > caps.oracle_events {
        return Err(Error::TooManyEvents {
            count: r.len().max(s.len()),
            max: caps.oracle_events,
        });
    }
    let mut out = Vec::new();
    let mut table = vec![None; r.len()];
    let mut steps = 0;
    fn go(
        k: usize,
        r: &Realisation,
        s: &Realisation,
        table: &mut Vec<Option<usize>>,
        steps: &mut usize,
        caps: &Caps,
        out: &mut Vec<RealisationMap>,
    ) -> Result<()> {
        *steps += 1;
        if *steps > caps.search {
            return Err(Error::SearchExplosion {
                what: "realisation maps",
                cap: caps.search,
            });
        }
        if k == r.len() {
            let m = RealisationMap::new(table.clone());
            if is_realisation_map(&m, r, s) {
                out.push(m);
            }
            return Ok(());
        }
        for v in std::iter::once(None)
            .chain((0..s.len()).filter(|&t| s.label(t) == r.label(k)).map(Some))
        {
            table[k] = v;
            go(k + 1, r, s, table, steps, caps, out)?;
        }
        table[k] = None;
        Ok(())
    }
    go(0, r, s, &mut table, &mut steps, caps, &mut out)?;
    Ok(out)
}

/// Realisations over `f` level by level: the `k`-th item holds one canonical
/// representative of every isomorphism class with `k` nodes, sorted by code.
///
/// Removing a maximal node from a realisation leaves a realisation, so each
/// one is reached by stacking a node with label `e` on a down-closed `D` such
/// that every down-closed `Y ⊇ D` has `image(Y) ∪ {e}` a configuration.
pub struct RealisationLevels<'a> {
    f: &'a EquivFamily,
    level: Option<Vec<Realisation>>,
}

pub fn realisation_levels(f: &EquivFamily) -> RealisationLevels<'_> {
    RealisationLevels { f, level: None }
}

impl Iterator for RealisationLevels<'_> {
    type Item = Vec<Realisation>;

    fn next(&mut self) -> Option<Vec<Realisation>> {
        let next = match &self.level {
            None => vec![Realisation::chain(&[])],
            Some(level) => {
                let mut grown: std::collections::BTreeMap<CanonicalPosetCode, Realisation> =
                    std::collections::BTreeMap::new();
                for r in level {
                    let downs = r.down_sets();
                    for &d in &downs {
                        let above: Vec<BitSet> =
                            downs.iter().copied().filter(|y| d.is_subset(*y)).collect();
                        for e in 0..self.f.len() {
                            if above.iter().all(|&y| self.f.contains(r.image(y).with(e))) {
                                let (code, form) = canonical_form(&r.extend(e, d));
                                grown.entry(code).or_insert(form);
                            }
                        }
                    }
                }
                grown.into_values().collect()
            }
        };
        if next.is_empty() {
            return None;
        }
        self.level = Some(next.clone());
        Some(next)
    }
}

/// Every realisation over `f` with at most `max_nodes` nodes, one canonical
/// representative per isomorphism class, ordered by size then canonical code.
pub fn enumerate_realisations(
    f: &EquivFamily,
    max_nodes: usize,
    caps: &Caps,
) -> Result<Vec<Realisation>> {
    let mut out = Vec::new();
    for level in realisation_levels(f).take(max_nodes + 1) {
        out.extend(level);
        if out.len() > caps.configs {
            return Err(Error::SearchExplosion {
                what: "realisations",
                cap: caps.configs,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::realisations::enumerate_prime_extremals;
    use crate::structures::{GeneralES, PrimeES};
    use crate::unfolding::er;

    fn caps() -> Caps {
        Caps::default()
    }

    /// Every partial function, kept when `validate_map` accepts it.
    fn raw(src: StructureRef<'_>, tgt: StructureRef<'_>, category: Category) -> Vec<StructureMap> {
        let (n, m) = (src.len(), tgt.len());
        let total = (m + 1).pow(n as u32);
        let mut out = Vec::new();
        for code in 0..total {
            let mut c = code;
            let table: Vec<Option<usize>> = (0..n)
                .map(|_| {
                    let d = c % (m + 1);
                    c /= m + 1;
                    d.checked_sub(1)
                })
                .collect();
            let map = StructureMap::new(table);
            if validate_map(&map, src, tgt, category, &caps())
                .unwrap()
                .is_empty()
            {
                out.push(map);
            }
        }
        out.sort_by(|a, b| a.table().cmp(b.table()));
        out
    }

    fn sorted(mut v: Vec<StructureMap>) -> Vec<StructureMap> {
        v.sort_by(|a, b| a.table().cmp(b.table()));
        v
    }

    #[test]
    fn matches_raw_enumeration() {
        let docs = fixtures::docs();
        let fam = fixtures::docs_family(&caps());
        let q = PrimeES::new(
            vec!["a".into(), "b".into(), "d".into()],
            &[(0, 2), (1, 2)],
            None,
        )
        .unwrap();
        let unf = er(&fam, &caps()).unwrap();
        let chain = PrimeES::new(vec!["x".into(), "y".into()], &[(0, 1)], None).unwrap();
        let cases: Vec<(StructureRef, StructureRef, Category)> = vec![
            (
                StructureRef::General(&docs),
                StructureRef::General(&docs),
                Category::General,
            ),
            (
                StructureRef::Family(&fam),
                StructureRef::Family(&fam),
                Category::Family,
            ),
            (
                StructureRef::Prime(&q),
                StructureRef::Ese(&unf.ese),
                Category::Ese,
            ),
            (
                StructureRef::Ese(&unf.ese),
                StructureRef::Prime(&q),
                Category::Ese,
            ),
            (
                StructureRef::Prime(&q),
                StructureRef::Prime(&chain),
                Category::Prime,
            ),
            (
                StructureRef::Prime(&q),
                StructureRef::Family(&fam),
                Category::Family,
            ),
        ];
        for (s, t, c) in cases {
            let fast = sorted(enumerate_maps(s, t, c, &caps()).unwrap());
            assert_eq!(fast, raw(s, t, c), "{} -> {} in {c}", s.kind(), t.kind());
        }
    }

    #[test]
    fn docs_shape_reaches_both_d_primes() {
        let fam = fixtures::docs_family(&caps());
        let unf = er(&fam, &caps()).unwrap();
        let q = PrimeES::new(
            vec!["a".into(), "b".into(), "d".into()],
            &[(0, 2), (1, 2)],
            None,
        )
        .unwrap();
        let maps = enumerate_maps(
            StructureRef::Prime(&q),
            StructureRef::Ese(&unf.ese),
            Category::Ese,
            &caps(),
        )
        .unwrap();
        let d_images: Vec<&str> = maps
            .iter()
            .filter(|m| m.is_total())
            .map(|m| unf.ese.name(m.get(2).unwrap()))
            .collect();
        assert!(d_images.contains(&"d_a") && d_images.contains(&"d_b"));
    }

    #[test]
    fn empty_source_has_one_map() {
        let empty = GeneralES::new(vec![], None, vec![]).unwrap();
        let docs = fixtures::docs();
        let maps = enumerate_maps(
            StructureRef::General(&empty),
            StructureRef::General(&docs),
            Category::General,
            &caps(),
        )
        .unwrap();
        assert_eq!(maps, vec![StructureMap::new(vec![])]);
    }

    #[test]
    fn at_most_one_map_between_extremals() {
        let fam = fam_of(&fixtures::e0());
        let primes = enumerate_prime_extremals(&fam, &caps()).unwrap();
        for r in &primes {
            for s in &primes {
                assert!(enumerate_realisation_maps(r, s, &caps()).unwrap().len() <= 1);
            }
        }
    }

    fn fam_of(g: &GeneralES) -> EquivFamily {
        crate::structures::fam(g, &caps()).unwrap()
    }

    #[test]
    fn realisations_of_docs() {
        let f = fixtures::docs_family(&caps());
        let all = enumerate_realisations(&f, 3, &caps()).unwrap();
        assert!(all
            .iter()
            .all(|r| crate::realisations::is_realisation(r, &f)));
        // a, b, a<d, b<d, a<b<d style chains and twins all appear
        assert!(all.iter().any(|r| r.len() == 3 && r.labels().contains(&2)));
        let codes: std::collections::HashSet<_> = all
            .iter()
            .map(crate::realisations::canonical_code)
            .collect();
        assert_eq!(codes.len(), all.len());
        // brute force: every labelled poset on two nodes
        let two = all.iter().filter(|r| r.len() == 2).count();
        let mut brute = std::collections::HashSet::new();
        for l0 in 0..3 {
            for l1 in 0..3 {
                for lt in [vec![], vec![(0, 1)]] {
                    let r = Realisation::new(vec![l0, l1], &lt).unwrap();
                    if crate::realisations::is_realisation(&r, &f) {
                        brute.insert(crate::realisations::canonical_code(&r));
                    }
                }
            }
        }
        assert_eq!(two, brute.len());
    }

    #[test]
    fn oversized_source_is_refused() {
        let p = fixtures::appb_bp();
        let err = enumerate_maps(
            StructureRef::Ese(&p),
            StructureRef::Ese(&p),
            Category::Ese,
            &caps(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::TooManyEvents { .. }));
    }

    #[test]
    fn search_cap_is_reported() {
        let fam = fixtures::docs_family(&caps());
        let tight = Caps {
            search: 3,
            ..caps()
        };
        let err = enumerate_maps(
            StructureRef::Family(&fam),
            StructureRef::Family(&fam),
            Category::Family,
            &tight,
        )
        .unwrap_err();
        assert!(err.is_cap());
    }
}
