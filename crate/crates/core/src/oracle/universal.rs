use serde::Serialize;

use crate::caps::Caps;
use crate::error::Result;
use crate::structures::{
    ese_map_violations, fam, family_map_violations, map_equiv, validate_map, Category, EquivFamily,
    Ese, GeneralES, StructureMap, StructureRef,
};
use crate::unfolding::{col, er, factor_through_counit, factor_through_unit};

use super::enumerate::{enumerate_maps_where, format_map};

/// One failed instance: the cone (or map) checked and what went wrong.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckFailure {
    pub cone: String,
    pub evidence: String,
}

/// Outcome of checking a universal property over a set of instances.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UniversalCheckReport {
    pub property: String,
    pub instances_checked: usize,
    /// Total number of mediating maps found over all instances.
    pub mediators_found: usize,
    pub failures: Vec<CheckFailure>,
}

impl UniversalCheckReport {
    pub fn new(property: impl Into<String>) -> Self {
        UniversalCheckReport {
            property: property.into(),
            instances_checked: 0,
            mediators_found: 0,
            failures: Vec::new(),
        }
    }

    pub fn pass(&self) -> bool {
        self.failures.is_empty()
    }

    pub(crate) fn fail(&mut self, cone: String, evidence: impl Into<String>) {
        self.failures.push(CheckFailure {
            cone,
            evidence: evidence.into(),
        });
    }
}

/// For every test ese `q` and family map `m: C(q) → f`: the factorisation `h`
/// through the counit exists with `ε ∘ h = m`, and every `h'` with `ε ∘ h' ≡ m`
/// is equivalent to `h`.
pub fn check_counit_universal(
    f: &EquivFamily,
    tests: &[(String, Ese)],
    caps: &Caps,
) -> Result<UniversalCheckReport> {
    let u = er(f, caps)?;
    let unfolded = u.ese.family(caps)?;
    let mut report = UniversalCheckReport::new("counit");
    for (name, q) in tests {
        let qf = q.family(caps)?;
        let maps = enumerate_maps_where(
            StructureRef::Family(&qf),
            StructureRef::Family(f),
            Category::Family,
            caps,
            &|_, _| true,
        )?;
        for m in maps {
            report.instances_checked += 1;
            let cone = format!("{name}: {}", format_map(&m, q.names(), f.names()));
            let h = match factor_through_counit(q, f, &u, &m) {
                Ok(h) => h,
                Err(e) => {
                    report.fail(cone, format!("no mediator: {e}"));
                    continue;
                }
            };
            if !ese_map_violations(&h, q, &u.ese).is_empty()
                || !family_map_violations(&h, &qf, &unfolded).is_empty()
            {
                report.fail(
                    cone,
                    format!(
                        "factorisation {} is not a map",
                        format_map(&h, q.names(), u.ese.names())
                    ),
                );
                continue;
            }
            if h.then(&u.counit) != m {
                report.fail(cone, "factorisation does not compose to the given map");
                continue;
            }
            let counit = &u.counit;
            let allowed = |t: usize, v: Option<usize>| match (m.get(t), v) {
                (None, None) => true,
                (Some(x), Some(p)) => f.equiv().equiv(counit.get(p).expect("counit is total"), x),
                _ => false,
            };
            let alternatives = enumerate_maps_where(
                StructureRef::Ese(q),
                StructureRef::Ese(&u.ese),
                Category::Ese,
                caps,
                &allowed,
            )?;
            report.mediators_found += alternatives.len();
            if let Some(other) = alternatives
                .iter()
                .find(|k| !map_equiv(k, &h, u.ese.equiv()))
            {
                report.fail(
                    cone,
                    format!(
                        "mediators {} and {} are not equivalent",
                        format_map(&h, q.names(), u.ese.names()),
                        format_map(other, q.names(), u.ese.names())
                    ),
                );
            }
        }
    }
    Ok(report)
}

/// For every test family `f` and family map `m: f → fam(g)`: exactly one
/// general map `k: col(f) → g` has `fam(k) ∘ η = m`, and it is the factorisation.
pub fn check_unit_universal(
    g: &GeneralES,
    tests: &[(String, EquivFamily)],
    caps: &Caps,
) -> Result<UniversalCheckReport> {
    let fam_g = fam(g, caps)?;
    let mut report = UniversalCheckReport::new("unit");
    for (name, f) in tests {
        let c = col(f);
        let maps = enumerate_maps_where(
            StructureRef::Family(f),
            StructureRef::Family(&fam_g),
            Category::Family,
            caps,
            &|_, _| true,
        )?;
        for m in maps {
            report.instances_checked += 1;
            let cone = format!("{name}: {}", format_map(&m, f.names(), g.names()));
            let k = match factor_through_unit(f, &c, g, &fam_g, &m) {
                Ok(k) => k,
                Err(e) => {
                    report.fail(cone, format!("no mediator: {e}"));
                    continue;
                }
            };
            let general = |k: &StructureMap| {
                validate_map(
                    k,
                    StructureRef::General(&c.ges),
                    StructureRef::General(g),
                    Category::General,
                    caps,
                )
            };
            if !general(&k)?.is_empty() {
                report.fail(
                    cone,
                    format!(
                        "factorisation {} is not a map",
                        format_map(&k, c.ges.names(), g.names())
                    ),
                );
                continue;
            }
            // m lands in fam(g), whose events are the securable events of g
            let in_g = |a: usize| m.get(a).and_then(|t| g.index_of(fam_g.name(t)));
            if (0..f.len()).any(|a| k.get(c.class_of[a]) != in_g(a)) {
                report.fail(cone, "factorisation does not compose to the given map");
                continue;
            }
            let forced: Vec<Option<usize>> = (0..c.ges.len())
                .map(|j| {
                    in_g(
                        c.class_of
                            .iter()
                            .position(|&x| x == j)
                            .expect("classes are inhabited"),
                    )
                })
                .collect();
            let all = enumerate_maps_where(
                StructureRef::General(&c.ges),
                StructureRef::General(g),
                Category::General,
                caps,
                &|j, v| forced[j] == v,
            )?;
            report.mediators_found += all.len();
            if all != [k.clone()] {
                report.fail(cone, format!("{} mediators", all.len()));
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::structures::PrimeES;

    fn caps() -> Caps {
        Caps::default()
    }

    fn shape() -> Ese {
        Ese::with_identity(
            PrimeES::new(
                vec!["a".into(), "b".into(), "d".into()],
                &[(0, 2), (1, 2)],
                None,
            )
            .unwrap(),
        )
    }

    #[test]
    fn docs_counit_two_equivalent_mediators() {
        let f = fixtures::docs_family(&caps());
        let report = check_counit_universal(&f, &[("Q".into(), shape())], &caps()).unwrap();
        assert!(report.pass(), "{:?}", report.failures);
        let m = StructureMap::identity(3);
        let u = er(&f, &caps()).unwrap();
        let h = factor_through_counit(&shape(), &f, &u, &m).unwrap();
        let counit = &u.counit;
        let all = enumerate_maps_where(
            StructureRef::Ese(&shape()),
            StructureRef::Ese(&u.ese),
            Category::Ese,
            &caps(),
            &|t, v| v.and_then(|p| counit.get(p)) == m.get(t),
        )
        .unwrap();
        assert_eq!(all.len(), 2);
        assert!(all.iter().all(|k| map_equiv(k, &h, u.ese.equiv())));
    }

    #[test]
    fn empty_test_object_passes() {
        let empty = Ese::with_identity(PrimeES::new(vec![], &[], None).unwrap());
        let f = fixtures::docs_family(&caps());
        let report = check_counit_universal(&f, &[("empty".into(), empty)], &caps()).unwrap();
        assert!(report.pass());
        assert_eq!(report.instances_checked, 1);
    }

    #[test]
    fn docs_unit_against_own_family() {
        let g = fixtures::docs();
        let f = fam(&g, &caps()).unwrap();
        let report = check_unit_universal(&g, &[("docs".into(), f)], &caps()).unwrap();
        assert!(report.pass(), "{:?}", report.failures);
        assert!(report.instances_checked > 1);
        assert_eq!(report.mediators_found, report.instances_checked);
    }

    #[test]
    fn empty_general_structure_unit() {
        let g = GeneralES::new(vec![], None, vec![]).unwrap();
        let f = fixtures::docs_family(&caps());
        let report = check_unit_universal(&g, &[("docs".into(), f)], &caps()).unwrap();
        assert!(report.pass());
        assert_eq!(report.instances_checked, 1);
    }

    #[test]
    fn e0_counit_against_cospan_shapes() {
        let f = fam(&fixtures::e0(), &caps()).unwrap();
        let tests = vec![
            ("ex53".to_string(), fixtures::ex53()),
            ("B".to_string(), fixtures::appb_b()),
        ];
        let report = check_counit_universal(&f, &tests, &caps()).unwrap();
        assert!(report.pass(), "{:?}", report.failures);
    }

    #[test]
    fn unit_with_unsecurable_event() {
        // `a` is never enabled, so fam(g) has one event fewer than g
        let en = |set: &[usize], event| crate::structures::Enabling {
            set: set.iter().copied().collect(),
            event,
        };
        let g = GeneralES::new(
            vec!["a".into(), "b".into(), "c".into()],
            None,
            vec![en(&[], 1), en(&[1], 2)],
        )
        .unwrap();
        let f = fam(&g, &caps()).unwrap();
        assert_eq!(f.len(), 2);
        let report = check_unit_universal(&g, &[("fam g".into(), f)], &caps()).unwrap();
        assert!(report.pass(), "{:?}", report.failures);
        assert!(report.instances_checked > 1);
    }
}
