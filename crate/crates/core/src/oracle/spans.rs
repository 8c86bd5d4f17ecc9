use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::structures::{
    ese_map_violations, map_equiv, Category, Equivalence, Ese, StructureMap, StructureRef,
};

use super::enumerate::{enumerate_maps_where, format_map};
use super::universal::UniversalCheckReport;

/// How strictly cones must commute and mediators must be unique.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpanKind {
    /// Exact commutation, exact and unique mediator.
    Pullback,
    /// Commutation up to ≡, exact and unique mediator.
    PseudoPullback,
    /// Commutation up to ≡, mediator unique up to ≡.
    Bipullback,
}

impl fmt::Display for SpanKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SpanKind::Pullback => "pullback",
            SpanKind::PseudoPullback => "pseudo-pullback",
            SpanKind::Bipullback => "bipullback",
        })
    }
}

impl FromStr for SpanKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<SpanKind> {
        match s {
            "pullback" => Ok(SpanKind::Pullback),
            "pseudo-pullback" => Ok(SpanKind::PseudoPullback),
            "bipullback" => Ok(SpanKind::Bipullback),
            other => Err(Error::Parse(format!("unknown span kind `{other}`"))),
        }
    }
}

/// `A --f--> C <--g-- B`.
#[derive(Debug, Clone, Copy)]
pub struct Cospan<'a> {
    pub a: &'a Ese,
    pub f: &'a StructureMap,
    pub b: &'a Ese,
    pub g: &'a StructureMap,
    pub c: &'a Ese,
}

/// A candidate limit: an object with projections to `A` and `B`.
#[derive(Debug, Clone, Copy)]
pub struct Apex<'a> {
    pub ese: &'a Ese,
    pub left: &'a StructureMap,
    pub right: &'a StructureMap,
}

/// A pair of maps into `A` and `B`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cone {
    pub left: StructureMap,
    pub right: StructureMap,
}

/// A test object, with the cones to try or `None` for every commuting cone.
#[derive(Debug, Clone)]
pub struct TestObject {
    pub name: String,
    pub ese: Ese,
    pub cones: Option<Vec<Cone>>,
}

impl SpanKind {
    fn exact_square(self) -> bool {
        self == SpanKind::Pullback
    }

    fn exact_mediator(self) -> bool {
        self != SpanKind::Bipullback
    }
}

fn related(x: Option<usize>, y: Option<usize>, equiv: &Equivalence, exact: bool) -> bool {
    match (x, y) {
        (None, None) => true,
        (Some(x), Some(y)) => x == y || (!exact && equiv.equiv(x, y)),
        _ => false,
    }
}

fn square_commutes(
    kind: SpanKind,
    cospan: &Cospan<'_>,
    left: &StructureMap,
    right: &StructureMap,
) -> bool {
    let (fl, gr) = (left.then(cospan.f), right.then(cospan.g));
    if kind.exact_square() {
        fl == gr
    } else {
        map_equiv(&fl, &gr, cospan.c.equiv())
    }
}

/// Every commuting cone from `t`, joined on the composite into `C`.
fn all_cones(kind: SpanKind, t: &Ese, cospan: &Cospan<'_>, caps: &Caps) -> Result<Vec<Cone>> {
    let into = |target: &Ese| {
        enumerate_maps_where(
            StructureRef::Ese(t),
            StructureRef::Ese(target),
            Category::Ese,
            caps,
            &|_, _| true,
        )
    };
    let key = |m: &StructureMap, leg: &StructureMap| -> Vec<Option<usize>> {
        let composite = m.then(leg);
        if kind.exact_square() {
            composite.table().to_vec()
        } else {
            composite
                .table()
                .iter()
                .map(|x| x.map(|c| cospan.c.equiv().rep(c)))
                .collect()
        }
    };
    let mut by_key: HashMap<Vec<Option<usize>>, Vec<StructureMap>> = HashMap::new();
    for right in into(cospan.b)? {
        by_key.entry(key(&right, cospan.g)).or_default().push(right);
    }
    let mut cones = Vec::new();
    for left in into(cospan.a)? {
        if let Some(rights) = by_key.get(&key(&left, cospan.f)) {
            for right in rights {
                cones.push(Cone {
                    left: left.clone(),
                    right: right.clone(),
                });
            }
        }
        if cones.len() > caps.maps {
            return Err(Error::SearchExplosion {
                what: "cones",
                cap: caps.maps,
            });
        }
    }
    Ok(cones)
}

/// Check that `apex` is a limit of `cospan` of the given kind against every
/// listed (or every commuting) cone from each test object.
pub fn check_span_universal(
    kind: SpanKind,
    apex: &Apex<'_>,
    cospan: &Cospan<'_>,
    tests: &[TestObject],
    caps: &Caps,
) -> Result<UniversalCheckReport> {
    let mut report = UniversalCheckReport::new(kind.to_string());
    let projections_valid = ese_map_violations(apex.left, apex.ese, cospan.a).is_empty()
        && ese_map_violations(apex.right, apex.ese, cospan.b).is_empty();
    if !projections_valid {
        report.fail("apex".into(), "projections are not maps");
    } else if !square_commutes(kind, cospan, apex.left, apex.right) {
        report.fail("apex".into(), "square does not commute");
    }
    for test in tests {
        let t = &test.ese;
        let cones = match &test.cones {
            Some(cones) => cones.clone(),
            None => all_cones(kind, t, cospan, caps)?,
        };
        for cone in cones {
            report.instances_checked += 1;
            let label = format!(
                "{}: left {}, right {}",
                test.name,
                format_map(&cone.left, t.names(), cospan.a.names()),
                format_map(&cone.right, t.names(), cospan.b.names())
            );
            let valid = ese_map_violations(&cone.left, t, cospan.a).is_empty()
                && ese_map_violations(&cone.right, t, cospan.b).is_empty();
            if !valid || !square_commutes(kind, cospan, &cone.left, &cone.right) {
                report.fail(label, "not a commuting cone");
                continue;
            }
            let exact = kind.exact_mediator();
            let allowed = |x: usize, v: Option<usize>| {
                let through = |proj: &StructureMap| v.and_then(|e| proj.get(e));
                related(
                    through(apex.left),
                    cone.left.get(x),
                    cospan.a.equiv(),
                    exact,
                ) && related(
                    through(apex.right),
                    cone.right.get(x),
                    cospan.b.equiv(),
                    exact,
                )
            };
            let mediators = enumerate_maps_where(
                StructureRef::Ese(t),
                StructureRef::Ese(apex.ese),
                Category::Ese,
                caps,
                &allowed,
            )?;
            report.mediators_found += mediators.len();
            let show = |m: &StructureMap| format_map(m, t.names(), apex.ese.names());
            match mediators.as_slice() {
                [] => report.fail(label, "no mediator"),
                [_] => {}
                [first, rest @ ..] if exact => {
                    let related = rest.iter().all(|m| map_equiv(m, first, apex.ese.equiv()));
                    report.fail(
                        label,
                        format!(
                            "{} mediators{}: {} and {}",
                            mediators.len(),
                            if related { ", all equivalent" } else { "" },
                            show(first),
                            show(&rest[0])
                        ),
                    )
                }
                [first, rest @ ..] => {
                    if let Some(other) =
                        rest.iter().find(|m| !map_equiv(m, first, apex.ese.equiv()))
                    {
                        report.fail(
                            label,
                            format!("inequivalent mediators {} and {}", show(first), show(other)),
                        );
                    }
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{pr, product_ef};
    use crate::fixtures;
    use crate::structures::PrimeES;

    fn caps() -> Caps {
        Caps::default()
    }

    fn single(name: &str) -> Ese {
        Ese::with_identity(PrimeES::new(vec![name.into()], &[], None).unwrap())
    }

    #[test]
    fn terminal_cospan_product() {
        // A = {a}, B = {b}, C empty: the product as an edc
        let (a, b) = (single("a"), single("b"));
        let c = Ese::with_identity(PrimeES::new(vec![], &[], None).unwrap());
        let undefined = StructureMap::undefined(1);
        let (fa, fb) = (a.family(&caps()).unwrap(), b.family(&caps()).unwrap());
        let prod = product_ef(&fa, &fb, &caps()).unwrap();
        let edc = pr(&prod.family).unwrap();
        let left = edc.counit.then(&prod.left);
        let right = edc.counit.then(&prod.right);
        let apex = Apex {
            ese: &edc.ese,
            left: &left,
            right: &right,
        };
        let cospan = Cospan {
            a: &a,
            f: &undefined,
            b: &b,
            g: &undefined,
            c: &c,
        };
        let tests = vec![
            TestObject {
                name: "A".into(),
                ese: a.clone(),
                cones: None,
            },
            TestObject {
                name: "AB".into(),
                ese: Ese::with_identity(
                    PrimeES::new(vec!["x".into(), "y".into()], &[], None).unwrap(),
                ),
                cones: None,
            },
        ];
        let report =
            check_span_universal(SpanKind::Pullback, &apex, &cospan, &tests, &caps()).unwrap();
        assert!(report.pass(), "{:?}", report.failures);
        assert!(report.instances_checked >= 4);
    }

    #[test]
    fn cospan_p_fails_against_d() {
        let (a, b, c, p, d) = (
            fixtures::appb_a(),
            fixtures::appb_b(),
            fixtures::appb_c(),
            fixtures::appb_p(),
            fixtures::appb_d(),
        );
        let (f, g) = (fixtures::appb_map_f(), fixtures::appb_map_g());
        let left = fixtures::by_lettering(p.names(), a.names());
        let right = fixtures::by_lettering(p.names(), b.names());
        let cone = Cone {
            left: fixtures::by_lettering(d.names(), a.names()),
            right: fixtures::by_lettering(d.names(), b.names()),
        };
        let report = check_span_universal(
            SpanKind::Pullback,
            &Apex {
                ese: &p,
                left: &left,
                right: &right,
            },
            &Cospan {
                a: &a,
                f: &f,
                b: &b,
                g: &g,
                c: &c,
            },
            &[TestObject {
                name: "D".into(),
                ese: d,
                cones: Some(vec![cone]),
            }],
            &caps(),
        )
        .unwrap();
        assert_eq!(report.failures.len(), 1);
        assert_eq!(report.failures[0].evidence, "no mediator");
    }

    #[test]
    fn kind_round_trip() {
        for k in [
            SpanKind::Pullback,
            SpanKind::PseudoPullback,
            SpanKind::Bipullback,
        ] {
            assert_eq!(k.to_string().parse::<SpanKind>().unwrap(), k);
        }
    }
}
