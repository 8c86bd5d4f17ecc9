use std::path::Path;

use serde_json::{json, Value};

use causal_unfold::constructions::{
    check_ax, hide as hide_events, is_stable_ef, pr, product_ef, pseudo_pullback_ef, pullback_ef,
    restrict_to_ax, stable_pairs, unamb, PairFamily,
};
use causal_unfold::dot::{realisation_dot, structure_dot};
use causal_unfold::io::{map_to_table, realisation_to_doc, structure_to_doc};
use causal_unfold::oracle::{
    check_counit_universal, check_span_universal, check_unit_universal, enumerate_maps,
    realisation_levels, replay_appendix_b, Apex, Cospan, SpanKind, TestObject,
    UniversalCheckReport,
};
use causal_unfold::realisations::{
    enumerate_prime_extremals, extremal_order, is_extremal, is_extremal_by_definition,
    is_realisation,
};
use causal_unfold::structures::{
    validate_map, validate_structure, Category, EquivFamily, Ese, Structure, StructureMap,
    StructureRef, Violation,
};
use causal_unfold::unfolding::{causal_unfolding, check_structural_axioms, col, er, UnfoldResult};
use causal_unfold::{BitSet, Caps, Error};

use crate::load::{self, Failure, LoadedMap, EXIT_INVALID};
use crate::{Kind, LimitCategory, MapCategory, OracleCheck};

pub struct Ctx {
    pub caps: Caps,
    pub dot: bool,
}

type Out = Result<String, Failure>;

fn pretty(v: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialise");
    s.push('\n');
    s
}

fn stem(path: &Path) -> String {
    path.file_name()
        .and_then(|n| n.to_str())
        .map(|n| n.split('.').next().unwrap_or(n).to_string())
        .unwrap_or_default()
}

/// A structure as JSON, or as DOT under `--dot`.
fn emit(ctx: &Ctx, s: StructureRef<'_>, name: &str) -> String {
    if ctx.dot {
        structure_dot(s, name)
    } else {
        pretty(&structure_to_doc(s))
    }
}

fn violations_json(vs: &[Violation]) -> Value {
    vs.iter()
        .map(|v| json!({"axiom": v.axiom, "witness": v.witness}))
        .collect()
}

fn as_ese(s: Structure, path: &Path) -> Result<Ese, Failure> {
    match s {
        Structure::Ese(p) => Ok(p),
        Structure::Prime(p) => Ok(Ese::with_identity(p)),
        other => Err(Failure::new(
            EXIT_INVALID,
            format!(
                "{}: {}",
                path.display(),
                Error::KindMismatch {
                    expected: "ese",
                    found: other.kind()
                }
            ),
        )),
    }
}

fn unfolding(s: &Structure, caps: &Caps) -> Result<UnfoldResult, Failure> {
    Ok(match s {
        Structure::General(g) => causal_unfolding(g, caps)?,
        other => er(&other.to_family(caps)?, caps)?,
    })
}

pub fn validate(ctx: &Ctx, path: &Path) -> Out {
    let kind = load::kind_of(path)?;
    if kind == "realisation" {
        let r = load::realisation(path, &ctx.caps)?;
        let valid = match &r.over {
            Some(f) => is_realisation(&r.realisation, f),
            None => true,
        };
        let out = pretty(&json!({"kind": kind, "valid": valid}));
        return if valid {
            Ok(out)
        } else {
            Err(Failure::new(
                EXIT_INVALID,
                format!(
                    "{}: realisation: an image is no configuration",
                    path.display()
                ),
            )
            .with_output(out))
        };
    }
    if kind == "map" {
        return check_map(ctx, path, MapCategory::Family);
    }
    let s = load::raw_structure(path)?;
    let vs = validate_structure(&s);
    let out = pretty(
        &json!({"kind": s.kind(), "valid": vs.is_empty(), "violations": violations_json(&vs)}),
    );
    match vs.first() {
        None => Ok(out),
        Some(v) => {
            Err(Failure::new(EXIT_INVALID, format!("{}: {v}", path.display())).with_output(out))
        }
    }
}

pub fn configs(ctx: &Ctx, path: &Path) -> Out {
    let f = load::structure(path, &ctx.caps)?.to_family(&ctx.caps)?;
    Ok(emit(ctx, StructureRef::Family(&f), &stem(path)))
}

pub fn unfold(ctx: &Ctx, path: &Path) -> Out {
    let u = unfolding(&load::structure(path, &ctx.caps)?, &ctx.caps)?;
    Ok(emit(ctx, StructureRef::Ese(&u.ese), &stem(path)))
}

pub fn collapse(ctx: &Ctx, path: &Path) -> Out {
    let f = load::structure(path, &ctx.caps)?.to_family(&ctx.caps)?;
    let c = col(&f);
    Ok(emit(ctx, StructureRef::General(&c.ges), &stem(path)))
}

pub fn extremals(ctx: &Ctx, path: &Path) -> Out {
    let s = load::structure(path, &ctx.caps)?;
    let f = s.to_family(&ctx.caps)?;
    let u = er(&f, &ctx.caps)?;
    if ctx.dot {
        return Ok((0..u.ese.len())
            .map(|e| realisation_dot(&u.primes[e], f.names(), u.ese.name(e)))
            .collect());
    }
    let order = extremal_order(&f, &ctx.caps)?;
    let mut primes = order.complete_primes();
    primes.sort_unstable();
    let tops = order.with_top();
    let canonical = enumerate_prime_extremals(&f, &ctx.caps)?;
    Ok(pretty(&json!({
        "primes": (0..u.ese.len())
            .map(|e| json!({"event": u.ese.name(e), "realisation": realisation_to_doc(&u.primes[e], f.names(), None)}))
            .collect::<Vec<_>>(),
        "prime_count": canonical.len(),
        "classes": order.len(),
        "prime_algebraic": order.is_prime_algebraic(),
        "primes_are_top_classes": primes == tops,
    })))
}

pub fn hide(ctx: &Ctx, path: &Path, visible: &[String]) -> Out {
    let p = as_ese(load::structure(path, &ctx.caps)?, path)?;
    let keep = visible
        .iter()
        .map(|n| p.index_of(n).ok_or_else(|| Error::UnknownEvent(n.clone())))
        .collect::<Result<BitSet, Error>>()?;
    Ok(emit(
        ctx,
        StructureRef::Ese(&hide_events(&p, keep)?),
        &stem(path),
    ))
}

pub fn restrict_ax(ctx: &Ctx, path: &Path, level: u8) -> Out {
    let p = as_ese(load::structure(path, &ctx.caps)?, path)?;
    Ok(emit(
        ctx,
        StructureRef::Ese(&restrict_to_ax(&p, level, &ctx.caps)?),
        &stem(path),
    ))
}

pub fn check_axioms(ctx: &Ctx, path: &Path) -> Out {
    let s = load::structure(path, &ctx.caps)?;
    let kind = s.kind();
    let (p, unfolded) = match s {
        Structure::Ese(p) => (p, false),
        Structure::Prime(p) => (Ese::with_identity(p), false),
        other => (unfolding(&other, &ctx.caps)?.ese, true),
    };
    let ax = check_ax(&p);
    let st = check_structural_axioms(&p, &ctx.caps)?;
    Ok(pretty(&json!({
        "kind": kind,
        "unfolded": unfolded,
        "events": p.len(),
        "ax0": ax.ax0,
        "ax1": ax.ax1,
        "ax2": ax.ax2,
        "level": ax.level(),
        "A": st.a,
        "B": st.b,
        "C": st.c,
        "D": st.d,
        "D'": st.d_prime,
        "D1": st.d1,
    })))
}

pub fn stable(ctx: &Ctx, path: &Path) -> Out {
    let f = load::structure(path, &ctx.caps)?.to_family(&ctx.caps)?;
    let report = is_stable_ef(&f);
    let witnesses: Vec<String> = report.witnesses.iter().map(|w| w.describe(&f)).collect();
    let mut out = json!({"stable": report.stable, "witnesses": witnesses});
    if report.stable {
        out["unamb"] =
            serde_json::to_value(structure_to_doc(&unamb(&f)?)).expect("documents serialise");
        out["pr"] =
            serde_json::to_value(structure_to_doc(&pr(&f)?.ese)).expect("documents serialise");
    }
    Ok(pretty(&out))
}

/// The apex of a limit with its projections into the two sides.
struct Limit {
    apex: Structure,
    left: StructureMap,
    right: StructureMap,
}

fn limit_in(category: LimitCategory, pf: PairFamily, caps: &Caps) -> Result<Limit, Failure> {
    Ok(match category {
        LimitCategory::Family => Limit {
            left: pf.left,
            right: pf.right,
            apex: Structure::Family(pf.family),
        },
        LimitCategory::Edc => {
            let pf = stable_pairs(pf);
            let p = pr(&pf.family)?;
            Limit {
                left: p.counit.then(&pf.left),
                right: p.counit.then(&pf.right),
                apex: Structure::Ese(p.ese),
            }
        }
        LimitCategory::Ese => {
            let u = er(&pf.family, caps)?;
            Limit {
                left: u.counit.then(&pf.left),
                right: u.counit.then(&pf.right),
                apex: Structure::Ese(u.ese),
            }
        }
    })
}

/// Inputs of the edc category must be ese's satisfying Ax1.
fn family_for(
    category: LimitCategory,
    s: &Structure,
    path: &Path,
    caps: &Caps,
) -> Result<EquivFamily, Failure> {
    if category == LimitCategory::Edc {
        let p = as_ese(s.clone(), path)?;
        if !check_ax(&p).ax1 {
            return Err(Failure::new(
                EXIT_INVALID,
                format!("{}: not an edc: Ax1 fails", path.display()),
            ));
        }
    }
    Ok(s.to_family(caps)?)
}

fn emit_limit(
    ctx: &Ctx,
    l: &Limit,
    left_names: &[String],
    right_names: &[String],
    name: &str,
) -> String {
    if ctx.dot {
        return structure_dot(l.apex.as_ref(), name);
    }
    pretty(&json!({
        "apex": structure_to_doc(&l.apex),
        "left": map_to_table(&l.left, l.apex.names(), left_names),
        "right": map_to_table(&l.right, l.apex.names(), right_names),
    }))
}

pub fn product(ctx: &Ctx, left: &Path, right: &Path, category: LimitCategory) -> Out {
    let (a, b) = (
        load::structure(left, &ctx.caps)?,
        load::structure(right, &ctx.caps)?,
    );
    let (fa, fb) = (
        family_for(category, &a, left, &ctx.caps)?,
        family_for(category, &b, right, &ctx.caps)?,
    );
    let l = limit_in(category, product_ef(&fa, &fb, &ctx.caps)?, &ctx.caps)?;
    Ok(emit_limit(ctx, &l, fa.names(), fb.names(), "product"))
}

/// A map between the families of its source and target, matched by event name.
fn family_map(m: &LoadedMap, fa: &EquivFamily, fc: &EquivFamily) -> Result<StructureMap, Failure> {
    let table = (0..fa.len())
        .map(|e| {
            let s = m
                .source
                .names()
                .iter()
                .position(|n| n == fa.name(e))
                .expect("family events are events");
            m.map
                .get(s)
                .map(|t| {
                    let name = &m.target.names()[t];
                    fc.index_of(name).ok_or_else(|| {
                        Failure::from(Error::InvalidMap(format!(
                            "`{name}` occurs in no configuration"
                        )))
                    })
                })
                .transpose()
        })
        .collect::<Result<Vec<_>, Failure>>()?;
    Ok(StructureMap::new(table))
}

pub fn pullback(ctx: &Ctx, f: &Path, g: &Path, category: LimitCategory, pseudo: bool) -> Out {
    let (mf, mg) = (load::map(f, &ctx.caps)?, load::map(g, &ctx.caps)?);
    if mf.target != mg.target {
        return Err(Failure::new(
            EXIT_INVALID,
            format!("{} and {} have different targets", f.display(), g.display()),
        ));
    }
    let fa = family_for(category, &mf.source, &mf.source_path, &ctx.caps)?;
    let fb = family_for(category, &mg.source, &mg.source_path, &ctx.caps)?;
    let fc = mf.target.to_family(&ctx.caps)?;
    let (m1, m2) = (family_map(&mf, &fa, &fc)?, family_map(&mg, &fb, &fc)?);
    let pf = if pseudo {
        pseudo_pullback_ef(&fa, &m1, &fb, &m2, &fc, &ctx.caps)?
    } else {
        pullback_ef(&fa, &m1, &fb, &m2, &ctx.caps)?
    };
    let l = limit_in(category, pf, &ctx.caps)?;
    let name = if pseudo {
        "pseudo_pullback"
    } else {
        "pullback"
    };
    Ok(emit_limit(ctx, &l, fa.names(), fb.names(), name))
}

fn category(c: MapCategory) -> Category {
    match c {
        MapCategory::Family => Category::Family,
        MapCategory::General => Category::General,
        MapCategory::Ese => Category::Ese,
        MapCategory::Prime => Category::Prime,
    }
}

pub fn check_map(ctx: &Ctx, path: &Path, c: MapCategory) -> Out {
    let m = load::map(path, &ctx.caps)?;
    let vs = validate_map(
        &m.map,
        m.source.as_ref(),
        m.target.as_ref(),
        category(c),
        &ctx.caps,
    )?;
    let out = pretty(
        &json!({"category": category(c).to_string(), "valid": vs.is_empty(), "violations": violations_json(&vs)}),
    );
    match vs.first() {
        None => Ok(out),
        Some(v) => {
            Err(Failure::new(EXIT_INVALID, format!("{}: {v}", path.display())).with_output(out))
        }
    }
}

fn report_out(report: &UniversalCheckReport) -> Out {
    let out = pretty(report);
    match report.failures.first() {
        None => Ok(out),
        Some(f) => Err(Failure::new(
            EXIT_INVALID,
            format!("{} fails at {}: {}", report.property, f.cone, f.evidence),
        )
        .with_output(out)),
    }
}

fn named_eses(paths: &[std::path::PathBuf], caps: &Caps) -> Result<Vec<(String, Ese)>, Failure> {
    paths
        .iter()
        .map(|p| Ok((stem(p), as_ese(load::structure(p, caps)?, p)?)))
        .collect()
}

fn span_kind(k: Kind) -> SpanKind {
    match k {
        Kind::Pullback => SpanKind::Pullback,
        Kind::PseudoPullback => SpanKind::PseudoPullback,
        Kind::Bipullback => SpanKind::Bipullback,
    }
}

pub fn oracle(ctx: &Ctx, check: OracleCheck) -> Out {
    let caps = &ctx.caps;
    match check {
        OracleCheck::Maps {
            source,
            target,
            category: c,
        } => {
            let (s, t) = (
                load::structure(&source, caps)?,
                load::structure(&target, caps)?,
            );
            let maps = enumerate_maps(s.as_ref(), t.as_ref(), category(c), caps)?;
            let tables: Vec<_> = maps
                .iter()
                .map(|m| map_to_table(m, s.names(), t.names()))
                .collect();
            Ok(pretty(
                &json!({"category": category(c).to_string(), "count": maps.len(), "maps": tables}),
            ))
        }
        OracleCheck::Counit { family, tests } => {
            let f = load::structure(&family, caps)?.to_family(caps)?;
            report_out(&check_counit_universal(
                &f,
                &named_eses(&tests, caps)?,
                caps,
            )?)
        }
        OracleCheck::Unit { general, tests } => {
            let g = match load::structure(&general, caps)? {
                Structure::General(g) => g,
                other => {
                    return Err(Error::KindMismatch {
                        expected: "general",
                        found: other.kind(),
                    }
                    .into())
                }
            };
            let tests = tests
                .iter()
                .map(|p| Ok((stem(p), load::structure(p, caps)?.to_family(caps)?)))
                .collect::<Result<Vec<_>, Failure>>()?;
            report_out(&check_unit_universal(&g, &tests, caps)?)
        }
        OracleCheck::Span {
            kind,
            left,
            right,
            f,
            g,
            tests,
        } => {
            let (l, r) = (load::map(&left, caps)?, load::map(&right, caps)?);
            let (mf, mg) = (load::map(&f, caps)?, load::map(&g, caps)?);
            if l.source != r.source
                || l.target != mf.source
                || r.target != mg.source
                || mf.target != mg.target
            {
                return Err(Failure::new(
                    EXIT_INVALID,
                    "the four maps do not form an apex over a cospan",
                ));
            }
            let apex = as_ese(l.source.clone(), &l.source_path)?;
            let a = as_ese(mf.source.clone(), &mf.source_path)?;
            let b = as_ese(mg.source.clone(), &mg.source_path)?;
            let c = as_ese(mf.target.clone(), &mf.target_path)?;
            let cospan = Cospan {
                a: &a,
                f: &mf.map,
                b: &b,
                g: &mg.map,
                c: &c,
            };
            let apex = Apex {
                ese: &apex,
                left: &l.map,
                right: &r.map,
            };
            let tests: Vec<TestObject> = named_eses(&tests, caps)?
                .into_iter()
                .map(|(name, ese)| TestObject {
                    name,
                    ese,
                    cones: None,
                })
                .collect();
            report_out(&check_span_universal(
                span_kind(kind),
                &apex,
                &cospan,
                &tests,
                caps,
            )?)
        }
        OracleCheck::Extremal { file, nodes } => {
            let f = load::structure(&file, caps)?.to_family(caps)?;
            let mut checked = 0usize;
            let mut disagreements = Vec::new();
            for level in realisation_levels(&f).take(nodes + 1) {
                checked += level.len();
                if checked > caps.configs {
                    return Err(Error::SearchExplosion {
                        what: "realisations",
                        cap: caps.configs,
                    }
                    .into());
                }
                for r in &level {
                    let local = is_extremal(r, &f);
                    if local != is_extremal_by_definition(r, &f, caps)? {
                        disagreements.push(json!({"local": local, "realisation": realisation_to_doc(r, f.names(), None)}));
                    }
                }
            }
            let out = pretty(
                &json!({"nodes": nodes, "realisations": checked, "disagreements": disagreements}),
            );
            if disagreements.is_empty() {
                Ok(out)
            } else {
                Err(Failure::new(EXIT_INVALID, "extremality checks disagree").with_output(out))
            }
        }
    }
}

pub fn replay(ctx: &Ctx) -> Out {
    let log = replay_appendix_b(&ctx.caps)?;
    let out = pretty(&log);
    if log.passed() {
        Ok(out)
    } else {
        Err(Failure::new(EXIT_INVALID, log.conclusion.clone()).with_output(out))
    }
}

pub fn export_dot(path: &Path) -> Out {
    let caps = Caps::from_env()?;
    if load::kind_of(path)? == "realisation" {
        let r = load::realisation(path, &caps)?;
        return Ok(realisation_dot(&r.realisation, &r.events, &stem(path)));
    }
    let s = load::structure(path, &caps)?;
    Ok(structure_dot(s.as_ref(), &stem(path)))
}
