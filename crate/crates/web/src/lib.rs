//! Browser bindings: JSON text in, JSON text out.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use causal_unfold::constructions::check_ax;
use causal_unfold::dot::{realisation_dot, structure_dot};
use causal_unfold::io::{parse_structure, realisation_to_doc, structure_to_doc};
use causal_unfold::realisations::extremal_order;
use causal_unfold::structures::{validate_structure, Ese, Structure, StructureRef};
use causal_unfold::unfolding::{causal_unfolding, check_structural_axioms, er, UnfoldResult};
use causal_unfold::Caps;

fn load(text: &str) -> Result<Structure, String> {
    let s = parse_structure(text).map_err(|e| e.to_string())?;
    let caps = Caps::default();
    if s.names().len() > caps.events {
        return Err(format!("more than {} events", caps.events));
    }
    match validate_structure(&s).first() {
        Some(v) => Err(v.to_string()),
        None => Ok(s),
    }
}

fn unfolding(s: &Structure, caps: &Caps) -> Result<UnfoldResult, String> {
    match s {
        Structure::General(g) => causal_unfolding(g, caps),
        other => other.to_family(caps).and_then(|f| er(&f, caps)),
    }
    .map_err(|e| e.to_string())
}

/// The causal unfolding as a structure document, with its DOT.
pub fn unfold_json(text: &str) -> Result<String, String> {
    let caps = Caps::default();
    let u = unfolding(&load(text)?, &caps)?;
    let s = StructureRef::Ese(&u.ese);
    Ok(json!({"ese": structure_to_doc(s), "dot": structure_dot(s, "unfolding")}).to_string())
}

/// Prime extremal realisations with their DOT, and facts about the extremal order.
pub fn extremals_json(text: &str) -> Result<String, String> {
    let caps = Caps::default();
    let f = load(text)?.to_family(&caps).map_err(|e| e.to_string())?;
    let u = er(&f, &caps).map_err(|e| e.to_string())?;
    let order = extremal_order(&f, &caps).map_err(|e| e.to_string())?;
    let mut primes = order.complete_primes();
    primes.sort_unstable();
    let primes_json: Vec<Value> = (0..u.ese.len())
        .map(|e| {
            json!({
                "event": u.ese.name(e),
                "realisation": realisation_to_doc(&u.primes[e], f.names(), None),
                "dot": realisation_dot(&u.primes[e], f.names(), u.ese.name(e)),
            })
        })
        .collect();
    Ok(json!({
        "primes": primes_json,
        "classes": order.len(),
        "prime_algebraic": order.is_prime_algebraic(),
        "primes_are_top_classes": primes == order.with_top(),
    })
    .to_string())
}

/// Ax0-Ax2 and the structural axioms, unfolding anything that is not an ese.
pub fn check_axioms_json(text: &str) -> Result<String, String> {
    let caps = Caps::default();
    let s = load(text)?;
    let kind = s.kind();
    let (p, unfolded) = match s {
        Structure::Ese(p) => (p, false),
        Structure::Prime(p) => (Ese::with_identity(p), false),
        other => (unfolding(&other, &caps)?.ese, true),
    };
    let ax = check_ax(&p);
    let st = check_structural_axioms(&p, &caps).map_err(|e| e.to_string())?;
    Ok(json!({
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
    })
    .to_string())
}

#[wasm_bindgen]
pub fn unfold(text: &str) -> Result<String, JsValue> {
    unfold_json(text).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn extremals(text: &str) -> Result<String, JsValue> {
    extremals_json(text).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = checkAxioms)]
pub fn check_axioms(text: &str) -> Result<String, JsValue> {
    check_axioms_json(text).map_err(|e| JsValue::from_str(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    const DOCS: &str = include_str!("../../../fixtures/docs.ges.json");
    const NONINJ: &str = include_str!("../../../fixtures/noninj.ges.json");

    fn parse(s: String) -> Value {
        serde_json::from_str(&s).unwrap()
    }

    #[test]
    fn unfolds_docs() {
        let v = parse(unfold_json(DOCS).unwrap());
        assert_eq!(v["ese"]["events"], json!(["a", "b", "d_a", "d_b"]));
        assert!(v["dot"].as_str().unwrap().starts_with("digraph"));
    }

    #[test]
    fn extremals_of_docs() {
        let v = parse(extremals_json(DOCS).unwrap());
        assert_eq!(v["primes"].as_array().unwrap().len(), 4);
        assert_eq!(v["prime_algebraic"], true);
    }

    #[test]
    fn axioms_of_noninj() {
        let v = parse(check_axioms_json(NONINJ).unwrap());
        assert_eq!(v["unfolded"], true);
        assert_eq!(v["ax1"], false);
    }

    #[test]
    fn errors_are_messages() {
        assert!(unfold_json("{").is_err());
        let bad = r#"{"kind":"family","events":["a"],"configs":[["a"]]}"#;
        assert!(unfold_json(bad).unwrap_err().contains("contains-empty"));
    }
}
