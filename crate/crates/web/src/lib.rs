//! wasm-bindgen bindings for the browser demo in `www/`.
//!
//! Every entry point takes the algebra document as JSON text and returns a
//! JSON string: either `{"ok": true, ...}` or `{"ok": false, "error": ...}`.

use pstar_gns::decompose::decompose_form;
use pstar_gns::document::{load_str, LoadError, Loaded};
use pstar_gns::gns::{check_representable, gns_construct, verify_gns};
use pstar_gns::linalg::{CMat, CVec, C64};
use pstar_gns::regularity::compression_core_check;
use pstar_gns::report::ConditionReport;
use pstar_gns::{fixtures, Element, PartialStarAlgebra};
use serde_json::{json, Map, Value};
use wasm_bindgen::prelude::*;

/// Canonical text of a shipped fixture (`full2`, `qm2`, `qm2-singular`).
#[wasm_bindgen]
pub fn fixture(name: &str) -> Option<String> {
    let file = format!("{name}.json");
    fixtures::shipped().into_iter().find(|(n, _)| *n == file).map(|(_, doc)| doc.to_json())
}

/// `φ = Ω_φ^B + s_φ` for the named form and pre-core.
#[wasm_bindgen]
pub fn decompose(doc: &str, form: &str, precore: &str) -> String {
    finish(run_decompose(doc, form, precore))
}

/// GNS representation of the named functional over the named subspace.
#[wasm_bindgen]
pub fn gns(doc: &str, functional: &str, subspace: &str) -> String {
    finish(run_gns(doc, functional, subspace))
}

/// Quasi-regularity of the ips representation, cross-checked against cores of compressions.
#[wasm_bindgen]
pub fn regularity(doc: &str, form: &str, precore: &str, samples: u32, seed: u32) -> String {
    finish(run_regularity(doc, form, precore, samples as usize, seed as u64))
}

fn finish(result: Result<Map<String, Value>, String>) -> String {
    let value = match result {
        Ok(mut fields) => {
            fields.insert("ok".into(), Value::Bool(true));
            Value::Object(fields)
        }
        Err(e) => json!({ "ok": false, "error": e }),
    };
    value.to_string()
}

fn load(doc: &str) -> Result<Loaded, String> {
    load_str(doc, None).map_err(|e| match e {
        LoadError::Validation { failed, .. } => format!("algebra failed validation: {}", failed.join(", ")),
        other => other.to_string(),
    })
}

fn run_decompose(doc: &str, form: &str, precore: &str) -> Result<Map<String, Value>, String> {
    let loaded = load(doc)?;
    let alg = &loaded.algebra;
    let f = loaded.objects.form(form).ok_or_else(|| format!("no form named {form:?}"))?;
    let b = loaded.objects.subspace(alg, precore).ok_or_else(|| format!("no subspace named {precore:?}"))?;
    let d = decompose_form(alg, f, &b).map_err(|e| e.to_string())?;
    let mut out = Map::new();
    out.insert("checks".into(), checks(&d.checks));
    out.insert("ips".into(), matrix(d.ips.matrix()));
    out.insert("singular".into(), matrix(d.singular.matrix()));
    out.insert("B_is_core".into(), json!(d.classification.b_is_core));
    out.insert("singular_kind".into(), serde_json::to_value(d.classification.kind).unwrap());
    out.insert("witness".into(), d.classification.witness.as_ref().map_or(Value::Null, |x| describe(alg, x)));
    Ok(out)
}

fn run_gns(doc: &str, functional: &str, subspace: &str) -> Result<Map<String, Value>, String> {
    let loaded = load(doc)?;
    let alg = &loaded.algebra;
    let w = loaded.objects.functional(functional).ok_or_else(|| format!("no functional named {functional:?}"))?;
    let b = loaded.objects.subspace(alg, subspace).ok_or_else(|| format!("no subspace named {subspace:?}"))?;
    let repr = check_representable(alg, w, &b).map_err(|e| e.to_string())?;
    let mut out = Map::new();
    out.insert("representable".into(), json!(repr.holds()));
    if !repr.holds() {
        out.insert("checks".into(), checks(&repr.report));
        return Ok(out);
    }
    let rep = gns_construct(alg, w, &b).map_err(|e| e.to_string())?;
    out.insert("checks".into(), checks(&verify_gns(alg, w, &rep)));
    out.insert("rank".into(), json!(rep.rank()));
    let pi: Map<String, Value> = (0..alg.dim()).map(|a| (alg.name(a).to_string(), matrix(&rep.pi[a]))).collect();
    out.insert("pi".into(), Value::Object(pi));
    out.insert("cyclic_vector".into(), rep.cyclic.as_ref().map_or(Value::Null, vector));
    Ok(out)
}

fn run_regularity(doc: &str, form: &str, precore: &str, samples: usize, seed: u64) -> Result<Map<String, Value>, String> {
    let loaded = load(doc)?;
    let alg = &loaded.algebra;
    let f = loaded.objects.form(form).ok_or_else(|| format!("no form named {form:?}"))?;
    let b = loaded.objects.subspace(alg, precore).ok_or_else(|| format!("no subspace named {precore:?}"))?;
    let c = compression_core_check(alg, f, &b, samples, seed).map_err(|e| e.to_string())?;
    let q = &c.quasi_regular;
    let mut out = Map::new();
    out.insert("verdict".into(), serde_json::to_value(q.verdict).unwrap());
    out.insert("matrix_span".into(), json!(q.matrix_span));
    out.insert("witness".into(), q.witness.as_ref().map_or(Value::Null, vector));
    out.insert("witness_element".into(), json!(q.witness_element.map(|a| alg.name(a))));
    out.insert("all_cores".into(), json!(c.all_cores));
    out.insert("agree".into(), json!(c.agree));
    Ok(out)
}

fn round(x: f64) -> f64 {
    let r = (x * 1e9).round() / 1e9;
    if r == 0.0 { 0.0 } else { r }
}

fn complex(z: &C64) -> Value {
    json!([round(z.re), round(z.im)])
}

fn vector(v: &CVec) -> Value {
    Value::Array(v.iter().map(complex).collect())
}

fn matrix(m: &CMat) -> Value {
    Value::Array((0..m.nrows()).map(|r| Value::Array((0..m.ncols()).map(|c| complex(&m[(r, c)])).collect())).collect())
}

fn describe(alg: &PartialStarAlgebra, x: &Element) -> Value {
    Value::String(alg.describe(x))
}

fn checks(report: &ConditionReport) -> Value {
    Value::Array(report.checks.iter().map(|c| json!({ "name": c.name, "passed": c.passed, "detail": c.detail })).collect())
}
