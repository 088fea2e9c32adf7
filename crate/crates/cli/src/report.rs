use std::fmt::Write as _;

use pstar_gns::document::to_canonical_json;
use pstar_gns::linalg::{CMat, CVec, C64};
use pstar_gns::{Check, ConditionReport, Element, PartialStarAlgebra, Subspace};
use serde::Serialize;
use serde_json::{json, Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    CheckFailed,
    ParseError,
    ValidationFailed,
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::CheckFailed => 1,
            Status::ParseError => 2,
            Status::ValidationFailed => 3,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub command: Vec<String>,
    pub tool: String,
    pub seed: u64,
    pub tolerance: f64,
    pub status: Status,
    pub checks: Vec<Check>,
    pub results: Map<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl RunReport {
    pub fn new(command: Vec<String>, seed: u64, tolerance: f64) -> Self {
        RunReport {
            command,
            tool: format!("pstar-gns {}", env!("CARGO_PKG_VERSION")),
            seed,
            tolerance,
            status: Status::Ok,
            checks: Vec::new(),
            results: Map::new(),
            error: None,
        }
    }

    pub fn fail(mut self, status: Status, error: impl Into<String>) -> Self {
        self.status = status;
        self.error = Some(error.into());
        self
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) {
        self.results.insert(key.to_string(), value.into());
    }

    pub fn add_checks(&mut self, report: &ConditionReport) {
        self.checks.extend(report.checks.iter().cloned());
    }

    /// Downgrades an `ok` status when any recorded check failed.
    pub fn settle(mut self) -> Self {
        if self.status == Status::Ok && self.checks.iter().any(|c| !c.passed) {
            self.status = Status::CheckFailed;
        }
        self
    }

    pub fn to_json(&self) -> String {
        to_canonical_json(&serde_json::to_value(self).expect("report serializes"))
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let name = self.command.iter().find(|a| !a.starts_with('-')).map_or("pstar-gns", String::as_str);
        let _ = writeln!(out, "{name}: {}", serde_json::to_value(self.status).unwrap().as_str().unwrap());
        if !self.checks.is_empty() {
            out.push_str("checks:\n");
            for c in &self.checks {
                let mark = if c.passed { "pass" } else { "FAIL" };
                let _ = write!(out, "  [{mark}] {}", c.name);
                if c.residual != 0.0 {
                    let _ = write!(out, " (residual {:.2e})", c.residual);
                }
                if !c.detail.is_empty() {
                    let _ = write!(out, ": {}", c.detail);
                }
                out.push('\n');
            }
        }
        for (key, value) in &self.results {
            write_text(&mut out, key, value, 0);
        }
        out
    }
}

fn complex_text(pair: &[Value]) -> Option<String> {
    let (re, im) = (pair.first()?.as_f64()?, pair.get(1)?.as_f64()?);
    let fmt = |x: f64| {
        let x = if x.abs() < 1e-12 { 0.0 } else { x };
        format!("{:.6}", x).trim_end_matches('0').trim_end_matches('.').to_string()
    };
    Some(if im.abs() < 1e-12 { fmt(re) } else { format!("{}{}{}i", fmt(re), if im < 0.0 { "-" } else { "+" }, fmt(im.abs())) })
}

/// A vector of `[re, im]` pairs, rendered `[a, b, ...]`.
fn vector_text(items: &[Value]) -> Option<String> {
    let parts: Option<Vec<String>> = items.iter().map(|v| v.as_array().and_then(|p| (p.len() == 2).then(|| complex_text(p)).flatten())).collect();
    parts.map(|p| format!("[{}]", p.join(", ")))
}

fn write_text(out: &mut String, key: &str, value: &Value, depth: usize) {
    let pad = "  ".repeat(depth);
    match value {
        Value::Object(map) => {
            let _ = writeln!(out, "{pad}{key}:");
            for (k, v) in map {
                write_text(out, k, v, depth + 1);
            }
        }
        Value::Array(items) if !items.is_empty() => {
            if let Some(v) = vector_text(items) {
                let _ = writeln!(out, "{pad}{key}: {v}");
            } else if let Some(rows) = items.iter().map(|r| r.as_array().and_then(|r| vector_text(r))).collect::<Option<Vec<_>>>() {
                let _ = writeln!(out, "{pad}{key}:");
                for r in rows {
                    let _ = writeln!(out, "{pad}  {r}");
                }
            } else if items.iter().all(|v| !v.is_array() && !v.is_object()) {
                let parts: Vec<String> = items.iter().map(scalar_text).collect();
                let _ = writeln!(out, "{pad}{key}: [{}]", parts.join(", "));
            } else {
                let _ = writeln!(out, "{pad}{key}:");
                for (k, v) in items.iter().enumerate() {
                    write_text(out, &format!("- {}", k + 1), v, depth + 1);
                }
            }
        }
        other => {
            let _ = writeln!(out, "{pad}{key}: {}", scalar_text(other));
        }
    }
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

pub fn complex(z: &C64) -> Value {
    json!([z.re, z.im])
}

pub fn vector(v: &CVec) -> Value {
    Value::Array(v.iter().map(complex).collect())
}

pub fn matrix(m: &CMat) -> Value {
    Value::Array((0..m.nrows()).map(|r| Value::Array((0..m.ncols()).map(|c| complex(&m[(r, c)])).collect())).collect())
}

pub fn element(alg: &PartialStarAlgebra, x: &Element) -> Value {
    json!({ "label": alg.describe(x), "coords": vector(x.coords()) })
}

/// Basis names spanning a coordinate subspace, or the basis vectors otherwise.
pub fn subspace(alg: &PartialStarAlgebra, s: &Subspace) -> Value {
    let support = s.support();
    if support.len() == s.dim() {
        Value::Array(support.iter().map(|&i| Value::String(alg.name(i).to_string())).collect())
    } else {
        Value::Array(s.basis_elements().iter().map(|x| Value::String(alg.describe(x))).collect())
    }
}
