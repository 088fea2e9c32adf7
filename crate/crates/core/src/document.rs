//! JSON file format for an algebra together with named forms, functionals and
//! subspaces.
//!
//! Complex numbers are `[re, im]` pairs and indices are 1-based. The
//! multipliability table is either a 0/1 matrix or the shorthand
//! `{"universal_indices": [..]}`, meaning a pair is multipliable iff one of
//! its indices is listed.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::algebra::{validate_algebra, universal_multipliers, AlgebraParts, PartialStarAlgebra, Side, ValidationReport, DEFAULT_TOL};
use crate::forms::{LinearFunctional, SesquiForm};
use crate::linalg::{CMat, CVec, C64};
use crate::subspace::Subspace;

pub type Complex = [f64; 2];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InvolutionSpec {
    pub perm: Vec<usize>,
    /// Defaults to all ones when omitted.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub phases: Vec<Complex>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GammaSpec {
    Table(Vec<Vec<u8>>),
    Universal { universal_indices: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureEntry {
    pub i: usize,
    pub j: usize,
    pub coords: Vec<Complex>,
}

/// On-disk representation. Multipliable pairs without a structure entry
/// multiply to zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraDocument {
    pub dimension: usize,
    pub basis_names: Vec<String>,
    pub involution: InvolutionSpec,
    pub gamma: GammaSpec,
    #[serde(default)]
    pub structure: Vec<StructureEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit: Option<Vec<Complex>>,
    #[serde(default)]
    pub forms: BTreeMap<String, Vec<Vec<Complex>>>,
    #[serde(default)]
    pub functionals: BTreeMap<String, Vec<Complex>>,
    #[serde(default)]
    pub subspaces: BTreeMap<String, Vec<Vec<Complex>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct NamedObjects {
    pub forms: BTreeMap<String, SesquiForm>,
    pub functionals: BTreeMap<String, LinearFunctional>,
    pub subspaces: BTreeMap<String, Subspace>,
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("validation failed: {}", .failed.join(", "))]
    Validation { failed: Vec<String>, report: ValidationReport },
}

#[derive(Debug, Clone)]
pub struct Loaded {
    pub algebra: PartialStarAlgebra,
    pub objects: NamedObjects,
    pub report: ValidationReport,
}

fn to_c(z: &Complex) -> C64 {
    C64::new(z[0], z[1])
}

fn from_c(z: &C64) -> Complex {
    [z.re, z.im]
}

fn vector(label: &str, n: usize, v: &[Complex]) -> Result<CVec, LoadError> {
    if v.len() != n {
        return Err(LoadError::Parse(format!("{label}: expected {n} coordinates, found {}", v.len())));
    }
    Ok(CVec::from_iterator(n, v.iter().map(to_c)))
}

fn one_based(label: &str, i: usize, n: usize) -> Result<usize, LoadError> {
    if i == 0 || i > n {
        return Err(LoadError::Parse(format!("{label}: index {i} out of range 1..={n}")));
    }
    Ok(i - 1)
}

/// The `universal_indices` set reproducing `gamma`, if there is one.
fn universal_pattern(gamma: &[Vec<bool>]) -> Option<Vec<usize>> {
    let n = gamma.len();
    let u: Vec<usize> = (0..n).filter(|&j| (0..n).all(|i| gamma[i][j] && gamma[j][i])).collect();
    let matches = (0..n).all(|i| (0..n).all(|j| gamma[i][j] == (u.contains(&i) || u.contains(&j))));
    matches.then_some(u)
}

impl AlgebraDocument {
    pub fn from_parts(alg: &PartialStarAlgebra, objects: &NamedObjects) -> Self {
        let parts = alg.to_parts();
        let n = alg.dim();
        let gamma = match universal_pattern(&parts.gamma) {
            Some(u) => GammaSpec::Universal { universal_indices: u.iter().map(|i| i + 1).collect() },
            None => GammaSpec::Table(parts.gamma.iter().map(|row| row.iter().map(|&b| b as u8).collect()).collect()),
        };
        let structure = parts
            .structure
            .iter()
            .map(|(&(i, j), v)| StructureEntry { i: i + 1, j: j + 1, coords: v.iter().map(from_c).collect() })
            .collect();
        let matrix = |m: &CMat| (0..m.nrows()).map(|r| (0..m.ncols()).map(|c| from_c(&m[(r, c)])).collect()).collect();
        AlgebraDocument {
            dimension: n,
            basis_names: parts.basis_names.clone(),
            involution: InvolutionSpec {
                perm: parts.perm.iter().map(|p| p + 1).collect(),
                phases: if parts.phases.iter().all(|z| *z == C64::new(1.0, 0.0)) {
                    Vec::new()
                } else {
                    parts.phases.iter().map(from_c).collect()
                },
            },
            gamma,
            structure,
            unit: parts.unit.as_ref().map(|u| u.iter().map(from_c).collect()),
            forms: objects.forms.iter().map(|(k, f)| (k.clone(), matrix(f.matrix()))).collect(),
            functionals: objects.functionals.iter().map(|(k, w)| (k.clone(), w.weights().iter().map(from_c).collect())).collect(),
            subspaces: objects
                .subspaces
                .iter()
                .map(|(k, s)| (k.clone(), s.basis().column_iter().map(|c| c.iter().map(from_c).collect()).collect()))
                .collect(),
            tol: (alg.tol() != DEFAULT_TOL).then_some(alg.tol()),
        }
    }

    pub fn parse(text: &str) -> Result<Self, LoadError> {
        serde_json::from_str(text).map_err(|e| LoadError::Parse(e.to_string()))
    }

    /// Shape-checked algebra and named objects; no axiom validation.
    pub fn build(&self, tol_override: Option<f64>) -> Result<(PartialStarAlgebra, NamedObjects), LoadError> {
        let n = self.dimension;
        if n == 0 {
            return Err(LoadError::Parse("dimension must be positive".into()));
        }
        if self.basis_names.len() != n {
            return Err(LoadError::Parse(format!("{} basis names for dimension {n}", self.basis_names.len())));
        }
        if self.involution.perm.len() != n {
            return Err(LoadError::Parse(format!("involution.perm has {} entries for dimension {n}", self.involution.perm.len())));
        }
        let perm = self.involution.perm.iter().map(|&p| one_based("involution.perm", p, n)).collect::<Result<Vec<_>, _>>()?;
        let phases = if self.involution.phases.is_empty() {
            vec![C64::new(1.0, 0.0); n]
        } else {
            vector("involution.phases", n, &self.involution.phases)?.iter().copied().collect()
        };
        let gamma: Vec<Vec<bool>> = match &self.gamma {
            GammaSpec::Table(rows) => {
                if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                    return Err(LoadError::Parse(format!("gamma is not a {n}x{n} table")));
                }
                if rows.iter().flatten().any(|&v| v > 1) {
                    return Err(LoadError::Parse("gamma entries must be 0 or 1".into()));
                }
                rows.iter().map(|r| r.iter().map(|&v| v == 1).collect()).collect()
            }
            GammaSpec::Universal { universal_indices } => {
                let u = universal_indices.iter().map(|&i| one_based("gamma.universal_indices", i, n)).collect::<Result<Vec<_>, _>>()?;
                (0..n).map(|i| (0..n).map(|j| u.contains(&i) || u.contains(&j)).collect()).collect()
            }
        };
        let mut structure = BTreeMap::new();
        for e in &self.structure {
            let key = (one_based("structure.i", e.i, n)?, one_based("structure.j", e.j, n)?);
            let v = vector(&format!("structure ({}, {})", e.i, e.j), n, &e.coords)?;
            if structure.insert(key, v).is_some() {
                return Err(LoadError::Parse(format!("duplicate structure entry ({}, {})", e.i, e.j)));
            }
        }
        let unit = self.unit.as_ref().map(|u| vector("unit", n, u)).transpose()?;
        let tol = tol_override.or(self.tol).unwrap_or(DEFAULT_TOL);
        let alg = PartialStarAlgebra::from_parts(AlgebraParts {
            basis_names: self.basis_names.clone(),
            perm,
            phases,
            gamma,
            structure,
            unit,
            tol,
        })
        .map_err(|e| LoadError::Parse(e.to_string()))?;

        let mut objects = NamedObjects::default();
        for (name, rows) in &self.forms {
            if rows.len() != n {
                return Err(LoadError::Parse(format!("form {name}: expected {n} rows, found {}", rows.len())));
            }
            let mut m = CMat::zeros(n, n);
            for (r, row) in rows.iter().enumerate() {
                m.set_row(r, &vector(&format!("form {name} row {}", r + 1), n, row)?.transpose());
            }
            objects.forms.insert(name.clone(), SesquiForm::new(name.clone(), m));
        }
        for (name, w) in &self.functionals {
            objects.functionals.insert(name.clone(), LinearFunctional::new(name.clone(), vector(&format!("functional {name}"), n, w)?));
        }
        for (name, vs) in &self.subspaces {
            let vecs = vs.iter().map(|v| vector(&format!("subspace {name}"), n, v)).collect::<Result<Vec<_>, _>>()?;
            objects.subspaces.insert(name.clone(), Subspace::span(name.clone(), n, &vecs, tol));
        }
        Ok((alg, objects))
    }

    /// Builds and validates; any failed axiom check is a [`LoadError::Validation`].
    pub fn load(&self, tol_override: Option<f64>) -> Result<Loaded, LoadError> {
        let (algebra, objects) = self.build(tol_override)?;
        let report = validate_algebra(&algebra);
        if !report.all_passed() {
            let failed = report.failures().map(|c| c.name.clone()).collect();
            return Err(LoadError::Validation { failed, report });
        }
        Ok(Loaded { algebra, objects, report })
    }

    pub fn to_json(&self) -> String {
        to_canonical_json(&serde_json::to_value(self).expect("document serializes"))
    }
}

pub fn load_str(text: &str, tol_override: Option<f64>) -> Result<Loaded, LoadError> {
    AlgebraDocument::parse(text)?.load(tol_override)
}

pub fn load_path(path: &Path, tol_override: Option<f64>) -> Result<Loaded, LoadError> {
    let text = std::fs::read_to_string(path).map_err(|e| LoadError::Io { path: path.display().to_string(), message: e.to_string() })?;
    load_str(&text, tol_override)
}

impl NamedObjects {
    pub fn form(&self, name: &str) -> Option<&SesquiForm> {
        self.forms.get(name)
    }

    pub fn functional(&self, name: &str) -> Option<&LinearFunctional> {
        self.functionals.get(name)
    }

    /// Named subspace; `all`, `RA` and `LA` are available unless the document
    /// defines them itself.
    pub fn subspace(&self, alg: &PartialStarAlgebra, name: &str) -> Option<Subspace> {
        if let Some(s) = self.subspaces.get(name) {
            return Some(s.clone());
        }
        match name {
            "all" => Some(Subspace::whole("all", alg.dim())),
            "RA" => Some(universal_multipliers(alg, Side::Right)),
            "LA" => Some(universal_multipliers(alg, Side::Left)),
            _ => None,
        }
    }
}

fn is_scalar(v: &Value) -> bool {
    !matches!(v, Value::Array(_) | Value::Object(_))
}

fn is_flat(v: &Value) -> bool {
    match v {
        Value::Array(items) => items.iter().all(is_scalar),
        other => is_scalar(other),
    }
}

fn write_value(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent + 1);
    match v {
        Value::Array(items) if items.is_empty() || items.iter().all(is_flat) => {
            out.push_str(&serde_json::to_string(v).expect("value serializes"));
        }
        Value::Array(items) => {
            out.push_str("[\n");
            for (k, item) in items.iter().enumerate() {
                out.push_str(&pad);
                write_value(item, indent + 1, out);
                out.push_str(if k + 1 < items.len() { ",\n" } else { "\n" });
            }
            let _ = write!(out, "{}]", "  ".repeat(indent));
        }
        Value::Object(map) if map.values().all(|x| is_flat(x) || matches!(x, Value::Array(items) if items.iter().all(is_flat))) => {
            out.push_str(&serde_json::to_string(v).expect("value serializes"));
        }
        Value::Object(map) => {
            out.push_str("{\n");
            for (k, (key, item)) in map.iter().enumerate() {
                let _ = write!(out, "{pad}{}: ", serde_json::to_string(key).expect("key serializes"));
                write_value(item, indent + 1, out);
                out.push_str(if k + 1 < map.len() { ",\n" } else { "\n" });
            }
            let _ = write!(out, "{}}}", "  ".repeat(indent));
        }
        scalar => out.push_str(&serde_json::to_string(scalar).expect("value serializes")),
    }
}

/// Indented JSON with flat arrays (vectors, `[re, im]` pairs, matrix rows)
/// and small objects kept on one line. Key order is preserved, so output is stable.
pub fn to_canonical_json(v: &Value) -> String {
    let mut out = String::new();
    write_value(v, 0, &mut out);
    out.push('\n');
    out
}
