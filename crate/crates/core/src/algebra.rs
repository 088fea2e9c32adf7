//! Finite-dimensional partial *-algebras given by structure constants.
//!
//! The algebra has a basis `e_1..e_n`. Multipliability is a boolean table
//! `M` on basis pairs, and a pair of elements `(x, y)` is multipliable iff
//! `M[i][j]` holds for every `i` in the support of `x` and `j` in the support
//! of `y`. Supports are exact (a coordinate is in the support iff it is not
//! exactly zero), so definedness never depends on a tolerance.
//!
//! The involution is a phased permutation `e_i* = θ_i e_σ(i)` extended
//! conjugate-linearly.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use crate::error::{Error, Result, Undefined};
use crate::linalg::{self, C64, CVec, ZERO};
use crate::report::{Check, ConditionReport, Tracker};
use crate::subspace::Subspace;

pub const DEFAULT_TOL: f64 = 1e-9;

/// Coordinate vector over the algebra basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Element {
    coords: CVec,
}

impl Element {
    pub fn zeros(n: usize) -> Self {
        Self { coords: CVec::zeros(n) }
    }

    pub fn basis(n: usize, i: usize) -> Self {
        let mut coords = CVec::zeros(n);
        coords[i] = linalg::ONE;
        Self { coords }
    }

    pub fn from_coords(coords: CVec) -> Self {
        Self { coords }
    }

    pub fn from_vec(coords: Vec<C64>) -> Self {
        Self { coords: CVec::from_vec(coords) }
    }

    pub fn coords(&self) -> &CVec {
        &self.coords
    }

    pub fn into_coords(self) -> CVec {
        self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.coords[i] != ZERO).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&z| z == ZERO)
    }

    pub fn norm(&self) -> f64 {
        self.coords.norm()
    }

    pub fn scale(&self, c: C64) -> Self {
        Self { coords: &self.coords * c }
    }

    /// Largest scaled coordinate deviation, see [`linalg::rel_dev`].
    pub fn deviation(&self, other: &Element) -> f64 {
        self.coords
            .iter()
            .zip(other.coords.iter())
            .fold(0.0f64, |acc, (&a, &b)| acc.max(linalg::rel_dev(a, b)))
    }
}

impl Add for Element {
    type Output = Element;
    fn add(self, rhs: Element) -> Element {
        Element { coords: self.coords + rhs.coords }
    }
}

impl Sub for Element {
    type Output = Element;
    fn sub(self, rhs: Element) -> Element {
        Element { coords: self.coords - rhs.coords }
    }
}

impl Neg for Element {
    type Output = Element;
    fn neg(self) -> Element {
        Element { coords: -self.coords }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Raw pieces of an algebra, used for construction and for deliberate
/// mutation in tests. Indices are 0-based.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraParts {
    pub basis_names: Vec<String>,
    pub perm: Vec<usize>,
    pub phases: Vec<C64>,
    pub gamma: Vec<Vec<bool>>,
    /// Products of multipliable basis pairs. A multipliable pair without an
    /// entry multiplies to zero.
    pub structure: BTreeMap<(usize, usize), CVec>,
    pub unit: Option<CVec>,
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartialStarAlgebra {
    names: Vec<String>,
    perm: Vec<usize>,
    phases: Vec<C64>,
    gamma: Vec<bool>,
    structure: BTreeMap<(usize, usize), CVec>,
    unit: Option<Element>,
    tol: f64,
}

impl PartialStarAlgebra {
    /// Checks shapes only; the algebraic axioms are the job of
    /// [`validate_algebra`].
    pub fn from_parts(parts: AlgebraParts) -> Result<Self> {
        let n = parts.basis_names.len();
        let bad = |msg: String| Err(Error::MalformedInput(msg));
        if n == 0 {
            return bad("algebra has no basis elements".into());
        }
        if parts.perm.len() != n || parts.phases.len() != n {
            return bad(format!(
                "involution has {} indices and {} phases for dimension {n}",
                parts.perm.len(),
                parts.phases.len()
            ));
        }
        if let Some(&p) = parts.perm.iter().find(|&&p| p >= n) {
            return bad(format!("involution index {} out of range 1..={n}", p + 1));
        }
        if parts.gamma.len() != n || parts.gamma.iter().any(|row| row.len() != n) {
            return bad(format!("multipliability table is not {n}x{n}"));
        }
        let mut gamma = vec![false; n * n];
        for (i, row) in parts.gamma.iter().enumerate() {
            for (j, &m) in row.iter().enumerate() {
                gamma[i * n + j] = m;
            }
        }
        for (&(i, j), v) in &parts.structure {
            if i >= n || j >= n {
                return bad(format!("structure entry ({}, {}) out of range", i + 1, j + 1));
            }
            if v.len() != n {
                return bad(format!("structure entry ({}, {}) has {} coordinates", i + 1, j + 1, v.len()));
            }
            if !gamma[i * n + j] {
                return bad(format!(
                    "structure entry for non-multipliable pair ({}, {})",
                    i + 1,
                    j + 1
                ));
            }
        }
        if let Some(u) = &parts.unit {
            if u.len() != n {
                return bad(format!("unit has {} coordinates", u.len()));
            }
        }
        if !(parts.tol >= 0.0) {
            return bad(format!("tolerance {} is not a nonnegative number", parts.tol));
        }
        let mut structure = parts.structure;
        structure.retain(|_, v| v.iter().any(|z| z.re != 0.0 || z.im != 0.0));
        Ok(Self {
            names: parts.basis_names,
            perm: parts.perm,
            phases: parts.phases,
            gamma,
            structure,
            unit: parts.unit.map(Element::from_coords),
            tol: parts.tol,
        })
    }

    pub fn to_parts(&self) -> AlgebraParts {
        let n = self.dim();
        AlgebraParts {
            basis_names: self.names.clone(),
            perm: self.perm.clone(),
            phases: self.phases.clone(),
            gamma: (0..n).map(|i| (0..n).map(|j| self.multipliable(i, j)).collect()).collect(),
            structure: self.structure.clone(),
            unit: self.unit.as_ref().map(|u| u.coords().clone()),
            tol: self.tol,
        }
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn basis_names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn unit(&self) -> Option<&Element> {
        self.unit.as_ref()
    }

    pub fn involution_perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn involution_phases(&self) -> &[C64] {
        &self.phases
    }

    pub fn multipliable(&self, i: usize, j: usize) -> bool {
        self.gamma[i * self.dim() + j]
    }

    /// `e_i · e_j`, or `None` when the pair is not multipliable.
    pub fn basis_product(&self, i: usize, j: usize) -> Option<CVec> {
        if !self.multipliable(i, j) {
            return None;
        }
        Some(self.structure.get(&(i, j)).cloned().unwrap_or_else(|| CVec::zeros(self.dim())))
    }

    pub fn structure(&self) -> &BTreeMap<(usize, usize), CVec> {
        &self.structure
    }

    pub fn basis(&self, i: usize) -> Element {
        Element::basis(self.dim(), i)
    }

    pub fn zero(&self) -> Element {
        Element::zeros(self.dim())
    }

    /// Human-readable linear combination, e.g. `E12 + (0-2i)E21`.
    pub fn describe(&self, x: &Element) -> String {
        let mut parts = Vec::new();
        for i in x.support() {
            let c = x.coords()[i];
            let name = &self.names[i];
            if (c - linalg::ONE).norm() < 1e-12 {
                parts.push(name.clone());
            } else if c.im.abs() < 1e-12 {
                parts.push(format!("{}·{name}", fmt_real(c.re)));
            } else {
                parts.push(format!("({}{:+}i)·{name}", fmt_real(c.re), c.im));
            }
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

fn fmt_real(x: f64) -> String {
    if x == x.trunc() && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        format!("{x}")
    }
}

impl fmt::Display for PartialStarAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "partial *-algebra of dimension {} [{}]", self.dim(), self.names.join(", "))
    }
}

/// `x* = Σ conj(x_i) θ_i e_σ(i)`.
pub fn involve(alg: &PartialStarAlgebra, x: &Element) -> Element {
    let mut out = CVec::zeros(alg.dim());
    for i in x.support() {
        out[alg.perm[i]] += x.coords()[i].conj() * alg.phases[i];
    }
    Element::from_coords(out)
}

/// Bilinear extension of the structure constants, defined iff every pair of
/// support indices is multipliable. The first offending pair (in index order)
/// is reported.
pub fn multiply(alg: &PartialStarAlgebra, x: &Element, y: &Element) -> std::result::Result<Element, Undefined> {
    let sx = x.support();
    let sy = y.support();
    for &i in &sx {
        for &j in &sy {
            if !alg.multipliable(i, j) {
                return Err(Undefined { left: i, right: j });
            }
        }
    }
    let mut out = CVec::zeros(alg.dim());
    for &i in &sx {
        for &j in &sy {
            if let Some(v) = alg.structure.get(&(i, j)) {
                out += v * (x.coords()[i] * y.coords()[j]);
            }
        }
    }
    Ok(Element::from_coords(out))
}

pub fn is_multipliable(alg: &PartialStarAlgebra, x: &Element, y: &Element) -> bool {
    let sy = y.support();
    x.support().iter().all(|&i| sy.iter().all(|&j| alg.multipliable(i, j)))
}

/// Basis indices `i` with `M[i][j]` for all `j` in `supp(y)` (left) or
/// `M[j][i]` (right).
fn multiplier_indices(alg: &PartialStarAlgebra, support: &[usize], side: Side) -> Vec<usize> {
    (0..alg.dim())
        .filter(|&i| {
            support.iter().all(|&j| match side {
                Side::Left => alg.multipliable(i, j),
                Side::Right => alg.multipliable(j, i),
            })
        })
        .collect()
}

/// `L(y)` for [`Side::Left`], `R(y)` for [`Side::Right`].
pub fn multiplier_space(alg: &PartialStarAlgebra, y: &Element, side: Side) -> Subspace {
    let label = match side {
        Side::Left => format!("L({})", alg.describe(y)),
        Side::Right => format!("R({})", alg.describe(y)),
    };
    Subspace::coordinate(label, alg.dim(), &multiplier_indices(alg, &y.support(), side))
}

/// Indices of the basis elements that are universal multipliers on `side`.
pub fn universal_indices(alg: &PartialStarAlgebra, side: Side) -> Vec<usize> {
    let all: Vec<usize> = (0..alg.dim()).collect();
    // x ∈ RA iff (a, x) ∈ Γ for every a, i.e. x ∈ R(a) for all basis a
    multiplier_indices(alg, &all, side)
}

/// `LA` or `RA`.
pub fn universal_multipliers(alg: &PartialStarAlgebra, side: Side) -> Subspace {
    let label = match side {
        Side::Left => "LA",
        Side::Right => "RA",
    };
    Subspace::coordinate(label, alg.dim(), &universal_indices(alg, side))
}

/// Checks `(RA)* = LA`: the involution maps the RA basis into LA and the two
/// spaces have equal dimension.
pub fn check_multiplier_duality(alg: &PartialStarAlgebra) -> Check {
    let ra = universal_indices(alg, Side::Right);
    let la = universal_multipliers(alg, Side::Left);
    for &k in &ra {
        let star = involve(alg, &alg.basis(k));
        if !la.contains(&star, alg.tol) {
            return Check::fail("multiplier_duality", format!("{}* ∉ LA", alg.name(k)));
        }
    }
    if ra.len() != la.dim() {
        return Check::fail("multiplier_duality", format!("dim RA = {} but dim LA = {}", ra.len(), la.dim()));
    }
    Check::pass("multiplier_duality")
}

/// A basis-level witness that semi-associativity fails.
#[derive(Debug, Clone, PartialEq)]
pub struct Counterexample {
    pub indices: Vec<usize>,
    pub reason: String,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.reason)
    }
}

/// Semi-associativity on basis elements: for `(a, b) ∈ Γ` and `y ∈ RA`,
/// `by ∈ R(a)` and `(ab)y = a(by)`; then the four-factor identity
/// `x*(ab)y = (x*(ab))y = (x*a)(by)` for `x, y ∈ RA`.
pub fn check_semi_associativity(alg: &PartialStarAlgebra) -> std::result::Result<f64, Counterexample> {
    let n = alg.dim();
    let tol = alg.tol;
    let ra = universal_indices(alg, Side::Right);
    let nm = |i: usize| alg.name(i).to_string();
    let mut worst = 0.0f64;
    let fail = |indices: Vec<usize>, reason: String| Err(Counterexample { indices, reason });

    for a in 0..n {
        for b in 0..n {
            if !alg.multipliable(a, b) {
                continue;
            }
            let ea = alg.basis(a);
            let eb = alg.basis(b);
            let ab = multiply(alg, &ea, &eb).expect("pair is multipliable");
            for &y in &ra {
                let ey = alg.basis(y);
                let by = match multiply(alg, &eb, &ey) {
                    Ok(v) => v,
                    Err(u) => return fail(vec![a, b, y], format!("{}·{} undefined although {} ∈ RA ({u})", nm(b), nm(y), nm(y))),
                };
                let a_by = match multiply(alg, &ea, &by) {
                    Ok(v) => v,
                    Err(_) => {
                        return fail(
                            vec![a, b, y],
                            format!("({}, {}, {}): {}·{} ∉ R({})", nm(a), nm(b), nm(y), nm(b), nm(y), nm(a)),
                        )
                    }
                };
                let ab_y = match multiply(alg, &ab, &ey) {
                    Ok(v) => v,
                    Err(u) => return fail(vec![a, b, y], format!("({}{})·{} undefined ({u})", nm(a), nm(b), nm(y))),
                };
                let dev = ab_y.deviation(&a_by);
                worst = worst.max(dev);
                if dev > tol {
                    return fail(
                        vec![a, b, y],
                        format!("({}, {}, {}): (ab)y ≠ a(by), deviation {dev:.3e}", nm(a), nm(b), nm(y)),
                    );
                }
            }
            for &x in &ra {
                let xs = involve(alg, &alg.basis(x));
                for &y in &ra {
                    let ey = alg.basis(y);
                    let quad = vec![x, a, b, y];
                    let label = || format!("(x, a, b, y) = ({}, {}, {}, {})", nm(x), nm(a), nm(b), nm(y));
                    let xs_ab = match multiply(alg, &xs, &ab) {
                        Ok(v) => v,
                        Err(u) => return fail(quad, format!("{}: x*(ab) undefined ({u})", label())),
                    };
                    let lhs = match multiply(alg, &xs_ab, &ey) {
                        Ok(v) => v,
                        Err(u) => return fail(quad, format!("{}: (x*(ab))y undefined ({u})", label())),
                    };
                    let ab_y = match multiply(alg, &ab, &ey) {
                        Ok(v) => v,
                        Err(u) => return fail(quad, format!("{}: (ab)y undefined ({u})", label())),
                    };
                    let mid = match multiply(alg, &xs, &ab_y) {
                        Ok(v) => v,
                        Err(u) => return fail(quad, format!("{}: x*((ab)y) undefined ({u})", label())),
                    };
                    let xs_a = match multiply(alg, &xs, &ea) {
                        Ok(v) => v,
                        Err(u) => return fail(quad, format!("{}: x*a undefined ({u})", label())),
                    };
                    let by = match multiply(alg, &eb, &ey) {
                        Ok(v) => v,
                        Err(u) => return fail(quad, format!("{}: by undefined ({u})", label())),
                    };
                    let rhs = match multiply(alg, &xs_a, &by) {
                        Ok(v) => v,
                        Err(_) => return fail(quad, format!("{}: x*a ∉ L(by)", label())),
                    };
                    let dev = lhs.deviation(&rhs).max(lhs.deviation(&mid));
                    worst = worst.max(dev);
                    if dev > tol {
                        return fail(quad, format!("{}: x*(ab)y ≠ (x*a)(by), deviation {dev:.3e}", label()));
                    }
                }
            }
        }
    }
    Ok(worst)
}

pub type ValidationReport = ConditionReport;

/// Runs every axiom check. The overall verdict is
/// [`ConditionReport::all_passed`].
pub fn validate_algebra(alg: &PartialStarAlgebra) -> ValidationReport {
    let n = alg.dim();
    let tol = alg.tol;
    let nm = |i: usize| alg.name(i).to_string();
    let mut report = ConditionReport::new();

    // involution: σ∘σ = id, |θ_i| = 1, θ_σ(i) = θ_i
    let mut inv = Tracker::new(tol);
    for i in 0..n {
        let s = alg.perm[i];
        if alg.perm[s] != i {
            inv.fail(|| format!("σ(σ({})) = {} ≠ {}", nm(i), nm(alg.perm[s]), nm(i)));
        }
        inv.observe((alg.phases[i].norm() - 1.0).abs(), || format!("phase of {} is not unimodular", nm(i)));
        inv.observe((alg.phases[s] - alg.phases[i]).norm(), || format!("θ_σ({}) ≠ θ_{}", nm(i), nm(i)));
    }
    report.push(inv.into_check("involution"));

    let mut sym = Tracker::new(tol);
    for i in 0..n {
        for j in 0..n {
            if alg.multipliable(i, j) != alg.multipliable(alg.perm[j], alg.perm[i]) {
                sym.fail(|| format!("({}, {}) ∈ Γ differs from ({}*, {}*) ∈ Γ", nm(i), nm(j), nm(j), nm(i)));
            }
        }
    }
    report.push(sym.into_check("gamma_symmetry"));

    let mut prod = Tracker::new(tol);
    for i in 0..n {
        for j in 0..n {
            if !alg.multipliable(i, j) {
                continue;
            }
            let xy = multiply(alg, &alg.basis(i), &alg.basis(j)).expect("multipliable");
            let lhs = involve(alg, &xy);
            let ys = involve(alg, &alg.basis(j));
            let xs = involve(alg, &alg.basis(i));
            match multiply(alg, &ys, &xs) {
                Ok(rhs) => prod.observe(lhs.deviation(&rhs), || format!("({}·{})* ≠ {}*·{}*", nm(i), nm(j), nm(j), nm(i))),
                Err(_) => prod.fail(|| format!("{}*·{}* undefined", nm(j), nm(i))),
            }
        }
    }
    report.push(prod.into_check("product_involution"));

    match alg.unit() {
        None => report.push(Check::pass("unit").with_detail("no unit declared")),
        Some(e) => {
            let mut unit = Tracker::new(tol);
            let ra = universal_indices(alg, Side::Right);
            let la = universal_indices(alg, Side::Left);
            for i in e.support() {
                if !ra.contains(&i) || !la.contains(&i) {
                    unit.fail(|| format!("unit support index {} is not a universal multiplier", nm(i)));
                }
            }
            if unit.first_failure.is_none() {
                for i in 0..n {
                    let a = alg.basis(i);
                    match (multiply(alg, e, &a), multiply(alg, &a, e)) {
                        (Ok(ea), Ok(ae)) => {
                            unit.observe(ea.deviation(&a), || format!("e·{} ≠ {}", nm(i), nm(i)));
                            unit.observe(ae.deviation(&a), || format!("{}·e ≠ {}", nm(i), nm(i)));
                        }
                        _ => unit.fail(|| format!("e·{} or {}·e undefined", nm(i), nm(i))),
                    }
                }
                unit.observe((involve(alg, e)).deviation(e), || "e* ≠ e".into());
            }
            report.push(unit.into_check("unit"));
        }
    }

    report.push(match check_semi_associativity(alg) {
        Ok(worst) => Check::pass("semi_associativity").with_residual(worst),
        Err(c) => Check::fail("semi_associativity", c.reason).with_residual(f64::INFINITY),
    });

    report.push(check_multiplier_duality(alg));
    report
}
