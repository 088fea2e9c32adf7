//! Positive sesquilinear forms on the algebra, their GNS quotients, and the
//! pre-core / core conditions.
//!
//! A form is stored as a Hermitian matrix `P` with `φ(x, y) = yᴴ P x`, linear
//! in the first argument. Ranks of Gram matrices are compared against
//! `tol * λ_max(P)`; since `λ(B)` lives in the quotient of `φ`, the same
//! cutoff decides both `dim λ(B)` and `rank P`.

use serde::Serialize;

use crate::algebra::{involve, multiply, universal_indices, Element, PartialStarAlgebra, Side};
use crate::error::{Error, Result};
use crate::linalg::{self, CMat, CVec, C64};
use crate::report::{Check, ConditionReport, Tracker};
use crate::subspace::Subspace;

#[derive(Debug, Clone, PartialEq)]
pub struct SesquiForm {
    label: String,
    matrix: CMat,
}

impl SesquiForm {
    pub fn new(label: impl Into<String>, matrix: CMat) -> Self {
        Self { label: label.into(), matrix }
    }

    pub fn zero(label: impl Into<String>, n: usize) -> Self {
        Self::new(label, CMat::zeros(n, n))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// `φ(x, y) = yᴴ P x`.
    pub fn eval(&self, x: &Element, y: &Element) -> C64 {
        y.coords().dotc(&(&self.matrix * x.coords()))
    }

    /// Largest entry modulus, at least 1; used to scale identity checks.
    pub(crate) fn scale(&self) -> f64 {
        linalg::max_abs(&self.matrix).max(1.0)
    }
}

/// `ω(x) = Σ w_i x_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearFunctional {
    label: String,
    weights: CVec,
}

impl LinearFunctional {
    pub fn new(label: impl Into<String>, weights: CVec) -> Self {
        Self { label: label.into(), weights }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn weights(&self) -> &CVec {
        &self.weights
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn eval(&self, x: &Element) -> C64 {
        self.weights.iter().zip(x.coords().iter()).map(|(w, c)| w * c).sum()
    }
}

/// The pre-Hilbert space `D/N_φ` over a domain subspace: `λ(x) = G c(x)`,
/// where `c(x)` are the coordinates of `x` in the domain's orthonormal basis
/// and `GᴴG` is the restricted form matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct QuotientSpace {
    pub factor: CMat,
    pub domain: Subspace,
}

impl QuotientSpace {
    pub fn rank(&self) -> usize {
        self.factor.nrows()
    }

    pub fn lambda(&self, x: &Element) -> CVec {
        &self.factor * (self.domain.basis().adjoint() * x.coords())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Positivity {
    pub positive: bool,
    pub min_eigenvalue: f64,
    /// Eigenvalues in `[-tol, 0)` were present and would be clamped.
    pub clamped: bool,
}

fn check_hermitian(m: &CMat, tol: f64) -> Result<()> {
    let dev = linalg::hermitian_deviation(m);
    if dev > tol * linalg::max_abs(m).max(1.0) {
        return Err(Error::NonHermitian(dev));
    }
    Ok(())
}

/// Positivity of a Hermitian matrix up to `-tol * max(1, ‖P‖)`.
pub fn matrix_positivity(m: &CMat, tol: f64) -> Result<Positivity> {
    check_hermitian(m, tol)?;
    let (values, _) = linalg::eigh(m);
    let min = values.first().copied().unwrap_or(0.0);
    let scale = values.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
    Ok(Positivity { positive: min >= -tol * scale, min_eigenvalue: min, clamped: min < 0.0 && min >= -tol * scale })
}

pub fn form_positivity(f: &SesquiForm, tol: f64) -> Result<Positivity> {
    matrix_positivity(&f.matrix, tol)
}

fn require_positive(f: &SesquiForm, tol: f64) -> Result<()> {
    let p = form_positivity(f, tol)?;
    if !p.positive {
        return Err(Error::NotPositive(p.min_eigenvalue));
    }
    Ok(())
}

/// `N_φ = {x : φ(x, x) = 0}`, computed as the eigenspace of `P` below the
/// relative cutoff.
pub fn form_null_space(f: &SesquiForm, tol: f64) -> Result<Subspace> {
    require_positive(f, tol)?;
    let (clamped, _) = linalg::clamp_psd(&f.matrix);
    let (values, vectors) = linalg::eigh(&clamped);
    let scale = values.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let cut = linalg::rank_cutoff(scale, tol);
    let kernel: Vec<CVec> = values
        .iter()
        .enumerate()
        .filter(|(_, &v)| v <= cut)
        .map(|(i, _)| vectors.column(i).into_owned())
        .collect();
    Ok(Subspace::span(format!("N({})", f.label), f.dim(), &kernel, tol))
}

/// GNS quotient of `f` restricted to `domain`.
pub fn gns_quotient(f: &SesquiForm, domain: &Subspace, tol: f64) -> Result<QuotientSpace> {
    check_hermitian(&f.matrix, tol)?;
    let x = domain.basis();
    let restricted = x.adjoint() * &f.matrix * x;
    let pos = matrix_positivity(&restricted, tol)?;
    if !pos.positive {
        return Err(Error::NotPositive(pos.min_eigenvalue));
    }
    let (_, factor) = linalg::psd_rank_factor(&restricted, tol);
    Ok(QuotientSpace { factor, domain: domain.clone() })
}

/// `B ≠ {0}` and `B ≠ Ce`.
pub(crate) fn nontrivial_check(alg: &PartialStarAlgebra, b: &Subspace, name: &str) -> Check {
    if b.is_zero() {
        return Check::fail(name, "B = {0}");
    }
    if let Some(e) = alg.unit() {
        if b.dim() == 1 && b.contains(e, alg.tol()) {
            return Check::fail(name, "B = Ce");
        }
    }
    Check::pass(name)
}

pub(crate) fn subspace_in_ra(alg: &PartialStarAlgebra, b: &Subspace) -> std::result::Result<(), usize> {
    let ra = universal_indices(alg, Side::Right);
    match b.support().into_iter().find(|i| !ra.contains(i)) {
        Some(i) => Err(i),
        None => Ok(()),
    }
}

/// Pre-core conditions (i), (ii), (iv), (v) for `B` plus nontriviality.
pub fn check_precore(alg: &PartialStarAlgebra, f: &SesquiForm, b: &Subspace) -> Result<ConditionReport> {
    let tol = alg.tol();
    if f.dim() != alg.dim() {
        return Err(Error::DimensionMismatch { expected: alg.dim(), found: f.dim() });
    }
    require_positive(f, tol)?;
    let mut report = ConditionReport::new();
    report.push(nontrivial_check(alg, b, "nontrivial"));

    let in_ra = subspace_in_ra(alg, b);
    report.push(match in_ra {
        Ok(()) => Check::pass("in_RA"),
        Err(i) => Check::fail("in_RA", format!("B has a component along {} ∉ RA", alg.name(i))),
    });
    report.push(Check::pass("domain").with_detail("D(φ) = A, so aB ⊆ D(φ) holds trivially"));
    if in_ra.is_err() {
        report.push(Check::fail("invariance", "not evaluated: B ⊄ RA"));
        report.push(Check::fail("product_invariance", "not evaluated: B ⊄ RA"));
        return Ok(report);
    }

    let scale = f.scale();
    let xs = b.basis_elements();
    let nm = |i: usize| alg.name(i).to_string();

    // (iv) φ(ax, y) = φ(x, a*y)
    let mut iv = Tracker::new(tol);
    for a in 0..alg.dim() {
        let ea = alg.basis(a);
        let a_star = involve(alg, &ea);
        for (i, x) in xs.iter().enumerate() {
            let ax = multiply(alg, &ea, x)?;
            for (j, y) in xs.iter().enumerate() {
                let ay = multiply(alg, &a_star, y)?;
                let lhs = f.eval(&ax, y);
                let rhs = f.eval(x, &ay);
                iv.observe((lhs - rhs).norm() / scale, || {
                    format!("a = {}, x = b{}, y = b{}: φ(ax, y) = {lhs:.6} ≠ φ(x, a*y) = {rhs:.6}", nm(a), i + 1, j + 1)
                });
            }
        }
    }
    report.push(iv.into_check("invariance"));

    // (v) φ(a*x, by) = φ(x, (ab)y) for (a, b) ∈ Γ
    let mut v = Tracker::new(tol);
    for a in 0..alg.dim() {
        for bb in 0..alg.dim() {
            if !alg.multipliable(a, bb) {
                continue;
            }
            let ea = alg.basis(a);
            let eb = alg.basis(bb);
            let a_star = involve(alg, &ea);
            let ab = multiply(alg, &ea, &eb)?;
            for (i, x) in xs.iter().enumerate() {
                let asx = multiply(alg, &a_star, x)?;
                for (j, y) in xs.iter().enumerate() {
                    let by = multiply(alg, &eb, y)?;
                    let ab_y = multiply(alg, &ab, y)?;
                    let lhs = f.eval(&asx, &by);
                    let rhs = f.eval(x, &ab_y);
                    v.observe((lhs - rhs).norm() / scale, || {
                        format!(
                            "(a, b) = ({}, {}), x = b{}, y = b{}: φ(a*x, by) = {lhs:.6} ≠ φ(x, (ab)y) = {rhs:.6}",
                            nm(a),
                            nm(bb),
                            i + 1,
                            j + 1
                        )
                    });
                }
            }
        }
    }
    report.push(v.into_check("product_invariance"));
    Ok(report)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoreReport {
    pub is_core: bool,
    /// `dim λ_φ(B)`.
    pub rank_b: usize,
    /// `rank P = dim H_φ`.
    pub rank_total: usize,
    /// Some `a₀` with `λ(a₀) ⊥ λ(B)` and `φ(a₀, a₀) > 0`, when `B` is not a core.
    pub orth_witness: Option<Element>,
    /// Verdict of the orthocomplement route: `λ(B)^⊥ = {0}` in `H_φ`.
    pub orthocomplement_trivial: bool,
    /// Largest component of a `λ(e_m)` orthogonal to `λ(B)`.
    pub orth_defect: f64,
}

/// Density of `λ_φ(B)` in `H_φ`, decided twice: by comparing `dim λ(B)` with
/// `rank P`, and by projecting every `λ(e_m)` onto `λ(B)^⊥`.
pub fn check_core(alg: &PartialStarAlgebra, f: &SesquiForm, b: &Subspace) -> Result<CoreReport> {
    let tol = alg.tol();
    require_positive(f, tol)?;
    let (rank_total, g) = linalg::psd_rank_factor(&f.matrix, tol);
    let scale_g = linalg::spectral_norm(&g);
    // singular values of GX are square roots of eigenvalues of XᴴPX
    let cut = tol.sqrt() * scale_g;
    let gx = &g * b.basis();
    let rank_b = linalg::singular_values(&gx).into_iter().filter(|&s| s > cut).count();

    let range = linalg::range_basis(&gx, scale_g, tol.sqrt());
    let mut best: Option<(usize, CVec)> = None;
    let mut defect = 0.0f64;
    for m in 0..alg.dim() {
        let col = g.column(m).into_owned();
        let eta = &col - &range * (range.adjoint() * &col);
        let norm = eta.norm();
        if norm > defect * (1.0 + 1e-9) {
            defect = norm;
            best = Some((m, eta));
        }
    }
    let threshold = cut / (2.0 * (alg.dim() as f64).sqrt());
    let orthocomplement_trivial = rank_total == 0 || defect <= threshold;
    let orth_witness = match (orthocomplement_trivial, best) {
        (false, Some((_, eta))) => {
            let pinv = linalg::pinv(&g, tol);
            Some(chop(Element::from_coords(pinv * eta), tol))
        }
        _ => None,
    };
    Ok(CoreReport {
        is_core: rank_b == rank_total,
        rank_b,
        rank_total,
        orth_witness,
        orthocomplement_trivial,
        orth_defect: defect,
    })
}

/// Normalizes `x` to unit norm and zeroes coordinates below `tol` times the
/// largest one, for readable witnesses.
pub(crate) fn chop(x: Element, tol: f64) -> Element {
    let norm = x.norm();
    if norm == 0.0 {
        return x;
    }
    let big = x.coords().iter().fold(0.0f64, |acc, z| acc.max(z.norm()));
    let mut coords = x.coords() / C64::new(norm, 0.0);
    let cut = tol.max(1e-12) * big / norm;
    for z in coords.iter_mut() {
        if z.norm() <= cut {
            *z = linalg::ZERO;
        }
    }
    let renorm = coords.norm();
    Element::from_coords(coords / C64::new(renorm, 0.0))
}

/// Right-multiplication matrix: column `m` holds `e_m · x`.
pub(crate) fn right_multiplication(alg: &PartialStarAlgebra, x: &Element) -> Result<CMat> {
    let n = alg.dim();
    let mut r = CMat::zeros(n, n);
    for m in 0..n {
        let prod = multiply(alg, &alg.basis(m), x)?;
        r.set_column(m, prod.coords());
    }
    Ok(r)
}

/// `φ_x(a, b) = φ(ax, bx)` for a universal right multiplier `x`.
pub fn compress_form(alg: &PartialStarAlgebra, f: &SesquiForm, x: &Element) -> Result<SesquiForm> {
    let ra = universal_indices(alg, Side::Right);
    if x.support().iter().any(|i| !ra.contains(i)) {
        return Err(Error::NotUniversalMultiplier);
    }
    let r = right_multiplication(alg, x)?;
    let p = r.adjoint() * &f.matrix * &r;
    Ok(SesquiForm::new(format!("{}_[{}]", f.label, alg.describe(x)), p))
}
