//! Splitting a positive form with pre-core `B ∋ e` into an ips part and a
//! `B`-singular part.
//!
//! `ω_φ(a) = φ(a, e)` is representable on `B`; its GNS representation gives
//! `Ω(a, b) = ⟨π(a)ξ, π(b)ξ⟩`, and `s = φ - Ω` vanishes against `B`.

use serde::Serialize;

use crate::algebra::{involve, is_multipliable, multiply, Element, PartialStarAlgebra};
use crate::error::{Error, Result};
use crate::forms::{chop, check_core, check_precore, form_positivity, LinearFunctional, SesquiForm};
use crate::gns::{check_representable, gns_construct, GnsRep};
use crate::linalg::{self, CMat, CVec};
use crate::report::{Check, ConditionReport, Tracker};
use crate::subspace::Subspace;

/// `ω_φ(a) = φ(a, e)`, i.e. `w = eᴴ P`.
pub fn functional_from_form(alg: &PartialStarAlgebra, f: &SesquiForm) -> Result<LinearFunctional> {
    let e = alg.unit().ok_or(Error::NoUnit)?;
    let w = (e.coords().adjoint() * f.matrix()).transpose();
    Ok(LinearFunctional::new(format!("ω[{}]", f.label()), w))
}

fn require_precore_with_unit(alg: &PartialStarAlgebra, f: &SesquiForm, b: &Subspace) -> Result<()> {
    let e = alg.unit().ok_or(Error::NoUnit)?;
    let report = check_precore(alg, f, b)?;
    if !report.all_passed() {
        let msgs: Vec<String> = report.failures().map(|c| format!("{}: {}", c.name, c.detail)).collect();
        return Err(Error::PrecoreViolation(msgs.join("; ")));
    }
    if !b.contains(e, alg.tol()) {
        return Err(Error::PrecoreViolation("unit e ∉ B".into()));
    }
    Ok(())
}

/// Gram matrix of the vectors `π(e_m)ξ`: entry `[b][a] = (π(e_b)ξ)ᴴ (π(e_a)ξ)`.
pub(crate) fn orbit_gram(vectors: &CMat) -> CMat {
    vectors.adjoint() * vectors
}

/// GNS representation of `ω_φ` on `B` together with the ips part `Ω_φ^B`.
pub fn ips_part_with_rep(alg: &PartialStarAlgebra, f: &SesquiForm, b: &Subspace) -> Result<(SesquiForm, GnsRep)> {
    require_precore_with_unit(alg, f, b)?;
    let w = functional_from_form(alg, f)?;
    let repr = check_representable(alg, &w, b)?;
    if !repr.holds() {
        let msgs: Vec<String> = repr.report.failures().map(|c| format!("{}: {}", c.name, c.detail)).collect();
        return Err(Error::NotRepresentable(msgs.join("; ")));
    }
    let rep = gns_construct(alg, &w, b)?;
    let xi = rep.cyclic.clone().ok_or_else(|| Error::Internal("e ∈ B but no cyclic vector".into()))?;
    let r = rep.rank();
    let mut orbit = CMat::zeros(r, alg.dim());
    for m in 0..alg.dim() {
        orbit.set_column(m, &(&rep.pi[m] * &xi));
    }
    let omega = SesquiForm::new(format!("Ω[{}]", f.label()), orbit_gram(&orbit));
    Ok((omega, rep))
}

/// `Ω_φ^B(a, b) = ⟨π(a)ξ_ω, π(b)ξ_ω⟩` for `ω = ω_φ`.
pub fn ips_part(alg: &PartialStarAlgebra, f: &SesquiForm, b: &Subspace) -> Result<SesquiForm> {
    ips_part_with_rep(alg, f, b).map(|(omega, _)| omega)
}

/// Pre-core and core checks of `Ω` on `B`; an ips form passes all of them.
pub fn verify_ips(alg: &PartialStarAlgebra, omega: &SesquiForm, b: &Subspace) -> Result<ConditionReport> {
    let mut report = check_precore(alg, omega, b)?;
    let core = check_core(alg, omega, b)?;
    report.push(if core.is_core {
        Check::pass("core").with_detail(format!("dim λ(B) = {} = rank", core.rank_b))
    } else {
        Check::fail("core", format!("dim λ(B) = {} < rank = {}", core.rank_b, core.rank_total))
    });
    Ok(report)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LemmaOutcome {
    pub passed: bool,
    pub quadruples_checked: usize,
    pub max_residual: f64,
    pub counterexample: Option<LemmaCounterexample>,
}

/// Basis indices of the first failing quadruple; `b` is `None` for the
/// special case `Ω(ax, y) = φ(ax, y)`. `x` and `y` index the basis of `B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LemmaCounterexample {
    pub a: usize,
    pub b: Option<usize>,
    pub x: usize,
    pub y: usize,
}

/// `Ω(ax, by) = φ(ax, by)` for basis `a, b` with `a* ∈ L(b)` and basis
/// `x, y` of `B`, plus the special case `Ω(ax, y) = φ(ax, y)`.
pub fn lemma_consistency(alg: &PartialStarAlgebra, f: &SesquiForm, omega: &SesquiForm, b: &Subspace) -> Result<LemmaOutcome> {
    require_precore_with_unit(alg, f, b)?;
    let tol = alg.tol();
    let scale = linalg::max_abs(f.matrix()).max(1.0);
    let xs = b.basis_elements();
    let mut worst = 0.0f64;
    let mut count = 0;
    let mut counterexample = None;
    for a in 0..alg.dim() {
        let ea = alg.basis(a);
        for (i, x) in xs.iter().enumerate() {
            let ax = multiply(alg, &ea, x)?;
            for (j, y) in xs.iter().enumerate() {
                let dev = (omega.eval(&ax, y) - f.eval(&ax, y)).norm() / scale;
                count += 1;
                worst = worst.max(dev);
                if dev > tol && counterexample.is_none() {
                    counterexample = Some(LemmaCounterexample { a, b: None, x: i, y: j });
                }
            }
        }
        let a_star = involve(alg, &ea);
        for bb in 0..alg.dim() {
            let eb = alg.basis(bb);
            if !is_multipliable(alg, &a_star, &eb) {
                continue;
            }
            for (i, x) in xs.iter().enumerate() {
                let ax = multiply(alg, &ea, x)?;
                for (j, y) in xs.iter().enumerate() {
                    let by = multiply(alg, &eb, y)?;
                    let dev = (omega.eval(&ax, &by) - f.eval(&ax, &by)).norm() / scale;
                    count += 1;
                    worst = worst.max(dev);
                    if dev > tol && counterexample.is_none() {
                        counterexample = Some(LemmaCounterexample { a, b: Some(bb), x: i, y: j });
                    }
                }
            }
        }
    }
    Ok(LemmaOutcome { passed: counterexample.is_none(), quadruples_checked: count, max_residual: worst, counterexample })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SingularKind {
    /// `ψ = 0`: neither singular nor core-defective.
    Zero,
    /// `ψ ≠ 0` and `ψ(a, x) = 0` for all `a ∈ A`, `x ∈ B`.
    Singular,
    /// `ψ` pairs nontrivially with `B`.
    Neither,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SingularityVerdict {
    pub kind: SingularKind,
    /// Dominant eigenvector of `ψ`, maximizing `ψ(a₀, a₀)` over unit vectors.
    pub witness: Option<Element>,
    pub witness_value: f64,
    /// `max ‖ψ x‖` over the basis of `B`.
    pub annihilation_residual: f64,
}

impl SingularityVerdict {
    pub fn is_singular(&self) -> bool {
        self.kind == SingularKind::Singular
    }
}

/// Unit vector in the top eigenspace of `m`. Among eigenspace projections of
/// the coordinate vectors, the first one of maximal length is used, so ties
/// resolve toward coordinate directions.
fn dominant_direction(m: &CMat, tol: f64) -> (Element, f64) {
    let (values, vectors) = linalg::eigh(m);
    let n = values.len();
    let top = values[n - 1];
    let cut = top - tol.sqrt() * top.abs().max(1.0);
    let keep: Vec<usize> = (0..n).filter(|&i| values[i] >= cut).collect();
    let basis = linalg::columns_to_matrix(n, &keep.iter().map(|&i| vectors.column(i).into_owned()).collect::<Vec<_>>());
    let mut best: Option<CVec> = None;
    let mut best_norm = 0.0f64;
    for c in 0..n {
        let proj = basis.row(c).adjoint();
        let v = &basis * proj;
        let norm = v.norm();
        if norm > best_norm * (1.0 + 1e-9) {
            best_norm = norm;
            best = Some(v);
        }
    }
    let v = best.unwrap_or_else(|| vectors.column(n - 1).into_owned());
    (chop(Element::from_coords(v), tol), top)
}

/// Three-way classification of a positive form against a pre-core `B`.
pub fn is_singular(alg: &PartialStarAlgebra, psi: &SesquiForm, b: &Subspace) -> Result<SingularityVerdict> {
    let tol = alg.tol();
    let report = check_precore(alg, psi, b)?;
    if !report.all_passed() {
        let msgs: Vec<String> = report.failures().map(|c| format!("{}: {}", c.name, c.detail)).collect();
        return Err(Error::PrecoreViolation(msgs.join("; ")));
    }
    Ok(classify_singular(psi, b, tol))
}

fn classify_singular(psi: &SesquiForm, b: &Subspace, tol: f64) -> SingularityVerdict {
    let norm = linalg::spectral_norm(psi.matrix());
    let annihilation_residual = linalg::max_abs(&(psi.matrix() * b.basis()));
    if norm <= tol {
        return SingularityVerdict { kind: SingularKind::Zero, witness: None, witness_value: 0.0, annihilation_residual };
    }
    let (witness, value) = dominant_direction(psi.matrix(), tol);
    let kind = if annihilation_residual <= tol * norm.max(1.0) { SingularKind::Singular } else { SingularKind::Neither };
    SingularityVerdict { kind, witness: Some(witness), witness_value: value, annihilation_residual }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub b_is_core: bool,
    pub singular_nonzero: bool,
    pub kind: SingularKind,
    pub witness: Option<Element>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub omega_phi: LinearFunctional,
    pub ips: SesquiForm,
    pub singular: SesquiForm,
    pub b: Subspace,
    pub classification: Classification,
    pub rep: GnsRep,
    pub checks: ConditionReport,
}

impl Decomposition {
    /// The cross-validation `B is a core ⇔ s = 0` together with every other
    /// asserted invariant.
    pub fn consistent(&self) -> bool {
        self.checks.all_passed()
    }
}

/// `φ = Ω_φ^B + s_φ`.
pub fn decompose_form(alg: &PartialStarAlgebra, f: &SesquiForm, b: &Subspace) -> Result<Decomposition> {
    let tol = alg.tol();
    let (ips, rep) = ips_part_with_rep(alg, f, b)?;
    let singular = SesquiForm::new(format!("s[{}]", f.label()), f.matrix() - ips.matrix());
    let scale = linalg::spectral_norm(f.matrix()).max(1.0);
    let mut checks = ConditionReport::new();

    let pos = form_positivity(&singular, tol)?;
    if !pos.positive {
        return Err(Error::SingularPartNotPositive(pos.min_eigenvalue));
    }
    checks.push(Check::pass("singular_positive").with_residual((-pos.min_eigenvalue).max(0.0) / scale));

    let ips_pos = form_positivity(&ips, tol)?;
    checks.push(if ips_pos.positive {
        Check::pass("ips_positive").with_residual((-ips_pos.min_eigenvalue).max(0.0) / scale)
    } else {
        Check::fail("ips_positive", format!("min eigenvalue {:.3e}", ips_pos.min_eigenvalue))
    });

    let recon = linalg::max_abs(&(ips.matrix() + singular.matrix() - f.matrix())) / scale;
    checks.push(if recon <= tol { Check::pass("reconstruction") } else { Check::fail("reconstruction", format!("{recon:.3e}")) }.with_residual(recon));

    let annihilation = linalg::max_abs(&(singular.matrix() * b.basis())) / scale;
    checks.push(
        if annihilation <= tol { Check::pass("singular_annihilates_B") } else { Check::fail("singular_annihilates_B", format!("max |s(a, x)| = {annihilation:.3e}")) }
            .with_residual(annihilation),
    );

    let mut agree = Tracker::new(tol);
    let e = alg.unit().expect("checked by ips_part");
    for a in 0..alg.dim() {
        let ea = alg.basis(a);
        agree.observe((ips.eval(&ea, e) - f.eval(&ea, e)).norm() / scale, || format!("Ω({}, e) ≠ φ({}, e)", alg.name(a), alg.name(a)));
    }
    checks.push(agree.into_check("functional_agreement"));

    let core = check_core(alg, f, b)?;
    let verdict = classify_singular(&singular, b, tol * scale);
    let singular_nonzero = verdict.kind != SingularKind::Zero;
    checks.push(if core.is_core != singular_nonzero {
        Check::pass("core_iff_singular_zero")
    } else {
        Check::fail(
            "core_iff_singular_zero",
            format!("B is {}a core but the singular part is {}zero", if core.is_core { "" } else { "not " }, if singular_nonzero { "non" } else { "" }),
        )
    });
    if !core.is_core {
        let (rank_ips, _) = linalg::psd_rank_factor(ips.matrix(), tol);
        checks.push(if rank_ips < core.rank_total {
            Check::pass("strict_inclusion").with_detail(format!("rank Ω = {rank_ips} < rank φ = {}", core.rank_total))
        } else {
            Check::fail("strict_inclusion", format!("rank Ω = {rank_ips}, rank φ = {}", core.rank_total))
        });
    }
    let precore_s = check_precore(alg, &singular, b)?;
    checks.push(if precore_s.all_passed() {
        Check::pass("precore_for_singular")
    } else {
        Check::fail("precore_for_singular", precore_s.failures().map(|c| c.name.clone()).collect::<Vec<_>>().join(", "))
    });

    Ok(Decomposition {
        omega_phi: rep.functional.clone(),
        ips,
        singular,
        b: b.clone(),
        classification: Classification { b_is_core: core.is_core, singular_nonzero, kind: verdict.kind, witness: verdict.witness },
        rep,
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::linalg::C64;

    fn diag(v: &[f64]) -> CMat {
        CMat::from_diagonal(&CVec::from_iterator(v.len(), v.iter().map(|&x| C64::new(x, 0.0))))
    }

    #[test]
    fn functional_of_trace_form_is_trace() {
        let qm = fixtures::qm2();
        let w = functional_from_form(&qm, &fixtures::trace_form(&qm)).unwrap();
        assert_eq!(w.weights(), fixtures::trace_functional(&qm).weights());
        let z = functional_from_form(&qm, &SesquiForm::zero("z", 4)).unwrap();
        assert!(z.weights().iter().all(|c| c.norm() == 0.0));
        let e = qm.unit().unwrap().coords().clone();
        let f = SesquiForm::new("r1", &e * e.adjoint());
        let w = functional_from_form(&qm, &f).unwrap();
        assert!((w.eval(qm.unit().unwrap()) - f.eval(qm.unit().unwrap(), qm.unit().unwrap())).norm() < 1e-14);
    }

    #[test]
    fn qm2_trace_decomposition() {
        let qm = fixtures::qm2();
        let d = decompose_form(&qm, &fixtures::trace_form(&qm), &fixtures::diagonals(&qm)).unwrap();
        assert!(linalg::max_abs(&(d.ips.matrix() - diag(&[1.0, 0.0, 0.0, 1.0]))) < 1e-12);
        assert!(linalg::max_abs(&(d.singular.matrix() - diag(&[0.0, 1.0, 1.0, 0.0]))) < 1e-12);
        assert!(!d.classification.b_is_core && d.classification.singular_nonzero);
        assert_eq!(d.classification.kind, SingularKind::Singular);
        assert!(d.consistent(), "{:?}", d.checks);
        let e12 = qm.basis(1);
        assert!((d.singular.eval(&e12, &e12) - C64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn full2_trace_is_its_own_ips_part() {
        let full = fixtures::full2();
        let f = fixtures::trace_form(&full);
        let d = decompose_form(&full, &f, &Subspace::whole("all", 4)).unwrap();
        assert!(linalg::spectral_norm(d.singular.matrix()) <= 1e-9);
        assert!(d.classification.b_is_core);
        assert_eq!(d.classification.kind, SingularKind::Zero);
        assert!(d.consistent());
    }

    #[test]
    fn zero_form_splits_into_zeros() {
        let qm = fixtures::qm2();
        let d = decompose_form(&qm, &SesquiForm::zero("z", 4), &fixtures::diagonals(&qm)).unwrap();
        assert!(linalg::max_abs(d.ips.matrix()) == 0.0 && linalg::max_abs(d.singular.matrix()) == 0.0);
        assert!(d.consistent());
    }

    #[test]
    fn verify_ips_examples() {
        let qm = fixtures::qm2();
        let diag_b = fixtures::diagonals(&qm);
        let omega = ips_part(&qm, &fixtures::trace_form(&qm), &diag_b).unwrap();
        assert!(verify_ips(&qm, &omega, &diag_b).unwrap().all_passed());
        let r = verify_ips(&qm, &fixtures::trace_form(&qm), &diag_b).unwrap();
        assert!(!r.passed("core"));
        let full = fixtures::full2();
        assert!(verify_ips(&full, &fixtures::trace_form(&full), &Subspace::whole("all", 4)).unwrap().all_passed());
    }

    #[test]
    fn lemma_holds_and_detects_perturbation() {
        let qm = fixtures::qm2();
        let b = fixtures::diagonals(&qm);
        let f = fixtures::trace_form(&qm);
        let omega = ips_part(&qm, &f, &b).unwrap();
        let out = lemma_consistency(&qm, &f, &omega, &b).unwrap();
        assert!(out.passed && out.quadruples_checked > 0);

        let full = fixtures::full2();
        let all = Subspace::whole("all", 4);
        let ft = fixtures::trace_form(&full);
        let omega = ips_part(&full, &ft, &all).unwrap();
        assert!(lemma_consistency(&full, &ft, &omega, &all).unwrap().passed);

        let mut p = f.matrix().clone();
        p[(0, 1)] += C64::new(0.1, 0.0);
        p[(1, 0)] += C64::new(0.1, 0.0);
        let bad = SesquiForm::new("bad", p);
        let omega = ips_part(&qm, &f, &b).unwrap();
        assert!(matches!(lemma_consistency(&qm, &bad, &omega, &b), Err(Error::PrecoreViolation(_))));
    }

    #[test]
    fn singularity_classification() {
        let qm = fixtures::qm2();
        let b = fixtures::diagonals(&qm);
        let v = is_singular(&qm, &SesquiForm::new("s", diag(&[0.0, 1.0, 1.0, 0.0])), &b).unwrap();
        assert!(v.is_singular());
        assert!(v.witness.unwrap().deviation(&qm.basis(1)) < 1e-12);
        let v = is_singular(&qm, &SesquiForm::zero("z", 4), &b).unwrap();
        assert_eq!(v.kind, SingularKind::Zero);
        let v = is_singular(&qm, &fixtures::trace_form(&qm), &b).unwrap();
        assert_eq!(v.kind, SingularKind::Neither);
    }
}
