//! Vector forms of *-representations, the pre-core `B₀`, and quasi-regularity.
//!
//! In finite dimension a dense domain is the whole space, so every
//! representation here has `D(π) = C^r`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{involve, is_multipliable, multiply, universal_indices, Element, PartialStarAlgebra, Side};
use crate::error::{Error, Result};
use crate::forms::{check_core, check_precore, compress_form, SesquiForm};
use crate::linalg::{self, CMat, CVec, C64};
use crate::report::{ConditionReport, Tracker};
use crate::subspace::Subspace;

pub const DEFAULT_SEED: u64 = 0x5eed;
pub const DEFAULT_SAMPLES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RepSource {
    User,
    Gns,
    Ips,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Representation {
    space_dim: usize,
    matrices: Vec<CMat>,
    domain: Subspace,
    source: RepSource,
}

impl Representation {
    /// One `r x r` matrix per basis element of `alg`.
    pub fn new(alg: &PartialStarAlgebra, matrices: Vec<CMat>, source: RepSource) -> Result<Self> {
        if matrices.len() != alg.dim() {
            return Err(Error::DimensionMismatch { expected: alg.dim(), found: matrices.len() });
        }
        let r = matrices.first().map_or(0, |m| m.nrows());
        for m in &matrices {
            if m.nrows() != r || m.ncols() != r {
                return Err(Error::DimensionMismatch { expected: r, found: m.nrows().max(m.ncols()) });
            }
        }
        Ok(Representation { space_dim: r, matrices, domain: Subspace::whole("D", r), source })
    }

    pub fn space_dim(&self) -> usize {
        self.space_dim
    }

    pub fn matrices(&self) -> &[CMat] {
        &self.matrices
    }

    pub fn domain(&self) -> &Subspace {
        &self.domain
    }

    pub fn source(&self) -> RepSource {
        self.source
    }

    pub fn pi(&self, a: &Element) -> CMat {
        let r = self.space_dim;
        let mut out = CMat::zeros(r, r);
        for m in a.support() {
            out += &self.matrices[m] * a.coords()[m];
        }
        out
    }
}

fn mat_dev(a: &CMat, b: &CMat) -> f64 {
    linalg::max_abs(&(a - b)) / linalg::max_abs(a).max(linalg::max_abs(b)).max(1.0)
}

/// `π(a*) = π(a)ᴴ` and `π(ab) = π(a)π(b)` on multipliable basis pairs.
pub fn validate_representation(alg: &PartialStarAlgebra, rep: &Representation) -> ConditionReport {
    let tol = alg.tol();
    let nm = |i: usize| alg.name(i).to_string();
    let mut report = ConditionReport::new();
    let mut adj = Tracker::new(tol);
    for a in 0..alg.dim() {
        let star = rep.pi(&involve(alg, &alg.basis(a)));
        adj.observe(mat_dev(&star, &rep.matrices[a].adjoint()), || format!("π({}*) ≠ π({})ᴴ", nm(a), nm(a)));
    }
    report.push(adj.into_check("adjoint"));
    let mut mult = Tracker::new(tol);
    for a in 0..alg.dim() {
        for b in 0..alg.dim() {
            let Some(prod) = alg.basis_product(a, b) else { continue };
            let lhs = rep.pi(&Element::from_coords(prod));
            let rhs = &rep.matrices[a] * &rep.matrices[b];
            mult.observe(mat_dev(&lhs, &rhs), || format!("π({}{}) ≠ π({})π({})", nm(a), nm(b), nm(a), nm(b)));
        }
    }
    report.push(mult.into_check("multiplicative"));
    report
}

/// Columns `π(e_m)ξ`.
fn orbit(rep: &Representation, xi: &CVec) -> CMat {
    let mut v = CMat::zeros(rep.space_dim, rep.matrices.len());
    for (m, pm) in rep.matrices.iter().enumerate() {
        v.set_column(m, &(pm * xi));
    }
    v
}

/// `φ_ξ(a, b) = ⟨π(a)ξ, π(b)ξ⟩`.
pub fn vector_form(alg: &PartialStarAlgebra, rep: &Representation, xi: &CVec) -> Result<SesquiForm> {
    if rep.matrices.len() != alg.dim() {
        return Err(Error::DimensionMismatch { expected: alg.dim(), found: rep.matrices.len() });
    }
    if xi.len() != rep.space_dim {
        return Err(Error::DimensionMismatch { expected: rep.space_dim, found: xi.len() });
    }
    let v = orbit(rep, xi);
    Ok(SesquiForm::new("φ_ξ", v.adjoint() * v))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrecoreB0 {
    pub subspace: Subspace,
    /// Pre-core conditions of `φ_ξ` on `B₀`.
    pub report: ConditionReport,
}

/// `B₀ = {x ∈ RA : π(x)ξ ∈ D(π)}`.
pub fn precore_b0(alg: &PartialStarAlgebra, rep: &Representation, xi: &CVec) -> Result<PrecoreB0> {
    let tol = alg.tol();
    let phi = vector_form(alg, rep, xi)?;
    let keep: Vec<usize> = universal_indices(alg, Side::Right)
        .into_iter()
        .filter(|&x| rep.domain.contains_vec(&(&rep.matrices[x] * xi), tol))
        .collect();
    let subspace = Subspace::coordinate("B0", alg.dim(), &keep);
    let report = check_precore(alg, &phi, &subspace)?;
    Ok(PrecoreB0 { subspace, report })
}

/// `π°(a)λ(x) = λ(ax)` on the quotient of an ips form with core `B`.
///
/// The quotient carries the coordinates `λ(a) = G a` of the pivoted rank
/// factor `P = GᴴG`.
pub fn rep_from_ips(alg: &PartialStarAlgebra, f: &SesquiForm, b: &Subspace) -> Result<Representation> {
    let tol = alg.tol();
    let core = check_core(alg, f, b)?;
    if !core.is_core {
        return Err(Error::NotCore { rank_b: core.rank_b, rank_total: core.rank_total });
    }
    let pre = check_precore(alg, f, b)?;
    let invariance_failures: Vec<String> = pre
        .failures()
        .filter(|c| c.name != "nontrivial")
        .map(|c| format!("{}: {}", c.name, c.detail))
        .collect();
    if !invariance_failures.is_empty() {
        return Err(Error::PrecoreViolation(invariance_failures.join("; ")));
    }
    let (r, g) = linalg::psd_rank_factor(f.matrix(), tol);
    let xs = b.basis_elements();
    let gx = &g * b.basis();
    let gx_pinv = linalg::pinv(&gx, tol.sqrt());
    let mut matrices = Vec::with_capacity(alg.dim());
    for a in 0..alg.dim() {
        let ea = alg.basis(a);
        let mut ax = CMat::zeros(alg.dim(), xs.len());
        for (i, x) in xs.iter().enumerate() {
            ax.set_column(i, multiply(alg, &ea, x)?.coords());
        }
        matrices.push(if r == 0 { CMat::zeros(0, 0) } else { &g * ax * &gx_pinv });
    }
    let rep = Representation::new(alg, matrices, RepSource::Ips)?;
    let report = validate_representation(alg, &rep);
    if !report.all_passed() {
        let msgs: Vec<String> = report.failures().map(|c| format!("{}: {}", c.name, c.detail)).collect();
        return Err(Error::Internal(format!("π° is not a representation: {}", msgs.join("; "))));
    }
    Ok(rep)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// Certified: every `π(a)` lies in the matrix span of `π(B)`.
    Yes,
    /// Certified: some `π(a)ξ` escapes `span π(B)ξ`.
    No,
    /// No counterexample among the sampled vectors.
    YesSampled,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuasiRegularity {
    pub verdict: Verdict,
    pub witness: Option<CVec>,
    /// Basis element `a` with `π(a)ξ ∉ span π(B)ξ` for the witness.
    pub witness_element: Option<usize>,
    pub matrix_span: bool,
    pub vectors_checked: usize,
    /// Sampled vectors at which `B` fails the pre-core conditions of `φ_ξ`.
    pub precore_failures: usize,
    /// False if the matrix-span test passed but a sampled rank test did not.
    pub consistent: bool,
    pub seed: u64,
}

fn flatten(m: &CMat) -> CVec {
    CVec::from_iterator(m.len(), m.iter().copied())
}

fn matrix_span_test(rep: &Representation, b: &Subspace, tol: f64) -> bool {
    let spans: Vec<CVec> = b.basis_elements().iter().map(|x| flatten(&rep.pi(x))).collect();
    let span = Subspace::span("πB", rep.space_dim * rep.space_dim, &spans, tol);
    rep.matrices.iter().all(|m| span.contains_vec(&flatten(m), tol))
}

/// First basis element `a` with `π(a)ξ` outside `span{π(x)ξ : x ∈ B}`, by
/// rank comparison.
pub fn span_escape(rep: &Representation, b: &Subspace, xi: &CVec, tol: f64) -> Option<usize> {
    let xs = b.basis_elements();
    let mut mb = CMat::zeros(rep.space_dim, xs.len());
    for (i, x) in xs.iter().enumerate() {
        mb.set_column(i, &(rep.pi(x) * xi));
    }
    let all = orbit(rep, xi);
    let scale = linalg::spectral_norm(&all).max(linalg::spectral_norm(&mb));
    let base = linalg::rank_with_scale(&mb, scale, tol);
    (0..rep.matrices.len()).find(|&a| {
        let mut ext = CMat::zeros(rep.space_dim, xs.len() + 1);
        ext.columns_mut(0, xs.len()).copy_from(&mb);
        ext.set_column(xs.len(), &all.column(a));
        linalg::rank_with_scale(&ext, scale, tol) > base
    })
}

fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> CVec {
    CVec::from_iterator(n, (0..n).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))))
}

/// Trichotomy for "`φ_ξ` is an ips form with core `B` for every `ξ`":
/// a certified yes from the matrix-span test, a certified no with a witness
/// `ξ`, or yes on all sampled vectors (basis vectors first, then `samples`
/// random ones drawn from `seed`).
pub fn quasi_regularity_check(alg: &PartialStarAlgebra, rep: &Representation, b: &Subspace, samples: usize, seed: u64) -> Result<QuasiRegularity> {
    let tol = alg.tol();
    let r = rep.space_dim;
    let matrix_span = matrix_span_test(rep, b, tol);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut vectors: Vec<CVec> = (0..r).map(|i| Element::basis(r, i).into_coords()).collect();
    vectors.extend((0..samples).map(|_| random_vector(&mut rng, r)));

    let mut witness = None;
    let mut precore_failures = 0;
    for xi in &vectors {
        let phi = vector_form(alg, rep, xi)?;
        let pre = check_precore(alg, &phi, b)?;
        if pre.failures().any(|c| c.name != "nontrivial") {
            precore_failures += 1;
        }
        if witness.is_none() {
            if let Some(a) = span_escape(rep, b, xi, tol) {
                witness = Some((xi.clone(), a));
            }
        }
    }
    let verdict = match (matrix_span, &witness) {
        (true, _) => Verdict::Yes,
        (false, Some(_)) => Verdict::No,
        (false, None) => Verdict::YesSampled,
    };
    Ok(QuasiRegularity {
        verdict,
        consistent: !(matrix_span && witness.is_some()),
        witness_element: witness.as_ref().map(|w| w.1),
        witness: witness.map(|w| w.0),
        matrix_span,
        vectors_checked: vectors.len(),
        precore_failures,
        seed,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompressionEntry {
    pub x: Element,
    pub is_core: bool,
    pub rank_b: usize,
    pub rank_total: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompressionReport {
    pub all_cores: bool,
    pub per_x: Vec<CompressionEntry>,
    pub quasi_regular: QuasiRegularity,
    /// `B` is a core for every `φ_x` iff `π°` is quasi regular.
    pub agree: bool,
}

fn require_closed(alg: &PartialStarAlgebra, b: &Subspace) -> Result<()> {
    let xs = b.basis_elements();
    for (i, x) in xs.iter().enumerate() {
        for (j, y) in xs.iter().enumerate() {
            if !is_multipliable(alg, x, y) {
                return Err(Error::NotAnAlgebra(format!("b{} · b{} is undefined", i + 1, j + 1)));
            }
            let xy = multiply(alg, x, y)?;
            if !b.contains(&xy, alg.tol()) {
                return Err(Error::NotAnAlgebra(format!("b{} · b{} ∉ B", i + 1, j + 1)));
            }
        }
    }
    Ok(())
}

/// Compares "`B` is a core for `φ_x` for every `x ∈ B`" with quasi-regularity
/// of `π°` built from `f`. The basis of `B` is always among the sampled `x`.
pub fn compression_core_check(alg: &PartialStarAlgebra, f: &SesquiForm, b: &Subspace, samples: usize, seed: u64) -> Result<CompressionReport> {
    require_closed(alg, b)?;
    let rep = rep_from_ips(alg, f, b)?;
    let quasi_regular = quasi_regularity_check(alg, &rep, b, samples, seed)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut xs = b.basis_elements();
    xs.extend((0..samples).map(|_| b.combine(&random_vector(&mut rng, b.dim()))));
    let mut per_x = Vec::with_capacity(xs.len());
    for x in xs {
        let fx = compress_form(alg, f, &x)?;
        let core = check_core(alg, &fx, b)?;
        per_x.push(CompressionEntry { x, is_core: core.is_core, rank_b: core.rank_b, rank_total: core.rank_total });
    }
    let all_cores = per_x.iter().all(|e| e.is_core);
    let agree = all_cores == (quasi_regular.verdict != Verdict::No);
    Ok(CompressionReport { all_cores, per_x, quasi_regular, agree })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decompose::{ips_part, ips_part_with_rep};
    use crate::fixtures;

    fn v(re: &[f64]) -> CVec {
        CVec::from_iterator(re.len(), re.iter().map(|&x| C64::new(x, 0.0)))
    }

    #[test]
    fn defining_reps_are_valid() {
        for alg in [fixtures::full2(), fixtures::qm2()] {
            let rep = fixtures::defining_representation(&alg);
            assert!(validate_representation(&alg, &rep).all_passed());
        }
    }

    #[test]
    fn broken_rep_is_flagged() {
        let full = fixtures::full2();
        let mut mats = fixtures::defining_representation(&full).matrices().to_vec();
        mats[1] *= C64::new(2.0, 0.0);
        let rep = Representation::new(&full, mats, RepSource::User).unwrap();
        let r = validate_representation(&full, &rep);
        assert!(!r.passed("adjoint") && !r.passed("multiplicative"));
    }

    #[test]
    fn vector_form_examples() {
        let full = fixtures::full2();
        let rep = fixtures::defining_representation(&full);
        let f = vector_form(&full, &rep, &v(&[1.0, 0.0])).unwrap();
        // φ(a, b) = a₁₁ conj(b₁₁) + a₂₁ conj(b₂₁)
        let mut expected = CMat::zeros(4, 4);
        expected[(0, 0)] = C64::new(1.0, 0.0);
        expected[(2, 2)] = C64::new(1.0, 0.0);
        assert_eq!(f.matrix(), &expected);
        let z = vector_form(&full, &rep, &v(&[0.0, 0.0])).unwrap();
        assert_eq!(linalg::max_abs(z.matrix()), 0.0);
        assert!(matches!(vector_form(&full, &rep, &v(&[1.0])), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn vector_form_of_gns_cyclic_vector_is_omega() {
        let qm = fixtures::qm2();
        let (omega, g) = ips_part_with_rep(&qm, &fixtures::trace_form(&qm), &fixtures::diagonals(&qm)).unwrap();
        let rep = Representation::new(&qm, g.pi.clone(), RepSource::Gns).unwrap();
        let f = vector_form(&qm, &rep, g.cyclic.as_ref().unwrap()).unwrap();
        assert!(linalg::max_abs(&(f.matrix() - omega.matrix())) < 1e-12);
    }

    #[test]
    fn b0_examples() {
        let qm = fixtures::qm2();
        let rep = fixtures::defining_representation(&qm);
        let b0 = precore_b0(&qm, &rep, &v(&[0.3, -1.0])).unwrap();
        assert_eq!(b0.subspace.support(), vec![0, 3]);
        assert!(b0.report.all_passed());
        let full = fixtures::full2();
        let b0 = precore_b0(&full, &fixtures::defining_representation(&full), &v(&[1.0, 2.0])).unwrap();
        assert_eq!(b0.subspace.dim(), 4);
        let zero = Representation::new(&qm, vec![CMat::zeros(2, 2); 4], RepSource::User).unwrap();
        let b0 = precore_b0(&qm, &zero, &v(&[1.0, 1.0])).unwrap();
        assert_eq!(b0.subspace.support(), vec![0, 3]);
        assert!(b0.report.all_passed());
    }

    #[test]
    fn rep_from_qm2_omega_is_diagonal() {
        let qm = fixtures::qm2();
        let b = fixtures::diagonals(&qm);
        let omega = ips_part(&qm, &fixtures::trace_form(&qm), &b).unwrap();
        let rep = rep_from_ips(&qm, &omega, &b).unwrap();
        assert_eq!(rep.space_dim(), 2);
        let a = Element::from_coords(v(&[2.0, 3.0, 5.0, 7.0]));
        let expected = CMat::from_diagonal(&v(&[2.0, 7.0]));
        assert!(linalg::max_abs(&(rep.pi(&a) - expected)) < 1e-12);
    }

    #[test]
    fn rep_from_full2_trace_is_left_regular() {
        let full = fixtures::full2();
        let rep = rep_from_ips(&full, &fixtures::trace_form(&full), &Subspace::whole("all", 4)).unwrap();
        assert_eq!(rep.space_dim(), 4);
        // λ = identity, so π°(a) is left multiplication in matrix-unit coordinates
        for a in 0..4 {
            for x in 0..4 {
                let ax = multiply(&full, &full.basis(a), &full.basis(x)).unwrap();
                let col = &rep.matrices()[a] * full.basis(x).coords();
                assert!((col - ax.coords()).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn rep_from_ips_rejects_non_core() {
        let qm = fixtures::qm2();
        let err = rep_from_ips(&qm, &fixtures::trace_form(&qm), &fixtures::diagonals(&qm)).unwrap_err();
        assert!(matches!(err, Error::NotCore { rank_b: 2, rank_total: 4 }));
    }

    #[test]
    fn quasi_regularity_examples() {
        let qm = fixtures::qm2();
        let b = fixtures::diagonals(&qm);
        let omega = ips_part(&qm, &fixtures::trace_form(&qm), &b).unwrap();
        let rep = rep_from_ips(&qm, &omega, &b).unwrap();
        let q = quasi_regularity_check(&qm, &rep, &b, 16, DEFAULT_SEED).unwrap();
        assert_eq!(q.verdict, Verdict::Yes);
        assert!(q.consistent && q.witness.is_none());

        let full = fixtures::full2();
        let rep = fixtures::defining_representation(&full);
        let q = quasi_regularity_check(&full, &rep, &fixtures::diagonals(&full), 16, DEFAULT_SEED).unwrap();
        assert_eq!(q.verdict, Verdict::No);
        assert_eq!(q.witness.unwrap(), v(&[1.0, 0.0]));
        assert_eq!(q.witness_element, Some(2));

        let q = quasi_regularity_check(&full, &rep, &Subspace::whole("all", 4), 16, DEFAULT_SEED).unwrap();
        assert_eq!(q.verdict, Verdict::Yes);
    }

    #[test]
    fn compression_examples() {
        let qm = fixtures::qm2();
        let b = fixtures::diagonals(&qm);
        let omega = ips_part(&qm, &fixtures::trace_form(&qm), &b).unwrap();
        let c = compression_core_check(&qm, &omega, &b, 8, DEFAULT_SEED).unwrap();
        assert!(c.all_cores && c.agree);
        assert_eq!(c.quasi_regular.verdict, Verdict::Yes);
        assert_eq!(c.per_x.len(), 10);

        let full = fixtures::full2();
        let c = compression_core_check(&full, &fixtures::trace_form(&full), &Subspace::whole("all", 4), 8, DEFAULT_SEED).unwrap();
        assert!(c.all_cores && c.agree);

        assert!(matches!(
            compression_core_check(&qm, &fixtures::trace_form(&qm), &b, 8, DEFAULT_SEED),
            Err(Error::NotCore { .. })
        ));
        let e12 = Subspace::coordinate("e12", 4, &[1]);
        assert!(matches!(compression_core_check(&qm, &omega, &e12, 8, DEFAULT_SEED), Err(Error::NotAnAlgebra(_))));
    }
}
