//! GNS-like representations of linear functionals on a subspace `B ⊆ RA`.
//!
//! Given `ω` and `B` with orthonormal basis `x_1..x_k`, the Gram matrix
//! `Q[j][i] = ω(x_j* x_i)` is factored as `Q = FᴴF` (`F` is `r x k`, pivoted
//! Cholesky), so `λ⁰(x) = F c(x)`. Every `a ∈ A` gets its Riesz vector
//! `ξ_a` from `Fᴴ ξ_a = conj(h_a)` with `h_a[i] = ω(a* x_i)`; these are the
//! columns of `Λ`, and `π(a) = Λ [a x_1 .. a x_k] F⁺`.

use serde::Serialize;

use crate::algebra::{involve, multiply, Element, PartialStarAlgebra};
use crate::error::{Error, Result};
use crate::forms::{nontrivial_check, LinearFunctional, QuotientSpace};
use crate::linalg::{self, CMat, CVec};
use crate::report::{Check, ConditionReport, Tracker};
use crate::subspace::Subspace;

#[derive(Debug, Clone, PartialEq)]
pub struct Representability {
    pub r1: bool,
    pub r2: bool,
    pub r3: bool,
    /// `Q[j][i] = ω(x_j* x_i)` over the orthonormal basis of `B`.
    pub q: CMat,
    pub min_eigenvalue: f64,
    /// Best constant in (R3) per basis element, `None` where (R3) fails.
    pub gammas: Vec<Option<f64>>,
    /// `B ≠ {0}` and `B ≠ Ce`; reported only, it does not block construction.
    pub nontrivial: bool,
    pub report: ConditionReport,
}

impl Representability {
    pub fn holds(&self) -> bool {
        self.r1 && self.r2 && self.r3
    }
}

fn functional_scale(w: &LinearFunctional) -> f64 {
    w.weights().iter().fold(1.0f64, |acc, z| acc.max(z.norm()))
}

/// `h_a[i] = ω(a* x_i)` for every basis element `a`, as rows of an `n x k` matrix.
fn riesz_covectors(alg: &PartialStarAlgebra, w: &LinearFunctional, xs: &[Element]) -> Result<CMat> {
    let mut h = CMat::zeros(alg.dim(), xs.len());
    for a in 0..alg.dim() {
        let a_star = involve(alg, &alg.basis(a));
        for (i, x) in xs.iter().enumerate() {
            h[(a, i)] = w.eval(&multiply(alg, &a_star, x)?);
        }
    }
    Ok(h)
}

fn gram(alg: &PartialStarAlgebra, w: &LinearFunctional, xs: &[Element]) -> Result<CMat> {
    let k = xs.len();
    let mut q = CMat::zeros(k, k);
    for (j, y) in xs.iter().enumerate() {
        let y_star = involve(alg, y);
        for (i, x) in xs.iter().enumerate() {
            q[(j, i)] = w.eval(&multiply(alg, &y_star, x)?);
        }
    }
    Ok(q)
}

/// Conditions (R1)-(R3) for `ω` on `B`.
pub fn check_representable(alg: &PartialStarAlgebra, w: &LinearFunctional, b: &Subspace) -> Result<Representability> {
    let tol = alg.tol();
    if w.dim() != alg.dim() {
        return Err(Error::DimensionMismatch { expected: alg.dim(), found: w.dim() });
    }
    let xs = b.basis_elements();
    let scale = functional_scale(w);
    let q = gram(alg, w, &xs)?;
    let mut report = ConditionReport::new();

    let herm = linalg::hermitian_deviation(&q) / scale;
    let (values, _) = linalg::eigh(&q);
    let min_eigenvalue = values.first().copied().unwrap_or(0.0);
    let r1 = herm <= tol && min_eigenvalue >= -tol * scale;
    report.push(if r1 {
        Check::pass("R1").with_residual(herm)
    } else if herm > tol {
        Check::fail("R1", format!("ω(y*x) is not Hermitian on B (deviation {herm:.3e})")).with_residual(herm)
    } else {
        Check::fail("R1", format!("ω(x*x) < 0 for some x ∈ B (min eigenvalue {min_eigenvalue:.3e})"))
            .with_residual(-min_eigenvalue / scale)
    });

    // (R2) ω(y*(a*x)) = conj(ω(x*(ay)))
    let mut r2 = Tracker::new(tol);
    for a in 0..alg.dim() {
        let ea = alg.basis(a);
        let a_star = involve(alg, &ea);
        for (i, x) in xs.iter().enumerate() {
            let x_star = involve(alg, x);
            for (j, y) in xs.iter().enumerate() {
                let y_star = involve(alg, y);
                let lhs = w.eval(&multiply(alg, &y_star, &multiply(alg, &a_star, x)?)?);
                let rhs = w.eval(&multiply(alg, &x_star, &multiply(alg, &ea, y)?)?).conj();
                r2.observe((lhs - rhs).norm() / scale, || {
                    format!("a = {}, x = b{}, y = b{}: {lhs:.6} ≠ {rhs:.6}", alg.name(a), i + 1, j + 1)
                });
            }
        }
    }
    let r2 = r2.into_check("R2");
    let r2_ok = r2.passed;
    report.push(r2);

    // (R3) x ↦ ω(a*x) vanishes on ker Q
    let h = riesz_covectors(alg, w, &xs)?;
    let kernel = linalg::null_space(&q, tol);
    let mut r3 = Tracker::new(tol);
    for a in 0..alg.dim() {
        let row = h.row(a);
        let leak = (row * &kernel).norm() / row.norm().max(1.0);
        r3.observe(leak, || format!("a = {}: ω(a*x) ≠ 0 for some x with ω(x*x) = 0", alg.name(a)));
    }
    let r3 = r3.into_check("R3");
    let r3_ok = r3.passed;
    report.push(r3);

    let nontrivial = nontrivial_check(alg, b, "nontrivial");
    let nontrivial_ok = nontrivial.passed;
    report.push(Check { passed: true, ..nontrivial.clone() }.with_detail(if nontrivial_ok {
        "B ≠ {0}, B ≠ Ce".to_string()
    } else {
        format!("flag only: {}", nontrivial.detail)
    }));

    let gammas = if r1 && r3_ok {
        let (_, f) = linalg::psd_rank_factor(&q, tol);
        let (lambda, _) = solve_riesz(&f, &h, tol);
        (0..alg.dim()).map(|a| Some(lambda.column(a).norm())).collect()
    } else {
        vec![None; alg.dim()]
    };

    Ok(Representability { r1, r2: r2_ok, r3: r3_ok, q, min_eigenvalue, gammas, nontrivial: nontrivial_ok, report })
}

/// Columns `ξ_a` of `Λ` solving `Fᴴ ξ_a = conj(h_a)` in the least-squares
/// sense, and the largest scaled residual.
fn solve_riesz(f: &CMat, h: &CMat, tol: f64) -> (CMat, f64) {
    let rhs = h.adjoint();
    let fh = f.adjoint();
    let lambda = linalg::lstsq(&fh, &rhs, tol);
    let resid = &fh * &lambda - &rhs;
    let mut worst = 0.0f64;
    for a in 0..rhs.ncols() {
        worst = worst.max(resid.column(a).norm() / rhs.column(a).norm().max(1.0));
    }
    (lambda, worst)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GnsRep {
    pub functional: LinearFunctional,
    /// Quotient `λ⁰` over `B` with factor `F`.
    pub quotient: QuotientSpace,
    /// `r x n`; column `m` is `λ(e_m) = ξ_{e_m}`.
    pub lambda_ext: CMat,
    /// `π(e_m)` on the `r`-dimensional quotient.
    pub pi: Vec<CMat>,
    /// `ξ_ω = λ(e)` when `e ∈ B`.
    pub cyclic: Option<CVec>,
    pub gammas: Vec<f64>,
}

impl GnsRep {
    pub fn subspace(&self) -> &Subspace {
        &self.quotient.domain
    }

    pub fn rank(&self) -> usize {
        self.quotient.rank()
    }

    pub fn lambda(&self, a: &Element) -> CVec {
        &self.lambda_ext * a.coords()
    }

    pub fn pi_of(&self, a: &Element) -> CMat {
        let r = self.rank();
        let mut out = CMat::zeros(r, r);
        for m in a.support() {
            out += &self.pi[m] * a.coords()[m];
        }
        out
    }
}

/// Builds `(π, λ, H)` from `ω` on `B`; fails unless (R1)-(R3) hold.
pub fn gns_construct(alg: &PartialStarAlgebra, w: &LinearFunctional, b: &Subspace) -> Result<GnsRep> {
    let tol = alg.tol();
    let rep = check_representable(alg, w, b)?;
    if !rep.holds() {
        let failed: Vec<String> = rep.report.failures().map(|c| format!("{} ({})", c.name, c.detail)).collect();
        return Err(Error::NotRepresentable(failed.join("; ")));
    }
    let xs = b.basis_elements();
    let (_, f) = linalg::psd_rank_factor(&rep.q, tol);
    let h = riesz_covectors(alg, w, &xs)?;
    let (lambda_ext, resid) = solve_riesz(&f, &h, tol);
    if resid > 10.0 * tol {
        return Err(Error::Internal(format!("Riesz system inconsistent (residual {resid:.3e})")));
    }
    let f_pinv = linalg::pinv(&f, tol);
    let r = f.nrows();
    let mut pi = Vec::with_capacity(alg.dim());
    for a in 0..alg.dim() {
        let ea = alg.basis(a);
        let mut ax = CMat::zeros(alg.dim(), xs.len());
        for (i, x) in xs.iter().enumerate() {
            ax.set_column(i, multiply(alg, &ea, x)?.coords());
        }
        let m = if r == 0 { CMat::zeros(0, 0) } else { &lambda_ext * ax * &f_pinv };
        pi.push(m);
    }
    let cyclic = alg.unit().filter(|e| b.contains(e, tol)).map(|e| &lambda_ext * e.coords());
    let gammas = (0..alg.dim()).map(|a| lambda_ext.column(a).norm()).collect();
    Ok(GnsRep {
        functional: w.clone(),
        quotient: QuotientSpace { factor: f, domain: b.clone() },
        lambda_ext,
        pi,
        cyclic,
        gammas,
    })
}

fn mat_deviation(a: &CMat, b: &CMat) -> f64 {
    a.iter().zip(b.iter()).fold(0.0f64, |acc, (&x, &y)| acc.max(linalg::rel_dev(x, y)))
}

/// Re-checks the conclusions of the construction on basis elements.
pub fn verify_gns(alg: &PartialStarAlgebra, w: &LinearFunctional, rep: &GnsRep) -> ConditionReport {
    let tol = alg.tol();
    let n = alg.dim();
    let nm = |i: usize| alg.name(i).to_string();
    let xs = rep.subspace().basis_elements();
    let lam_x: Vec<CVec> = xs.iter().map(|x| rep.lambda(x)).collect();
    let mut report = ConditionReport::new();

    let mut restr = Tracker::new(tol);
    for (i, x) in xs.iter().enumerate() {
        let l0 = rep.quotient.lambda(x);
        let dev = l0.iter().zip(lam_x[i].iter()).fold(0.0f64, |acc, (&p, &q)| acc.max(linalg::rel_dev(p, q)));
        restr.observe(dev, || format!("λ(b{}) ≠ λ⁰(b{})", i + 1, i + 1));
    }
    report.push(restr.into_check("lambda_restriction"));

    let mut adj = Tracker::new(tol);
    for a in 0..n {
        let star = rep.pi_of(&involve(alg, &alg.basis(a)));
        adj.observe(mat_deviation(&star, &rep.pi[a].adjoint()), || format!("π({}*) ≠ π({})ᴴ", nm(a), nm(a)));
    }
    report.push(adj.into_check("adjoint"));

    let mut mult = Tracker::new(tol);
    for a in 0..n {
        for b in 0..n {
            if !alg.multipliable(a, b) {
                continue;
            }
            let ab = multiply(alg, &alg.basis(a), &alg.basis(b)).expect("multipliable");
            let lhs = rep.pi_of(&ab);
            let rhs = &rep.pi[a] * &rep.pi[b];
            mult.observe(mat_deviation(&lhs, &rhs), || format!("π({}{}) ≠ π({})π({})", nm(a), nm(b), nm(a), nm(b)));
        }
    }
    report.push(mult.into_check("multiplicative"));

    let mut inter = Tracker::new(tol);
    let mut elems = Tracker::new(tol);
    for a in 0..n {
        let ea = alg.basis(a);
        for (i, x) in xs.iter().enumerate() {
            let ax = match multiply(alg, &ea, x) {
                Ok(v) => v,
                Err(u) => {
                    inter.fail(|| format!("{}·b{} undefined ({u})", nm(a), i + 1));
                    continue;
                }
            };
            let lhs = &rep.pi[a] * &lam_x[i];
            let rhs = rep.lambda(&ax);
            let dev = lhs.iter().zip(rhs.iter()).fold(0.0f64, |acc, (&p, &q)| acc.max(linalg::rel_dev(p, q)));
            inter.observe(dev, || format!("π({})λ(b{}) ≠ λ({}·b{})", nm(a), i + 1, nm(a), i + 1));
            for (j, y) in xs.iter().enumerate() {
                let expected = match multiply(alg, &involve(alg, y), &ax) {
                    Ok(v) => w.eval(&v),
                    Err(u) => {
                        elems.fail(|| format!("b{}*·({}·b{}) undefined ({u})", j + 1, nm(a), i + 1));
                        continue;
                    }
                };
                let got = lam_x[j].dotc(&lhs);
                elems.observe(linalg::rel_dev(expected, got), || {
                    format!("ω(b{}*({} b{})) = {expected:.6} ≠ ⟨π(a)λ(x), λ(y)⟩ = {got:.6}", j + 1, nm(a), i + 1)
                });
            }
        }
    }
    report.push(inter.into_check("intertwining"));
    report.push(elems.into_check("matrix_elements"));

    if let Some(xi) = &rep.cyclic {
        let mut exp = Tracker::new(tol);
        for a in 0..n {
            let expected = w.eval(&alg.basis(a));
            let got = xi.dotc(&(&rep.pi[a] * xi));
            exp.observe(linalg::rel_dev(expected, got), || format!("ω({}) = {expected:.6} ≠ ⟨π(a)ξ, ξ⟩ = {got:.6}", nm(a)));
        }
        report.push(exp.into_check("cyclic_expectation"));
        let r = rep.rank();
        let orbit = linalg::columns_to_matrix(r, &xs.iter().map(|x| rep.pi_of(x) * xi).collect::<Vec<_>>());
        let scale = linalg::spectral_norm(&rep.quotient.factor);
        let got = linalg::rank_with_scale(&orbit, scale, tol.sqrt());
        report.push(if got == r {
            Check::pass("cyclicity")
        } else {
            Check::fail("cyclicity", format!("π(B)ξ spans {got} of {r} dimensions"))
        });
    }
    report
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmbeddingResiduals {
    /// `‖UᴴU - I‖_max`.
    pub isometry: f64,
    /// `max ‖Uᴴπ₂(a)Uλ₁(x) - π₁(a)λ₁(x)‖`.
    pub intertwining: f64,
    /// `max ‖Uλ₁(x) - λ₂(x)‖`.
    pub consistency: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    pub u: CMat,
    pub residuals: EmbeddingResiduals,
    pub report: ConditionReport,
    pub small: GnsRep,
    pub large: GnsRep,
}

/// Isometry `U: H^{B1} → H^{B2}` with `Uλ₁(x) = λ₂(x)` for `x ∈ B1`.
pub fn embed_subrep(alg: &PartialStarAlgebra, w: &LinearFunctional, b1: &Subspace, b2: &Subspace) -> Result<Embedding> {
    let tol = alg.tol();
    if !b1.is_subspace_of(b2, tol) {
        return Err(Error::NotNested);
    }
    let small = gns_construct(alg, w, b1)?;
    let large = gns_construct(alg, w, b2)?;
    let f1 = &small.quotient.factor;
    let x1 = b1.basis();
    let target = &large.lambda_ext * x1;
    let u = &target * linalg::pinv(f1, tol);

    let r1 = small.rank();
    let isometry = linalg::max_abs(&(u.adjoint() * &u - CMat::identity(r1, r1)));
    let consistency = linalg::max_abs(&(&u * f1 - &target));
    let mut intertwining = 0.0f64;
    for a in 0..alg.dim() {
        let lhs = u.adjoint() * &large.pi[a] * &u * f1;
        let rhs = &small.pi[a] * f1;
        intertwining = intertwining.max(linalg::max_abs(&(lhs - rhs)));
    }
    let scale = linalg::max_abs(&large.lambda_ext).max(1.0);
    let mut report = ConditionReport::new();
    let mk = |name: &str, r: f64| {
        if r <= tol * scale {
            Check::pass(name).with_residual(r)
        } else {
            Check::fail(name, format!("residual {r:.3e}")).with_residual(r)
        }
    };
    report.push(mk("isometry", isometry));
    report.push(mk("consistency", consistency));
    report.push(mk("intertwining", intertwining));
    Ok(Embedding { u, residuals: EmbeddingResiduals { isometry, intertwining, consistency }, report, small, large })
}

/// Minimal-norm solution of `⟨λ⁰(x), ξ⟩ = ω(a*x)` for a single element, used
/// where only one Riesz vector is needed.
pub fn riesz_vector(alg: &PartialStarAlgebra, rep: &GnsRep, a: &Element) -> Result<CVec> {
    let xs = rep.subspace().basis_elements();
    let a_star = involve(alg, a);
    let mut h = CMat::zeros(1, xs.len());
    for (i, x) in xs.iter().enumerate() {
        h[(0, i)] = rep.functional.eval(&multiply(alg, &a_star, x)?);
    }
    let (lambda, _) = solve_riesz(&rep.quotient.factor, &h, alg.tol());
    Ok(lambda.column(0).into_owned())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::linalg::C64;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn trace_on_full2() {
        let alg = fixtures::full2();
        let w = fixtures::trace_functional(&alg);
        let b = Subspace::whole("all", 4);
        let r = check_representable(&alg, &w, &b).unwrap();
        assert!(r.holds());
        assert!(linalg::max_abs(&(&r.q - CMat::identity(4, 4))) < 1e-15);
        assert!((r.gammas[0].unwrap() - 1.0).abs() < 1e-12);
        let rep = gns_construct(&alg, &w, &b).unwrap();
        assert_eq!(rep.rank(), 4);
        assert!(verify_gns(&alg, &w, &rep).all_passed());
        // ‖π(a)ξ‖² = tr(a*a)
        let xi = rep.cyclic.clone().unwrap();
        let a = Element::from_vec(vec![c(1.0, 2.0), c(-0.5, 0.0), c(0.0, 3.0), c(2.0, -1.0)]);
        let lhs = (rep.pi_of(&a) * &xi).norm_squared();
        assert!((lhs - a.norm().powi(2)).abs() < 1e-12);
        let prod = &rep.pi[1] * &rep.pi[2];
        assert!(linalg::max_abs(&(prod - &rep.pi[0])) < 1e-12);
    }

    #[test]
    fn trace_on_qm2_diagonals() {
        let alg = fixtures::qm2();
        let w = fixtures::trace_functional(&alg);
        let b = fixtures::diagonals(&alg);
        let r = check_representable(&alg, &w, &b).unwrap();
        assert!(r.holds());
        let rep = gns_construct(&alg, &w, &b).unwrap();
        assert_eq!(rep.rank(), 2);
        // λ(a) = (a11, a22), π(a) = diag(a11, a22), ξ = (1, 1)
        let expected = CMat::from_row_slice(2, 4, &[c(1., 0.), c(0., 0.), c(0., 0.), c(0., 0.), c(0., 0.), c(0., 0.), c(0., 0.), c(1., 0.)]);
        assert!(linalg::max_abs(&(&rep.lambda_ext - expected)) < 1e-14);
        let a = Element::from_vec(vec![c(2.0, 0.0), c(5.0, 1.0), c(-1.0, 0.0), c(0.0, 3.0)]);
        let pa = rep.pi_of(&a);
        assert!((pa[(0, 0)] - c(2.0, 0.0)).norm() < 1e-14);
        assert!((pa[(1, 1)] - c(0.0, 3.0)).norm() < 1e-14);
        assert!(pa[(0, 1)].norm() < 1e-14 && pa[(1, 0)].norm() < 1e-14);
        let xi = rep.cyclic.clone().unwrap();
        assert!((xi[0] - c(1.0, 0.0)).norm() < 1e-14 && (xi[1] - c(1.0, 0.0)).norm() < 1e-14);
        assert!(verify_gns(&alg, &w, &rep).all_passed());
    }

    #[test]
    fn coordinate_functional_fails_r3() {
        let alg = fixtures::qm2();
        let w = LinearFunctional::new("a12", Element::basis(4, 1).into_coords());
        let r = check_representable(&alg, &w, &fixtures::diagonals(&alg)).unwrap();
        assert!(r.r1);
        assert!(linalg::max_abs(&r.q) == 0.0);
        assert!(!r.r3);
        assert!(r.report.get("R3").unwrap().detail.contains("E21"));
        assert!(matches!(gns_construct(&alg, &w, &fixtures::diagonals(&alg)), Err(Error::NotRepresentable(_))));
    }

    #[test]
    fn zero_functional_gives_empty_rep() {
        let alg = fixtures::qm2();
        let w = LinearFunctional::new("0", CVec::zeros(4));
        let rep = gns_construct(&alg, &w, &fixtures::diagonals(&alg)).unwrap();
        assert_eq!(rep.rank(), 0);
        assert!(verify_gns(&alg, &w, &rep).all_passed());
    }

    #[test]
    fn embeddings() {
        let alg = fixtures::qm2();
        let w = fixtures::trace_functional(&alg);
        let e11 = Subspace::coordinate("e11", 4, &[0]);
        let diag = fixtures::diagonals(&alg);
        let emb = embed_subrep(&alg, &w, &e11, &diag).unwrap();
        assert_eq!(emb.u.shape(), (2, 1));
        assert!((emb.u[(0, 0)] - c(1.0, 0.0)).norm() < 1e-14 && emb.u[(1, 0)].norm() < 1e-14);
        assert!(emb.report.all_passed());
        let same = embed_subrep(&alg, &w, &diag, &diag).unwrap();
        assert!(linalg::max_abs(&(same.u.adjoint() * &same.u - CMat::identity(2, 2))) < 1e-14);
        assert!(matches!(embed_subrep(&alg, &w, &diag, &e11), Err(Error::NotNested)));

        let full = fixtures::full2();
        let tr = fixtures::trace_functional(&full);
        let emb = embed_subrep(&full, &tr, &fixtures::diagonals(&full), &Subspace::whole("all", 4)).unwrap();
        assert_eq!(emb.u.shape(), (4, 2));
        assert!(emb.report.all_passed(), "{:?}", emb.report);
    }
}
