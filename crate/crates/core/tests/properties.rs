mod common;

use common::*;
use pstar_gns::algebra::{involve, is_multipliable, multiplier_space, multiply, universal_multipliers, validate_algebra, Side};
use pstar_gns::decompose::{decompose_form, ips_part_with_rep};
use pstar_gns::fixtures;
use pstar_gns::forms::{check_core, compress_form, form_null_space, gns_quotient};
use pstar_gns::gns::{check_representable, embed_subrep, gns_construct};
use pstar_gns::linalg::{self, CMat, CVec, C64};
use pstar_gns::regularity::{quasi_regularity_check, rep_from_ips, span_escape, vector_form, Representation, RepSource, Verdict};
use pstar_gns::{Element, PartialStarAlgebra, SesquiForm, Subspace};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-9;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn coords() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-2.0..2.0f64, -2.0..2.0f64), 4)
}

fn element(v: &[(f64, f64)]) -> Element {
    Element::from_vec(v.iter().map(|&(re, im)| c(re, im)).collect())
}

/// A random element supported on a random subset of the basis.
fn sparse_element(rng: &mut ChaCha8Rng) -> Element {
    use rand::Rng;
    let mut v = random_vec(rng, 4);
    for z in v.iter_mut() {
        if rng.random_bool(0.4) {
            *z = C64::default();
        }
    }
    Element::from_coords(v)
}

fn algebra(which: bool) -> PartialStarAlgebra {
    if which {
        fixtures::qm2()
    } else {
        fixtures::full2()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn involution_is_involutive(v in coords(), which in any::<bool>()) {
        let alg = algebra(which);
        let x = element(&v);
        prop_assert_eq!(involve(&alg, &involve(&alg, &x)), x);
    }

    #[test]
    fn product_involution_law(seed in any::<u64>(), which in any::<bool>()) {
        let alg = algebra(which);
        let mut r = rng(seed);
        let (x, y) = (sparse_element(&mut r), sparse_element(&mut r));
        if let Ok(xy) = multiply(&alg, &x, &y) {
            let rhs = multiply(&alg, &involve(&alg, &y), &involve(&alg, &x)).expect("Γ is involution-symmetric");
            prop_assert!(involve(&alg, &xy).deviation(&rhs) <= TOL);
        }
    }

    #[test]
    fn multiply_is_bilinear(seed in any::<u64>(), which in any::<bool>(), a in (-2.0..2.0f64, -2.0..2.0f64), b in (-2.0..2.0f64, -2.0..2.0f64)) {
        let alg = algebra(which);
        let mut r = rng(seed);
        let (x, x2, y) = (sparse_element(&mut r), sparse_element(&mut r), sparse_element(&mut r));
        let (a, b) = (c(a.0, a.1), c(b.0, b.1));
        let combo = x.scale(a) + x2.scale(b);
        if let (Ok(p), Ok(q), Ok(lhs)) = (multiply(&alg, &x, &y), multiply(&alg, &x2, &y), multiply(&alg, &combo, &y)) {
            prop_assert!(lhs.deviation(&(p.scale(a) + q.scale(b))) <= TOL);
        }
    }

    #[test]
    fn multiplier_spaces_are_closed_under_sums(seed in any::<u64>(), which in any::<bool>()) {
        let alg = algebra(which);
        let mut r = rng(seed);
        let y = sparse_element(&mut r);
        for side in [Side::Left, Side::Right] {
            let l = multiplier_space(&alg, &y, side);
            let x = l.combine(&random_vec(&mut r, l.dim()));
            let x2 = l.combine(&random_vec(&mut r, l.dim()));
            prop_assert!(l.contains(&(x.clone() + x2.clone()), TOL));
            let defined = match side {
                Side::Left => is_multipliable(&alg, &(x + x2), &y),
                Side::Right => is_multipliable(&alg, &y, &(x + x2)),
            };
            prop_assert!(defined);
        }
    }

    #[test]
    fn null_space_characterizations_agree(seed in any::<u64>(), rank in 0usize..=4) {
        let mut r = rng(seed);
        let f = SesquiForm::new("f", random_psd(&mut r, 4, rank));
        let n = form_null_space(&f, TOL).unwrap();
        prop_assert_eq!(n.dim(), 4 - rank);
        let scale = linalg::spectral_norm(f.matrix()).max(1.0);
        for x in n.basis_elements() {
            // P x = 0 and φ(x, y) = 0 for all basis y
            prop_assert!((f.matrix() * x.coords()).norm() <= 1e-7 * scale);
            for m in 0..4 {
                prop_assert!(f.eval(&x, &Element::basis(4, m)).norm() <= 1e-7 * scale);
            }
        }
    }

    #[test]
    fn quotient_norm_is_form_value(seed in any::<u64>(), rank in 0usize..=4) {
        let mut r = rng(seed);
        let f = SesquiForm::new("f", random_psd(&mut r, 4, rank));
        let q = gns_quotient(&f, &Subspace::whole("all", 4), TOL).unwrap();
        let x = random_element(&mut r, 4);
        let lhs = q.lambda(&x).norm_squared();
        let rhs = f.eval(&x, &x).re;
        prop_assert!((lhs - rhs).abs() <= 1e-9 * rhs.abs().max(1.0));
    }

    #[test]
    fn compression_preserves_positivity(seed in any::<u64>(), rank in 0usize..=4, which in any::<bool>()) {
        let alg = algebra(which);
        let mut r = rng(seed);
        let f = SesquiForm::new("f", random_psd(&mut r, 4, rank));
        let ra = universal_multipliers(&alg, Side::Right);
        let x = ra.combine(&random_vec(&mut r, ra.dim()));
        let fx = compress_form(&alg, &f, &x).unwrap();
        let min = linalg::eigh(fx.matrix()).0[0];
        prop_assert!(min >= -1e-9 * linalg::spectral_norm(fx.matrix()).max(1.0));
    }

    #[test]
    fn core_tests_agree(seed in any::<u64>(), rank in 0usize..=4, which in any::<bool>(), bdim in 1usize..=4) {
        let alg = algebra(which);
        let mut r = rng(seed);
        let f = SesquiForm::new("f", random_psd(&mut r, 4, rank));
        let ra = universal_multipliers(&alg, Side::Right);
        let vecs: Vec<CVec> = (0..bdim.min(ra.dim())).map(|_| ra.combine(&random_vec(&mut r, ra.dim())).into_coords()).collect();
        let b = Subspace::span("B", 4, &vecs, TOL);
        let report = check_core(&alg, &f, &b).unwrap();
        prop_assert_eq!(report.is_core, report.orthocomplement_trivial);
    }

    #[test]
    fn gns_identities(seed in any::<u64>(), which in any::<bool>(), rank in 1usize..=2) {
        let alg = algebra(which);
        let mut r = rng(seed);
        let w = density_functional(&random_density(&mut r, rank));
        let b = if which { fixtures::diagonals(&alg) } else { Subspace::whole("all", 4) };
        let repr = check_representable(&alg, &w, &b).unwrap();
        prop_assert!(repr.holds());
        let rep = gns_construct(&alg, &w, &b).unwrap();
        // λ restricted to B is the quotient map
        for x in b.basis_elements() {
            prop_assert!((rep.lambda(&x) - rep.quotient.lambda(&x)).norm() <= 1e-12);
        }
        // γ_a = ‖λ(a)‖
        for a in 0..4 {
            prop_assert!((repr.gammas[a].unwrap() - rep.lambda(&alg.basis(a)).norm()).abs() <= 1e-9);
        }
        // ‖λ(a)‖ = sup{|ω(a*x)| : ω(x*x) = 1, x ∈ B}, attained at x with λ(x) ∝ λ(a)
        let a = random_element(&mut r, 4);
        let la = rep.lambda(&a);
        if la.norm() > 1e-6 {
            let coeffs = linalg::lstsq(&rep.quotient.factor, &CMat::from_column_slice(la.len(), 1, la.as_slice()), TOL);
            let x = b.combine(&coeffs.column(0).into_owned());
            let xx = w.eval(&multiply(&alg, &involve(&alg, &x), &x).unwrap()).re;
            let ax = w.eval(&multiply(&alg, &involve(&alg, &a), &x).unwrap()).norm();
            prop_assert!((ax / xx.sqrt() - la.norm()).abs() <= 1e-8 * la.norm().max(1.0));
        }
        // N_ω = {x : ω(x*x) = 0} = {x : ω(y*x) = 0 ∀y ∈ B}
        let kernel = linalg::null_space(&repr.q, TOL);
        for k in 0..kernel.ncols() {
            let x = b.combine(&kernel.column(k).into_owned());
            for y in b.basis_elements() {
                prop_assert!(w.eval(&multiply(&alg, &involve(&alg, &y), &x).unwrap()).norm() <= 1e-9);
            }
        }
    }

    #[test]
    fn subrepresentations_embed_into_ra(seed in any::<u64>(), rank in 1usize..=2) {
        let alg = fixtures::qm2();
        let mut r = rng(seed);
        let w = density_functional(&random_density(&mut r, rank));
        let ra = universal_multipliers(&alg, Side::Right);
        for b in [Subspace::coordinate("e11", 4, &[0]), Subspace::coordinate("e22", 4, &[3]), ra.clone()] {
            let emb = embed_subrep(&alg, &w, &b, &ra).unwrap();
            prop_assert!(emb.report.all_passed(), "{:?}", emb.report);
        }
    }

    #[test]
    fn decomposition_invariants(seed in any::<u64>()) {
        let alg = fixtures::qm2();
        let b = fixtures::diagonals(&alg);
        let mut r = rng(seed);
        let f = random_qm2_precore_form(&mut r);
        let d = decompose_form(&alg, &f, &b).unwrap();
        prop_assert!(d.consistent(), "{:?}", d.checks.failures().collect::<Vec<_>>());
        for _ in 0..10 {
            let a = random_element(&mut r, 4);
            prop_assert!(d.ips.eval(&a, &a).re <= f.eval(&a, &a).re + 1e-9);
        }
    }

    #[test]
    fn vector_forms(seed in any::<u64>(), which in any::<bool>()) {
        let alg = algebra(which);
        let rep = fixtures::defining_representation(&alg);
        let mut r = rng(seed);
        let xi = random_vec(&mut r, 2);
        let f = vector_form(&alg, &rep, &xi).unwrap();
        prop_assert!(linalg::eigh(f.matrix()).0[0] >= -1e-12);
        let q = gns_quotient(&f, &Subspace::whole("all", 4), TOL).unwrap();
        let a = random_element(&mut r, 4);
        let lhs = q.lambda(&a).norm();
        let rhs = (rep.pi(&a) * &xi).norm();
        prop_assert!((lhs - rhs).abs() <= 1e-9 * rhs.max(1.0));
    }

    #[test]
    fn span_escape_is_scale_invariant(seed in any::<u64>(), scale in (0.01..100.0f64, -3.0..3.0f64)) {
        let alg = fixtures::full2();
        let rep = fixtures::defining_representation(&alg);
        let mut r = rng(seed);
        let xi = random_vec(&mut r, 2);
        let cxi = &xi * c(scale.0, scale.1);
        for b in [fixtures::diagonals(&alg), Subspace::coordinate("e11", 4, &[0]), Subspace::whole("all", 4)] {
            prop_assert_eq!(span_escape(&rep, &b, &xi, TOL), span_escape(&rep, &b, &cxi, TOL));
        }
    }

    #[test]
    fn ips_rep_reproduces_gns_inner_products(seed in any::<u64>()) {
        let alg = fixtures::qm2();
        let b = fixtures::diagonals(&alg);
        let mut r = rng(seed);
        let f = random_qm2_precore_form(&mut r);
        let (omega, gns) = ips_part_with_rep(&alg, &f, &b).unwrap();
        let rep = rep_from_ips(&alg, &omega, &b).unwrap();
        let gns_rep = Representation::new(&alg, gns.pi.clone(), RepSource::Gns).unwrap();
        // cyclic vector of π° is λ_Ω(e); compare all ⟨π(a)ξ, π(b)ξ⟩
        let (_, g) = linalg::psd_rank_factor(omega.matrix(), TOL);
        let xi = &g * alg.unit().unwrap().coords();
        let lhs = vector_form(&alg, &rep, &xi).unwrap();
        let rhs = vector_form(&alg, &gns_rep, gns.cyclic.as_ref().unwrap()).unwrap();
        prop_assert!(linalg::max_abs(&(lhs.matrix() - rhs.matrix())) <= 1e-9 * linalg::max_abs(f.matrix()).max(1.0));
    }
}

#[test]
fn units_act_trivially() {
    for (_, alg) in both() {
        let e = alg.unit().unwrap();
        for a in 0..4 {
            let ea = alg.basis(a);
            assert_eq!(multiply(&alg, e, &ea).unwrap(), ea);
            assert_eq!(multiply(&alg, &ea, e).unwrap(), ea);
        }
    }
}

#[test]
fn ra_star_is_la() {
    for (_, alg) in both() {
        let la = universal_multipliers(&alg, Side::Left);
        for y in universal_multipliers(&alg, Side::Right).basis_elements() {
            assert!(la.contains(&involve(&alg, &y), TOL));
        }
    }
}

#[test]
fn every_structure_perturbation_is_detected() {
    let base = fixtures::qm2().to_parts();
    let mut checked = 0;
    for i in 0..4 {
        for j in 0..4 {
            if !base.gamma[i][j] {
                continue;
            }
            for k in 0..4 {
                for delta in [c(0.5, 0.0), c(0.0, 0.5)] {
                    let mut p = base.clone();
                    *p.structure.entry((i, j)).or_insert_with(|| CVec::zeros(4)).index_mut(k) += delta;
                    let alg = PartialStarAlgebra::from_parts(p).unwrap();
                    assert!(!validate_algebra(&alg).all_passed(), "e{}e{} coordinate {} += {delta}", i + 1, j + 1, k + 1);
                    checked += 1;
                }
            }
        }
    }
    assert_eq!(checked, 96);
}

#[test]
fn matrix_span_yes_implies_sampled_yes() {
    let full = fixtures::full2();
    let rep = fixtures::defining_representation(&full);
    let q = quasi_regularity_check(&full, &rep, &Subspace::whole("all", 4), 32, 7).unwrap();
    assert_eq!(q.verdict, Verdict::Yes);
    assert!(q.consistent && q.witness.is_none());
    assert_eq!(q.vectors_checked, 34);
}

#[test]
fn witness_for_a_single_matrix_unit() {
    // at ξ = (1, 0): π(E11)ξ = ξ, π(E12)ξ = 0, π(E21)ξ = (0, 1) escapes
    let full = fixtures::full2();
    let rep = fixtures::defining_representation(&full);
    let q = quasi_regularity_check(&full, &rep, &Subspace::coordinate("e11", 4, &[0]), 8, 1).unwrap();
    assert_eq!(q.verdict, Verdict::No);
    assert_eq!(q.witness.unwrap(), CVec::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]));
    assert_eq!(q.witness_element, Some(2));
}

#[test]
fn sampled_verdict_without_certificate() {
    // B = span{e, E12, E21}: the matrix span misses E11 - E22, yet
    // {ξ, (ξ₂, 0), (0, ξ₁)} spans C² for every ξ ≠ 0.
    let full = fixtures::full2();
    let rep = fixtures::defining_representation(&full);
    let vecs = [full.unit().unwrap().coords().clone(), full.basis(1).into_coords(), full.basis(2).into_coords()];
    let b = Subspace::span("B", 4, &vecs, TOL);
    let q = quasi_regularity_check(&full, &rep, &b, 32, 3).unwrap();
    assert!(!q.matrix_span);
    assert_eq!(q.verdict, Verdict::YesSampled);
    assert_eq!(q.precore_failures, 0);
}
