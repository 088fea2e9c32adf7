#![allow(dead_code)]

use pstar_gns::fixtures;
use pstar_gns::linalg::{CMat, CVec, C64};
use pstar_gns::{Element, LinearFunctional, PartialStarAlgebra, SesquiForm};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn diag(v: &[f64]) -> CMat {
    CMat::from_diagonal(&CVec::from_iterator(v.len(), v.iter().map(|&x| c(x, 0.0))))
}

pub fn random_c(rng: &mut ChaCha8Rng) -> C64 {
    c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

pub fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> CVec {
    CVec::from_iterator(n, (0..n).map(|_| random_c(rng)))
}

pub fn random_element(rng: &mut ChaCha8Rng, n: usize) -> Element {
    Element::from_coords(random_vec(rng, n))
}

/// `G Gᴴ` for a random `n x rank` matrix `G`.
pub fn random_psd(rng: &mut ChaCha8Rng, n: usize, rank: usize) -> CMat {
    let g = CMat::from_fn(n, rank, |_, _| random_c(rng));
    &g * g.adjoint()
}

/// Unit-trace positive 2x2 matrix of the given rank.
pub fn random_density(rng: &mut ChaCha8Rng, rank: usize) -> CMat {
    let rho = random_psd(rng, 2, rank);
    let tr = rho.trace();
    rho / tr
}

/// `ω(a) = tr(ρ a)` in matrix-unit coordinates: `ω(E_ij) = ρ_ji`.
pub fn density_functional(rho: &CMat) -> LinearFunctional {
    let size = rho.nrows();
    let w = CVec::from_iterator(size * size, (0..size * size).map(|k| rho[(k % size, k / size)]));
    LinearFunctional::new("ρ", w)
}

/// An element of `M_2` as a 2x2 matrix, bypassing the algebra's product.
pub fn as_matrix(a: &Element) -> CMat {
    CMat::from_fn(2, 2, |i, j| a.coords()[2 * i + j])
}

/// Positive forms on QM2 for which the diagonals are a pre-core:
/// `P = [[α, c, 0, 0], [c̄, p22, p23, 0], [0, p32, p33, c], [0, 0, c̄, δ]]` with
/// the (E12, E21) block dominating `diag(|c|²/α, |c|²/δ)`.
pub fn random_qm2_precore_form(rng: &mut ChaCha8Rng) -> SesquiForm {
    let alpha = rng.random_range(0.2..2.0);
    let delta = rng.random_range(0.2..2.0);
    let cc = random_c(rng);
    let rank = rng.random_range(0..=2);
    let s = random_psd(rng, 2, rank);
    let mut p = CMat::zeros(4, 4);
    p[(0, 0)] = c(alpha, 0.0);
    p[(3, 3)] = c(delta, 0.0);
    p[(0, 1)] = cc;
    p[(1, 0)] = cc.conj();
    p[(2, 3)] = cc;
    p[(3, 2)] = cc.conj();
    p[(1, 1)] = s[(0, 0)] + cc.norm_sqr() / alpha;
    p[(2, 2)] = s[(1, 1)] + cc.norm_sqr() / delta;
    p[(1, 2)] = s[(0, 1)];
    p[(2, 1)] = s[(1, 0)];
    SesquiForm::new("random", p)
}

pub fn both() -> [(&'static str, PartialStarAlgebra); 2] {
    [("FULL2", fixtures::full2()), ("QM2", fixtures::qm2())]
}
