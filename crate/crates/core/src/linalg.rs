//! Dense complex linear algebra helpers shared by the form and GNS modules.
//!
//! Rank decisions everywhere use singular values (or eigenvalues for
//! Hermitian PSD input) compared against `tol * scale`, where `scale` is the
//! largest singular value. A matrix whose largest singular value is itself
//! below `tol` is treated as the zero matrix.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// `|a - b| <= tol * max(1, |a|, |b|)`.
pub fn close(a: C64, b: C64, tol: f64) -> bool {
    (a - b).norm() <= tol * 1f64.max(a.norm()).max(b.norm())
}

/// Scaled deviation `|a - b| / max(1, |a|, |b|)`, the quantity compared by [`close`].
pub fn rel_dev(a: C64, b: C64) -> f64 {
    (a - b).norm() / 1f64.max(a.norm()).max(b.norm())
}

/// Largest entrywise deviation of `m` from its conjugate transpose.
pub fn hermitian_deviation(m: &CMat) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()) * C64::new(0.5, 0.0)
}

/// Eigen-decomposition of a Hermitian matrix with eigenvalues sorted ascending.
pub fn eigh(m: &CMat) -> (Vec<f64>, CMat) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), CMat::zeros(0, 0));
    }
    let eig = hermitian_part(m).symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMat::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

pub fn singular_values(m: &CMat) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

pub fn spectral_norm(m: &CMat) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Cutoff below which a singular value counts as zero, given the matrix scale.
pub fn rank_cutoff(scale: f64, tol: f64) -> f64 {
    if scale <= tol {
        f64::INFINITY
    } else {
        tol * scale
    }
}

/// Numerical rank with the cutoff taken relative to `scale`.
pub fn rank_with_scale(m: &CMat, scale: f64, tol: f64) -> usize {
    let cut = rank_cutoff(scale, tol);
    singular_values(m).into_iter().filter(|&s| s > cut).count()
}

pub fn rank(m: &CMat, tol: f64) -> usize {
    rank_with_scale(m, spectral_norm(m), tol)
}

/// Replaces negative eigenvalues by zero and returns whether anything changed.
/// Callers decide positivity (min eigenvalue >= -tol) before clamping.
pub fn clamp_psd(m: &CMat) -> (CMat, bool) {
    let (values, vectors) = eigh(m);
    if values.first().map_or(true, |&v| v >= 0.0) {
        return (hermitian_part(m), false);
    }
    let n = m.nrows();
    let mut d = CMat::zeros(n, n);
    for (i, v) in values.iter().enumerate() {
        d[(i, i)] = C64::new(v.max(0.0), 0.0);
    }
    (&vectors * d * vectors.adjoint(), true)
}

/// Rank-`r` factor `G` (r x n) of a Hermitian PSD matrix with `GᴴG = m`,
/// computed by diagonally pivoted outer-product Cholesky. The pivot order
/// makes the factor canonical: for diagonal or block-diagonal input the rows
/// of `G` are scaled coordinate covectors.
pub fn pivoted_cholesky(m: &CMat, r: usize) -> CMat {
    let n = m.nrows();
    let mut residual = hermitian_part(m);
    let mut g = CMat::zeros(r, n);
    let mut used = vec![false; n];
    for step in 0..r {
        let mut pivot = None;
        let mut best = f64::NEG_INFINITY;
        for i in 0..n {
            if !used[i] && residual[(i, i)].re > best {
                best = residual[(i, i)].re;
                pivot = Some(i);
            }
        }
        let Some(p) = pivot else { break };
        used[p] = true;
        if best <= 0.0 {
            break;
        }
        let d = best.sqrt();
        for j in 0..n {
            g[(step, j)] = residual[(p, j)] / d;
        }
        for i in 0..n {
            for j in 0..n {
                let update = g[(step, i)].conj() * g[(step, j)];
                residual[(i, j)] -= update;
            }
        }
    }
    g
}

/// Rank and canonical factor of a Hermitian PSD matrix. The rank is read off
/// the eigenvalues with the relative cutoff.
pub fn psd_rank_factor(m: &CMat, tol: f64) -> (usize, CMat) {
    let (clamped, _) = clamp_psd(m);
    let (values, _) = eigh(&clamped);
    let scale = values.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let cut = rank_cutoff(scale, tol);
    let r = values.iter().filter(|&&v| v > cut).count();
    (r, pivoted_cholesky(&clamped, r))
}

/// Orthonormal basis of the null space of `m` (columns), via a full SVD.
pub fn null_space(m: &CMat, tol: f64) -> CMat {
    let (rows, cols) = m.shape();
    if cols == 0 {
        return CMat::zeros(0, 0);
    }
    if rows == 0 {
        return CMat::identity(cols, cols);
    }
    // pad to square so that the SVD returns the full right singular basis
    let padded_rows = rows.max(cols);
    let mut padded = CMat::zeros(padded_rows, cols);
    padded.view_mut((0, 0), (rows, cols)).copy_from(m);
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let scale = svd.singular_values.iter().fold(0.0f64, |a, &s| a.max(s));
    let cut = rank_cutoff(scale, tol);
    let null: Vec<usize> = (0..cols).filter(|&i| svd.singular_values[i] <= cut).collect();
    let mut out = CMat::zeros(cols, null.len());
    for (k, &i) in null.iter().enumerate() {
        out.set_column(k, &v_t.row(i).adjoint());
    }
    out
}

/// Orthonormal basis (columns) of the column space of `m`.
pub fn range_basis(m: &CMat, scale: f64, tol: f64) -> CMat {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return CMat::zeros(rows, 0);
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let cut = rank_cutoff(scale, tol);
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > cut)
        .collect();
    let mut out = CMat::zeros(rows, keep.len());
    for (k, &i) in keep.iter().enumerate() {
        out.set_column(k, &u.column(i));
    }
    out
}

/// Minimal-norm least-squares solution of `a X = b`.
pub fn lstsq(a: &CMat, b: &CMat, tol: f64) -> CMat {
    let (rows, cols) = a.shape();
    if rows == 0 || cols == 0 {
        return CMat::zeros(cols, b.ncols());
    }
    let svd = a.clone().svd(true, true);
    let scale = svd.singular_values.iter().fold(0.0f64, |acc, &s| acc.max(s));
    let cut = rank_cutoff(scale, tol);
    let eps = if cut.is_finite() { cut } else { f64::MAX };
    svd.solve(b, eps).expect("singular vectors requested")
}

/// Moore-Penrose pseudo-inverse with the relative rank cutoff.
pub fn pinv(a: &CMat, tol: f64) -> CMat {
    lstsq(a, &CMat::identity(a.nrows(), a.nrows()), tol)
}

/// Modified Gram-Schmidt. Input columns whose residual norm falls below
/// `tol` times their original norm are dropped. Coordinates that are exactly
/// zero in every input column stay exactly zero in the output.
pub fn orthonormalize(columns: &[CVec], tol: f64) -> Vec<CVec> {
    let mut basis: Vec<CVec> = Vec::new();
    for col in columns {
        let original = col.norm();
        if original == 0.0 {
            continue;
        }
        let mut v = col.clone();
        for _ in 0..2 {
            for q in &basis {
                let c = q.dotc(&v);
                if c != ZERO {
                    v -= q * c;
                }
            }
        }
        let norm = v.norm();
        if norm > tol * original.max(1.0) {
            basis.push(v / C64::new(norm, 0.0));
        }
    }
    basis
}

pub fn columns_to_matrix(rows: usize, cols: &[CVec]) -> CMat {
    let mut m = CMat::zeros(rows, cols.len());
    for (j, c) in cols.iter().enumerate() {
        m.set_column(j, c);
    }
    m
}

/// Largest entry modulus.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn pivoted_cholesky_of_diagonal_picks_coordinate_rows() {
        let p = CMat::from_diagonal(&CVec::from_vec(vec![c(1.0), c(0.0), c(0.0), c(4.0)]));
        let (r, g) = psd_rank_factor(&p, 1e-9);
        assert_eq!(r, 2);
        assert!((g[(0, 3)] - c(2.0)).norm() < 1e-15);
        assert!((g[(1, 0)] - c(1.0)).norm() < 1e-15);
        assert!(max_abs(&(g.adjoint() * &g - p)) < 1e-14);
    }

    #[test]
    fn null_space_of_wide_matrix() {
        let m = CMat::from_row_slice(1, 3, &[c(1.0), c(1.0), c(0.0)]);
        let k = null_space(&m, 1e-9);
        assert_eq!(k.ncols(), 2);
        assert!(max_abs(&(&m * &k)) < 1e-14);
    }

    #[test]
    fn gram_schmidt_keeps_zero_pattern() {
        let a = CVec::from_vec(vec![c(1.0), c(0.0), c(0.0), c(1.0)]);
        let b = CVec::from_vec(vec![c(1.0), c(0.0), c(0.0), c(-3.0)]);
        let q = orthonormalize(&[a.clone(), b, a], 1e-9);
        assert_eq!(q.len(), 2);
        for v in &q {
            assert_eq!(v[1], ZERO);
            assert_eq!(v[2], ZERO);
        }
    }

    #[test]
    fn clamp_removes_tiny_negative_eigenvalue() {
        let p = CMat::from_diagonal(&CVec::from_vec(vec![c(1.0), c(-1e-12)]));
        let (q, clamped) = clamp_psd(&p);
        assert!(clamped);
        assert!(eigh(&q).0[0] >= 0.0);
    }

    #[test]
    fn lstsq_is_minimal_norm() {
        let a = CMat::from_row_slice(1, 2, &[c(1.0), c(1.0)]);
        let b = CMat::from_row_slice(1, 1, &[c(2.0)]);
        let x = lstsq(&a, &b, 1e-9);
        assert!((x[(0, 0)] - c(1.0)).norm() < 1e-14);
        assert!((x[(1, 0)] - c(1.0)).norm() < 1e-14);
    }
}
