use crate::algebra::Element;
use crate::linalg::{self, CMat, CVec};

/// A subspace of the algebra (or of a representation space), stored as an
/// orthonormal column basis.
///
/// Orthonormalization is modified Gram-Schmidt, so a coordinate that is zero
/// in every spanning vector stays exactly zero in the basis. Support-based
/// multipliability of basis vectors is therefore never spoiled by rounding.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    basis: CMat,
    label: String,
}

impl Subspace {
    pub fn span(label: impl Into<String>, ambient: usize, vectors: &[CVec], tol: f64) -> Self {
        let q = linalg::orthonormalize(vectors, tol);
        Self { basis: linalg::columns_to_matrix(ambient, &q), label: label.into() }
    }

    pub fn span_elements(label: impl Into<String>, ambient: usize, elems: &[Element], tol: f64) -> Self {
        let vecs: Vec<CVec> = elems.iter().map(|e| e.coords().clone()).collect();
        Self::span(label, ambient, &vecs, tol)
    }

    /// Span of the listed coordinate vectors `e_i` (0-based).
    pub fn coordinate(label: impl Into<String>, ambient: usize, indices: &[usize]) -> Self {
        let vecs: Vec<CVec> = indices.iter().map(|&i| Element::basis(ambient, i).into_coords()).collect();
        Self::span(label, ambient, &vecs, 0.0)
    }

    pub fn whole(label: impl Into<String>, ambient: usize) -> Self {
        Self::coordinate(label, ambient, &(0..ambient).collect::<Vec<_>>())
    }

    pub fn zero(label: impl Into<String>, ambient: usize) -> Self {
        Self { basis: CMat::zeros(ambient, 0), label: label.into() }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    /// Orthonormal basis as columns.
    pub fn basis(&self) -> &CMat {
        &self.basis
    }

    pub fn basis_vector(&self, i: usize) -> Element {
        Element::from_coords(self.basis.column(i).into_owned())
    }

    pub fn basis_elements(&self) -> Vec<Element> {
        (0..self.dim()).map(|i| self.basis_vector(i)).collect()
    }

    pub fn project(&self, x: &CVec) -> CVec {
        &self.basis * (self.basis.adjoint() * x)
    }

    /// `‖x - proj x‖ <= tol ‖x‖`.
    pub fn contains_vec(&self, x: &CVec, tol: f64) -> bool {
        (x - self.project(x)).norm() <= tol * x.norm()
    }

    pub fn contains(&self, x: &Element, tol: f64) -> bool {
        self.contains_vec(x.coords(), tol)
    }

    pub fn is_subspace_of(&self, other: &Subspace, tol: f64) -> bool {
        (0..self.dim()).all(|i| other.contains_vec(&self.basis.column(i).into_owned(), tol))
    }

    /// Union of the supports of the basis vectors.
    pub fn support(&self) -> Vec<usize> {
        (0..self.ambient_dim())
            .filter(|&i| (0..self.dim()).any(|j| self.basis[(i, j)] != linalg::ZERO))
            .collect()
    }

    /// Random element `Σ c_j b_j` with the given coefficients.
    pub fn combine(&self, coeffs: &CVec) -> Element {
        Element::from_coords(&self.basis * coeffs)
    }
}
