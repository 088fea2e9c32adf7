//! Matrix-unit algebras used throughout the tests and shipped as example files.
//!
//! Basis order is row-major: for 2x2 matrices `E11, E12, E21, E22`.

use std::collections::BTreeMap;

use crate::algebra::{AlgebraParts, Element, PartialStarAlgebra, DEFAULT_TOL};
use crate::document::{AlgebraDocument, NamedObjects};
use crate::forms::{LinearFunctional, SesquiForm};
use crate::linalg::{CMat, CVec, C64, ONE};
use crate::regularity::{RepSource, Representation};
use crate::subspace::Subspace;

fn unit_index(size: usize, i: usize, j: usize) -> usize {
    i * size + j
}

/// Matrix units `E_ij` of `M_size`, with `(E_ij, E_kl) ∈ Γ` iff `universal`
/// is `None` or one of the two indices lies in it.
pub fn matrix_units(size: usize, universal: Option<&[usize]>) -> PartialStarAlgebra {
    let n = size * size;
    let mut names = Vec::with_capacity(n);
    let mut perm = vec![0; n];
    for i in 0..size {
        for j in 0..size {
            names.push(format!("E{}{}", i + 1, j + 1));
            perm[unit_index(size, i, j)] = unit_index(size, j, i);
        }
    }
    let gamma: Vec<Vec<bool>> = (0..n)
        .map(|a| {
            (0..n)
                .map(|b| universal.map_or(true, |u| u.contains(&a) || u.contains(&b)))
                .collect()
        })
        .collect();
    let mut structure = BTreeMap::new();
    for i in 0..size {
        for j in 0..size {
            for k in 0..size {
                for l in 0..size {
                    let (a, b) = (unit_index(size, i, j), unit_index(size, k, l));
                    if !gamma[a][b] {
                        continue;
                    }
                    let v = if j == k {
                        Element::basis(n, unit_index(size, i, l)).into_coords()
                    } else {
                        CVec::zeros(n)
                    };
                    structure.insert((a, b), v);
                }
            }
        }
    }
    let mut unit = CVec::zeros(n);
    for i in 0..size {
        unit[unit_index(size, i, i)] = ONE;
    }
    PartialStarAlgebra::from_parts(AlgebraParts {
        basis_names: names,
        perm,
        phases: vec![ONE; n],
        gamma,
        structure,
        unit: Some(unit),
        tol: DEFAULT_TOL,
    })
    .expect("matrix-unit algebra is well formed")
}

/// The full 2x2 matrix algebra.
pub fn full2() -> PartialStarAlgebra {
    matrix_units(2, None)
}

/// 2x2 matrix units where a product is defined iff one factor is diagonal.
pub fn qm2() -> PartialStarAlgebra {
    matrix_units(2, Some(&[0, 3]))
}

pub fn diagonals(alg: &PartialStarAlgebra) -> Subspace {
    Subspace::coordinate("diag", alg.dim(), &[0, 3])
}

pub fn trace_form(alg: &PartialStarAlgebra) -> SesquiForm {
    SesquiForm::new("trace", CMat::identity(alg.dim(), alg.dim()))
}

pub fn trace_functional(alg: &PartialStarAlgebra) -> LinearFunctional {
    let size = (alg.dim() as f64).sqrt().round() as usize;
    let mut w = CVec::zeros(alg.dim());
    for i in 0..size {
        w[unit_index(size, i, i)] = ONE;
    }
    LinearFunctional::new("trace", w)
}

/// `π(a) = a` acting on `C^size`.
pub fn defining_representation(alg: &PartialStarAlgebra) -> Representation {
    let size = (alg.dim() as f64).sqrt().round() as usize;
    let matrices = (0..alg.dim())
        .map(|a| {
            let mut m = CMat::zeros(size, size);
            m[(a / size, a % size)] = ONE;
            m
        })
        .collect();
    Representation::new(alg, matrices, RepSource::User).expect("matrix sizes agree")
}

fn diag(values: &[f64]) -> CMat {
    CMat::from_diagonal(&CVec::from_iterator(values.len(), values.iter().map(|&v| C64::new(v, 0.0))))
}

fn full2_objects(alg: &PartialStarAlgebra) -> NamedObjects {
    let mut objects = NamedObjects::default();
    objects.forms.insert("trace".into(), trace_form(alg));
    // vector form of the defining representation at ξ = (1, 1)
    let xi = CVec::from_vec(vec![ONE, ONE]);
    let vec11 = crate::regularity::vector_form(alg, &defining_representation(alg), &xi)
        .expect("dimensions agree")
        .with_label("vec11");
    objects.forms.insert("vec11".into(), vec11);
    objects.functionals.insert("trace".into(), trace_functional(alg));
    objects.subspaces.insert("all".into(), Subspace::whole("all", alg.dim()));
    objects.subspaces.insert("diag".into(), diagonals(alg));
    objects.subspaces.insert("e11".into(), Subspace::coordinate("e11", alg.dim(), &[0]));
    objects
}

fn qm2_objects(alg: &PartialStarAlgebra) -> NamedObjects {
    let mut objects = NamedObjects::default();
    objects.forms.insert("trace".into(), trace_form(alg));
    objects.functionals.insert("trace".into(), trace_functional(alg));
    objects
        .functionals
        .insert("a12".into(), LinearFunctional::new("a12", Element::basis(alg.dim(), 1).into_coords()));
    objects.subspaces.insert("diag".into(), diagonals(alg));
    objects.subspaces.insert("e11".into(), Subspace::coordinate("e11", alg.dim(), &[0]));
    objects.subspaces.insert("e12".into(), Subspace::coordinate("e12", alg.dim(), &[1]));
    objects
}

pub fn full2_document() -> AlgebraDocument {
    let alg = full2();
    AlgebraDocument::from_parts(&alg, &full2_objects(&alg))
}

pub fn qm2_document() -> AlgebraDocument {
    let alg = qm2();
    AlgebraDocument::from_parts(&alg, &qm2_objects(&alg))
}

/// QM2 with the trace form split by hand into its ips part `diag(1,0,0,1)`
/// and singular part `diag(0,1,1,0)`.
pub fn qm2_singular_document() -> AlgebraDocument {
    let alg = qm2();
    let mut objects = qm2_objects(&alg);
    objects.forms.insert("ips".into(), SesquiForm::new("ips", diag(&[1.0, 0.0, 0.0, 1.0])));
    objects.forms.insert("singular".into(), SesquiForm::new("singular", diag(&[0.0, 1.0, 1.0, 0.0])));
    AlgebraDocument::from_parts(&alg, &objects)
}

/// The shipped example files, by file name.
pub fn shipped() -> Vec<(&'static str, AlgebraDocument)> {
    vec![
        ("full2.json", full2_document()),
        ("qm2.json", qm2_document()),
        ("qm2-singular.json", qm2_singular_document()),
    ]
}
