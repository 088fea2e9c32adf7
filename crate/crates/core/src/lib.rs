//! Finite-dimensional partial *-algebras: multiplier spaces, the GNS
//! construction for representable functionals, pre-cores and cores of
//! positive sesquilinear forms, the ips/singular decomposition, and
//! quasi-regularity of *-representations.
//!
//! Conventions: elements are coordinate vectors over a fixed basis, a form is
//! a Hermitian matrix `P` with `φ(x, y) = yᴴ P x` (linear in the first
//! argument), and a functional is a covector `w` with `ω(x) = Σ wᵢ xᵢ`.

pub mod algebra;
pub mod decompose;
pub mod document;
pub mod error;
pub mod fixtures;
pub mod forms;
pub mod gns;
pub mod linalg;
pub mod regularity;
pub mod report;
pub mod subspace;

pub use algebra::{Element, PartialStarAlgebra, Side};
pub use error::{Error, Result};
pub use forms::{LinearFunctional, SesquiForm};
pub use gns::GnsRep;
pub use regularity::Representation;
pub use report::{Check, ConditionReport};
pub use subspace::Subspace;
