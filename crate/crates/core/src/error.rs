use thiserror::Error;

/// A product `e_left · e_right` of basis elements outside the multipliability
/// table. Indices are 0-based; `Display` prints them 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("product e{} · e{} is not defined", .left + 1, .right + 1)]
pub struct Undefined {
    pub left: usize,
    pub right: usize,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("malformed input: {0}")]
    MalformedInput(String),
    #[error(transparent)]
    UndefinedProduct(#[from] Undefined),
    #[error("matrix is not Hermitian (deviation {0:.3e})")]
    NonHermitian(f64),
    #[error("form is not positive (minimum eigenvalue {0:.3e})")]
    NotPositive(f64),
    #[error("element is not a universal right multiplier")]
    NotUniversalMultiplier,
    #[error("functional is not representable on this subspace: {0}")]
    NotRepresentable(String),
    #[error("first subspace is not contained in the second")]
    NotNested,
    #[error("algebra has no unit")]
    NoUnit,
    #[error("pre-core conditions violated: {0}")]
    PrecoreViolation(String),
    #[error("subspace is not a core (dim λ(B) = {rank_b}, rank = {rank_total})")]
    NotCore { rank_b: usize, rank_total: usize },
    #[error("subspace is not closed under multiplication: {0}")]
    NotAnAlgebra(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("singular part is not positive (minimum eigenvalue {0:.3e})")]
    SingularPartNotPositive(f64),
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
