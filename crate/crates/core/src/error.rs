//! Crate-wide error type.
//!
//! Every fallible operation returns one of these variants; the CLI maps them
//! onto its exit-code contract (invalid input vs. domain-contract violation).

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Root system rank below the minimum (sl(n) needs n >= 2).
    #[error("invalid rank: {0}")]
    InvalidRank(String),

    /// Vector or matrix dimensions do not match the expected shape.
    #[error("dimension mismatch: {0}")]
    DimensionError(String),

    /// An internal invariant that valid inputs cannot violate was violated.
    #[error("internal error: {0}")]
    InternalError(String),

    /// Matrix is not a usable group element (non-finite, singular, det != 1).
    #[error("invalid group element: {0}")]
    InvalidElement(String),

    /// Eigenvalue structure too close to degenerate to decompose reliably;
    /// the decomposition is refused rather than returned silently wrong.
    #[error("ill-conditioned input: {0}")]
    IllConditioned(String),

    /// Element has a nontrivial elliptic part, so it is not conjugate into NA.
    #[error("elliptic obstruction: {0}")]
    EllipticObstruction(String),

    /// The given span is not closed under the bracket.
    #[error("not a Lie algebra: {0}")]
    NotAnAlgebra(String),

    /// Generator lies outside the upper-triangular positive-diagonal chart.
    #[error("not in NA: {0}")]
    NotInNA(String),

    /// Tube coordinates violate their constraints (e.g. zeta product != 1).
    #[error("invalid coordinates: {0}")]
    InvalidCoordinates(String),

    /// Point is not in the tube domain.
    #[error("not in tube: {0}")]
    NotInTube(String),

    /// A pivot of the inverse formulas is too close to zero.
    #[error("degenerate pivot: {0}")]
    DegeneratePivot(String),

    /// Matrix is not a slice point of the required diagonal form.
    #[error("not on slice: {0}")]
    NotOnSlice(String),

    /// The acting element is the identity.
    #[error("degenerate action: {0}")]
    DegenerateAction(String),

    /// Symmetric-space family not present in the tables.
    #[error("unknown symmetric space: {0}")]
    UnknownSpace(String),

    /// Parameters violate the row constraints of the tables.
    #[error("parameters out of range: {0}")]
    OutOfRange(String),
}

pub type Result<T> = std::result::Result<T, Error>;
