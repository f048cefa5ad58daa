//! Computational toolkit for crown domains of Riemannian symmetric spaces of
//! the non-compact type, specialized to the split family SL(n,R)/SO(n).
//!
//! The crate provides four subsystems:
//!
//! - [`rootsys`]: restricted root systems of sl(n,R), the Weyl group as
//!   coordinate permutations, the crown cell `{ |alpha(X)| < pi/2 }` as an
//!   exact rational polytope (membership, vertices, translate disjointness),
//!   and the model exhaustion function on the cell.
//! - [`decomp`]: Iwasawa NAK and multiplicative Jordan decompositions of
//!   SL(n,R) matrices, conjugacy classification, conjugation into NA, the
//!   Cartan involution, and the Lie-closure/Engel nilpotency criterion that
//!   governs Steinness of split-solvable quotients.
//! - [`crown`]: the explicit SL(3,R) crown-tube realization inside the
//!   complex unimodular symmetric matrices: forward embedding, closed-form
//!   inverse, the tube membership inequalities, the multiplication-map
//!   Jacobian rank, slice exhaustion values, and orbit-escape evidence for
//!   discrete NA-actions.
//! - [`atlas`]: the classification tables of crown domains (Hermitian
//!   symmetric vs. rigid) as queryable data.
//!
//! Cell geometry is exact (rationals in pi-units); matrix numerics carry
//! explicit, configurable tolerances ([`decomp::Tolerances`]).

pub mod atlas;
pub mod crown;
pub mod decomp;
pub mod error;
pub mod exact;
pub mod rootsys;
pub mod selftest;

pub use error::{Error, Result};
