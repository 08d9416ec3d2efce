//! Differential geometry of lightcone framed surfaces in Lorentz-Minkowski
//! 3-space.

// `!(err <= tol)` is how tolerance checks reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod curvature;
pub mod curve;
pub mod expr;
pub mod fixtures;
pub mod focal;
pub mod io;
pub mod jet;
pub mod lightlike;
pub mod minkowski;
pub mod surface;
pub mod sweep;
pub mod verify;

pub use jet::Jet2;
pub use minkowski::{CausalCharacter, Delta4Pair, MVec3};
