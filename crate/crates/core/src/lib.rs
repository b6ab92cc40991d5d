//! Finite-dimensional representations, point derivations and characters of
//! the tensor algebras of finite directed graphs, computed at the level of the
//! dense polynomial subalgebra.

pub mod characters;
pub mod cycle_algebra;
pub mod derivations;
pub mod error;
pub mod graph;
pub mod linalg;
pub mod par;
pub mod poly;
pub mod repn;
pub mod span;

pub use error::{Error, Result};
