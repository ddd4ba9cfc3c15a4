//! Level-2 switching methods for constructing ℝ-cospectral graphs.
//!
//! Every switching here conjugates an adjacency matrix by `Q = diag(R, I)`
//! where `R` is a regular orthogonal matrix of level 2. The crate builds the
//! indecomposable such `R`, enumerates the admissible switching sets for each,
//! sorts them into classes, decides which are reducible to smaller switchings,
//! and applies the surviving methods to host graphs.
//!
//! Orthogonal matrices are always stored as `M = 2R` so that all arithmetic
//! is over the integers.

pub mod admissible;
pub mod catalog;
pub mod engine;
pub mod equivalence;
pub mod error;
pub mod graph;
pub mod iso;
pub mod linalg;
pub mod reducibility;

pub use catalog::Family;
pub use error::{Error, Result};
pub use graph::Graph;
pub use linalg::{IntMatrix, IntPolynomial, ScaledOrthogonal};
