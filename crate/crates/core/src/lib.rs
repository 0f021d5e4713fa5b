//! Ground states of `−Δu + u/|y|² + V(εx)u = f(u)` on the Nehari manifold,
//! the divergence-free curl-curl fields they generate, and the numerical
//! experiments built on top of them.
//!
//! Fields depend on `(r, s) = (|y|, z)` only, with `y ∈ ℝ^K` and `z ∈ ℝ`
//! (`N = K + 1`). The Maxwell case is `N = 3`, `K = 2`.

// `!(x > 0.0)` is the NaN-rejecting form of the positivity checks
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod functional;
pub mod grid;
pub mod maxwell;
pub mod model;
pub mod par;
pub mod solver;
pub mod spline;

pub use error::{Error, Result};
pub use functional::{EnergyBreakdown, Functional};
pub use grid::{CylGrid, Field, SchrodingerOp};
pub use model::{Geometry, Nonlinearity, Potential, ProblemSpec};
pub use solver::{LineSearch, Solution, SolverConfig};
