//! Core numerics for the coupled biharmonic-Kirchhoff system on finite
//! weighted graphs:
//!
//! ```text
//! Δ²u − (a₁ + b₁ ∫|∇u|² dμ) Δu + V₁(x) u = F_u(x, u, v)
//! Δ²v − (a₂ + b₂ ∫|∇v|² dμ) Δv + V₂(x) v = F_v(x, u, v)
//! ```
//!
//! The crate is `no_std` (it needs `alloc`). File formats, JSON export and the
//! command line front end live in the `graphpass-cli` crate.
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`graph`] | [`WeightedGraph`], generators, ball truncation with a Dirichlet ghost layer |
//! | [`calculus`] | Δ, Δ², Γ, integrals, norms, the `E` inner product, assembled operators |
//! | [`model`] | potentials, coefficients, nonlinearities, hypothesis audit |
//! | [`energy`] | the energy functional, its derivative, residual, Jacobian, identity diagnostics |
//! | [`solver`] | deflated Newton, mountain pass, antipodes, multi-solution enumeration |
//! | [`linalg`] | the small dense/sparse kernels the above need |

#![no_std]
#![allow(clippy::needless_range_loop)]
// `!(x > 0.0)` is deliberate: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod calculus;
pub mod energy;
pub mod error;
pub mod graph;
pub mod linalg;
pub mod model;
pub mod solver;

pub use calculus::{AssembledOperators, VertexFunction};
pub use energy::{CeramiDiagnostics, EnergyBreakdown, StatePair};
pub use error::{Error, Result};
pub use graph::{GraphKind, TruncatedGraph, WeightedGraph};
pub use model::{AuditReport, Model, Nonlinearity};
pub use solver::{SolutionRecord, SolverConfig};
