//! Linear solvers on the half space: whole-space flow, forcing, the pure
//! boundary value problem and their superposition.

pub mod bvp;
pub mod cauchy;
pub mod ibvp;
pub mod traces;

pub use bvp::{solve_pure_bvp, solve_pure_bvp_with, BvpOptions, BvpParts, BvpSolution};
pub use cauchy::{cauchy_propagate, duhamel, extend_full, spectral_traces, Extension};
pub use ibvp::{apply_boundary_operator, solve_ibvp, solve_ibvp_with, IbvpData, IbvpSolution};
pub use traces::{inverse_lambda, normal_trace_weighted, normal_trace_weighted_spectral, trace_y0};
