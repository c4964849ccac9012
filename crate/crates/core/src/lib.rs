//! Spectral solver and verification experiments for the Schrödinger equation
//! `i u_t + Δu = f` on the half space `R^{d-1} x R+` with boundary data.

pub mod boundary_ops;
pub mod cli;
pub mod error;
pub mod estimator;
pub mod halfspace_solver;
pub mod hs_spaces;
pub mod nls;
pub mod spectral_core;

pub use error::{Error, Result};
