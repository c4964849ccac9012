//! Boundary function spaces: weighted norms, traces, the I(g) functional,
//! compatibility checks, Besov-in-time norms and time extension operators.

pub mod ifunc;
pub mod norms;
pub mod time_ops;

pub use ifunc::{compat_check, i_functional, CompatReport, CompatStatus, LogIntegral};
pub use norms::*;
pub use time_ops::{besov_time_norm, extend_pt, extend_zero, lp_lq, reflect_s, restrict, BesovReport, Cutoff, TimeSampled};
