//! Grids, transforms, branch-cut square roots and the parabolic resampling.

pub mod branch;
pub mod fft;
pub mod field;
pub mod grid;
pub mod io;
pub mod resample;

pub use branch::{sqrt_minus, sqrt_plus};
pub use field::{transform, BoundaryField, Direction, DomainTag, Representation, SampledField, YExtent, ZERO};
pub use grid::{Grid, Offsets};
pub use resample::{jacobian_identity_check, resample_parabolic};

pub type C64 = num_complex::Complex64;
