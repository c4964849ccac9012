//! Boundary symbols, the Kreiss-Lopatinskii margin and symbol division.

pub mod expr;
pub mod kl;
pub mod symbol;

pub use kl::{divide_by_lopatinskii, kl_margin, multiply_by_lopatinskii, KLReport, SampleSpec};
pub use symbol::{stable_eigenvector, BoundarySymbol, SymbolKind, TimeDirection};
