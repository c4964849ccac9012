//! Quantitative experiments: admissible pairs and mixed norms, the dispersion
//! kernel bound, the Laplace transform on the half line, weighted Hilbert forms
//! and Strichartz-type ratios.

pub mod appendix;
pub mod kernel;
pub mod laplace;
pub mod pairs;
pub mod quad;
pub mod sharpness;
pub mod strichartz;

pub use appendix::{appendix_form_ratio, appendix_weight_build, BandWeight, FormRatioReport, TestFunction, Weight, WeightTable};
pub use kernel::{kernel_nts_bound, kernel_scaled, KernelBound, KernelSample, SampleGrid};
pub use laplace::{laplace_opnorm, LaplaceGrid, LaplaceNorm};
pub use pairs::{admissible_pairs, is_admissible, lpq_norm, RationalPair};
pub use sharpness::{hyperbolic_sharpness, SharpnessReport};
pub use strichartz::{strichartz_ratio, strichartz_report, Source, StrichartzOptions, StrichartzReport};
