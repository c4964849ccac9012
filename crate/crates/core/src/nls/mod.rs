//! Semilinear Dirichlet problem: fixed point, global continuation for small
//! data, and the backward flows used for scattering.

pub mod norms;
pub mod picard;
pub mod problem;
pub mod scatter;

pub use norms::{gradient, h1_norm, h1_profile, lp_w1q, w1q_profile};
pub use picard::{data_size, distance, global_small_solve, linear_part, monitor, picard_solve, picard_solve_from, GlobalOptions, GlobalRun, IterRecord, PicardResult};
pub use problem::{apply_nonlinearity, AdmissiblePair, NLSProblem};
pub use scatter::{dirichlet_free_flow, phi_flow, psi_backward, psi_tilde, scattering_profile, ScatteringProfile, ScatteringReport, TailExtension};

#[cfg(test)]
pub(crate) mod fixtures {
    use num_complex::Complex64 as C64;

    use crate::hs_spaces::hs_boundary_norm;
    use crate::spectral_core::{BoundaryField, Grid, SampledField, YExtent};

    pub fn grid() -> Grid {
        fine_grid(64)
    }

    pub fn fine_grid(nt: usize) -> Grid {
        Grid::new(2, 32.0, 64, 16.0, 64, 4.0, nt).unwrap()
    }

    /// Smooth window, below 1e-11 outside `(lo, hi)`; its spectrum decays like a Gaussian.
    pub fn window(t: f64, lo: f64, hi: f64) -> f64 {
        let w = (hi - lo) / 10.0;
        0.25 * (1.0 + libm::erf((t - lo) / w - 5.0)) * (1.0 + libm::erf((hi - t) / w - 5.0))
    }

    /// Compatible `(u0, g)` scaled so that `||u0||_{H^1} + ||g||_{𝓗^1} = size`;
    /// `g` is concentrated in the time interval `support`.
    pub fn data(grid: &Grid, size: f64, support: (f64, f64)) -> (SampledField, BoundaryField) {
        let (lo, hi) = support;
        let mut u0 = SampledField::snapshot_from_fn(grid, YExtent::Half, |x, y| {
            C64::from_polar(y * (-(x[0] * x[0]) / 2.0 - (y - 3.0).powi(2) / 2.0).exp(), 0.5 * y)
        });
        let mut g = BoundaryField::from_fn(grid, |x, t| {
            C64::from_polar((-(x[0] * x[0]) / 2.0).exp() * window(t, lo, hi), x[0])
        });
        let scale = size / (super::h1_norm(&u0, 0).unwrap() + hs_boundary_norm(&g, 1.0));
        u0.values.iter_mut().for_each(|v| *v *= scale);
        g.scale(C64::new(scale, 0.0));
        (u0, g)
    }
}
