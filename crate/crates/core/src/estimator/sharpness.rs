//! The propagating part of the Dirichlet boundary response at `t = 0` against the
//! weighted boundary norm restricted to `delta < -|xi|^2`.

use serde::{Deserialize, Serialize};

use crate::boundary_ops::BoundarySymbol;
use crate::error::{Error, Result};
use crate::halfspace_solver::{solve_pure_bvp_with, BvpOptions, BvpParts};
use crate::spectral_core::BoundaryField;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SharpnessReport {
    /// `||u_hyp(0)||_{L^2(y > 0)}`
    pub solution: f64,
    /// `(cell / 2 pi^2 sum_{delta < -xi^2} sqrt|xi^2 + delta| |g^|^2)^{1/2}`
    pub boundary: f64,
    pub hyperbolic_mass: f64,
}

impl SharpnessReport {
    pub fn ratio(&self) -> f64 {
        self.solution / self.boundary
    }
}

pub const MIN_HYPERBOLIC_MASS: f64 = 0.99;

/// Both sides for data concentrated in the hyperbolic region. The grid must start
/// before the data and the normal box must hold the wave emitted up to `t = 0`.
pub fn hyperbolic_sharpness(g: &BoundaryField) -> Result<SharpnessReport> {
    g.check()?;
    let f = g.frequency();
    let grid = &f.grid;
    let xs = grid.xi_sq_values();
    let ds = grid.delta_values();
    let nt = grid.nt;
    let (mut total, mut hyp, mut weighted) = (0.0, 0.0, 0.0);
    for (k, &x2) in xs.iter().enumerate() {
        for (v, &d) in f.values[k * nt..(k + 1) * nt].iter().zip(&ds) {
            let m = v.norm_sqr();
            total += m;
            if d < -x2 {
                hyp += m;
                weighted += (x2 + d).abs().sqrt() * m;
            }
        }
    }
    if total == 0.0 {
        return Ok(SharpnessReport { solution: 0.0, boundary: 0.0, hyperbolic_mass: 1.0 });
    }
    let mass = hyp / total;
    if mass < MIN_HYPERBOLIC_MASS {
        return Err(Error::Precondition(format!("hyperbolic mass fraction {mass:.4} below {MIN_HYPERBOLIC_MASS}")));
    }
    let boundary = (weighted * grid.cell_measure() / (2.0 * std::f64::consts::PI.powi(2))).sqrt();
    let opts = BvpOptions { parts: BvpParts::Hyperbolic, causality_check: false, ..BvpOptions::default() };
    let sol = solve_pure_bvp_with(g, &BoundarySymbol::dirichlet(), &[0.0], &opts)?;
    Ok(SharpnessReport { solution: sol.u.l2_at(0), boundary, hyperbolic_mass: mass })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral_core::Grid;
    use num_complex::Complex64 as C64;

    fn packet(grid: &Grid, xi0: f64, delta0: f64, width_t: f64) -> BoundaryField {
        let tc = grid.t0 / 2.0;
        BoundaryField::from_fn(grid, |x, t| {
            let env = (-x[0] * x[0] / 8.0 - (t - tc).powi(2) / (2.0 * width_t * width_t)).exp();
            C64::from_polar(env, xi0 * x[0] + delta0 * t)
        })
    }

    #[test]
    fn zero_data() {
        let grid = Grid::new(2, 16.0, 16, 16.0, 32, 8.0, 32).unwrap().with_t0(-4.0);
        let r = hyperbolic_sharpness(&BoundaryField::zeros(&grid)).unwrap();
        assert_eq!((r.solution, r.boundary), (0.0, 0.0));
    }

    #[test]
    fn gaussian_packet_balances() {
        let base = Grid::new(2, 16.0, 32, 64.0, 256, 16.0, 128).unwrap().with_t0(-8.0);
        let a = hyperbolic_sharpness(&packet(&base, 1.0, -10.0, 0.8)).unwrap();
        assert!((a.ratio() - 1.0).abs() < 1e-3, "{a:?}");
        let fine = base.refined(2).with_t0(-8.0);
        let b = hyperbolic_sharpness(&packet(&fine, 1.0, -10.0, 0.8)).unwrap();
        assert!((b.ratio() - a.ratio()).abs() < 1e-3, "{a:?} {b:?}");
    }

    #[test]
    fn truncated_single_mode() {
        // one grid mode on [-lt, 0): the wave fills y < 2 eta0 lt at t = 0
        let lt = 4.0;
        let grid = Grid::new(2, 8.0, 8, 64.0, 512, lt, 128).unwrap().with_t0(-lt);
        let delta0 = grid.delta_values().iter().copied().find(|d| (d + 8.6).abs() < 1.0).unwrap();
        let g = BoundaryField::from_fn(&grid, |_, t| C64::from_polar(1.0, delta0 * t));
        let r = hyperbolic_sharpness(&g).unwrap();
        assert!((r.ratio() - 1.0).abs() < 0.05, "{r:?}");
    }

    #[test]
    fn elliptic_data_is_refused() {
        let grid = Grid::new(2, 16.0, 32, 16.0, 64, 16.0, 64).unwrap().with_t0(-8.0);
        assert!(matches!(hyperbolic_sharpness(&packet(&grid, 3.0, 0.5, 0.8)), Err(Error::Precondition(_))));
    }
}
