//! Mixed-norm ratios of linear solutions over their data, with a grid refinement
//! table and a parabolic scaling table.
//!
//! Data are given as generators in physical variables. The table over `lambda`
//! samples `D(lambda x, lambda y, lambda^2 t)` on the box scaled by `1/lambda`, so
//! every entry sees the same samples and only the cell measures change.

use std::fmt::Write as _;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::pairs::{is_admissible, lpq_norm};
use crate::boundary_ops::BoundarySymbol;
use crate::error::{Error, Result};
use crate::halfspace_solver::{cauchy_propagate, duhamel, solve_pure_bvp, trace_y0};
use crate::hs_spaces::{hs_boundary_norm, lp_lq};
use crate::spectral_core::{BoundaryField, Grid, SampledField, YExtent};

pub type BoundaryGen = Arc<dyn Fn(&[f64], f64) -> C64 + Send + Sync>;
pub type SnapshotGen = Arc<dyn Fn(&[f64], f64) -> C64 + Send + Sync>;
pub type SpacetimeGen = Arc<dyn Fn(&[f64], f64, f64) -> C64 + Send + Sync>;

#[derive(Clone)]
pub enum Source {
    /// `||u||_{L^p L^q(t > 0)} / ||g||_{𝓗^s}` for the pure boundary problem
    PureBvp { g: BoundaryGen, symbol: BoundarySymbol },
    /// `||e^{itΔ} u0||_{L^p L^q} / ||u0||_{L^2}` on the full line
    Cauchy { u0: SnapshotGen },
    /// `||duhamel f||_{L^p L^q} / ||f||_{L^p' L^q'}`
    Forcing { f: SpacetimeGen },
    /// `||e^{itΔ} u0 |_{y=0}||_{𝓗^s} / ||u0||_{L^2}`
    CauchyTrace { u0: SnapshotGen },
    /// `||duhamel f |_{y=0}||_{𝓗^s} / ||f||_{L^p' L^q'}`
    ForcingTrace { f: SpacetimeGen },
}

impl Source {
    pub fn kind(&self) -> &'static str {
        match self {
            Source::PureBvp { .. } => "pure-bvp",
            Source::Cauchy { .. } => "cauchy",
            Source::Forcing { .. } => "forcing",
            Source::CauchyTrace { .. } => "cauchy-trace",
            Source::ForcingTrace { .. } => "forcing-trace",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrichartzOptions {
    /// number of grid doublings after the base grid
    pub levels: usize,
    pub lambdas: Vec<f64>,
}

impl Default for StrichartzOptions {
    fn default() -> Self {
        StrichartzOptions { levels: 1, lambdas: vec![0.5, 1.0, 2.0] }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrichartzReport {
    pub source: String,
    pub pair: (f64, f64),
    pub s: f64,
    pub ratio: f64,
    /// `(nx, ratio)` per refinement level
    pub refinement_table: Vec<(usize, f64)>,
    pub scaling_table: Vec<(f64, f64)>,
}

fn spread(vals: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = vals.collect();
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = v.iter().copied().fold(0.0, f64::max);
    (hi - lo) / lo
}

impl StrichartzReport {
    /// `(max - min) / min` over the refinement table.
    pub fn refinement_variation(&self) -> f64 {
        spread(self.refinement_table.iter().map(|r| r.1))
    }

    pub fn scaling_variation(&self) -> f64 {
        spread(self.scaling_table.iter().map(|r| r.1))
    }

    pub fn tables_csv(&self) -> String {
        let mut out = String::from("table,key,ratio\n");
        for (n, r) in &self.refinement_table {
            let _ = writeln!(out, "refinement,{n},{r:.12e}");
        }
        for (l, r) in &self.scaling_table {
            let _ = writeln!(out, "scaling,{l},{r:.12e}");
        }
        out
    }
}

fn dual(e: f64) -> f64 {
    e / (e - 1.0)
}

fn spacetime(grid: &Grid, f: &SpacetimeGen, lambda: f64) -> SampledField {
    let l2 = lambda * lambda;
    SampledField::spacetime_from_fn(grid, YExtent::Full, grid.t_values(), |x, y, t| {
        let xs: Vec<f64> = x.iter().map(|v| lambda * v).collect();
        f(&xs, lambda * y, l2 * t)
    })
}

fn snapshot(grid: &Grid, f: &SnapshotGen, lambda: f64) -> SampledField {
    SampledField::snapshot_from_fn(grid, YExtent::Full, |x, y| {
        let xs: Vec<f64> = x.iter().map(|v| lambda * v).collect();
        f(&xs, lambda * y)
    })
}

fn ratio(num: f64, den: f64) -> Result<f64> {
    if !(den > 0.0) {
        return Err(Error::UndefinedRatio("input norm is zero".into()));
    }
    let r = num / den;
    if !r.is_finite() {
        return Err(Error::Accuracy(format!("ratio {r} is not finite")));
    }
    Ok(r)
}

/// One ratio on one grid, the data scaled by `lambda`.
pub fn strichartz_ratio(source: &Source, grid: &Grid, (p, q): (f64, f64), lambda: f64) -> Result<f64> {
    match source {
        Source::PureBvp { g, symbol } => {
            let l2 = lambda * lambda;
            let gb = BoundaryField::from_fn(grid, |x, t| {
                let xs: Vec<f64> = x.iter().map(|v| lambda * v).collect();
                g(&xs, l2 * t)
            });
            let den = hs_boundary_norm(&gb, 0.0);
            if den == 0.0 {
                return ratio(0.0, den);
            }
            let times: Vec<f64> = grid.t_values().into_iter().filter(|&t| t >= -1e-12).collect();
            let sol = solve_pure_bvp(&gb, symbol, &times)?;
            ratio(lpq_norm(&sol.u, p, q)?, den)
        }
        Source::Cauchy { u0 } => {
            let u = snapshot(grid, u0, lambda);
            let den = u.l2_at(0);
            if den == 0.0 {
                return ratio(0.0, den);
            }
            ratio(lpq_norm(&cauchy_propagate(&u, &grid.t_values())?, p, q)?, den)
        }
        Source::CauchyTrace { u0 } => {
            let u = snapshot(grid, u0, lambda);
            let den = u.l2_at(0);
            if den == 0.0 {
                return ratio(0.0, den);
            }
            let tr = trace_y0(&cauchy_propagate(&u, &grid.t_values())?)?;
            ratio(hs_boundary_norm(&tr, 0.0), den)
        }
        Source::Forcing { f } => {
            let ff = spacetime(grid, f, lambda);
            let den = lp_lq(&ff, dual(p), dual(q))?;
            if den == 0.0 {
                return ratio(0.0, den);
            }
            ratio(lpq_norm(&duhamel(&ff)?, p, q)?, den)
        }
        Source::ForcingTrace { f } => {
            let ff = spacetime(grid, f, lambda);
            let den = lp_lq(&ff, dual(p), dual(q))?;
            if den == 0.0 {
                return ratio(0.0, den);
            }
            ratio(hs_boundary_norm(&trace_y0(&duhamel(&ff)?)?, 0.0), den)
        }
    }
}

pub fn strichartz_report(source: &Source, grid: &Grid, pair: (f64, f64), s: f64, opts: &StrichartzOptions) -> Result<StrichartzReport> {
    if !is_admissible(grid.d, pair.0, pair.1) {
        return Err(Error::Domain(format!("({}, {}) is not admissible in d = {}", pair.0, pair.1, grid.d)));
    }
    if s != 0.0 {
        return Err(Error::Domain(format!("only s = 0 is supported, got {s}")));
    }
    if opts.lambdas.is_empty() {
        return Err(Error::Domain("empty scaling list".into()));
    }
    let ratio = strichartz_ratio(source, grid, pair, 1.0)?;
    let mut refinement_table = vec![(grid.nx, ratio)];
    for level in 1..=opts.levels {
        let g = grid.refined(1 << level);
        refinement_table.push((g.nx, strichartz_ratio(source, &g, pair, 1.0)?));
    }
    let scaling_table = opts
        .lambdas
        .iter()
        .map(|&l| Ok((l, if l == 1.0 { ratio } else { strichartz_ratio(source, &grid.scaled(l), pair, l)? })))
        .collect::<Result<_>>()?;
    Ok(StrichartzReport { source: source.kind().into(), pair, s, ratio, refinement_table, scaling_table })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn erf_window(t: f64, lo: f64, hi: f64) -> f64 {
        let w = (hi - lo) / 10.0;
        0.25 * (1.0 + libm::erf((t - lo) / w - 5.0)) * (1.0 + libm::erf((hi - t) / w - 5.0))
    }

    fn boundary_gaussian() -> BoundaryGen {
        Arc::new(|x, t| C64::from_polar((-x[0] * x[0] / 2.0).exp() * erf_window(t, 0.0, 2.0), 0.5 * x[0]))
    }

    #[test]
    fn zero_data_has_no_ratio() {
        let grid = Grid::new(2, 16.0, 16, 16.0, 32, 4.0, 32).unwrap();
        let src = Source::PureBvp { g: Arc::new(|_, _| C64::new(0.0, 0.0)), symbol: BoundarySymbol::dirichlet() };
        assert!(matches!(strichartz_report(&src, &grid, (4.0, 4.0), 0.0, &StrichartzOptions::default()), Err(Error::UndefinedRatio(_))));
        let src = Source::Cauchy { u0: Arc::new(|_, _| C64::new(0.0, 0.0)) };
        assert!(matches!(strichartz_report(&src, &grid, (4.0, 4.0), 0.0, &StrichartzOptions::default()), Err(Error::UndefinedRatio(_))));
    }

    #[test]
    fn inadmissible_pair_is_refused() {
        let grid = Grid::new(2, 16.0, 16, 16.0, 32, 4.0, 32).unwrap();
        let src = Source::Cauchy { u0: Arc::new(|x, y| C64::new((-x[0] * x[0] - y * y).exp(), 0.0)) };
        assert!(strichartz_report(&src, &grid, (4.0, 3.0), 0.0, &StrichartzOptions::default()).is_err());
    }

    #[test]
    fn dirichlet_boundary_gaussian() {
        let grid = Grid::new(2, 16.0, 32, 16.0, 64, 8.0, 64).unwrap();
        let src = Source::PureBvp { g: boundary_gaussian(), symbol: BoundarySymbol::dirichlet() };
        let r = strichartz_report(&src, &grid, (4.0, 4.0), 0.0, &StrichartzOptions::default()).unwrap();
        assert!(r.ratio.is_finite() && r.ratio > 0.0);
        assert!(r.refinement_variation() <= 0.1, "{r:?}");
        assert!(r.scaling_variation() <= 0.1, "{r:?}");
        assert_eq!(r.tables_csv().lines().count(), 1 + 2 + 3);
    }

    #[test]
    fn free_flow_scaling_is_exact() {
        // identical samples on the scaled boxes: the ratio depends on the measures only
        let grid = Grid::new(2, 16.0, 32, 8.0, 32, 4.0, 32).unwrap().with_t0(-2.0);
        let src = Source::Cauchy { u0: Arc::new(|x, y| C64::new((-(x[0] * x[0] + y * y) / 2.0).exp(), 0.0)) };
        let r = strichartz_report(&src, &grid, (4.0, 4.0), 0.0, &StrichartzOptions { levels: 0, lambdas: vec![0.5, 1.0, 2.0] }).unwrap();
        assert!(r.scaling_variation() < 1e-10, "{r:?}");
    }
}
