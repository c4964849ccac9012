//! Pure boundary value problem: zero data and forcing, boundary data `g`.
//!
//! Per tangential mode the solution is an integral over the time frequency,
//! split at the paraboloid into the hyperbolic (propagating) and elliptic
//! (evanescent) parts. Both are parametrised by `eta >= 0` through
//! `delta = -|xi|^2 -+ eta^2` and summed with one trapezoid rule plus the
//! Euler-Maclaurin terms of the `eta = 0` endpoint.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boundary_ops::BoundarySymbol;
use crate::error::{Error, Result};
use crate::spectral_core::field::transform_tangential;
use crate::spectral_core::resample::{dtft, dtft_derivative};
use crate::spectral_core::{BoundaryField, DomainTag, SampledField, YExtent, ZERO};

/// Which side of the paraboloid contributes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BvpParts {
    #[default]
    Both,
    Hyperbolic,
    Elliptic,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BvpOptions {
    /// eta nodes per time sample (raised per slice when the phase would alias)
    pub eta_factor: usize,
    pub endpoint_correction: bool,
    pub causality_check: bool,
    #[serde(default)]
    pub parts: BvpParts,
}

impl Default for BvpOptions {
    fn default() -> Self {
        BvpOptions { eta_factor: 4, endpoint_correction: true, causality_check: true, parts: BvpParts::Both }
    }
}

#[derive(Clone, Debug)]
pub struct BvpSolution {
    pub u: SampledField,
    /// `max ||u(t)||_{L^2}` over the probe times `t < 0`, relative to `||g||_{L^2}`
    pub causality_ratio: f64,
    pub warnings: Vec<String>,
    pub max_eta_nodes: usize,
}

const CAUSALITY_TOL: f64 = 1e-4;

struct Slice<'a> {
    lane: &'a [C64],
    xi2: f64,
}

struct Setup<'a> {
    symbol: &'a BoundarySymbol,
    t0: f64,
    dt: f64,
    delta_lim: f64,
    times: &'a [f64],
    ys: &'a [f64],
    t_abs: f64,
    base_nodes: usize,
    opts: &'a BvpOptions,
}

impl Setup<'_> {
    fn nodes(&self, eta_max: f64) -> usize {
        let y_max = self.ys.last().copied().unwrap_or(0.0);
        // keep t*h*eta_max and y*h below 0.8*pi so the trapezoid has no images
        let phase = (self.t_abs * eta_max * eta_max / (0.8 * PI)).ceil() as usize;
        let space = (y_max * eta_max / (0.8 * PI)).ceil() as usize;
        self.base_nodes.max(phase).max(space) + 1
    }

    fn g1(&self, lane: &[C64], xi2: f64, delta: f64) -> Result<C64> {
        if delta.abs() > self.delta_lim {
            return Ok(ZERO);
        }
        let p = self.symbol.pairing_on_axis(xi2, delta);
        if !(p.norm() >= 1e-10) {
            return Err(Error::SingularSymbol(format!("|b.V| = {:.3e} at |xi|^2 = {xi2}, delta = {delta}", p.norm())));
        }
        Ok(dtft(lane, self.t0, self.dt, delta) / p)
    }

    /// Values `[y][t]` of the tangential mode.
    fn solve(&self, s: &Slice) -> Result<Vec<C64>> {
        let ny = self.ys.len();
        let ne = self.times.len();
        let xi2 = s.xi2;
        let eta_max = (self.delta_lim + xi2).sqrt();
        let nodes = self.nodes(eta_max);
        let h = eta_max / (nodes - 1) as f64;
        let w = h / (2.0 * PI);
        let hyp_lim = self.delta_lim - xi2;

        // right factor rows: [B1 re; -B1 im; B2 re] | [B1 im; B1 re; B2 im]
        let ncol = 2 * ne;
        let mut right = vec![0.0; 3 * nodes * ncol];
        for j in 1..nodes {
            let eta = j as f64 * h;
            let e2 = eta * eta;
            let c1 = if e2 <= hyp_lim && self.opts.parts != BvpParts::Elliptic { self.g1(s.lane, xi2, -xi2 - e2)? * (2.0 * eta * w) } else { ZERO };
            let c2 = if e2 - xi2 >= -self.delta_lim && self.opts.parts != BvpParts::Hyperbolic { self.g1(s.lane, xi2, e2 - xi2)? * (2.0 * eta * w) } else { ZERO };
            if c1 == ZERO && c2 == ZERO {
                continue;
            }
            for (n, &t) in self.times.iter().enumerate() {
                let b1 = c1 * C64::from_polar(1.0, -t * (xi2 + e2));
                let b2 = c2 * C64::from_polar(1.0, t * (e2 - xi2));
                let r0 = j * ncol;
                let r1 = (nodes + j) * ncol;
                let r2 = (2 * nodes + j) * ncol;
                right[r0 + n] = b1.re;
                right[r1 + n] = -b1.im;
                right[r2 + n] = b2.re;
                right[r0 + ne + n] = b1.im;
                right[r1 + ne + n] = b1.re;
                right[r2 + ne + n] = b2.im;
            }
        }
        // left factor: [cos(y eta) | sin(y eta) | exp(-y eta)]
        let kdim = 3 * nodes;
        let mut left = vec![0.0; ny * kdim];
        for (l, &y) in self.ys.iter().enumerate() {
            let row = &mut left[l * kdim..(l + 1) * kdim];
            for j in 0..nodes {
                let a = y * j as f64 * h;
                let (sn, cs) = a.sin_cos();
                row[j] = cs;
                row[nodes + j] = sn;
                row[2 * nodes + j] = (-a).exp();
            }
        }
        let mut prod = vec![0.0; ny * ncol];
        // SAFETY: dimensions and row-major strides match the three buffers above.
        unsafe {
            matrixmultiply::dgemm(
                ny,
                kdim,
                ncol,
                1.0,
                left.as_ptr(),
                kdim as isize,
                1,
                right.as_ptr(),
                ncol as isize,
                1,
                0.0,
                prod.as_mut_ptr(),
                ncol as isize,
                1,
            );
        }
        let mut out: Vec<C64> = (0..ny)
            .flat_map(|l| {
                let p = &prod[l * ncol..(l + 1) * ncol];
                (0..ne).map(move |n| C64::new(p[n], p[ne + n]))
            })
            .collect();
        if self.opts.endpoint_correction {
            self.endpoint(s, h, &mut out);
        }
        Ok(out)
    }

    /// Euler-Maclaurin terms at `eta = 0`. The `h^4` terms of the two parts cancel;
    /// a single part gets its half of the `h^2` term only.
    fn endpoint(&self, s: &Slice, h: f64, out: &mut [C64]) {
        let xi2 = s.xi2;
        let d0 = -xi2;
        if d0.abs() > self.delta_lim {
            return;
        }
        let ne = self.times.len();
        let cst = self.symbol.constant_pairing();
        let derivs = match cst {
            Some(c) => [0u32, 1, 2].map(|k| dtft_derivative(s.lane, self.t0, self.dt, d0, k) / c),
            None => {
                let p = self.symbol.pairing_on_axis(xi2, d0);
                if !(p.norm().is_finite() && p.norm() >= 1e-10) {
                    return;
                }
                [dtft(s.lane, self.t0, self.dt, d0) / p, ZERO, ZERO]
            }
        };
        let [g0, g1, g2] = derivs;
        let both = self.opts.parts == BvpParts::Both;
        let k2 = h * h / 12.0 * if both { 4.0 } else { 2.0 } / (2.0 * PI);
        let k6 = h.powi(6) / 30240.0 * 20.0 / (2.0 * PI);
        for (n, &t) in self.times.iter().enumerate() {
            let e = C64::from_polar(1.0, -t * xi2);
            let it = C64::new(0.0, t);
            let a1 = g1 + it * g0;
            let a2 = (g2 + it * g1 * 2.0 - g0 * t * t) * 0.5;
            for (l, &y) in self.ys.iter().enumerate() {
                let mut v = g0 * k2;
                if both && cst.is_some() {
                    let y2 = y * y;
                    v += (g0 * (y2 * y2 / 24.0) + a1 * (y2 / 2.0) + a2) * (24.0 * k6);
                }
                out[l * ne + n] += e * v;
            }
        }
    }
}

/// Solve the pure BVP at the given times on the half-line `y` grid.
pub fn solve_pure_bvp(g: &BoundaryField, symbol: &BoundarySymbol, times: &[f64]) -> Result<BvpSolution> {
    solve_pure_bvp_with(g, symbol, times, &BvpOptions::default())
}

pub fn solve_pure_bvp_with(g: &BoundaryField, symbol: &BoundarySymbol, times: &[f64], opts: &BvpOptions) -> Result<BvpSolution> {
    g.check()?;
    let grid = &g.grid;
    let gs = g.semidiscrete();
    let mut warnings = Vec::new();
    let gnorm = g.physical().l2();

    let probes: Vec<f64> = if opts.causality_check { vec![-grid.lt / 16.0, -grid.lt / 8.0, -grid.lt / 4.0] } else { Vec::new() };
    let mut all_times = times.to_vec();
    all_times.extend_from_slice(&probes);
    let ys = grid.y_values();
    let delta_lim = grid.delta_values().iter().fold(0.0f64, |a, d| a.max(d.abs()));
    let setup = Setup {
        symbol,
        t0: grid.t0,
        dt: grid.dt(),
        delta_lim,
        times: &all_times,
        ys: &ys,
        t_abs: all_times.iter().fold(0.0f64, |a, t| a.max(t.abs())),
        base_nodes: opts.eta_factor * grid.nt,
        opts,
    };
    let xs = grid.xi_sq_values();
    let lane_max: Vec<f64> = (0..grid.n_tan()).map(|k| gs.lane(k).iter().map(|v| v.norm()).fold(0.0, f64::max)).collect();
    let top = lane_max.iter().copied().fold(0.0, f64::max);
    let slices: Vec<Option<Vec<C64>>> = (0..grid.n_tan())
        .into_par_iter()
        .map(|k| {
            if lane_max[k] <= 1e-14 * top || top == 0.0 {
                return Ok(None);
            }
            setup.solve(&Slice { lane: gs.lane(k), xi2: xs[k] }).map(Some)
        })
        .collect::<Result<_>>()?;
    let max_eta_nodes = xs.iter().map(|&x2| setup.nodes((delta_lim + x2).sqrt())).max().unwrap_or(0);

    let ne = all_times.len();
    let ny = grid.ny;
    let mut full = vec![ZERO; grid.n_tan() * ny * ne];
    for (k, s) in slices.iter().enumerate() {
        if let Some(v) = s {
            full[k * ny * ne..(k + 1) * ny * ne].copy_from_slice(v);
        }
    }
    transform_tangential(&mut full, grid, &[ny, ne], false);

    let nt_out = times.len();
    let mut u = SampledField::zeros(grid, DomainTag::VolumeSpacetime, YExtent::Half, times.to_vec());
    for kj in 0..grid.n_tan() * ny {
        u.values[kj * nt_out..(kj + 1) * nt_out].copy_from_slice(&full[kj * ne..kj * ne + nt_out]);
    }
    let mut causality_ratio = 0.0;
    if !probes.is_empty() && gnorm > 0.0 {
        let mut probe = SampledField::zeros(grid, DomainTag::VolumeSpacetime, YExtent::Half, probes.clone());
        let np = probes.len();
        for kj in 0..grid.n_tan() * ny {
            probe.values[kj * np..(kj + 1) * np].copy_from_slice(&full[kj * ne + nt_out..(kj + 1) * ne]);
        }
        causality_ratio = (0..np).map(|n| probe.l2_at(n)).fold(0.0, f64::max) / gnorm;
        if causality_ratio > CAUSALITY_TOL {
            warnings.push(format!("causality: ||u(t<0)|| / ||g|| = {causality_ratio:.3e} exceeds {CAUSALITY_TOL:.0e}"));
        }
    }
    if let Some(w) = early_data_warning(g) {
        warnings.push(w);
    }
    Ok(BvpSolution { u, causality_ratio, warnings, max_eta_nodes })
}

/// Boundary data should vanish near `t = 0` unless the regularity is below 1/2.
fn early_data_warning(g: &BoundaryField) -> Option<String> {
    let gp = g.physical();
    let grid = &g.grid;
    let ts = grid.t_values();
    let top = gp.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let near: Vec<usize> = ts.iter().enumerate().filter(|(_, t)| t.abs() <= 2.0 * grid.dt()).map(|(n, _)| n).collect();
    let mut worst = 0.0f64;
    for k in 0..grid.n_tan() {
        for &n in &near {
            worst = worst.max(gp.at(k, n).norm());
        }
    }
    (top > 0.0 && worst > 1e-10 * top).then(|| format!("boundary data does not vanish near t = 0 (relative size {:.2e})", worst / top))
}

impl BvpSolution {
    pub fn is_causal(&self) -> bool {
        self.causality_ratio <= CAUSALITY_TOL
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    use crate::spectral_core::Grid;

    fn erf(x: f64) -> f64 {
        let f = |s: f64| (-s * s).exp();
        x.signum() * crate::spectral_core::resample::adaptive_simpson(&f, 0.0, x.abs(), 1e-15) * 2.0 / PI.sqrt()
    }

    /// Smooth plateau, equal to 1 on [a + 5w, b - 5w] up to 1e-11.
    fn window(t: f64, a: f64, b: f64, w: f64) -> f64 {
        0.25 * (1.0 + erf((t - a) / w)) * (1.0 + erf((b - t) / w))
    }

    struct Mode {
        xi_index: usize,
        delta: f64,
    }

    fn run_mode(grid: &Grid, m: &Mode) -> (f64, SampledField, SampledField) {
        let xi0 = grid.xi_values()[m.xi_index];
        // edge width times the distance to the paraboloid must be large: the
        // switch-on transient decays only like a power of the elapsed time
        let (a, b, w) = (4.0, grid.lt - 4.0, 0.6);
        let g = BoundaryField::from_fn(grid, |x, t| C64::from_polar(window(t, a, b, w), x[0] * xi0 + m.delta * t));
        let interior: Vec<f64> = grid.t_values().into_iter().filter(|&t| t >= a + 5.0 * w && t <= b - 5.0 * w).collect();
        let sol = solve_pure_bvp(&g, &BoundarySymbol::dirichlet(), &interior).unwrap();
        assert!(sol.is_causal(), "{:?}", sol.warnings);
        let q = m.delta + xi0 * xi0;
        let exact = SampledField::spacetime_from_fn(grid, YExtent::Half, interior, |x, y, t| {
            let base = C64::from_polar(1.0, x[0] * xi0 + m.delta * t);
            if q > 0.0 {
                base * (-y * q.sqrt()).exp()
            } else {
                base * C64::from_polar(1.0, y * (-q).sqrt())
            }
        });
        let err = sol.u.values.iter().zip(&exact.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        (err, sol.u, exact)
    }

    fn mode_grid() -> Grid {
        Grid::new(2, 2.0 * PI, 4, 8.0, 32, 24.0, 256).unwrap()
    }

    #[test]
    fn elliptic_mode() {
        let g = mode_grid();
        let (err, _, _) = run_mode(&g, &Mode { xi_index: 1, delta: 15.0 });
        assert!(err <= 1e-6, "err {err}");
    }

    #[test]
    fn hyperbolic_mode() {
        let g = mode_grid();
        let (err, _, _) = run_mode(&g, &Mode { xi_index: 1, delta: -17.0 });
        assert!(err <= 1e-6, "err {err}");
    }

    #[test]
    fn zero_data() {
        let g = mode_grid();
        let sol = solve_pure_bvp(&BoundaryField::zeros(&g), &BoundarySymbol::neumann(), &g.t_values()).unwrap();
        assert_eq!(sol.u.max_abs(), 0.0);
    }
}
