//! Whole-space propagation on the periodic `(x, y)` box.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::boundary_ops::{BoundarySymbol, SymbolKind};
use crate::error::{Error, Result};
use crate::spectral_core::fft::transform_axis;
use crate::spectral_core::field::{transform_tangential, y_full_plan};
use crate::spectral_core::{BoundaryField, DomainTag, Grid, Representation, SampledField, YExtent, ZERO};

/// How half-line data is continued to `y < 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Extension {
    Zero,
    Odd,
    Even,
}

impl Extension {
    /// Continuation under which the whole-space flow already meets the boundary condition.
    pub fn designated(symbol: &BoundarySymbol) -> Extension {
        match symbol.kind {
            SymbolKind::Dirichlet => Extension::Odd,
            SymbolKind::Neumann => Extension::Even,
            _ => Extension::Zero,
        }
    }
}

/// Continue a half-line field to the full line `[-ly, ly)`.
pub fn extend_full(u: &SampledField, kind: Extension) -> Result<SampledField> {
    if u.extent == YExtent::Full {
        return Ok(u.clone());
    }
    if u.repr != Representation::Physical {
        return Err(Error::Shape("extension needs physical samples".into()));
    }
    let g = &u.grid;
    let ny = g.ny;
    let nt = u.nt_len();
    let mut out = SampledField::zeros(g, u.tag, YExtent::Full, u.times.clone());
    for k in 0..g.n_tan() {
        for j in 0..ny {
            for n in 0..nt {
                let v = u.values[(k * ny + j) * nt + n];
                out.values[(k * 2 * ny + ny + j) * nt + n] = if j == 0 && kind == Extension::Odd { ZERO } else { v };
                if j > 0 {
                    let mirrored = match kind {
                        Extension::Zero => ZERO,
                        Extension::Odd => -v,
                        Extension::Even => v,
                    };
                    out.values[(k * 2 * ny + ny - j) * nt + n] = mirrored;
                }
            }
        }
    }
    Ok(out)
}

/// `|xi|^2 + eta^2` over the full-space frequency grid, laid out `[n_tan][2 ny]`.
pub(crate) fn omega(grid: &Grid) -> Vec<f64> {
    let xs = grid.xi_sq_values();
    let es = grid.eta_values_full();
    let mut w = Vec::with_capacity(xs.len() * es.len());
    for &x2 in &xs {
        for &e in &es {
            w.push(x2 + e * e);
        }
    }
    w
}

fn forward_space(grid: &Grid, data: &mut [C64]) {
    let ny2 = 2 * grid.ny;
    transform_tangential(data, grid, &[ny2], true);
    transform_axis(data, &[grid.n_tan(), ny2], 1, &y_full_plan(grid), true);
}

fn inverse_space(grid: &Grid, data: &mut [C64]) {
    let ny2 = 2 * grid.ny;
    transform_axis(data, &[grid.n_tan(), ny2], 1, &y_full_plan(grid), false);
    transform_tangential(data, grid, &[ny2], false);
}

fn slot_of(u: &SampledField, n: usize) -> Vec<C64> {
    let nt = u.nt_len();
    (0..u.grid.n_tan() * u.ny_len()).map(|i| u.values[i * nt + n]).collect()
}

fn full_snapshot(u0: &SampledField) -> Result<Vec<C64>> {
    if u0.extent != YExtent::Full {
        return Err(Error::Shape("whole-space propagation needs the full-line extension".into()));
    }
    if u0.repr != Representation::Physical {
        return Err(Error::Shape("expected physical samples".into()));
    }
    let mut s = slot_of(u0, 0);
    forward_space(&u0.grid, &mut s);
    Ok(s)
}

fn scatter(out: &mut SampledField, n: usize, slot: &[C64]) {
    let nt = out.nt_len();
    for (i, v) in slot.iter().enumerate() {
        out.values[i * nt + n] = *v;
    }
}

/// `e^{it Δ} u0` at the requested times, on the full-line box.
pub fn cauchy_propagate(u0: &SampledField, times: &[f64]) -> Result<SampledField> {
    let grid = &u0.grid;
    let hat = full_snapshot(u0)?;
    let w = omega(grid);
    let mut out = SampledField::zeros(grid, DomainTag::VolumeSpacetime, YExtent::Full, times.to_vec());
    let mut buf = vec![ZERO; hat.len()];
    for (n, &t) in times.iter().enumerate() {
        for ((b, h), &wi) in buf.iter_mut().zip(&hat).zip(&w) {
            *b = h * C64::from_polar(1.0, -t * wi);
        }
        inverse_space(grid, &mut buf);
        scatter(&mut out, n, &buf);
    }
    Ok(out)
}

pub(crate) fn uniform_step(times: &[f64]) -> Result<f64> {
    if times.len() < 2 {
        return Err(Error::Shape("need at least two time samples".into()));
    }
    let dt = times[1] - times[0];
    for (i, t) in times.iter().enumerate() {
        if (t - times[0] - i as f64 * dt).abs() > 1e-9 * (1.0 + t.abs()) {
            return Err(Error::Shape("time samples are not uniform".into()));
        }
    }
    Ok(dt)
}

/// `-i int_0^t e^{i(t-s)Δ} f(s) ds`, the solution of `i u_t + Δu = f` with zero data,
/// by the trapezoid rule on the samples of `f`. Zero before `t = 0`.
pub fn duhamel(f: &SampledField) -> Result<SampledField> {
    if f.extent != YExtent::Full || f.repr != Representation::Physical {
        return Err(Error::Shape("forcing must be physical on the full line".into()));
    }
    let grid = &f.grid;
    let dt = uniform_step(&f.times)?;
    let n0 = f.times.iter().position(|&t| t.abs() <= 1e-9 * dt);
    let n0 = match n0 {
        Some(n) => n,
        None if f.times[0] > 0.0 => return Err(Error::Shape("forcing samples must include t = 0".into())),
        None => return Err(Error::Shape("t = 0 is not a forcing sample".into())),
    };
    let w = omega(grid);
    let mut out = SampledField::zeros(grid, DomainTag::VolumeSpacetime, YExtent::Full, f.times.clone());
    let size = w.len();
    let mut acc = vec![ZERO; size];
    let mut prev = vec![ZERO; size];
    let mut buf = vec![ZERO; size];
    for n in n0..f.times.len() {
        let s = f.times[n];
        let mut cur = slot_of(f, n);
        forward_space(grid, &mut cur);
        for (c, &wi) in cur.iter_mut().zip(&w) {
            *c *= C64::from_polar(1.0, s * wi);
        }
        if n > n0 {
            for ((a, p), c) in acc.iter_mut().zip(&prev).zip(&cur) {
                *a += (p + c) * (0.5 * dt);
            }
        }
        for ((b, a), &wi) in buf.iter_mut().zip(&acc).zip(&w) {
            *b = a * C64::from_polar(1.0, -s * wi) * C64::new(0.0, -1.0);
        }
        inverse_space(grid, &mut buf);
        scatter(&mut out, n, &buf);
        prev = cur;
    }
    Ok(out)
}

/// Boundary trace `u(x, 0, t)` and normal derivative `d_y u(x, 0, t)` of a full-line field,
/// the derivative taken spectrally in `y`. Both returned in the physical representation.
pub fn spectral_traces(u: &SampledField, grid_times: bool) -> Result<(BoundaryField, BoundaryField)> {
    if u.extent != YExtent::Full || u.repr != Representation::Physical {
        return Err(Error::Shape("spectral traces need a physical full-line field".into()));
    }
    let grid = &u.grid;
    if grid_times {
        check_grid_times(u)?;
    }
    let ny2 = 2 * grid.ny;
    let nt = u.nt_len();
    let es = grid.eta_values_full();
    let plan = y_full_plan(grid);
    let mut tr = BoundaryField::zeros(grid);
    let mut dtr = BoundaryField::zeros(grid);
    let mut lane = vec![ZERO; ny2];
    let scale = 1.0 / (2.0 * grid.ly);
    for k in 0..grid.n_tan() {
        for n in 0..nt {
            for j in 0..ny2 {
                lane[j] = u.values[(k * ny2 + j) * nt + n];
            }
            plan.forward_lane(&mut lane);
            // inverse transform evaluated at y = 0
            let mut a = ZERO;
            let mut b = ZERO;
            for (v, &e) in lane.iter().zip(&es) {
                a += v;
                b += v * C64::new(0.0, e);
            }
            tr.values[k * grid.nt + n] = a * scale;
            dtr.values[k * grid.nt + n] = b * scale;
        }
    }
    Ok((tr, dtr))
}

pub(crate) fn check_grid_times(u: &SampledField) -> Result<()> {
    let ts = u.grid.t_values();
    if u.times.len() != ts.len() || u.times.iter().zip(&ts).any(|(a, b)| (a - b).abs() > 1e-9 * (1.0 + b.abs())) {
        return Err(Error::Shape("field is not sampled on the grid time axis".into()));
    }
    Ok(())
}
