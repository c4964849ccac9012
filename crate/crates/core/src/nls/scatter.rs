//! Linear Dirichlet flows forward and backward, and the scattering diagnostics.
//!
//! Backward flows are run as forward flows of the complex conjugate with
//! reversed boundary data: `conj u(t - s)` solves the same equation.

use serde::{Deserialize, Serialize};

use super::norms::h1_norm;
use super::picard::{sub, GlobalRun};
use crate::boundary_ops::BoundarySymbol;
use crate::error::{Error, Result};
use crate::halfspace_solver::{cauchy_propagate, extend_full, solve_ibvp, Extension, IbvpData};
use crate::hs_spaces::Cutoff;
use crate::spectral_core::{BoundaryField, DomainTag, Grid, SampledField};

fn require_dirichlet(symbol: &BoundarySymbol) -> Result<()> {
    if !symbol.is_dirichlet() {
        return Err(Error::UnsupportedSymbol(format!("{} is not time reversible; only Dirichlet flows run backward", symbol.name)));
    }
    Ok(())
}

fn slot_of(grid: &Grid, t: f64) -> Result<usize> {
    let r = (t - grid.t0) / grid.dt();
    if (r - r.round()).abs() > 1e-6 || r < -1e-9 || r.round() as usize >= grid.nt {
        return Err(Error::Domain(format!("t = {t} is not a time sample of the window")));
    }
    Ok(r.round() as usize)
}

fn conj(u: &SampledField) -> SampledField {
    let mut c = u.clone();
    c.values.iter_mut().for_each(|v| *v = v.conj());
    c
}

fn snapshot_at(u: &SampledField, n: usize) -> SampledField {
    let mut s = u.snapshot(n);
    s.times = vec![0.0];
    s
}

/// `Φ_g(t, u0)`: linear Dirichlet solution at time `t`.
pub fn phi_flow(g: &BoundaryField, u0: &SampledField, t: f64, symbol: &BoundarySymbol) -> Result<SampledField> {
    require_dirichlet(symbol)?;
    let n = slot_of(&g.grid, t)?;
    if n == 0 {
        return Ok(u0.clone());
    }
    let mut data = IbvpData::new(u0.clone(), symbol.clone());
    data.g = Some(g.clone());
    data.s = 1.0;
    Ok(snapshot_at(&solve_ibvp(&data)?.u, n))
}

/// `Ψ_g(t, u)`: the state at time 0 whose flow reaches `u` at time `t`.
pub fn psi_backward(g: &BoundaryField, u: &SampledField, t: f64, symbol: &BoundarySymbol) -> Result<SampledField> {
    require_dirichlet(symbol)?;
    let grid = &g.grid;
    let n = slot_of(grid, t)?;
    if n == 0 {
        return Ok(u.clone());
    }
    backward(g, u, n, symbol, 1.0)
}

fn backward(g: &BoundaryField, u: &SampledField, n: usize, symbol: &BoundarySymbol, s: f64) -> Result<SampledField> {
    let grid = &g.grid;
    let gp = g.physical();
    let mut k = BoundaryField::zeros(grid);
    for kk in 0..grid.n_tan() {
        for m in 0..=n {
            k.values[kk * grid.nt + m] = gp.values[kk * grid.nt + n - m].conj();
        }
    }
    let mut data = IbvpData::new(conj(u), symbol.clone());
    data.g = Some(k);
    data.s = s;
    Ok(conj(&snapshot_at(&solve_ibvp(&data)?.u, n)))
}

/// Continuation of the boundary data `g|[t, inf)` to earlier times.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TailExtension {
    /// `g(2t - tau) chi((t - tau) / length)`
    Reflect { length: f64 },
    Zero,
}

/// `Ψ~_g(t, u)`: backward Dirichlet flow over `[0, t]` with the tail `g|[t, ∞)`
/// continued to `[0, t)`.
///
/// The reflected continuation is switched off over `min(length, t)`, so that it
/// vanishes at time 0. The zero continuation jumps at `t` unless `g(t) = 0`; it
/// is solved without a compatibility requirement.
///
/// States with a nonzero wall trace are continued oddly across the wall, so the
/// result carries an error of the order of the mesh width near `y = 0`. Sample
/// after the support of `g` for full accuracy.
pub fn psi_tilde(g: &BoundaryField, u: &SampledField, t: f64, ext: TailExtension) -> Result<SampledField> {
    let grid = &g.grid;
    let n = slot_of(grid, t)?;
    if n == 0 {
        return Ok(u.clone());
    }
    let nt = grid.nt;
    let gp = g.physical();
    let mut h = BoundaryField::zeros(grid);
    if let TailExtension::Reflect { length } = ext {
        if !(length > 0.0) {
            return Err(Error::Domain(format!("reflection length {length} must be positive")));
        }
        let len = length.min(t);
        for k in 0..grid.n_tan() {
            for m in 0..=n {
                let r = 2 * n - m;
                if r < nt {
                    h.values[k * nt + m] = gp.values[k * nt + r] * Cutoff::Bump.eval((n - m) as f64 * grid.dt() / len);
                }
            }
        }
    }
    let symbol = BoundarySymbol::dirichlet();
    match ext {
        TailExtension::Reflect { .. } => psi_backward(&h, u, t, &symbol),
        TailExtension::Zero => backward(&h, u, n, &symbol, 0.0),
    }
}

/// `e^{it Δ_D} phi` through the odd continuation.
pub fn dirichlet_free_flow(phi: &SampledField, t: f64) -> Result<SampledField> {
    let mut s = cauchy_propagate(&extend_full(phi, Extension::Odd)?, &[t])?.restrict_half();
    s.tag = DomainTag::VolumeSnapshot;
    s.times = vec![0.0];
    Ok(s)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScatteringReport {
    pub times: Vec<f64>,
    /// `||Ψ~(t_{i+1}) - Ψ~(t_i)||_{H^1}`
    pub consecutive: Vec<f64>,
    /// `||Ψ~(t_i) - Ψ~(t_j)||_{H^1}`, row-major
    pub table: Vec<Vec<f64>>,
    pub decreasing: bool,
    /// `||u(t_i) - e^{i t_i Δ_D} phi||_{H^1}`
    pub residuals: Vec<f64>,
    pub residuals_decreasing: bool,
    /// `||Ψ~_reflect(t_i) - Ψ~_zero(t_i)||_{H^1}`
    pub extension_gap: Vec<f64>,
    pub diagnostic: Option<String>,
}

#[derive(Clone, Debug)]
pub struct ScatteringProfile {
    pub profile: SampledField,
    pub report: ScatteringReport,
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

pub fn scattering_profile(run: &GlobalRun, sample_times: &[f64], ext: TailExtension) -> Result<ScatteringProfile> {
    let g = &run.problem.g;
    let other = match ext {
        TailExtension::Zero => TailExtension::Reflect { length: 1.0 },
        TailExtension::Reflect { .. } => TailExtension::Zero,
    };
    let mut psis = Vec::new();
    let mut gap = Vec::new();
    for &t in sample_times {
        if t > run.horizon + 1e-12 {
            return Err(Error::Domain(format!("sample time {t} beyond the horizon {}", run.horizon)));
        }
        let n = slot_of(&run.u.grid, t)?;
        let ut = snapshot_at(&run.u, n);
        let a = psi_tilde(g, &ut, t, ext)?;
        let b = psi_tilde(g, &ut, t, other)?;
        gap.push(h1_norm(&sub(&a, &b), 0)?);
        psis.push(a);
    }
    let m = psis.len();
    let mut table = vec![vec![0.0; m]; m];
    for i in 0..m {
        for j in 0..m {
            if i != j {
                table[i][j] = h1_norm(&sub(&psis[i], &psis[j]), 0)?;
            }
        }
    }
    let consecutive: Vec<f64> = (0..m.saturating_sub(1)).map(|i| table[i][i + 1]).collect();
    let decreasing = strictly_decreasing(&consecutive);
    let profile = psis.last().cloned().ok_or_else(|| Error::Domain("no sample times".into()))?;
    let mut residuals = Vec::new();
    for &t in sample_times {
        let n = slot_of(&run.u.grid, t)?;
        let free = dirichlet_free_flow(&profile, t)?;
        residuals.push(h1_norm(&sub(&snapshot_at(&run.u, n), &free), 0)?);
    }
    let residuals_decreasing = strictly_decreasing(&residuals[..residuals.len().saturating_sub(1)]);
    let diagnostic = (!decreasing).then(|| "Cauchy differences of the backward states do not decrease: no scattering observed on this window".to_string());
    Ok(ScatteringProfile {
        profile,
        report: ScatteringReport { times: sample_times.to_vec(), consecutive, table, decreasing, residuals, residuals_decreasing, extension_gap: gap, diagnostic },
    })
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::{data, fine_grid, grid};
    use super::super::picard::{head, linear_part};
    use super::super::problem::NLSProblem;
    use super::*;

    fn rel_h1(a: &SampledField, b: &SampledField) -> f64 {
        h1_norm(&sub(a, b), 0).unwrap() / h1_norm(b, 0).unwrap()
    }

    #[test]
    fn zero_time_is_the_identity() {
        let grid = grid();
        let (u0, g) = data(&grid, 1.0, (0.1, 0.9));
        let d = BoundarySymbol::dirichlet();
        assert_eq!(phi_flow(&g, &u0, 0.0, &d).unwrap().values, u0.values);
        assert_eq!(psi_backward(&g, &u0, 0.0, &d).unwrap().values, u0.values);
    }

    #[test]
    fn homogeneous_round_trip() {
        let grid = grid();
        let (u0, _) = data(&grid, 1.0, (0.1, 0.9));
        let g = BoundaryField::zeros(&grid);
        let d = BoundarySymbol::dirichlet();
        let back = psi_backward(&g, &phi_flow(&g, &u0, 1.0, &d).unwrap(), 1.0, &d).unwrap();
        assert!(rel_h1(&back, &u0) <= 1e-8, "{}", rel_h1(&back, &u0));
    }

    #[test]
    fn forced_round_trip() {
        let grid = fine_grid(256);
        let (u0, g) = data(&grid, 1.0, (0.1, 0.9));
        let d = BoundarySymbol::dirichlet();
        let back = psi_backward(&g, &phi_flow(&g, &u0, 1.0, &d).unwrap(), 1.0, &d).unwrap();
        assert!(rel_h1(&back, &u0) <= 1e-6, "{}", rel_h1(&back, &u0));
    }

    #[test]
    fn transparent_flow_is_not_reversible() {
        let grid = grid();
        let (u0, g) = data(&grid, 1.0, (0.1, 0.9));
        let r = psi_backward(&g, &u0, 1.0, &BoundarySymbol::transparent());
        assert!(matches!(r, Err(Error::UnsupportedSymbol(_))));
    }

    fn linear_run(size: f64) -> GlobalRun {
        // the free flows are periodic in y, the boundary response is not: the
        // box must hold everything emitted up to the last sample
        let grid = Grid::new(2, 32.0, 64, 64.0, 256, 4.0, 256).unwrap();
        let (u0, g) = data(&grid, size, (0.1, 1.5));
        let p = NLSProblem::new(u0, g);
        let lin = linear_part(&p).unwrap();
        let n = lin.nt_len() - 2;
        GlobalRun { problem: p, horizon: (n - 1) as f64 * lin.grid.dt(), u: head(&lin, n), linear: head(&lin, n), data_size: size, monitor: vec![], logs: vec![] }
    }

    #[test]
    fn linear_solution_scatters_exactly() {
        let run = linear_run(1.0);
        let sp = scattering_profile(&run, &[2.0, 2.5, 3.0, 3.5], TailExtension::Reflect { length: 1.0 }).unwrap();
        let scale = h1_norm(&sp.profile, 0).unwrap();
        for row in &sp.report.table {
            for v in row {
                assert!(*v <= 1e-8 * scale, "{:e}", v / scale);
            }
        }
        for (r, gap) in sp.report.residuals.iter().zip(&sp.report.extension_gap) {
            assert!(*r <= 1e-8 * scale && *gap <= 1e-8 * scale, "{r:e} {gap:e}");
        }
    }

    #[test]
    fn zero_data_gives_zero_profile() {
        let run = linear_run(0.0);
        let sp = scattering_profile(&run, &[1.0, 2.0], TailExtension::Zero).unwrap();
        assert_eq!(sp.profile.max_abs(), 0.0);
    }
}
