//! Boundary traces of interior fields.

use num_complex::Complex64 as C64;

use super::cauchy::{check_grid_times, spectral_traces};
use crate::error::{Error, Result};
use crate::spectral_core::{BoundaryField, Representation, SampledField, YExtent};

/// `u(x, 0, t)` as boundary data. The field must live on the grid time axis.
pub fn trace_y0(u: &SampledField) -> Result<BoundaryField> {
    if u.repr != Representation::Physical {
        return Err(Error::Shape("trace needs physical samples".into()));
    }
    check_grid_times(u)?;
    let grid = &u.grid;
    let j0 = u.y0_index();
    let mut out = BoundaryField::zeros(grid);
    for k in 0..grid.n_tan() {
        for n in 0..grid.nt {
            out.values[k * grid.nt + n] = u.at(k, j0, n);
        }
    }
    Ok(out)
}

/// `Λ^{-1}` applied to frequency data, `Λ = sqrt(| |xi|^2 + delta |)`.
pub fn inverse_lambda(d: &BoundaryField) -> BoundaryField {
    let mut f = d.frequency();
    let xs = f.grid.xi_sq_values();
    let ds = f.grid.delta_values();
    let nt = f.grid.nt;
    for (k, &x2) in xs.iter().enumerate() {
        for (m, &dm) in ds.iter().enumerate() {
            f.values[k * nt + m] /= (x2 + dm).abs().sqrt();
        }
    }
    f
}

/// `Λ^{-1} d_y u(x, 0, t)` in the frequency representation, `d_y` by the
/// one-sided fourth-order difference on the first five planes.
pub fn normal_trace_weighted(u: &SampledField) -> Result<BoundaryField> {
    if u.repr != Representation::Physical {
        return Err(Error::Shape("trace needs physical samples".into()));
    }
    check_grid_times(u)?;
    let grid = &u.grid;
    let j0 = u.y0_index();
    if u.ny_len() < j0 + 5 {
        return Err(Error::Shape("need five planes above the boundary".into()));
    }
    const W: [f64; 5] = [-25.0, 48.0, -36.0, 16.0, -3.0];
    let h = 12.0 * grid.dy();
    let mut d = BoundaryField::zeros(grid);
    for k in 0..grid.n_tan() {
        for n in 0..grid.nt {
            let s: C64 = W.iter().enumerate().map(|(i, w)| u.at(k, j0 + i, n) * *w).sum();
            d.values[k * grid.nt + n] = s / h;
        }
    }
    Ok(inverse_lambda(&d))
}

/// Same weighted normal trace with `d_y` taken spectrally on a full-line field.
pub fn normal_trace_weighted_spectral(u: &SampledField) -> Result<BoundaryField> {
    if u.extent != YExtent::Full {
        return Err(Error::Shape("spectral normal derivative needs the full line".into()));
    }
    let (_, d) = spectral_traces(u, true)?;
    Ok(inverse_lambda(&d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral_core::Grid;

    #[test]
    fn evanescent_mode_traces() {
        let g = Grid::new(2, 8.0, 16, 8.0, 256, 4.0, 32).unwrap();
        let xi0 = g.xi_values()[2];
        let d0 = 3.0;
        let q = (d0 + xi0 * xi0).sqrt();
        let u = SampledField::spacetime_from_fn(&g, YExtent::Half, g.t_values(), |x, y, t| {
            C64::from_polar((-q * y).exp(), x[0] * xi0 + d0 * t)
        });
        let mode = BoundaryField::from_fn(&g, |x, t| C64::from_polar(1.0, x[0] * xi0 + d0 * t));
        assert_eq!(trace_y0(&u).unwrap(), mode);
        // exact derivative -q * mode, then the multiplier on the frequency grid
        let mut exact = mode.clone();
        exact.scale(C64::new(-q, 0.0));
        let exact = inverse_lambda(&exact).physical();
        let got = normal_trace_weighted(&u).unwrap().physical();
        let err = got.values.iter().zip(&exact.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        // O(dy^4) in the difference quotient
        assert!(err < 2e-5 * q, "err {err}");
    }

    #[test]
    fn y_independent_field_has_zero_normal_trace() {
        let g = Grid::new(2, 8.0, 16, 4.0, 32, 4.0, 32).unwrap();
        let u = SampledField::spacetime_from_fn(&g, YExtent::Half, g.t_values(), |x, _, t| C64::new(x[0].cos(), t));
        let d = normal_trace_weighted(&u).unwrap();
        assert!(d.values.iter().all(|v| v.norm() < 1e-12));
    }
}
