use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Fractional frequency shifts, in units of one frequency cell.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Offsets {
    pub x: f64,
    pub t: f64,
}

impl Default for Offsets {
    fn default() -> Self {
        // the half cell on the time axis keeps every (xi, delta) pair off the paraboloid
        Offsets { x: 0.0, t: 0.5 }
    }
}

/// Truncated space-time box.
///
/// Tangential directions form a torus of side `lx`, sampled from `-lx/2`.
/// The normal direction is sampled on `[0, ly)` with step `ly/ny`; full-line
/// fields use `2*ny` samples on `[-ly, ly)`. Time samples start at `t0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub d: usize,
    pub lx: f64,
    pub nx: usize,
    pub ly: f64,
    pub ny: usize,
    pub lt: f64,
    pub nt: usize,
    #[serde(default)]
    pub t0: f64,
    #[serde(default)]
    pub offsets: Offsets,
}

impl Default for Grid {
    fn default() -> Self {
        Grid {
            d: 2,
            lx: 32.0,
            nx: 256,
            ly: 32.0,
            ny: 256,
            lt: 16.0,
            nt: 256,
            t0: 0.0,
            offsets: Offsets::default(),
        }
    }
}

impl Grid {
    pub fn new(d: usize, lx: f64, nx: usize, ly: f64, ny: usize, lt: f64, nt: usize) -> Result<Self> {
        let g = Grid { d, lx, nx, ly, ny, lt, nt, t0: 0.0, offsets: Offsets::default() };
        g.validate()?;
        Ok(g)
    }

    pub fn with_t0(mut self, t0: f64) -> Self {
        self.t0 = t0;
        self
    }

    pub fn with_offsets(mut self, offsets: Offsets) -> Self {
        self.offsets = offsets;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=3).contains(&self.d) {
            return Err(Error::Domain(format!("dimension {} outside 1..=3", self.d)));
        }
        for (name, n) in [("nx", self.nx), ("ny", self.ny), ("nt", self.nt)] {
            if n == 0 || !n.is_power_of_two() {
                return Err(Error::Domain(format!("{name}={n} is not a power of two")));
            }
        }
        for (name, l) in [("lx", self.lx), ("ly", self.ly), ("lt", self.lt)] {
            if !(l > 0.0 && l.is_finite()) {
                return Err(Error::Domain(format!("{name}={l} must be positive")));
            }
        }
        Ok(())
    }

    /// Number of tangential directions.
    pub fn m(&self) -> usize {
        self.d - 1
    }

    /// Number of tangential grid points (1 when d = 1).
    pub fn n_tan(&self) -> usize {
        self.nx.pow(self.m() as u32)
    }

    pub fn dx(&self) -> f64 {
        self.lx / self.nx as f64
    }

    pub fn dy(&self) -> f64 {
        self.ly / self.ny as f64
    }

    pub fn dt(&self) -> f64 {
        self.lt / self.nt as f64
    }

    pub fn x_values(&self) -> Vec<f64> {
        (0..self.nx).map(|j| -0.5 * self.lx + j as f64 * self.dx()).collect()
    }

    /// Normal samples of the half line, starting at y = 0.
    pub fn y_values(&self) -> Vec<f64> {
        (0..self.ny).map(|j| j as f64 * self.dy()).collect()
    }

    /// Normal samples of the full line `[-ly, ly)`.
    pub fn y_values_full(&self) -> Vec<f64> {
        (0..2 * self.ny).map(|j| -self.ly + j as f64 * self.dy()).collect()
    }

    pub fn t_values(&self) -> Vec<f64> {
        (0..self.nt).map(|n| self.t0 + n as f64 * self.dt()).collect()
    }

    /// Tangential wavenumbers in FFT storage order.
    pub fn xi_values(&self) -> Vec<f64> {
        axis_frequencies(self.nx, self.lx, self.offsets.x)
    }

    /// Time frequencies in FFT storage order, shifted by the time offset.
    pub fn delta_values(&self) -> Vec<f64> {
        axis_frequencies(self.nt, self.lt, self.offsets.t)
    }

    /// Normal wavenumbers of the full-line box in FFT order.
    pub fn eta_values_full(&self) -> Vec<f64> {
        axis_frequencies(2 * self.ny, 2.0 * self.ly, 0.0)
    }

    /// Tangential frequency vector of flat index `k`.
    pub fn xi_vec(&self, k: usize) -> Vec<f64> {
        let xi = self.xi_values();
        let mut out = Vec::with_capacity(self.m());
        let mut r = k;
        let mut parts = vec![0usize; self.m()];
        for a in (0..self.m()).rev() {
            parts[a] = r % self.nx;
            r /= self.nx;
        }
        for p in parts {
            out.push(xi[p]);
        }
        out
    }

    /// |xi|^2 for every flat tangential index.
    pub fn xi_sq_values(&self) -> Vec<f64> {
        (0..self.n_tan()).map(|k| self.xi_vec(k).iter().map(|v| v * v).sum()).collect()
    }

    /// Frequency cell measure (2pi/lx)^(d-1) (2pi/lt).
    pub fn cell_measure(&self) -> f64 {
        (2.0 * PI / self.lx).powi(self.m() as i32) * (2.0 * PI / self.lt)
    }

    /// Physical cell measure of the boundary grid.
    pub fn boundary_cell(&self) -> f64 {
        self.dx().powi(self.m() as i32) * self.dt()
    }

    /// Smallest |delta_m + |xi_k|^2| over the frequency grid.
    pub fn paraboloid_gap(&self) -> f64 {
        let xs = self.xi_sq_values();
        let ds = self.delta_values();
        let mut best = f64::INFINITY;
        for &x2 in &xs {
            for &d in &ds {
                best = best.min((d + x2).abs());
            }
        }
        best
    }

    /// Same box with every sample count multiplied by `factor`.
    pub fn refined(&self, factor: usize) -> Grid {
        let mut g = self.clone();
        g.nx *= factor;
        g.ny *= factor;
        g.nt *= factor;
        g
    }

    /// Box rescaled for data `u(lambda x, lambda y, lambda^2 t)`.
    pub fn scaled(&self, lambda: f64) -> Grid {
        let mut g = self.clone();
        g.lx /= lambda;
        g.ly /= lambda;
        g.lt /= lambda * lambda;
        g.t0 /= lambda * lambda;
        g
    }
}

/// Signed FFT index of storage slot `k`.
pub fn signed_index(k: usize, n: usize) -> i64 {
    if k < n / 2 {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

pub fn axis_frequencies(n: usize, l: f64, offset: f64) -> Vec<f64> {
    (0..n).map(|k| 2.0 * PI * (signed_index(k, n) as f64 + offset) / l).collect()
}
