use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::fft::{transform_axis, AxisPlan, AxisSpec};
use super::grid::Grid;
use crate::error::{Error, Result};

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DomainTag {
    VolumeSpacetime,
    VolumeSnapshot,
    BoundarySpacetime,
}

/// Which axes currently hold Fourier coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Representation {
    Physical,
    Frequency,
    /// tangential axes in frequency, time axis physical
    Semidiscrete,
}

/// Normal extent of a volume field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum YExtent {
    Half,
    Full,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

pub(crate) fn x_plan(grid: &Grid) -> AxisPlan {
    AxisPlan::new(AxisSpec { n: grid.nx, l: grid.lx, a0: -0.5 * grid.lx, offset: grid.offsets.x })
}

pub(crate) fn t_plan(grid: &Grid) -> AxisPlan {
    AxisPlan::new(AxisSpec { n: grid.nt, l: grid.lt, a0: grid.t0, offset: grid.offsets.t })
}

pub(crate) fn y_full_plan(grid: &Grid) -> AxisPlan {
    AxisPlan::new(AxisSpec { n: 2 * grid.ny, l: 2.0 * grid.ly, a0: -grid.ly, offset: 0.0 })
}

/// Transform the leading `m` tangential axes of an array shaped `[nx; m] ++ rest`.
pub(crate) fn transform_tangential(data: &mut [C64], grid: &Grid, rest: &[usize], forward: bool) {
    let m = grid.m();
    if m == 0 {
        return;
    }
    let mut shape = vec![grid.nx; m];
    shape.extend_from_slice(rest);
    let plan = x_plan(grid);
    for a in 0..m {
        transform_axis(data, &shape, a, &plan, forward);
    }
}

/// Boundary data on the (x, t) grid, stored row-major as `[nx; d-1] x nt`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryField {
    pub grid: Grid,
    pub repr: Representation,
    pub values: Vec<C64>,
}

impl BoundaryField {
    pub fn zeros(grid: &Grid) -> Self {
        BoundaryField { grid: grid.clone(), repr: Representation::Physical, values: vec![ZERO; grid.n_tan() * grid.nt] }
    }

    pub fn new(grid: &Grid, repr: Representation, values: Vec<C64>) -> Result<Self> {
        let f = BoundaryField { grid: grid.clone(), repr, values };
        f.check()?;
        Ok(f)
    }

    /// Sample `f(x, t)` on the grid.
    pub fn from_fn(grid: &Grid, f: impl Fn(&[f64], f64) -> C64) -> Self {
        let xs = grid.x_values();
        let ts = grid.t_values();
        let m = grid.m();
        let mut values = Vec::with_capacity(grid.n_tan() * grid.nt);
        let mut x = vec![0.0; m];
        for k in 0..grid.n_tan() {
            let mut r = k;
            for a in (0..m).rev() {
                x[a] = xs[r % grid.nx];
                r /= grid.nx;
            }
            for &t in &ts {
                values.push(f(&x, t));
            }
        }
        BoundaryField { grid: grid.clone(), repr: Representation::Physical, values }
    }

    /// Field with prescribed Fourier coefficients `c(k, m)`.
    pub fn from_spectrum(grid: &Grid, c: impl Fn(usize, usize) -> C64) -> Self {
        let mut values = Vec::with_capacity(grid.n_tan() * grid.nt);
        for k in 0..grid.n_tan() {
            for m in 0..grid.nt {
                values.push(c(k, m));
            }
        }
        BoundaryField { grid: grid.clone(), repr: Representation::Frequency, values }
    }

    pub fn check(&self) -> Result<()> {
        let n = self.grid.n_tan() * self.grid.nt;
        if self.values.len() != n {
            return Err(Error::Shape(format!("boundary field has {} values, grid needs {n}", self.values.len())));
        }
        if self.values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::Domain("non-finite boundary sample".into()));
        }
        Ok(())
    }

    pub fn nt(&self) -> usize {
        self.grid.nt
    }

    /// Time lane of tangential index `k`.
    pub fn lane(&self, k: usize) -> &[C64] {
        &self.values[k * self.grid.nt..(k + 1) * self.grid.nt]
    }

    pub fn lane_mut(&mut self, k: usize) -> &mut [C64] {
        let nt = self.grid.nt;
        &mut self.values[k * nt..(k + 1) * nt]
    }

    pub fn at(&self, k: usize, n: usize) -> C64 {
        self.values[k * self.grid.nt + n]
    }

    fn apply_x(&mut self, forward: bool) {
        let nt = self.grid.nt;
        let grid = self.grid.clone();
        transform_tangential(&mut self.values, &grid, &[nt], forward);
    }

    fn apply_t(&mut self, forward: bool) {
        let plan = t_plan(&self.grid);
        let shape = [self.grid.n_tan(), self.grid.nt];
        transform_axis(&mut self.values, &shape, 1, &plan, forward);
    }

    /// Switch to the requested representation.
    pub fn to_repr(&self, target: Representation) -> BoundaryField {
        use Representation::*;
        let mut out = self.clone();
        match (self.repr, target) {
            (a, b) if a == b => {}
            (Physical, Frequency) => {
                out.apply_x(true);
                out.apply_t(true);
            }
            (Physical, Semidiscrete) => out.apply_x(true),
            (Frequency, Physical) => {
                out.apply_t(false);
                out.apply_x(false);
            }
            (Frequency, Semidiscrete) => out.apply_t(false),
            (Semidiscrete, Physical) => out.apply_x(false),
            (Semidiscrete, Frequency) => out.apply_t(true),
            _ => unreachable!(),
        }
        out.repr = target;
        out
    }

    pub fn physical(&self) -> BoundaryField {
        self.to_repr(Representation::Physical)
    }

    pub fn frequency(&self) -> BoundaryField {
        self.to_repr(Representation::Frequency)
    }

    pub fn semidiscrete(&self) -> BoundaryField {
        self.to_repr(Representation::Semidiscrete)
    }

    /// L^2 norm with the measure of the current representation.
    pub fn l2(&self) -> f64 {
        let s: f64 = self.values.iter().map(|v| v.norm_sqr()).sum();
        let g = &self.grid;
        let w = match self.repr {
            Representation::Physical => g.boundary_cell(),
            Representation::Frequency => 1.0 / (g.lx.powi(g.m() as i32) * g.lt),
            Representation::Semidiscrete => g.dt() / g.lx.powi(g.m() as i32),
        };
        (s * w).sqrt()
    }

    pub fn scale(&mut self, c: C64) {
        for v in &mut self.values {
            *v *= c;
        }
    }

    pub fn axpy(&mut self, a: C64, other: &BoundaryField) {
        for (v, o) in self.values.iter_mut().zip(&other.values) {
            *v += a * o;
        }
    }
}

/// Interior samples, stored row-major as `[nx; d-1] x ny' x ntimes`
/// where `ny'` is `ny` (half line) or `2 ny` (full line).
#[derive(Clone, Debug, PartialEq)]
pub struct SampledField {
    pub grid: Grid,
    pub tag: DomainTag,
    pub extent: YExtent,
    pub repr: Representation,
    pub times: Vec<f64>,
    pub values: Vec<C64>,
}

impl SampledField {
    pub fn zeros(grid: &Grid, tag: DomainTag, extent: YExtent, times: Vec<f64>) -> Self {
        let ny = match extent {
            YExtent::Half => grid.ny,
            YExtent::Full => 2 * grid.ny,
        };
        let nt = times.len().max(1);
        SampledField {
            grid: grid.clone(),
            tag,
            extent,
            repr: Representation::Physical,
            times,
            values: vec![ZERO; grid.n_tan() * ny * nt],
        }
    }

    /// Snapshot `f(x, y)` on the half or full normal line, at time 0.
    pub fn snapshot_from_fn(grid: &Grid, extent: YExtent, f: impl Fn(&[f64], f64) -> C64) -> Self {
        let mut out = SampledField::zeros(grid, DomainTag::VolumeSnapshot, extent, vec![0.0]);
        let xs = grid.x_values();
        let ys = out.y_values();
        let m = grid.m();
        let mut x = vec![0.0; m];
        let ny = ys.len();
        for k in 0..grid.n_tan() {
            let mut r = k;
            for a in (0..m).rev() {
                x[a] = xs[r % grid.nx];
                r /= grid.nx;
            }
            for (j, &y) in ys.iter().enumerate() {
                out.values[k * ny + j] = f(&x, y);
            }
        }
        out
    }

    /// Space-time field `f(x, y, t)` at the given times.
    pub fn spacetime_from_fn(grid: &Grid, extent: YExtent, times: Vec<f64>, f: impl Fn(&[f64], f64, f64) -> C64) -> Self {
        let mut out = SampledField::zeros(grid, DomainTag::VolumeSpacetime, extent, times);
        let xs = grid.x_values();
        let ys = out.y_values();
        let m = grid.m();
        let mut x = vec![0.0; m];
        let ny = ys.len();
        let nt = out.times.len();
        for k in 0..grid.n_tan() {
            let mut r = k;
            for a in (0..m).rev() {
                x[a] = xs[r % grid.nx];
                r /= grid.nx;
            }
            for (j, &y) in ys.iter().enumerate() {
                for (n, &t) in out.times.iter().enumerate() {
                    out.values[(k * ny + j) * nt + n] = f(&x, y, t);
                }
            }
        }
        out
    }

    pub fn ny_len(&self) -> usize {
        match self.extent {
            YExtent::Half => self.grid.ny,
            YExtent::Full => 2 * self.grid.ny,
        }
    }

    pub fn nt_len(&self) -> usize {
        self.times.len().max(1)
    }

    pub fn y_values(&self) -> Vec<f64> {
        match self.extent {
            YExtent::Half => self.grid.y_values(),
            YExtent::Full => self.grid.y_values_full(),
        }
    }

    /// Index of the y = 0 plane.
    pub fn y0_index(&self) -> usize {
        match self.extent {
            YExtent::Half => 0,
            YExtent::Full => self.grid.ny,
        }
    }

    pub fn idx(&self, k: usize, j: usize, n: usize) -> usize {
        (k * self.ny_len() + j) * self.nt_len() + n
    }

    pub fn at(&self, k: usize, j: usize, n: usize) -> C64 {
        self.values[self.idx(k, j, n)]
    }

    pub fn check(&self) -> Result<()> {
        let n = self.grid.n_tan() * self.ny_len() * self.nt_len();
        if self.values.len() != n {
            return Err(Error::Shape(format!("field has {} values, expected {n}", self.values.len())));
        }
        if self.tag == DomainTag::BoundarySpacetime {
            return Err(Error::Shape("volume field tagged as boundary".into()));
        }
        if self.values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::Domain("non-finite sample".into()));
        }
        Ok(())
    }

    /// Snapshot at time slot `n`.
    pub fn snapshot(&self, n: usize) -> SampledField {
        let mut out = SampledField::zeros(&self.grid, DomainTag::VolumeSnapshot, self.extent, vec![self.times[n]]);
        out.repr = self.repr;
        let nt = self.nt_len();
        for (i, v) in out.values.iter_mut().enumerate() {
            *v = self.values[i * nt + n];
        }
        out
    }

    /// Half-line part of a full-line field.
    pub fn restrict_half(&self) -> SampledField {
        if self.extent == YExtent::Half {
            return self.clone();
        }
        let mut out = SampledField::zeros(&self.grid, self.tag, YExtent::Half, self.times.clone());
        out.repr = self.repr;
        let nt = self.nt_len();
        let ny = self.grid.ny;
        for k in 0..self.grid.n_tan() {
            for j in 0..ny {
                let src = (k * 2 * ny + ny + j) * nt;
                let dst = (k * ny + j) * nt;
                out.values[dst..dst + nt].copy_from_slice(&self.values[src..src + nt]);
            }
        }
        out
    }

    /// Transform the periodic space axes: tangential, plus y on the full line.
    pub fn transform_space(&self, direction: Direction) -> Result<SampledField> {
        let forward = direction == Direction::Forward;
        let want = if forward { Representation::Physical } else { Representation::Frequency };
        if self.repr != want {
            return Err(Error::Shape(format!("field is in {:?} representation", self.repr)));
        }
        let mut out = self.clone();
        let ny = self.ny_len();
        let nt = self.nt_len();
        transform_tangential(&mut out.values, &self.grid, &[ny, nt], forward);
        if self.extent == YExtent::Full {
            let shape = [self.grid.n_tan(), ny, nt];
            transform_axis(&mut out.values, &shape, 1, &y_full_plan(&self.grid), forward);
        }
        out.repr = if forward { Representation::Frequency } else { Representation::Physical };
        Ok(out)
    }

    /// L^2 norm over space of time slot `n` (physical representation).
    pub fn l2_at(&self, n: usize) -> f64 {
        let nt = self.nt_len();
        let s: f64 = self.values.iter().skip(n).step_by(nt).map(|v| v.norm_sqr()).sum();
        let g = &self.grid;
        (s * g.dx().powi(g.m() as i32) * g.dy()).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// Forward or inverse transform along all periodic axes of a boundary field.
pub fn transform(field: &BoundaryField, direction: Direction) -> Result<BoundaryField> {
    field.check()?;
    match (direction, field.repr) {
        (Direction::Forward, Representation::Physical) => Ok(field.to_repr(Representation::Frequency)),
        (Direction::Inverse, Representation::Frequency) => Ok(field.to_repr(Representation::Physical)),
        (d, r) => Err(Error::Shape(format!("cannot apply {d:?} transform to {r:?} data"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn small_grid() -> Grid {
        Grid::new(2, 12.0, 64, 4.0, 8, 14.0, 64).unwrap().with_t0(-7.0)
    }

    #[test]
    fn constant_goes_to_zero_mode() {
        let mut g = small_grid();
        g.offsets.t = 0.0;
        let f = BoundaryField::from_fn(&g, |_, _| C64::new(1.0, 0.0));
        let h = transform(&f, Direction::Forward).unwrap();
        for k in 0..g.nx {
            for m in 0..g.nt {
                let v = h.at(k, m);
                if k == 0 && m == 0 {
                    assert!((v.norm() - g.lx * g.lt).abs() < 1e-10);
                } else {
                    assert!(v.norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn round_trip_and_wrong_direction() {
        let g = small_grid();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let vals: Vec<C64> = (0..g.nx * g.nt).map(|_| C64::new(rng.gen(), rng.gen())).collect();
        let f = BoundaryField::new(&g, Representation::Physical, vals).unwrap();
        let h = transform(&f, Direction::Forward).unwrap();
        assert!(transform(&h, Direction::Forward).is_err());
        let back = transform(&h, Direction::Inverse).unwrap();
        for (a, b) in back.values.iter().zip(&f.values) {
            assert!((a - b).norm() <= 1e-12 * b.norm().max(1.0));
        }
    }

    #[test]
    fn shape_mismatch_is_structural_error() {
        let g = small_grid();
        assert!(matches!(BoundaryField::new(&g, Representation::Physical, vec![ZERO; 5]), Err(Error::Shape(_))));
    }

    #[test]
    fn gaussian_spectrum_matches_closed_form() {
        // exp(-x^2 - t^2) has transform pi exp(-(xi^2 + delta^2)/4)
        let g = small_grid();
        let f = BoundaryField::from_fn(&g, |x, t| C64::new((-x[0] * x[0] - t * t).exp(), 0.0));
        let h = transform(&f, Direction::Forward).unwrap();
        let xi = g.xi_values();
        let de = g.delta_values();
        let mut worst: f64 = 0.0;
        for k in 0..g.nx {
            for m in 0..g.nt {
                let exact = PI * (-(xi[k] * xi[k] + de[m] * de[m]) / 4.0).exp();
                worst = worst.max((h.at(k, m) - exact).norm());
            }
        }
        assert!(worst < 1e-8, "{worst}");
    }

    #[test]
    fn parseval_on_random_fields() {
        let g = small_grid();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..5 {
            let vals: Vec<C64> = (0..g.nx * g.nt).map(|_| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)).collect();
            let f = BoundaryField::new(&g, Representation::Physical, vals).unwrap();
            let a = f.l2();
            let b = f.frequency().l2();
            let c = f.semidiscrete().l2();
            assert!((a - b).abs() <= 1e-12 * a);
            assert!((a - c).abs() <= 1e-12 * a);
        }
    }

    #[test]
    fn full_line_snapshot_round_trip() {
        let g = small_grid();
        let u = SampledField::snapshot_from_fn(&g, YExtent::Full, |x, y| C64::new((-x[0] * x[0] - y * y).exp(), y));
        let h = u.transform_space(Direction::Forward).unwrap();
        let back = h.transform_space(Direction::Inverse).unwrap();
        for (a, b) in back.values.iter().zip(&u.values) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn restrict_half_keeps_nonnegative_y() {
        let g = small_grid();
        let u = SampledField::snapshot_from_fn(&g, YExtent::Full, |_, y| C64::new(y, 0.0));
        let h = u.restrict_half();
        assert_eq!(h.ny_len(), g.ny);
        for j in 0..g.ny {
            assert!((h.at(3, j, 0).re - j as f64 * g.dy()).abs() < 1e-14);
        }
    }
}
