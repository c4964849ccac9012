use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral_core::field::{transform_tangential, y_full_plan};
use crate::spectral_core::fft::transform_axis;
use crate::spectral_core::{BoundaryField, Grid, Representation, SampledField, YExtent};

/// Which norm a report refers to.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "kebab-case")]
pub enum NormVariant {
    HsBoundary,
    HsDual,
    H1200,
    BesovTime { p: f64 },
    Lebesgue { p: f64, q: f64 },
    SobolevVolume,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormSpec {
    pub s: f64,
    #[serde(flatten)]
    pub variant: NormVariant,
}

impl NormSpec {
    pub fn new(s: f64, variant: NormVariant) -> Result<Self> {
        let n = NormSpec { s, variant };
        n.validate()?;
        Ok(n)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=2.0).contains(&self.s) {
            return Err(Error::Domain(format!("regularity {} outside [0, 2]", self.s)));
        }
        if self.variant == NormVariant::H1200 && self.s != 0.5 {
            return Err(Error::Domain("the H^{1/2}_{00} norm has s = 1/2".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub spec: NormSpec,
    pub value: f64,
    /// the quantity diverges (value is then meaningless)
    pub infinite: bool,
}

/// `(1 + |xi|^2 + |delta|)^s sqrt(| |xi|^2 + delta |)`.
pub fn hs_weight(xi2: f64, delta: f64, s: f64) -> f64 {
    (1.0 + xi2 + delta.abs()).powf(s) * (xi2 + delta).abs().sqrt()
}

pub fn dual_weight(xi2: f64, delta: f64, s: f64) -> f64 {
    (1.0 + xi2 + delta.abs()).powf(-s) / (xi2 + delta).abs().sqrt()
}

/// Split form `sqrt(| |xi|^2 + delta |) (1 + |delta|^s + |xi|^{2s})`.
pub fn bourgain_weight(xi2: f64, delta: f64, s: f64) -> f64 {
    (xi2 + delta).abs().sqrt() * (1.0 + delta.abs().powf(s) + xi2.powf(s))
}

fn weighted_sum(g: &BoundaryField, w: impl Fn(f64, f64) -> f64) -> f64 {
    let f = g.frequency();
    let xs = f.grid.xi_sq_values();
    let ds = f.grid.delta_values();
    let nt = f.grid.nt;
    let mut total = 0.0;
    for (k, &x2) in xs.iter().enumerate() {
        let lane = &f.values[k * nt..(k + 1) * nt];
        let mut s = 0.0;
        for (v, &d) in lane.iter().zip(&ds) {
            s += w(x2, d) * v.norm_sqr();
        }
        total += s;
    }
    (total * f.grid.cell_measure()).sqrt()
}

pub fn hs_boundary_norm(g: &BoundaryField, s: f64) -> f64 {
    weighted_sum(g, |x2, d| hs_weight(x2, d, s))
}

pub fn hs_dual_norm(g: &BoundaryField, s: f64) -> f64 {
    weighted_sum(g, |x2, d| dual_weight(x2, d, s))
}

pub fn bourgain_norm(g: &BoundaryField, s: f64) -> f64 {
    weighted_sum(g, |x2, d| bourgain_weight(x2, d, s))
}

/// Frequency-space pairing `sum conj(g) h` with the 𝓗 cell measure.
pub fn frequency_pairing(g: &BoundaryField, h: &BoundaryField) -> C64 {
    let a = g.frequency();
    let b = h.frequency();
    let s: C64 = a.values.iter().zip(&b.values).map(|(x, y)| x.conj() * y).sum();
    s * a.grid.cell_measure()
}

/// Tangential Fourier coefficients of `g(., t)` at any `t`, by trigonometric interpolation in time.
pub fn trace_at(g: &BoundaryField, t: f64) -> Vec<C64> {
    let f = g.frequency();
    let ds = f.grid.delta_values();
    let nt = f.grid.nt;
    let phases: Vec<C64> = ds.iter().map(|&d| C64::from_polar(1.0 / f.grid.lt, d * t)).collect();
    (0..f.grid.n_tan())
        .map(|k| f.values[k * nt..(k + 1) * nt].iter().zip(&phases).map(|(v, p)| v * p).sum())
        .collect()
}

/// Tangential Fourier coefficients of `g(., 0)`.
pub fn trace_t0(g: &BoundaryField) -> Vec<C64> {
    trace_at(g, 0.0)
}

/// `H^r(R^{d-1})` norm of tangential coefficients (continuous normalisation).
pub fn tangential_sobolev_norm(grid: &Grid, coeffs: &[C64], r: f64) -> f64 {
    let xs = grid.xi_sq_values();
    let s: f64 = coeffs.iter().zip(&xs).map(|(c, &x2)| (1.0 + x2).powf(r) * c.norm_sqr()).sum();
    (s / grid.lx.powi(grid.m() as i32)).sqrt()
}

/// Tangential Fourier coefficients of the plane `j` of time slot `n` of a volume field.
pub fn plane_coefficients(u: &SampledField, j: usize, n: usize) -> Vec<C64> {
    let mut c: Vec<C64> = (0..u.grid.n_tan()).map(|k| u.at(k, j, n)).collect();
    if u.repr == Representation::Physical {
        transform_tangential(&mut c, &u.grid, &[], true);
    }
    c
}

/// Full-space `H^s` norm of a full-line snapshot (time slot `n`), measured like `L^2`.
pub fn sobolev_volume_norm(u: &SampledField, n: usize, s: f64) -> Result<f64> {
    if u.extent != YExtent::Full {
        return Err(Error::Shape("volume Sobolev norm needs the designated full-line extension".into()));
    }
    let g = &u.grid;
    let ny = 2 * g.ny;
    let mut slot: Vec<C64> = (0..g.n_tan() * ny).map(|i| u.values[i * u.nt_len() + n]).collect();
    if u.repr == Representation::Physical {
        transform_tangential(&mut slot, g, &[ny], true);
        transform_axis(&mut slot, &[g.n_tan(), ny], 1, &y_full_plan(g), true);
    }
    let xs = g.xi_sq_values();
    let es = g.eta_values_full();
    let mut total = 0.0;
    for (k, &x2) in xs.iter().enumerate() {
        for (j, &e) in es.iter().enumerate() {
            total += (1.0 + x2 + e * e).powf(s) * slot[k * ny + j].norm_sqr();
        }
    }
    Ok((total / (g.lx.powi(g.m() as i32) * 2.0 * g.ly)).sqrt())
}

/// `||trace_t0(d_t^k g)|| <= 1e-6 sup_t ||g(t)||` for `0 <= 2k <= floor(s - 1/2)`.
pub fn vanishing_traces(g: &BoundaryField, s: f64) -> (bool, f64) {
    if s < 0.5 {
        return (true, 0.0);
    }
    let kmax = ((s - 0.5).floor() / 2.0).floor() as u32;
    let phys = g.physical();
    let nt = g.grid.nt;
    let mut scale: f64 = 0.0;
    for n in 0..nt {
        let s2: f64 = (0..g.grid.n_tan()).map(|k| phys.values[k * nt + n].norm_sqr()).sum();
        scale = scale.max((s2 * g.grid.dx().powi(g.grid.m() as i32)).sqrt());
    }
    let mut worst: f64 = 0.0;
    let f = g.frequency();
    let ds = g.grid.delta_values();
    for k in 0..=kmax {
        let mut dk = f.clone();
        for (i, v) in dk.values.iter_mut().enumerate() {
            *v *= C64::new(0.0, ds[i % nt]).powu(k);
        }
        let tr = trace_t0(&dk);
        worst = worst.max(tangential_sobolev_norm(&g.grid, &tr, 0.0));
    }
    if scale == 0.0 {
        return (true, 0.0);
    }
    let rel = worst / scale;
    (rel <= 1e-6, rel)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral_core::ZERO;
    use crate::spectral_core::resample::adaptive_simpson;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn grid() -> Grid {
        Grid::new(2, 16.0, 64, 4.0, 8, 16.0, 64).unwrap()
    }

    #[test]
    fn zero_and_single_mode() {
        let g = grid();
        let z = BoundaryField::zeros(&g);
        assert_eq!(hs_boundary_norm(&z, 1.0), 0.0);
        assert_eq!(hs_dual_norm(&z, 1.0), 0.0);
        assert_eq!(bourgain_norm(&z, 1.0), 0.0);
        let (k0, m0) = (3, 7);
        let xi = g.xi_values()[k0];
        let de = g.delta_values()[m0];
        let f = BoundaryField::from_spectrum(&g, |k, m| if k == k0 && m == m0 { C64::new(1.0, 0.0) } else { ZERO });
        let cell = g.cell_measure();
        for s in [0.0, 0.5, 1.3] {
            let want = ((1.0 + xi * xi + de.abs()).powf(s) * (xi * xi + de).abs().sqrt() * cell).sqrt();
            assert!((hs_boundary_norm(&f, s) - want).abs() < 1e-12 * want);
            let want = ((1.0 + xi * xi + de.abs()).powf(-s) / (xi * xi + de).abs().sqrt() * cell).sqrt();
            assert!((hs_dual_norm(&f, s) - want).abs() < 1e-12 * want);
            let want = (bourgain_weight(xi * xi, de, s) * cell).sqrt();
            assert!((bourgain_norm(&f, s) - want).abs() < 1e-12 * want);
        }
    }

    fn random_field(g: &Grid, rng: &mut ChaCha8Rng) -> BoundaryField {
        let c: Vec<(f64, f64, f64, f64)> = (0..3).map(|_| (rng.gen_range(-3.0..3.0), rng.gen_range(5.0..11.0), rng.gen_range(0.5..1.5), rng.gen_range(-2.0..2.0))).collect();
        BoundaryField::from_fn(g, |x, t| {
            c.iter().map(|&(x0, t0, w, k)| C64::from_polar((-(x[0] - x0).powi(2) / w - (t - t0).powi(2) / w).exp(), k * x[0])).sum()
        })
    }

    #[test]
    fn duality_and_monotonicity() {
        let g = grid();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..10 {
            let a = random_field(&g, &mut rng);
            let b = random_field(&g, &mut rng);
            let s = rng.gen_range(0.0..2.0);
            let lhs = frequency_pairing(&a, &b).norm();
            assert!(lhs <= hs_boundary_norm(&a, s) * hs_dual_norm(&b, s) * (1.0 + 1e-10));
            let s2 = s + rng.gen_range(0.0..(2.0 - s));
            assert!(hs_boundary_norm(&a, s) <= hs_boundary_norm(&a, s2));
            let r = bourgain_norm(&a, s) / hs_boundary_norm(&a, s);
            assert!((0.25..=4.0).contains(&r), "{r}");
        }
    }

    #[test]
    fn gaussian_norm_matches_quadrature() {
        // |FT|^2 of exp(-x^2 - (t-3)^2) is pi^2 exp(-(xi^2 + delta^2)/2)
        let g = Grid::new(2, 400.0, 1024, 1.0, 4, 400.0, 1024).unwrap().with_t0(-197.0);
        let f = BoundaryField::from_fn(&g, |x, t| C64::new((-x[0] * x[0] - (t - 3.0).powi(2)).exp(), 0.0));
        let v = hs_boundary_norm(&f, 0.0);
        let inner = |xi: f64| {
            let h = |d: f64| (xi * xi + d).abs().sqrt() * PI * PI * (-(xi * xi + d * d) / 2.0).exp();
            let c = -xi * xi;
            adaptive_simpson(&h, -12.0, c.min(12.0), 1e-12) + adaptive_simpson(&h, c.min(12.0), 12.0, 1e-12)
        };
        let oracle = (2.0 * adaptive_simpson(&inner, 0.0, 10.0, 1e-11)).sqrt();
        assert!((v - oracle).abs() < 1e-4 * oracle, "{v} {oracle}");
    }

    #[test]
    fn traces() {
        let g = grid();
        let f = BoundaryField::from_fn(&g, |x, t| C64::new((-x[0] * x[0]).exp() * (-(t - 3.0).powi(2)).exp(), 0.0));
        let tr = trace_t0(&f);
        let want = BoundaryField::from_fn(&g, |x, _| C64::new((-x[0] * x[0]).exp() * (-9.0f64).exp(), 0.0)).semidiscrete();
        for k in 0..g.n_tan() {
            assert!((tr[k] - want.at(k, 0)).norm() < 1e-12);
        }
        let (ok, rel) = vanishing_traces(&f, 1.0);
        assert!(!ok && rel > 1e-6);
        let h = BoundaryField::from_fn(&g, |x, t| C64::new((-x[0] * x[0]).exp() * (-(t - 8.0).powi(2)).exp(), 0.0));
        assert!(vanishing_traces(&h, 1.0).0);
        assert!(vanishing_traces(&f, 0.25).0);
    }

    #[test]
    fn norm_spec_serde() {
        let n = NormSpec::new(0.5, NormVariant::BesovTime { p: 4.0 }).unwrap();
        let j = serde_json::to_string(&n).unwrap();
        assert_eq!(serde_json::from_str::<NormSpec>(&j).unwrap(), n);
        assert!(NormSpec::new(2.5, NormVariant::HsBoundary).is_err());
        assert!(NormSpec::new(1.0, NormVariant::H1200).is_err());
    }
}
