//! Band weights for the optimality question and the weighted Hilbert form
//! `int int J(xi, e1) J(xi, e2) / (e1 + e2) phi(e1) phi(e2) de1 de2`, slice by slice in `xi`.

use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::quad::{gauss_legendre, top_eigenpair};
use crate::error::{Error, Result};

/// `r = j` on `2^j - 2^{-j} <= eta/|xi| <= 2^j` (`1 <= j <= j_max`), else 0; `J = 1 + r`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BandWeight {
    pub j_max: u32,
}

impl BandWeight {
    pub fn band(&self, xi: f64, eta: f64) -> u32 {
        let ax = xi.abs();
        if ax == 0.0 || eta <= 0.0 {
            return 0;
        }
        let s = eta / ax;
        (1..=self.j_max).find(|&j| {
            let top = 2f64.powi(j as i32);
            s >= top - 1.0 / top && s <= top
        }).unwrap_or(0)
    }

    pub fn j(&self, xi: f64, eta: f64) -> f64 {
        1.0 + self.band(xi, eta) as f64
    }

    /// `p(xi, delta) = sqrt(delta + xi^2) / J^2` in the elliptic region.
    pub fn p(&self, xi: f64, delta: f64) -> f64 {
        let eta = (delta + xi * xi).max(0.0).sqrt();
        eta / self.j(xi, eta).powi(2)
    }

    pub fn sup_j(&self) -> f64 {
        1.0 + self.j_max as f64
    }

    /// Band edges in `eta / |xi|`.
    pub fn edges(&self) -> Vec<f64> {
        (1..=self.j_max as i32).flat_map(|j| [2f64.powi(j) - 2f64.powi(-j), 2f64.powi(j)]).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightTable {
    pub xi: Vec<f64>,
    pub eta: Vec<f64>,
    /// `[xi][eta]`
    pub r: Vec<Vec<u32>>,
    pub j: Vec<Vec<f64>>,
    pub p: Vec<Vec<f64>>,
    pub sup_j: f64,
}

pub fn appendix_weight_build(j_max: u32, xi: &[f64], eta: &[f64]) -> Result<(BandWeight, WeightTable)> {
    if j_max < 1 {
        return Err(Error::Domain("j_max must be at least 1".into()));
    }
    let w = BandWeight { j_max };
    let r: Vec<Vec<u32>> = xi.iter().map(|&x| eta.iter().map(|&e| w.band(x, e)).collect()).collect();
    let j: Vec<Vec<f64>> = r.iter().map(|row| row.iter().map(|&b| 1.0 + b as f64).collect()).collect();
    let p: Vec<Vec<f64>> = j.iter().map(|row| eta.iter().zip(row).map(|(&e, &jj)| e / (jj * jj)).collect()).collect();
    let sup_j = j.iter().flatten().cloned().fold(1.0, f64::max);
    Ok((w, WeightTable { xi: xi.to_vec(), eta: eta.to_vec(), r, j, p, sup_j }))
}

#[derive(Clone)]
pub enum Weight {
    One,
    Bands(BandWeight),
}

impl Weight {
    fn value(&self, xi: f64, eta: f64) -> f64 {
        match self {
            Weight::One => 1.0,
            Weight::Bands(b) => b.j(xi, eta),
        }
    }

    fn edges(&self) -> Vec<f64> {
        match self {
            Weight::One => vec![],
            Weight::Bands(b) => b.edges(),
        }
    }
}

pub type SliceFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum TestFunction {
    /// indicator of `lo <= eta <= hi` on every slice
    Indicator { lo: f64, hi: f64 },
    /// constant on each band `j <= j_max` of the weight, with unit `L^2` mass per band
    BandMass { j_max: u32 },
    /// the maximiser of the discrete form on each slice
    Sup,
    Custom(SliceFn),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FormRatioReport {
    pub k_max: u32,
    pub j_max: u32,
    pub ratio: f64,
    /// ratio with `k_max` and the resolution doubled
    pub refined_ratio: f64,
    pub plateau_flag: bool,
    pub nodes_per_slice: usize,
}

/// Quadrature in `eta` on one slice: Gauss panels in `log eta` between the dyadic
/// points `2^k |xi|, |k| <= k_max`, all band edges and the edges of `phi`.
struct SliceRule {
    eta: Vec<f64>,
    w: Vec<f64>,
}

fn slice_rule(xi: f64, k_max: u32, weight: &Weight, phi: &TestFunction, gauss: usize) -> SliceRule {
    let ax = xi.abs().max(1e-300);
    let mut br: Vec<f64> = (-(k_max as i32)..=k_max as i32).map(|k| 2f64.powi(k) * ax).collect();
    br.extend(weight.edges().iter().map(|e| e * ax));
    match phi {
        TestFunction::Indicator { lo, hi } => br.extend([*lo, *hi]),
        TestFunction::BandMass { j_max } => br.extend(BandWeight { j_max: *j_max }.edges().iter().map(|e| e * ax)),
        _ => {}
    }
    let (lo, hi) = (br[0], br[2 * k_max as usize]);
    br.retain(|&b| b >= lo && b <= hi);
    br.sort_by(f64::total_cmp);
    br.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * b.abs());
    let (gx, gw) = gauss_legendre(gauss);
    let mut eta = Vec::new();
    let mut w = Vec::new();
    for p in br.windows(2) {
        let (a, b) = (p[0].ln(), p[1].ln());
        let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
        for (x, wx) in gx.iter().zip(&gw) {
            let e = (c + h * x).exp();
            eta.push(e);
            w.push(h * wx * e);
        }
    }
    SliceRule { eta, w }
}

fn phi_values(phi: &TestFunction, xi: f64, rule: &SliceRule) -> Vec<f64> {
    match phi {
        TestFunction::Indicator { lo, hi } => rule.eta.iter().map(|&e| if e >= *lo && e <= *hi { 1.0 } else { 0.0 }).collect(),
        TestFunction::BandMass { j_max } => {
            let b = BandWeight { j_max: *j_max };
            let ax = xi.abs();
            rule.eta
                .iter()
                .map(|&e| {
                    let j = b.band(xi, e) as i32;
                    if j == 0 {
                        0.0
                    } else {
                        // band length in eta is |xi| 2^{-j}
                        (1.0 / (ax * 2f64.powi(-j))).sqrt()
                    }
                })
                .collect()
        }
        TestFunction::Custom(f) => rule.eta.iter().map(|&e| f(xi, e)).collect(),
        TestFunction::Sup => vec![],
    }
}

/// `(form, ||phi||^2)` on one slice.
fn slice_form(xi: f64, k_max: u32, weight: &Weight, phi: &TestFunction, gauss: usize) -> (f64, f64, usize) {
    let rule = slice_rule(xi, k_max, weight, phi, gauss);
    let n = rule.eta.len();
    let jv: Vec<f64> = rule.eta.iter().map(|&e| weight.value(xi, e)).collect();
    // symmetric half-density matrix sqrt(w_a) J_a J_b / (e_a + e_b) sqrt(w_b)
    let sw: Vec<f64> = rule.w.iter().map(|w| w.sqrt()).collect();
    let entry = |a: usize, b: usize| sw[a] * jv[a] * jv[b] * sw[b] / (rule.eta[a] + rule.eta[b]);
    if let TestFunction::Sup = phi {
        let apply = |x: &[f64], y: &mut [f64]| {
            for (a, ya) in y.iter_mut().enumerate() {
                *ya = (0..n).map(|b| entry(a, b) * x[b]).sum();
            }
        };
        let (lam, _) = top_eigenpair(n, &apply, 1e-13);
        return (lam, 1.0, n);
    }
    let f = phi_values(phi, xi, &rule);
    let v: Vec<f64> = f.iter().zip(&sw).map(|(a, b)| a * b).collect();
    let mut form = 0.0;
    for a in 0..n {
        if v[a] == 0.0 {
            continue;
        }
        form += v[a] * (0..n).map(|b| entry(a, b) * v[b]).sum::<f64>();
    }
    let mass: f64 = v.iter().map(|x| x * x).sum();
    (form, mass, n)
}

/// Form value over `||phi||^2` summed over the slices `xi`; for `Sup`, the
/// largest slice eigenvalue.
fn form_ratio(weight: &Weight, phi: &TestFunction, xi: &[f64], k_max: u32, gauss: usize) -> (f64, usize) {
    let parts: Vec<(f64, f64, usize)> = xi.par_iter().map(|&x| slice_form(x, k_max, weight, phi, gauss)).collect();
    let nodes = parts.iter().map(|p| p.2).max().unwrap_or(0);
    if let TestFunction::Sup = phi {
        return (parts.iter().map(|p| p.0).fold(0.0, f64::max), nodes);
    }
    let form: f64 = parts.iter().map(|p| p.0).sum();
    let mass: f64 = parts.iter().map(|p| p.1).sum();
    (if mass > 0.0 { form / mass } else { 0.0 }, nodes)
}

pub const DEFAULT_GAUSS: usize = 8;

pub fn appendix_form_ratio(weight: &Weight, phi: &TestFunction, xi: &[f64], k_max: u32) -> Result<FormRatioReport> {
    if xi.is_empty() || k_max == 0 {
        return Err(Error::Domain("need at least one slice and k_max >= 1".into()));
    }
    let (ratio, nodes) = form_ratio(weight, phi, xi, k_max, DEFAULT_GAUSS);
    let (refined_ratio, _) = form_ratio(weight, phi, xi, 2 * k_max, 2 * DEFAULT_GAUSS);
    let plateau_flag = ratio.is_finite() && (refined_ratio - ratio).abs() <= 0.05 * ratio.abs().max(1e-300);
    let j_max = match weight {
        Weight::One => 0,
        Weight::Bands(b) => b.j_max,
    };
    Ok(FormRatioReport { k_max, j_max, ratio, refined_ratio, plateau_flag, nodes_per_slice: nodes })
}

/// Hilbert's constant, the supremum for `J = 1` on the whole half line.
pub const HILBERT_CONSTANT: f64 = PI;
