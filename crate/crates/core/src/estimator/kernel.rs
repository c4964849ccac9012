//! Sup bound of the half-space dispersion kernel `|N_{t,s}| |t - s|^{d/2}`.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::quad::adaptive_gk;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelSample {
    pub y: f64,
    pub y2: f64,
    /// `t - s`
    pub tau: f64,
}

/// `int_R e^{i eta^2 tau} e^{-(y + y2)|eta|} d eta`.
///
/// The half-line integral is taken along the ray `arg eta = pi/4 sign(tau)`, where
/// the phase turns into Gaussian decay; the arc at infinity does not contribute.
pub fn eta_integral(y_sum: f64, tau: f64) -> Result<C64> {
    if tau == 0.0 || y_sum < 0.0 {
        return Err(Error::Domain(format!("need tau != 0 and y + y2 >= 0, got ({tau}, {y_sum})")));
    }
    let rot = C64::from_polar(1.0, PI / 4.0 * tau.signum());
    let a = tau.abs();
    let r_max = (40.0 / a).sqrt();
    let f = |r: f64| (-(a * r * r) - rot * (y_sum * r)).exp();
    let v = adaptive_gk(&f, 0.0, r_max, 1e-15, 1e-12, 4000)?;
    Ok(rot * v * 2.0)
}

/// `|N_{t,s}| |t - s|^{d/2}` at one sample.
pub fn kernel_scaled(d: usize, s: &KernelSample) -> Result<f64> {
    if !(0.1..=10.0).contains(&s.tau.abs()) || s.y < 0.0 || s.y2 < 0.0 {
        return Err(Error::Domain(format!("sample {s:?} outside |t - s| in [0.1, 10], y, y2 >= 0")));
    }
    let a = s.tau.abs();
    let fresnel_x = (PI / a).powf((d as f64 - 1.0) / 2.0);
    let eta = eta_integral(s.y + s.y2, s.tau)?.norm();
    Ok((2.0 * PI).powi(d as i32) * fresnel_x * eta * a.powf(d as f64 / 2.0))
}

/// Tensor sample set: `y, y2` uniform on `[0, y_max]`, `|t - s|` log-uniform on
/// `[0.1, 10]`, both signs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleGrid {
    pub n_y: usize,
    pub y_max: f64,
    pub n_tau: usize,
}

impl SampleGrid {
    pub fn samples(&self) -> Vec<KernelSample> {
        let ys: Vec<f64> = (0..self.n_y).map(|i| self.y_max * i as f64 / (self.n_y.max(2) - 1) as f64).collect();
        let taus: Vec<f64> = (0..self.n_tau).map(|i| 0.1 * 100f64.powf(i as f64 / (self.n_tau.max(2) - 1) as f64)).collect();
        let mut out = Vec::new();
        for &y in &ys {
            for &y2 in &ys {
                for &t in &taus {
                    out.push(KernelSample { y, y2, tau: t });
                    out.push(KernelSample { y, y2, tau: -t });
                }
            }
        }
        out
    }

    pub fn refined(&self) -> SampleGrid {
        SampleGrid { n_y: 2 * self.n_y - 1, y_max: self.y_max, n_tau: 2 * self.n_tau - 1 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelBound {
    pub d: usize,
    pub samples: usize,
    pub sup: f64,
    pub argmax: KernelSample,
}

pub fn kernel_nts_bound(d: usize, samples: &[KernelSample]) -> Result<KernelBound> {
    if !(1..=3).contains(&d) || samples.is_empty() {
        return Err(Error::Domain("need d in 1..=3 and at least one sample".into()));
    }
    let vals: Vec<f64> = samples.par_iter().map(|s| kernel_scaled(d, s)).collect::<Result<_>>()?;
    let (i, &sup) = vals.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap();
    Ok(KernelBound { d, samples: samples.len(), sup, argmax: samples[i] })
}
