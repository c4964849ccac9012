use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::symbol::{BoundarySymbol, TimeDirection};
use crate::error::{Error, Result};
use crate::spectral_core::{BoundaryField, Representation};

/// Sampling of the frequency space `(|xi|, delta, gamma)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleSpec {
    /// log-uniform count over |xi| in [xi_min, xi_max]
    pub n_xi: usize,
    pub xi_min: f64,
    pub xi_max: f64,
    /// log-uniform count per sign over |delta|/|xi|^2 in [ratio_min, ratio_max]
    pub n_ratio: usize,
    pub ratio_min: f64,
    pub ratio_max: f64,
    /// gamma / |xi|^2 values (gamma itself on the xi = 0 slice)
    pub gammas: Vec<f64>,
    pub include_xi_zero: bool,
    pub n_random: usize,
    pub seed: u64,
}

impl Default for SampleSpec {
    fn default() -> Self {
        SampleSpec {
            n_xi: 25,
            xi_min: 1e-3,
            xi_max: 1e3,
            n_ratio: 25,
            ratio_min: 1e-3,
            ratio_max: 1e3,
            gammas: vec![0.0, 1e-3, 1.0, 1e3],
            include_xi_zero: true,
            n_random: 10_000,
            seed: 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrequencyPoint {
    pub xi: f64,
    pub delta: f64,
    pub gamma: f64,
    pub hyperbolic: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KLReport {
    pub symbol: String,
    pub alpha_hat: f64,
    pub beta_hat: f64,
    pub witness_min: FrequencyPoint,
    pub witness_max: FrequencyPoint,
    pub n_samples: usize,
    pub n_excluded: usize,
    /// more than 1% of the samples could not be evaluated
    pub flagged: bool,
    pub direction: TimeDirection,
}

fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    let (la, lb) = (a.ln(), b.ln());
    (0..n).map(|i| (la + (lb - la) * i as f64 / (n - 1) as f64).exp()).collect()
}

/// Sample points as `(|xi|, delta, gamma)` with `gamma >= 0`.
pub fn sample_points(spec: &SampleSpec) -> Vec<(f64, f64, f64)> {
    let mut pts = Vec::new();
    let ratios = logspace(spec.ratio_min, spec.ratio_max, spec.n_ratio);
    for &x in &logspace(spec.xi_min, spec.xi_max, spec.n_xi) {
        let x2 = x * x;
        for &r in &ratios {
            for sign in [-1.0, 1.0] {
                for &g in &spec.gammas {
                    pts.push((x, sign * r * x2, g * x2));
                }
            }
        }
    }
    if spec.include_xi_zero {
        for &r in &ratios {
            for sign in [-1.0, 1.0] {
                for &g in &spec.gammas {
                    pts.push((0.0, sign * r, g));
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (lx0, lx1) = (spec.xi_min.ln(), spec.xi_max.ln());
    let (lr0, lr1) = (spec.ratio_min.ln(), spec.ratio_max.ln());
    for _ in 0..spec.n_random {
        let x = rng.gen_range(lx0..lx1).exp();
        let r = rng.gen_range(lr0..lr1).exp() * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let g = if rng.gen_bool(0.25) { 0.0 } else { rng.gen_range(lr0..lr1).exp() };
        pts.push((x, r * x * x, g * x * x));
    }
    pts
}

/// Sampled infimum and supremum of `|b . V|` over forward (or backward) frequencies.
pub fn kl_margin(symbol: &BoundarySymbol, spec: &SampleSpec, dir: TimeDirection) -> KLReport {
    let sign = match dir {
        TimeDirection::Forward => 1.0,
        TimeDirection::Backward => -1.0,
    };
    let mut alpha = f64::INFINITY;
    let mut beta = 0.0;
    let blank = FrequencyPoint { xi: f64::NAN, delta: f64::NAN, gamma: f64::NAN, hyperbolic: false };
    let mut wmin = blank;
    let mut wmax = blank;
    let mut n = 0;
    let mut excluded = 0;
    for (x, d, g) in sample_points(spec) {
        n += 1;
        let gamma = sign * g;
        let v = symbol.pairing_unchecked(x, C64::new(gamma, d), dir).norm();
        if !v.is_finite() {
            excluded += 1;
            continue;
        }
        let p = FrequencyPoint { xi: x, delta: d, gamma, hyperbolic: x * x + d < 0.0 };
        if v < alpha {
            alpha = v;
            wmin = p;
        }
        if v > beta {
            beta = v;
            wmax = p;
        }
    }
    if alpha == f64::INFINITY {
        alpha = 0.0;
    }
    KLReport {
        symbol: symbol.name.clone(),
        alpha_hat: alpha,
        beta_hat: beta,
        witness_min: wmin,
        witness_max: wmax,
        n_samples: n,
        n_excluded: excluded,
        flagged: excluded * 100 > n,
        direction: dir,
    }
}

fn pairing_grid(g: &BoundaryField, symbol: &BoundarySymbol) -> Result<Vec<C64>> {
    if g.repr != Representation::Frequency {
        return Err(Error::Shape("symbol division needs frequency data".into()));
    }
    let xs = g.grid.xi_sq_values();
    let ds = g.grid.delta_values();
    let mut out = Vec::with_capacity(xs.len() * ds.len());
    for (k, &x2) in xs.iter().enumerate() {
        for (m, &d) in ds.iter().enumerate() {
            let v = symbol.pairing_on_axis(x2, d);
            if !(v.norm() >= 1e-10) {
                return Err(Error::SingularSymbol(format!(
                    "|b.V| = {:.3e} at xi index {k} (|xi|^2 = {x2}), delta index {m} (delta = {d})",
                    v.norm()
                )));
            }
            out.push(v);
        }
    }
    Ok(out)
}

/// `g / (b . V)` on the frequency grid.
pub fn divide_by_lopatinskii(g: &BoundaryField, symbol: &BoundarySymbol) -> Result<BoundaryField> {
    let p = pairing_grid(g, symbol)?;
    let mut out = g.clone();
    for (v, d) in out.values.iter_mut().zip(&p) {
        *v /= d;
    }
    Ok(out)
}

/// Inverse of [`divide_by_lopatinskii`].
pub fn multiply_by_lopatinskii(g: &BoundaryField, symbol: &BoundarySymbol) -> Result<BoundaryField> {
    let p = pairing_grid(g, symbol)?;
    let mut out = g.clone();
    for (v, d) in out.values.iter_mut().zip(&p) {
        *v *= d;
    }
    Ok(out)
}
