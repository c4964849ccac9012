//! Built-in data generators named in run files.

use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value as Json};

use super::config::Section;
use crate::error::{Error, Result};
use crate::estimator::strichartz::{BoundaryGen, SnapshotGen, SpacetimeGen};
use crate::spectral_core::io::{read_field, AnyField};
use crate::spectral_core::{BoundaryField, Grid, SampledField, YExtent};

/// Smooth plateau on `[lo, hi]`, within 1e-11 of 1 on the middle four fifths.
pub fn erf_window(t: f64, lo: f64, hi: f64) -> f64 {
    let w = (hi - lo) / 10.0;
    0.25 * (1.0 + libm::erf((t - lo) / w - 5.0)) * (1.0 + libm::erf((hi - t) / w - 5.0))
}

fn per_axis(sec: &Section, key: &str, n: usize, default: f64) -> Result<Vec<f64>> {
    match sec.opt_f64_list(key)? {
        None => Ok(vec![default; n]),
        Some(v) if v.len() == 1 => Ok(vec![v[0]; n]),
        Some(v) if v.len() == n => Ok(v),
        Some(v) => Err(sec.error_at(key, format!("expected 1 or {n} values, found {}", v.len()))),
    }
}

struct Gaussian {
    center: Vec<f64>,
    width: Vec<f64>,
    momentum: Vec<f64>,
    amplitude: f64,
    /// optional plateau on the last coordinate
    window: Option<(f64, f64)>,
}

impl Gaussian {
    fn read(sec: &Section, n: usize) -> Result<Gaussian> {
        let window = match sec.opt_f64_list("window")? {
            None => None,
            Some(w) if w.len() == 2 && w[0] < w[1] => Some((w[0], w[1])),
            Some(_) => return Err(sec.error_at("window", "expected [lo, hi] with lo < hi")),
        };
        let width = per_axis(sec, "width", n, 1.0)?;
        if width.iter().any(|w| !(*w > 0.0)) {
            return Err(sec.error_at("width", "widths must be positive"));
        }
        Ok(Gaussian {
            center: per_axis(sec, "center", n, 0.0)?,
            width,
            momentum: per_axis(sec, "momentum", n, 0.0)?,
            amplitude: sec.f64_or("amplitude", 1.0)?,
            window,
        })
    }

    fn eval(&self, p: &[f64]) -> C64 {
        let mut e = 0.0;
        let mut ph = 0.0;
        for (i, &v) in p.iter().enumerate() {
            let z = (v - self.center[i]) / self.width[i];
            e += z * z;
            ph += self.momentum[i] * v;
        }
        let mut a = self.amplitude * (-0.5 * e).exp();
        if let Some((lo, hi)) = self.window {
            a *= erf_window(*p.last().unwrap(), lo, hi);
        }
        C64::from_polar(a, ph)
    }
}

/// Random sum of Gaussians in `(x, y)`, deterministic in the seed.
fn mixture(sec: &Section, grid: &Grid, seed: u64) -> Result<SnapshotGen> {
    let count = sec.usize_or("count", 3)?;
    if count == 0 {
        return Err(sec.error_at("count", "need at least one component"));
    }
    let m = grid.m();
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(sec.usize_or("index", 0)? as u64));
    let spread_x = sec.f64_or("spread_x", grid.lx / 8.0)?;
    let (y_lo, y_hi) = match sec.opt_f64_list("y_range")? {
        Some(v) if v.len() == 2 => (v[0], v[1]),
        Some(_) => return Err(sec.error_at("y_range", "expected [lo, hi]")),
        None => (-grid.ly / 8.0, grid.ly / 8.0),
    };
    let comps: Vec<Gaussian> = (0..count)
        .map(|_| {
            let mut center: Vec<f64> = (0..m).map(|_| rng.gen_range(-spread_x..=spread_x)).collect();
            center.push(rng.gen_range(y_lo..=y_hi));
            let w = rng.gen_range(0.7..1.5);
            let momentum: Vec<f64> = (0..=m).map(|_| rng.gen_range(-1.0..1.0)).collect();
            Gaussian { center, width: vec![w; m + 1], momentum, amplitude: rng.gen_range(0.5..1.5), window: None }
        })
        .collect();
    Ok(Arc::new(move |x: &[f64], y: f64| {
        let mut p = x.to_vec();
        p.push(y);
        comps.iter().map(|c| c.eval(&p)).sum()
    }))
}

/// Where a data section puts its samples.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    Snapshot,
    Boundary,
    Spacetime,
}

pub enum Data {
    Snapshot(SnapshotGen),
    Boundary(BoundaryGen),
    Spacetime(SpacetimeGen),
    File(AnyField),
}

fn kind(sec: &Section) -> Result<&str> {
    sec.str("kind")
}

/// Grid mode nearest to the requested frequencies.
fn single_mode(sec: &Section, grid: &Grid) -> Result<(BoundaryGen, Json)> {
    let m = grid.m();
    let xi = per_axis(sec, "xi0", m, 0.0)?;
    let xi2: f64 = xi.iter().map(|v| v * v).sum();
    let delta = match (sec.opt_f64("delta0")?, sec.opt_f64("eta0")?) {
        (Some(d), None) => d,
        (None, Some(e)) => match sec.str_or("region", "hyperbolic")? {
            "hyperbolic" => -xi2 - e * e,
            "elliptic" => e * e - xi2,
            _ => return Err(sec.error_at("region", "region is 'hyperbolic' or 'elliptic'")),
        },
        _ => return Err(sec.error_at("kind", "single-mode needs exactly one of delta0, eta0")),
    };
    let nearest = |vals: Vec<f64>, v: f64| vals.into_iter().min_by(|a, b| (a - v).abs().total_cmp(&(b - v).abs())).unwrap();
    let xs: Vec<f64> = xi.iter().map(|&v| nearest(grid.xi_values(), v)).collect();
    let d = nearest(grid.delta_values(), delta);
    let amp = sec.f64_or("amplitude", 1.0)?;
    let info = json!({ "xi": xs, "delta": d, "requested_delta": delta });
    Ok((Arc::new(move |x: &[f64], t: f64| C64::from_polar(amp, x.iter().zip(&xs).map(|(a, b)| a * b).sum::<f64>() + d * t)), info))
}

/// Read the data section `sec` for the given role. The JSON value records the
/// resolved parameters.
pub fn read_data(sec: &Section, grid: &Grid, role: Role, seed: u64, base: &Path) -> Result<(Data, Json)> {
    let m = grid.m();
    let k = kind(sec)?;
    match (k, role) {
        ("file", _) => {
            let path = base.join(sec.str("path")?);
            let f = read_field(&path)?;
            Ok((Data::File(f), json!({ "kind": "file", "path": path.display().to_string() })))
        }
        ("zero", Role::Snapshot) => Ok((Data::Snapshot(Arc::new(|_, _| C64::new(0.0, 0.0))), json!({ "kind": "zero" }))),
        ("zero", Role::Boundary) => Ok((Data::Boundary(Arc::new(|_, _| C64::new(0.0, 0.0))), json!({ "kind": "zero" }))),
        ("zero", Role::Spacetime) => Ok((Data::Spacetime(Arc::new(|_, _, _| C64::new(0.0, 0.0))), json!({ "kind": "zero" }))),
        ("gaussian", role) => {
            let n = match role {
                Role::Snapshot | Role::Boundary => m + 1,
                Role::Spacetime => m + 2,
            };
            let gs = Gaussian::read(sec, n)?;
            let info = json!({ "kind": "gaussian", "center": gs.center, "width": gs.width, "momentum": gs.momentum, "amplitude": gs.amplitude, "window": gs.window });
            let d = match role {
                Role::Snapshot | Role::Boundary => {
                    let f: Arc<dyn Fn(&[f64], f64) -> C64 + Send + Sync> = Arc::new(move |x: &[f64], s: f64| {
                        let mut p = x.to_vec();
                        p.push(s);
                        gs.eval(&p)
                    });
                    if role == Role::Snapshot {
                        Data::Snapshot(f)
                    } else {
                        Data::Boundary(f)
                    }
                }
                Role::Spacetime => Data::Spacetime(Arc::new(move |x: &[f64], y: f64, t: f64| {
                    let mut p = x.to_vec();
                    p.push(y);
                    p.push(t);
                    gs.eval(&p)
                })),
            };
            Ok((d, info))
        }
        ("single-mode", Role::Boundary) => {
            let (g, info) = single_mode(sec, grid)?;
            Ok((Data::Boundary(g), json!({ "kind": "single-mode", "mode": info })))
        }
        ("mixture", Role::Snapshot) => Ok((Data::Snapshot(mixture(sec, grid, seed)?), json!({ "kind": "mixture", "count": sec.usize_or("count", 3)?, "seed": seed }))),
        (other, _) => Err(sec.error_at("kind", format!("data kind '{other}' is not available for [{}]", sec.name))),
    }
}

impl Data {
    pub fn snapshot(&self, grid: &Grid, extent: YExtent) -> Result<SampledField> {
        match self {
            Data::Snapshot(f) => Ok(SampledField::snapshot_from_fn(grid, extent, |x, y| f(x, y))),
            Data::File(AnyField::Volume(v)) if v.nt_len() == 1 => check_grid(v.grid == *grid, v.clone()),
            _ => Err(Error::Shape("expected initial data (a snapshot)".into())),
        }
    }

    pub fn boundary(&self, grid: &Grid) -> Result<BoundaryField> {
        match self {
            Data::Boundary(f) => Ok(BoundaryField::from_fn(grid, |x, t| f(x, t))),
            Data::File(AnyField::Boundary(b)) => check_grid(b.grid == *grid, b.clone()),
            _ => Err(Error::Shape("expected boundary data".into())),
        }
    }

    pub fn spacetime(&self, grid: &Grid, extent: YExtent) -> Result<SampledField> {
        match self {
            Data::Spacetime(f) => Ok(SampledField::spacetime_from_fn(grid, extent, grid.t_values(), |x, y, t| f(x, y, t))),
            Data::File(AnyField::Volume(v)) => check_grid(v.grid == *grid, v.clone()),
            _ => Err(Error::Shape("expected a space-time field".into())),
        }
    }
}

fn check_grid<T>(same: bool, v: T) -> Result<T> {
    if same {
        Ok(v)
    } else {
        Err(Error::Shape("field file grid differs from the run grid".into()))
    }
}
