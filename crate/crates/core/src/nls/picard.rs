//! Fixed-point iteration for the Dirichlet problem.
//!
//! With the odd continuation in `y` the whole-space Duhamel term already has zero
//! trace, so `Φ(v) = L + D(F(v))` where `L` is the linear solution for `(u0, g)`
//! and `D` the Duhamel operator of the odd extension. `L` is computed once.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::norms::{besov_window, h1_norm, h1_profile, lp_w1q};
use super::problem::{apply_nonlinearity, AdmissiblePair, NLSProblem};
use crate::error::{Error, Result};
use crate::halfspace_solver::{duhamel, extend_full, solve_ibvp, Extension, IbvpData};
use crate::hs_spaces::{extend_pt, hs_boundary_norm, lp_lq};
use crate::spectral_core::{DomainTag, SampledField};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterRecord {
    pub iter: usize,
    /// `d(v_{n+1}, v_n)` in `L^inf L^2 ∩ L^p L^q`
    pub distance: f64,
    /// ratio of successive distances
    pub contraction: Option<f64>,
    pub monitor: f64,
}

#[derive(Clone, Debug)]
pub struct PicardResult {
    pub u: SampledField,
    pub log: Vec<IterRecord>,
}

impl PicardResult {
    pub fn max_contraction(&self) -> f64 {
        self.log.iter().filter_map(|r| r.contraction).fold(0.0, f64::max)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("iter,contraction,monitor\n");
        for r in &self.log {
            let c = r.contraction.map(|c| format!("{c:.6e}")).unwrap_or_default();
            s += &format!("{},{},{:.6e}\n", r.iter, c, r.monitor);
        }
        s
    }
}

/// Linear Dirichlet solution for `(u0, g)` on the whole time window.
pub fn linear_part(prob: &NLSProblem) -> Result<SampledField> {
    let mut data = IbvpData::new(prob.u0.clone(), prob.symbol());
    data.g = Some(prob.g.clone());
    data.s = 1.0;
    Ok(solve_ibvp(&data)?.u)
}

/// First `n` time slots of a space-time field.
pub fn head(u: &SampledField, n: usize) -> SampledField {
    let nt = u.nt_len();
    let mut out = SampledField::zeros(&u.grid, DomainTag::VolumeSpacetime, u.extent, u.times[..n].to_vec());
    out.repr = u.repr;
    for i in 0..u.values.len() / nt {
        out.values[i * n..(i + 1) * n].copy_from_slice(&u.values[i * nt..i * nt + n]);
    }
    out
}

pub(crate) fn sub(a: &SampledField, b: &SampledField) -> SampledField {
    let mut e = a.clone();
    for (x, y) in e.values.iter_mut().zip(&b.values) {
        *x -= y;
    }
    e
}

/// `d(u, v) = ||u - v||_{L^inf L^2} + ||u - v||_{L^p L^q}`.
pub fn distance(u: &SampledField, v: &SampledField, pair: AdmissiblePair) -> Result<f64> {
    let e = sub(u, v);
    Ok(lp_lq(&e, f64::INFINITY, 2.0)? + lp_lq(&e, pair.p, pair.q)?)
}

/// `m(T) = ||u||_{L^inf H^1} + ||u||_{L^p W^{1,q}} + ||u||_{B^{1/2}_{p,2} L^q}` over the sampled times.
/// Besov differences stay inside the window, so `m` is nondecreasing in `T`.
pub fn monitor(u: &SampledField, pair: AdmissiblePair) -> Result<f64> {
    let sup = h1_profile(u)?.into_iter().fold(0.0, f64::max);
    let w = lp_w1q(u, pair.p, pair.q)?;
    let max_shift = ((u.grid.lt / 4.0) / u.grid.dt()).floor() as usize;
    let besov = besov_window(u, 0.5, pair.p, pair.q, max_shift)?;
    Ok(sup + w + besov)
}

/// `L + D(epsilon |P v|^{a-1} P v)` on the slots of `v`.
fn phi(prob: &NLSProblem, lin: &SampledField, v: &SampledField, local: bool) -> Result<SampledField> {
    let n = v.nt_len();
    let pv = if local { extend_pt(v, prob.big_t, prob.cutoff)? } else { v.clone() };
    let mut f = pv;
    apply_nonlinearity(prob.a, prob.epsilon, &mut f.values);
    let d = duhamel(&extend_full(&f, Extension::Odd)?)?.restrict_half();
    let mut out = head(lin, n);
    for (a, b) in out.values.iter_mut().zip(&d.values) {
        *a += b;
    }
    Ok(out)
}

fn slots_until(u: &SampledField, t: f64) -> Result<usize> {
    let dt = u.grid.dt();
    let r = t / dt;
    if (r - r.round()).abs() > 1e-6 || r.round() as usize >= u.nt_len() {
        return Err(Error::Domain(format!("T = {t} is not a time sample inside the window")));
    }
    Ok(r.round() as usize + 1)
}

fn iterate(prob: &NLSProblem, lin: &SampledField, mut v: SampledField, local: bool) -> Result<PicardResult> {
    let pair = prob.pair();
    let mut log = Vec::new();
    let mut prev: Option<f64> = None;
    for it in 1..=prob.max_iter {
        let next = phi(prob, lin, &v, local)?;
        let dist = distance(&next, &v, pair)?;
        let contraction = prev.map(|p| if p > 0.0 { dist / p } else { 0.0 });
        let m = monitor(&next, pair)?;
        log.push(IterRecord { iter: it, distance: dist, contraction, monitor: m });
        v = next;
        if dist <= prob.tol {
            return Ok(PicardResult { u: v, log });
        }
        prev = Some(dist);
    }
    let factor = log.last().and_then(|r| r.contraction).unwrap_or(f64::INFINITY);
    if factor >= 1.0 {
        return Err(Error::NonContraction { factor, iters: prob.max_iter });
    }
    Err(Error::Accuracy(format!("no convergence to {:.1e} in {} iterations (factor {factor:.3e})", prob.tol, prob.max_iter)))
}

/// Local solution on `[0, T]`, starting from `v = 0` or from `init`.
pub fn picard_solve(prob: &NLSProblem) -> Result<PicardResult> {
    picard_solve_from(prob, None)
}

pub fn picard_solve_from(prob: &NLSProblem, init: Option<&SampledField>) -> Result<PicardResult> {
    prob.validate()?;
    let lin = linear_part(prob)?;
    let n = slots_until(&lin, prob.big_t)?;
    let v0 = match init {
        Some(v) => head(v, n),
        None => {
            let mut z = head(&lin, n);
            z.values.iter_mut().for_each(|x| *x = C64::new(0.0, 0.0));
            z
        }
    };
    iterate(prob, &lin, v0, true)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GlobalOptions {
    /// largest admissible `||u0||_{H^1} + ||g||_{𝓗^1}`
    pub smallness: f64,
    /// `m(T)` must stay below `bound_factor` times the data size
    pub bound_factor: f64,
}

impl Default for GlobalOptions {
    fn default() -> Self {
        GlobalOptions { smallness: 1e-2, bound_factor: 10.0 }
    }
}

#[derive(Clone, Debug)]
pub struct GlobalRun {
    pub problem: NLSProblem,
    pub horizon: f64,
    pub u: SampledField,
    pub linear: SampledField,
    pub data_size: f64,
    /// `(T_k, m(T_k))` after each continuation step
    pub monitor: Vec<(f64, f64)>,
    pub logs: Vec<Vec<IterRecord>>,
}

pub fn data_size(prob: &NLSProblem) -> Result<f64> {
    Ok(h1_norm(&prob.u0, 0)? + hs_boundary_norm(&prob.g, 1.0))
}

/// Continue the local solution in steps of `T` up to `horizon`. Each step
/// re-solves on `[0, kT]` from the previous solution; causality of the
/// Duhamel sum makes the forcing beyond `kT` irrelevant.
pub fn global_small_solve(prob: &NLSProblem, horizon: f64, opts: &GlobalOptions) -> Result<GlobalRun> {
    prob.validate()?;
    let d = prob.dim() as f64;
    if prob.a < 1.0 + 4.0 / d - 1e-12 {
        return Err(Error::Domain(format!("global small-data theory needs a >= {}", 1.0 + 4.0 / d)));
    }
    let size = data_size(prob)?;
    if size > opts.smallness {
        return Err(Error::Smallness { monitor: size, bound: opts.smallness });
    }
    let lin = linear_part(prob)?;
    let n_end = slots_until(&lin, horizon)?;
    let pair = prob.pair();
    let bound = opts.bound_factor * size;
    let steps = (horizon / prob.big_t).ceil() as usize;
    let mut v = head(&lin, n_end);
    v.values.iter_mut().for_each(|x| *x = C64::new(0.0, 0.0));
    let mut monitor_log = Vec::new();
    let mut logs = Vec::new();
    for k in 1..=steps {
        let tk = (k as f64 * prob.big_t).min(horizon);
        let n = slots_until(&lin, tk)?;
        let r = iterate(prob, &lin, head(&v, n), false)?;
        let m = monitor(&r.u, pair)?;
        monitor_log.push((tk, m));
        logs.push(r.log);
        if m > bound {
            return Err(Error::Smallness { monitor: m, bound });
        }
        // warm start for the next window: solution so far, linear part beyond
        let nt = v.nt_len();
        let lin_end = head(&lin, n_end);
        for i in 0..v.values.len() / nt {
            for j in 0..nt {
                v.values[i * nt + j] = if j < n { r.u.values[i * n + j] } else { lin_end.values[i * nt + j] };
            }
        }
    }
    Ok(GlobalRun { problem: prob.clone(), horizon, u: v, linear: head(&lin, n_end), data_size: size, monitor: monitor_log, logs })
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::{data, grid};
    use super::*;
    use crate::spectral_core::{BoundaryField, YExtent};

    fn sup_l2(u: &SampledField) -> f64 {
        (0..u.nt_len()).map(|n| u.l2_at(n)).fold(0.0, f64::max)
    }

    fn problem(size: f64) -> NLSProblem {
        let (u0, g) = data(&grid(), size, (0.1, 1.9));
        let mut p = NLSProblem::new(u0, g);
        p.tol = 1e-12 * size;
        p
    }

    #[test]
    fn zero_data_is_a_fixed_point() {
        let grid = grid();
        let u0 = SampledField::zeros(&grid, DomainTag::VolumeSnapshot, YExtent::Half, vec![0.0]);
        let r = picard_solve(&NLSProblem::new(u0, BoundaryField::zeros(&grid))).unwrap();
        assert_eq!(r.log.len(), 1);
        assert_eq!(r.u.max_abs(), 0.0);
    }

    #[test]
    fn small_data_contracts() {
        let r = picard_solve(&problem(1e-3)).unwrap();
        assert!(r.log.len() <= 6, "{} iterations", r.log.len());
        assert!(r.max_contraction() <= 0.1, "factor {}", r.max_contraction());
    }

    #[test]
    fn nonlinear_correction_is_cubic() {
        let mut pts = Vec::new();
        for size in [1e-2, 1e-3, 1e-4] {
            let p = problem(size);
            let r = picard_solve(&p).unwrap();
            let lin = head(&linear_part(&p).unwrap(), r.u.nt_len());
            pts.push((size.ln(), sup_l2(&sub(&r.u, &lin)).ln()));
        }
        for w in pts.windows(2) {
            let slope = (w[1].1 - w[0].1) / (w[1].0 - w[0].0);
            assert!((slope - 3.0).abs() < 0.05, "slope {slope}");
        }
    }

    #[test]
    fn fixed_point_is_unique() {
        let p = problem(1e-2);
        let a = picard_solve(&p).unwrap();
        let lin = linear_part(&p).unwrap();
        let mut init = lin.clone();
        init.values.iter_mut().for_each(|v| *v *= 3.0);
        let b = picard_solve_from(&p, Some(&init)).unwrap();
        assert!(distance(&a.u, &b.u, p.pair()).unwrap() <= 2.0 * p.tol);
    }

    #[test]
    fn sign_of_the_nonlinearity_is_a_cubic_effect() {
        let mut p = problem(1e-3);
        let plus = picard_solve(&p).unwrap().u;
        p.epsilon = -1.0;
        let minus = picard_solve(&p).unwrap().u;
        assert!(sup_l2(&sub(&plus, &minus)) <= 1e-2 * sup_l2(&plus));
    }

    #[test]
    fn boundary_data_after_the_window_is_ignored() {
        let p = problem(1e-2);
        let a = picard_solve(&p).unwrap();
        let mut q = p.clone();
        let mut g = q.g.physical();
        let nt = g.grid.nt;
        // smooth switch-off after T, below 1e-8 of the data on [0, T]; a hard cut
        // rings through the band-limited time axis
        let dt = g.grid.dt();
        for k in 0..g.grid.n_tan() {
            for n in 0..nt {
                let t = n as f64 * dt;
                g.values[k * nt + n] *= 0.5 * libm::erfc((t - p.big_t) / 0.2 - 4.0);
            }
        }
        q.g = g;
        let b = picard_solve(&q).unwrap();
        assert!(sup_l2(&sub(&a.u, &b.u)) <= 1e-6 * sup_l2(&a.u));
    }

    #[test]
    fn global_monitor_stays_bounded() {
        let (u0, g) = data(&grid(), 1e-3, (0.1, 1.9));
        let p = NLSProblem::new(u0, g);
        let run = global_small_solve(&p, 2.0, &GlobalOptions::default()).unwrap();
        let first = run.monitor[0].1;
        let last = run.monitor.last().unwrap().1;
        assert!(run.monitor.windows(2).all(|w| w[1].1 >= w[0].1 * (1.0 - 1e-9)));
        assert!(last <= 2.0 * first, "{first} -> {last}");
    }

    #[test]
    fn csv_log_has_one_row_per_iteration() {
        let r = picard_solve(&problem(1e-3)).unwrap();
        assert_eq!(r.to_csv().lines().count(), r.log.len() + 1);
    }
}
