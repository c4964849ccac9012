//! Sobolev-type norms of half-space fields: tangential derivatives spectrally,
//! the normal derivative by fourth-order differences.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::spectral_core::field::transform_tangential;
use crate::hs_spaces::lp_lq;
use crate::spectral_core::{DomainTag, Representation, SampledField, YExtent, ZERO};

/// Gradient components `[d_x1, .., d_x(d-1), d_y]`, each laid out like `u.values`.
pub fn gradient(u: &SampledField) -> Result<Vec<Vec<C64>>> {
    if u.repr != Representation::Physical || u.extent != YExtent::Half {
        return Err(Error::Shape("gradient needs a physical half-line field".into()));
    }
    let grid = &u.grid;
    let ny = grid.ny;
    let nt = u.nt_len();
    let mut out = Vec::with_capacity(grid.d);
    let mut hat = u.values.clone();
    transform_tangential(&mut hat, grid, &[ny, nt], true);
    let per_k = ny * nt;
    for a in 0..grid.m() {
        let mut c = hat.clone();
        for k in 0..grid.n_tan() {
            let xi = grid.xi_vec(k)[a];
            c[k * per_k..(k + 1) * per_k].iter_mut().for_each(|v| *v *= C64::new(0.0, xi));
        }
        transform_tangential(&mut c, grid, &[ny, nt], false);
        out.push(c);
    }
    out.push(normal_derivative(u));
    Ok(out)
}

/// Fourth-order differences in `y`, one-sided near both ends of the window.
fn normal_derivative(u: &SampledField) -> Vec<C64> {
    const C: [f64; 5] = [1.0, -8.0, 0.0, 8.0, -1.0];
    const L0: [f64; 5] = [-25.0, 48.0, -36.0, 16.0, -3.0];
    const L1: [f64; 5] = [-3.0, -10.0, 18.0, -6.0, 1.0];
    let grid = &u.grid;
    let ny = grid.ny;
    let nt = u.nt_len();
    let h = 12.0 * grid.dy();
    let mut d = vec![ZERO; u.values.len()];
    let at = |k: usize, j: usize, n: usize| u.values[(k * ny + j) * nt + n];
    for k in 0..grid.n_tan() {
        for j in 0..ny {
            for n in 0..nt {
                let s: C64 = if j >= 2 && j + 2 < ny {
                    (0..5).map(|i| at(k, j + i - 2, n) * C[i]).sum()
                } else if j == 0 {
                    (0..5).map(|i| at(k, i, n) * L0[i]).sum()
                } else if j == 1 {
                    (0..5).map(|i| at(k, i, n) * L1[i]).sum()
                } else if j + 1 == ny {
                    -(0..5).map(|i| at(k, ny - 1 - i, n) * L0[i]).sum::<C64>()
                } else {
                    -(0..5).map(|i| at(k, ny - 1 - i, n) * L1[i]).sum::<C64>()
                };
                d[(k * ny + j) * nt + n] = s / h;
            }
        }
    }
    d
}

fn slot_lq(vals: &[C64], nt: usize, n: usize, meas: f64, q: f64) -> f64 {
    let it = vals.iter().skip(n).step_by(nt);
    if q.is_infinite() {
        return it.map(|v| v.norm()).fold(0.0, f64::max);
    }
    (it.map(|v| v.norm().powf(q)).sum::<f64>() * meas).powf(1.0 / q)
}

fn grad_lq(grad: &[Vec<C64>], nt: usize, n: usize, meas: f64, q: f64) -> f64 {
    let len = grad[0].len();
    let mags = (n..len).step_by(nt).map(|i| grad.iter().map(|c| c[i].norm_sqr()).sum::<f64>().sqrt());
    if q.is_infinite() {
        return mags.fold(0.0, f64::max);
    }
    (mags.map(|v| v.powf(q)).sum::<f64>() * meas).powf(1.0 / q)
}

fn measure(u: &SampledField) -> f64 {
    u.grid.dx().powi(u.grid.m() as i32) * u.grid.dy()
}

/// `W^{1,q}` norm of every time slot.
pub fn w1q_profile(u: &SampledField, q: f64) -> Result<Vec<f64>> {
    let grad = gradient(u)?;
    let nt = u.nt_len();
    let meas = measure(u);
    Ok((0..nt)
        .map(|n| {
            let a = slot_lq(&u.values, nt, n, meas, q);
            let b = grad_lq(&grad, nt, n, meas, q);
            if q.is_infinite() {
                a.max(b)
            } else {
                (a.powf(q) + b.powf(q)).powf(1.0 / q)
            }
        })
        .collect())
}

/// `H^1` norm of every time slot.
pub fn h1_profile(u: &SampledField) -> Result<Vec<f64>> {
    w1q_profile(u, 2.0)
}

pub fn h1_norm(u: &SampledField, n: usize) -> Result<f64> {
    Ok(h1_profile(u)?[n])
}

/// `|| u ||_{L^p_t W^{1,q}}` over the sampled times.
pub fn lp_w1q(u: &SampledField, p: f64, q: f64) -> Result<f64> {
    let prof = w1q_profile(u, q)?;
    if p.is_infinite() {
        return Ok(prof.iter().copied().fold(0.0, f64::max));
    }
    let dt = if u.times.len() > 1 { u.times[1] - u.times[0] } else { 1.0 };
    Ok((prof.iter().map(|v| v.powf(p)).sum::<f64>() * dt).powf(1.0 / p))
}

/// `B^theta_{p,2} L^q` over the sampled window, with differences taken inside
/// the window only, at dyadic steps up to `max_shift` slots.
pub fn besov_window(u: &SampledField, theta: f64, p: f64, q: f64, max_shift: usize) -> Result<f64> {
    let nt = u.nt_len();
    let ns = u.values.len() / nt;
    let mut shifts = Vec::new();
    let mut s = 1usize;
    while s <= max_shift.max(1) {
        let d = if s < nt {
            let mut diff = SampledField::zeros(&u.grid, DomainTag::VolumeSpacetime, u.extent, u.times[..nt - s].to_vec());
            let m = nt - s;
            for i in 0..ns {
                for n in 0..m {
                    diff.values[i * m + n] = u.values[i * nt + n + s] - u.values[i * nt + n];
                }
            }
            if m > 1 { lp_lq(&diff, p, q)? } else { 0.0 }
        } else {
            0.0
        };
        shifts.push((s as f64 * u.grid.dt(), d));
        s *= 2;
    }
    let f = |&(h, d): &(f64, f64)| d * d * h.powf(-2.0 * theta);
    let mut acc: f64 = shifts.windows(2).map(|w| 0.5 * std::f64::consts::LN_2 * (f(&w[0]) + f(&w[1]))).sum();
    acc += f(&shifts[0]) / (2.0 - 2.0 * theta);
    acc += f(shifts.last().unwrap()) / (2.0 * theta);
    let lp = if nt > 1 { lp_lq(u, p, q)? } else { 0.0 };
    Ok((acc + lp * lp).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral_core::Grid;
    use std::f64::consts::PI;

    #[test]
    fn gaussian_h1_against_closed_form() {
        // u = y^2 e^{-(x^2 + y^2)/2}; the integrands vanish to second order at y = 0
        let g = Grid::new(2, 24.0, 64, 16.0, 256, 1.0, 4).unwrap();
        let u = SampledField::spacetime_from_fn(&g, YExtent::Half, vec![0.0, 0.5], |x, y, _| C64::new(y * y * (-(x[0] * x[0] + y * y) / 2.0).exp(), 0.0));
        // ||u||^2 = 3 pi / 8 and ||grad u||^2 = 5 pi / 8
        let (l2, gr) = (3.0 * PI / 8.0, 5.0 * PI / 8.0);
        let h1 = h1_profile(&u).unwrap();
        assert!((h1[0] - (l2 + gr).sqrt()).abs() < 1e-5, "{}", h1[0]);
        assert!((h1[1] - h1[0]).abs() < 1e-14);
        let w = lp_w1q(&u, f64::INFINITY, 2.0).unwrap();
        assert!((w - h1[0]).abs() < 1e-14);
    }
}
