use num_complex::Complex64 as C64;

use super::field::{BoundaryField, Representation, ZERO};
use crate::error::{Error, Result};

/// Semidiscrete time transform `sum_n g_n exp(-i delta t_n) dt` of one lane.
pub fn dtft(lane: &[C64], t0: f64, dt: f64, delta: f64) -> C64 {
    let z = C64::from_polar(1.0, -delta * dt);
    let mut s = ZERO;
    for v in lane.iter().rev() {
        s = s * z + v;
    }
    s * C64::from_polar(dt, -delta * t0)
}

/// `d^k/d delta^k` of [`dtft`], i.e. the transform of `(-i t)^k g`.
pub fn dtft_derivative(lane: &[C64], t0: f64, dt: f64, delta: f64, k: u32) -> C64 {
    if k == 0 {
        return dtft(lane, t0, dt, delta);
    }
    let w: Vec<C64> = lane
        .iter()
        .enumerate()
        .map(|(n, v)| v * (C64::new(0.0, -(t0 + n as f64 * dt))).powu(k))
        .collect();
    dtft(&w, t0, dt, delta)
}

/// Exact off-grid time transform of tangential mode `xi_index` at frequency `delta`.
pub fn resample_parabolic(g: &BoundaryField, xi_index: usize, delta: f64) -> Result<C64> {
    if g.repr != Representation::Semidiscrete {
        return Err(Error::Shape("resampling needs tangential-frequency, time-physical data".into()));
    }
    if xi_index >= g.grid.n_tan() {
        return Err(Error::Shape(format!("xi index {xi_index} out of range {}", g.grid.n_tan())));
    }
    Ok(dtft(g.lane(xi_index), g.grid.t0, g.grid.dt(), delta))
}

/// Adaptive Simpson quadrature on `[a, b]`.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let diff = left + right - whole;
        if depth == 0 || diff.abs() <= 15.0 * tol {
            return left + right + diff / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 48)
}

/// Both sides of the parabolic change of variables
/// `int_0^inf F(-|xi|^2 - eta^2) 2 eta d eta = int_{-inf}^{-|xi|^2} F(delta) d delta`,
/// truncated where `delta < -|xi|^2 - range`.
pub fn jacobian_identity_check_range(f: &dyn Fn(f64) -> f64, xi: &[f64], range: f64) -> (f64, f64) {
    let x2: f64 = xi.iter().map(|v| v * v).sum();
    let tol = 1e-11;
    // split into panels so narrow features are not skipped by the first Simpson pass
    let panels = 64;
    let emax = range.sqrt();
    let mut lhs = 0.0;
    let mut rhs = 0.0;
    let g = |eta: f64| f(-x2 - eta * eta) * 2.0 * eta;
    for p in 0..panels {
        let a = emax * p as f64 / panels as f64;
        let b = emax * (p + 1) as f64 / panels as f64;
        lhs += adaptive_simpson(&g, a, b, tol / panels as f64);
        let c = -x2 - range + range * p as f64 / panels as f64;
        let d = -x2 - range + range * (p + 1) as f64 / panels as f64;
        rhs += adaptive_simpson(f, c, d, tol / panels as f64);
    }
    (lhs, rhs)
}

pub fn jacobian_identity_check(f: &dyn Fn(f64) -> f64, xi: &[f64]) -> (f64, f64) {
    jacobian_identity_check_range(f, xi, 64.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral_core::grid::Grid;
    use std::f64::consts::PI;

    #[test]
    fn single_mode_orthogonality() {
        let g = Grid::new(2, 8.0, 16, 1.0, 8, 10.0, 64).unwrap();
        let xi = g.xi_values();
        let de = g.delta_values();
        let (k0, m0) = (3usize, 5usize);
        let f = BoundaryField::from_fn(&g, |x, t| C64::from_polar(1.0, xi[k0] * x[0] + de[m0] * t)).semidiscrete();
        let on = resample_parabolic(&f, k0, de[m0]).unwrap();
        // tangential transform contributes lx, the time sum contributes lt
        assert!((on - g.lx * g.lt).norm() < 1e-10 * g.lx * g.lt);
        let off = resample_parabolic(&f, k0, de[m0] + 2.0 * PI / g.lt).unwrap();
        assert!(off.norm() < 1e-12 * g.lx * g.lt);
        assert!(resample_parabolic(&f, 999, 0.0).is_err());
        assert!(resample_parabolic(&f.physical(), 0, 0.0).is_err());
    }

    #[test]
    fn gaussian_in_time_at_off_grid_frequency() {
        // exp(-(t-5)^2) -> sqrt(pi) exp(-delta^2/4) exp(-5 i delta)
        let g = Grid::new(1, 1.0, 1, 1.0, 8, 10.0, 128).unwrap();
        let f = BoundaryField::from_fn(&g, |_, t| C64::new((-(t - 5.0) * (t - 5.0)).exp(), 0.0)).semidiscrete();
        let d = 1.7;
        let v = resample_parabolic(&f, 0, d).unwrap();
        let exact = C64::from_polar(PI.sqrt() * (-d * d / 4.0).exp(), -5.0 * d);
        assert!((v - exact).norm() < 1e-8, "{}", (v - exact).norm());
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let lane: Vec<C64> = (0..40).map(|n| C64::new((-(n as f64 - 20.0).powi(2) / 30.0).exp(), 0.1)).collect();
        let h = 1e-5;
        let fd = (dtft(&lane, 0.3, 0.1, 1.0 + h) - dtft(&lane, 0.3, 0.1, 1.0 - h)) / (2.0 * h);
        let an = dtft_derivative(&lane, 0.3, 0.1, 1.0, 1);
        assert!((fd - an).norm() < 1e-6 * an.norm());
    }

    #[test]
    fn jacobian_examples() {
        let ind = |d: f64| if (-5.0..=-2.0).contains(&d) { 1.0 } else { 0.0 };
        let (a, b) = jacobian_identity_check(&ind, &[1.0]);
        assert!((a - 3.0).abs() < 1e-6 && (b - 3.0).abs() < 1e-6, "{a} {b}");
        let (a, b) = jacobian_identity_check(&|d: f64| d.exp(), &[0.0]);
        assert!((a - 1.0).abs() < 1e-6 && (b - 1.0).abs() < 1e-6);
        assert_eq!(jacobian_identity_check(&|_| 0.0, &[0.5]), (0.0, 0.0));
    }

    #[test]
    fn jacobian_smooth_agreement() {
        let f = |d: f64| (-(d + 3.0) * (d + 3.0)).exp() * (2.0 * d).cos();
        let (a, b) = jacobian_identity_check(&f, &[0.7, 0.2]);
        assert!((a - b).abs() < 1e-6);
    }
}
