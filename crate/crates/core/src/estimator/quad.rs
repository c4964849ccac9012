//! Quadrature rules and a symmetric top-eigenpair solver.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else if n == 1 { z } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pm) / (z * z - 1.0);
            let step = pn / dp;
            z -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

fn gk15(f: &dyn Fn(f64) -> C64, a: f64, b: f64) -> (C64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for i in 0..7 {
        let s = f(c - h * XGK[i]) + f(c + h * XGK[i]);
        k += s * WGK[i];
        if i % 2 == 1 {
            g += s * WG[i / 2];
        }
    }
    (k * h, ((k - g) * h).norm())
}

/// Globally adaptive Gauss-Kronrod (7, 15) for complex integrands.
pub fn adaptive_gk(f: &dyn Fn(f64) -> C64, a: f64, b: f64, abs_tol: f64, rel_tol: f64, max_intervals: usize) -> Result<C64> {
    let mut parts = vec![(a, b, gk15(f, a, b))];
    loop {
        let total: C64 = parts.iter().map(|p| p.2 .0).sum();
        let err: f64 = parts.iter().map(|p| p.2 .1).sum();
        if err <= abs_tol.max(rel_tol * total.norm()) {
            return Ok(total);
        }
        if parts.len() >= max_intervals {
            return Err(Error::Accuracy(format!("quadrature on [{a}, {b}] did not converge: error {err:.2e} after {max_intervals} intervals")));
        }
        let (i, _) = parts.iter().enumerate().max_by(|x, y| x.1 .2 .1.total_cmp(&y.1 .2 .1)).unwrap();
        let (lo, hi, _) = parts.swap_remove(i);
        let mid = 0.5 * (lo + hi);
        parts.push((lo, mid, gk15(f, lo, mid)));
        parts.push((mid, hi, gk15(f, mid, hi)));
    }
}

/// Largest eigenvalue and its unit eigenvector of a symmetric operator, by
/// Lanczos with full reorthogonalisation.
pub fn top_eigenpair(n: usize, apply: &dyn Fn(&[f64], &mut [f64]), tol: f64) -> (f64, Vec<f64>) {
    if n == 0 {
        return (0.0, Vec::new());
    }
    let max_steps = n.min(400);
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut alpha = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut q: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * ((i as f64) * 0.7).sin()).collect();
    normalise(&mut q);
    let mut w = vec![0.0; n];
    let mut last = f64::NEG_INFINITY;
    let mut best = (0.0, vec![]);
    for step in 0..max_steps {
        apply(&q, &mut w);
        let a = dot(&q, &w);
        alpha.push(a);
        basis.push(q.clone());
        for _ in 0..2 {
            for b in &basis {
                let c = dot(b, &w);
                w.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
        }
        let b = dot(&w, &w).sqrt();
        let k = alpha.len();
        let mut t = DMatrix::<f64>::zeros(k, k);
        for i in 0..k {
            t[(i, i)] = alpha[i];
            if i + 1 < k {
                t[(i, i + 1)] = beta[i];
                t[(i + 1, i)] = beta[i];
            }
        }
        let eig = SymmetricEigen::new(t);
        let (imax, &lam) = eig.eigenvalues.iter().enumerate().max_by(|x, y| x.1.total_cmp(y.1)).unwrap();
        let done = (lam - last).abs() <= tol * lam.abs() || b <= 1e-14 * lam.abs().max(1e-300) || step + 1 == max_steps;
        if done {
            let coef = eig.eigenvectors.column(imax);
            let mut v = vec![0.0; n];
            for (c, bv) in coef.iter().zip(&basis) {
                v.iter_mut().zip(bv).for_each(|(x, y)| *x += c * y);
            }
            normalise(&mut v);
            if v.iter().sum::<f64>() < 0.0 {
                v.iter_mut().for_each(|x| *x = -*x);
            }
            best = (lam, v);
            break;
        }
        last = lam;
        beta.push(b);
        q = w.iter().map(|x| x / b).collect();
    }
    best
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalise(v: &mut [f64]) {
    let n = dot(v, v).sqrt();
    v.iter_mut().for_each(|x| *x /= n);
}

/// Dense symmetric `y = A x`.
pub(crate) fn dense_apply(a: &[f64], n: usize) -> impl Fn(&[f64], &mut [f64]) + '_ {
    move |x, y| {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = dot(&a[i * n..(i + 1) * n], x);
        }
    }
}
