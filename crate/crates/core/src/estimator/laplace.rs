//! Operator norm of the Laplace transform on `L^2(R^+)`.
//!
//! `||Lf||^2 = int int f(y1) f(y2) / (y1 + y2)`, so the norm is the square root
//! of the top of the kernel form. On the log grid `y = e^u` with the half-density
//! weights the kernel becomes `1 / (2 cosh((u1 - u2)/2)) du`.

use serde::{Deserialize, Serialize};

use super::quad::{dense_apply, top_eigenpair};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LaplaceGrid {
    /// `u` runs over `[-scale sqrt(N), scale sqrt(N)]`
    pub scale: f64,
}

impl Default for LaplaceGrid {
    fn default() -> Self {
        LaplaceGrid { scale: 1.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LaplaceNorm {
    pub n: usize,
    pub value: f64,
    /// top of the kernel form, `value^2`
    pub form_norm: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// maximiser in half-density coordinates `sqrt(w) f`
    pub vector: Vec<f64>,
}

fn kernel_matrix(n: usize, spec: &LaplaceGrid) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let half = spec.scale * (n as f64).sqrt();
    let du = 2.0 * half / (n - 1) as f64;
    let us: Vec<f64> = (0..n).map(|i| -half + i as f64 * du).collect();
    let mut a = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            a[i * n + j] = du / (2.0 * (0.5 * (us[i] - us[j])).cosh());
        }
    }
    let nodes = us.iter().map(|u| u.exp()).collect::<Vec<_>>();
    let weights = nodes.iter().map(|y| y * du).collect();
    (a, nodes, weights)
}

pub fn laplace_opnorm(n: usize, spec: &LaplaceGrid) -> Result<LaplaceNorm> {
    if n < 64 {
        return Err(Error::Domain(format!("N = {n} below 64")));
    }
    let (a, nodes, weights) = kernel_matrix(n, spec);
    let (lam, vector) = top_eigenpair(n, &dense_apply(&a, n), 1e-15);
    Ok(LaplaceNorm { n, value: lam.sqrt(), form_norm: lam, nodes, weights, vector })
}

/// `||K f|| / ||f||` for the discrete kernel form, `f` in half-density coordinates.
pub fn form_rayleigh(n: usize, spec: &LaplaceGrid, f: &[f64]) -> f64 {
    let (a, _, _) = kernel_matrix(n, spec);
    let mut out = vec![0.0; n];
    dense_apply(&a, n)(f, &mut out);
    super::quad::dot(&out, &out).sqrt() / super::quad::dot(f, f).sqrt()
}

/// Quadrature of `(Lf)(lambda) = int e^{-lambda y} f(y) dy` at the grid nodes.
pub fn apply_laplace(norm: &LaplaceNorm, f: &[f64]) -> Vec<f64> {
    norm.nodes.iter().map(|&lam| norm.nodes.iter().zip(&norm.weights).zip(f).map(|((y, w), v)| (-lam * y).exp() * w * v).sum()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, SymmetricEigen};

    #[test]
    fn low_resolution_against_dense_solve() {
        let spec = LaplaceGrid::default();
        let r = laplace_opnorm(64, &spec).unwrap();
        let (a, _, _) = kernel_matrix(64, &spec);
        let dense = SymmetricEigen::new(DMatrix::from_row_slice(64, 64, &a));
        let top = dense.eigenvalues.iter().cloned().fold(f64::MIN, f64::max);
        assert!((r.form_norm - top).abs() < 1e-12 * top);
        assert!((1.5..=1.8).contains(&r.value), "{}", r.value);
    }

    #[test]
    fn maximiser_attains_the_norm() {
        let spec = LaplaceGrid::default();
        let r = laplace_opnorm(128, &spec).unwrap();
        assert!((form_rayleigh(128, &spec, &r.vector) - r.form_norm).abs() < 1e-10 * r.form_norm);
        // the Laplace transform itself, by quadrature on the same nodes (about 1% at du = 0.2)
        let f: Vec<f64> = r.vector.iter().zip(&r.weights).map(|(v, w)| v / w.sqrt()).collect();
        let lf = apply_laplace(&r, &f);
        let l2 = |g: &[f64]| g.iter().zip(&r.weights).map(|(v, w)| v * v * w).sum::<f64>().sqrt();
        assert!((l2(&lf) / l2(&f) - r.value).abs() < 2e-2 * r.value, "{} {}", l2(&lf) / l2(&f), r.value);
    }

    #[test]
    fn nondecreasing_and_convergent() {
        let spec = LaplaceGrid::default();
        let vals: Vec<f64> = [64, 128, 256, 512, 1024].iter().map(|&n| laplace_opnorm(n, &spec).unwrap().value).collect();
        assert!(vals.windows(2).all(|w| w[1] >= w[0]));
        assert!(vals[4] <= std::f64::consts::PI.sqrt());
    }
}
