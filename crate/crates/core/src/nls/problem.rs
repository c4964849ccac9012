use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::boundary_ops::BoundarySymbol;
use crate::error::{Error, Result};
use crate::hs_spaces::{compat_check, CompatStatus, Cutoff};
use crate::spectral_core::{BoundaryField, SampledField, YExtent};

/// `i u_t + Δu = epsilon |u|^{a-1} u` on the half space with Dirichlet data `g`.
#[derive(Clone, Debug)]
pub struct NLSProblem {
    pub a: f64,
    /// +1 defocusing, -1 focusing
    pub epsilon: f64,
    /// half-line snapshot
    pub u0: SampledField,
    pub g: BoundaryField,
    /// local window length
    pub big_t: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub cutoff: Cutoff,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdmissiblePair {
    pub p: f64,
    pub q: f64,
}

impl NLSProblem {
    pub fn new(u0: SampledField, g: BoundaryField) -> Self {
        NLSProblem { a: 3.0, epsilon: 1.0, u0, g, big_t: 0.5, tol: 1e-13, max_iter: 30, cutoff: Cutoff::Bump }
    }

    pub fn dim(&self) -> usize {
        self.u0.grid.d
    }

    /// `q = a + 1` and `p` from `2/p + d/q = d/2`.
    pub fn pair(&self) -> AdmissiblePair {
        let d = self.dim() as f64;
        let q = self.a + 1.0;
        AdmissiblePair { p: 4.0 * q / (d * (q - 2.0)), q }
    }

    pub fn symbol(&self) -> BoundarySymbol {
        BoundarySymbol::dirichlet()
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.dim();
        let upper = if d > 2 { 1.0 + 4.0 / (d as f64 - 2.0) } else { f64::INFINITY };
        if !(self.a > 1.0 && self.a < upper) {
            return Err(Error::Domain(format!("power a = {} outside (1, {upper})", self.a)));
        }
        if self.epsilon != 1.0 && self.epsilon != -1.0 {
            return Err(Error::Domain(format!("sign epsilon = {} must be +1 or -1", self.epsilon)));
        }
        let AdmissiblePair { p, q } = self.pair();
        if !(p > 2.0 && p.is_finite() && q > 2.0) {
            return Err(Error::Domain(format!("(p, q) = ({p}, {q}) is not admissible")));
        }
        if self.u0.extent != YExtent::Half || self.u0.nt_len() != 1 {
            return Err(Error::Shape("initial data must be a half-line snapshot".into()));
        }
        if self.u0.grid != self.g.grid {
            return Err(Error::Shape("initial and boundary data live on different grids".into()));
        }
        if self.g.grid.t0 != 0.0 {
            return Err(Error::Domain("the time window must start at t = 0".into()));
        }
        if !(self.big_t > 0.0) || self.tol <= 0.0 || self.max_iter == 0 {
            return Err(Error::Domain("window, tolerance and iteration cap must be positive".into()));
        }
        let r = compat_check(&self.u0, &self.g, 1.0)?;
        if r.status == CompatStatus::Fail {
            return Err(Error::Precondition(format!("u0 and g are not compatible at t = 0: mismatch {:.3e}", r.diagnostic)));
        }
        Ok(())
    }
}

/// `epsilon |v|^{a-1} v` in place.
pub fn apply_nonlinearity(a: f64, epsilon: f64, v: &mut [C64]) {
    for z in v.iter_mut() {
        let r = z.norm();
        *z *= epsilon * if r == 0.0 { 0.0 } else { r.powf(a - 1.0) };
    }
}
