use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::expr::{self, Expr};
use crate::error::{Error, Result};
use crate::spectral_core::{sqrt_minus, sqrt_plus};

/// Time orientation of a boundary value problem.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TimeDirection {
    Forward,
    Backward,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SymbolKind {
    Dirichlet,
    Neumann,
    Transparent,
    Custom { b1: Expr, b2: Expr, b1_src: String, b2_src: String },
}

/// Boundary operator `b1(xi, tau) u + b2(xi, tau) d_y u` in Fourier-Laplace variables.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundarySymbol {
    pub name: String,
    pub kind: SymbolKind,
}

fn xi_norm(xi: &[f64]) -> f64 {
    xi.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// `|xi|^2 - i tau`, the argument of every root below.
fn root_arg(xi2: f64, tau: C64) -> C64 {
    C64::new(xi2, 0.0) - C64::new(0.0, 1.0) * tau
}

impl BoundarySymbol {
    pub fn dirichlet() -> Self {
        BoundarySymbol { name: "dirichlet".into(), kind: SymbolKind::Dirichlet }
    }

    pub fn neumann() -> Self {
        BoundarySymbol { name: "neumann".into(), kind: SymbolKind::Neumann }
    }

    pub fn transparent() -> Self {
        BoundarySymbol { name: "transparent".into(), kind: SymbolKind::Transparent }
    }

    /// Custom symbol from two expressions in `xi`, `xi2`, `tau`.
    pub fn custom(name: &str, b1: &str, b2: &str) -> Result<Self> {
        Ok(BoundarySymbol {
            name: name.to_string(),
            kind: SymbolKind::Custom {
                b1: expr::parse(b1)?,
                b2: expr::parse(b2)?,
                b1_src: b1.to_string(),
                b2_src: b2.to_string(),
            },
        })
    }

    pub fn builtin(name: &str) -> Result<Self> {
        match name {
            "dirichlet" => Ok(Self::dirichlet()),
            "neumann" => Ok(Self::neumann()),
            "transparent" => Ok(Self::transparent()),
            other => Err(Error::UnsupportedSymbol(format!("unknown built-in symbol '{other}'"))),
        }
    }

    pub fn is_dirichlet(&self) -> bool {
        self.kind == SymbolKind::Dirichlet
    }

    pub fn b1(&self, xi: &[f64], tau: C64) -> C64 {
        self.b1_at(xi_norm(xi), tau)
    }

    pub fn b2(&self, xi: &[f64], tau: C64) -> C64 {
        self.b2_at(xi_norm(xi), tau)
    }

    fn b1_at(&self, xi: f64, tau: C64) -> C64 {
        match &self.kind {
            SymbolKind::Dirichlet | SymbolKind::Transparent => C64::new(1.0, 0.0),
            SymbolKind::Neumann => C64::new(0.0, 0.0),
            SymbolKind::Custom { b1, .. } => b1.eval(xi, tau),
        }
    }

    fn b2_at(&self, xi: f64, tau: C64) -> C64 {
        match &self.kind {
            SymbolKind::Dirichlet => C64::new(0.0, 0.0),
            SymbolKind::Neumann => sqrt_minus(root_arg(xi * xi, tau)).inv(),
            SymbolKind::Transparent => -sqrt_minus(root_arg(xi * xi, tau)).inv(),
            SymbolKind::Custom { b2, .. } => b2.eval(xi, tau),
        }
    }

    /// `b . V` with the stable eigenvector of the given direction; no sign check on `tau`.
    pub fn pairing_unchecked(&self, xi: f64, tau: C64, dir: TimeDirection) -> C64 {
        let z = root_arg(xi * xi, tau);
        let root = match dir {
            TimeDirection::Forward => sqrt_minus(z),
            TimeDirection::Backward => sqrt_plus(z),
        };
        let b2 = self.b2_at(xi, tau);
        if b2 == C64::new(0.0, 0.0) {
            return self.b1_at(xi, tau);
        }
        self.b1_at(xi, tau) - b2 * root
    }

    pub fn pairing(&self, xi: &[f64], tau: C64, dir: TimeDirection) -> Result<C64> {
        check_sign(tau, dir)?;
        Ok(self.pairing_unchecked(xi_norm(xi), tau, dir))
    }

    /// Forward `b . V` on the imaginary axis `tau = i delta`.
    pub fn pairing_on_axis(&self, xi2: f64, delta: f64) -> C64 {
        self.pairing_unchecked(xi2.sqrt(), C64::new(0.0, delta), TimeDirection::Forward)
    }

    pub fn b1_on_axis(&self, xi2: f64, delta: f64) -> C64 {
        self.b1_at(xi2.sqrt(), C64::new(0.0, delta))
    }

    /// The bounded product `b2 * sqrt(| |xi|^2 + delta |)` on `tau = i delta`.
    pub fn b2_lambda_on_axis(&self, xi2: f64, delta: f64) -> C64 {
        let lam = (xi2 + delta).abs().sqrt();
        match &self.kind {
            SymbolKind::Dirichlet => C64::new(0.0, 0.0),
            SymbolKind::Neumann => lam / sqrt_minus(C64::new(xi2 + delta, 0.0)),
            SymbolKind::Transparent => -lam / sqrt_minus(C64::new(xi2 + delta, 0.0)),
            SymbolKind::Custom { b2, .. } => b2.eval(xi2.sqrt(), C64::new(0.0, delta)) * lam,
        }
    }

    /// Forward pairing when it does not depend on the frequency.
    pub fn constant_pairing(&self) -> Option<C64> {
        match self.kind {
            SymbolKind::Dirichlet => Some(C64::new(1.0, 0.0)),
            SymbolKind::Neumann => Some(C64::new(-1.0, 0.0)),
            SymbolKind::Transparent => Some(C64::new(2.0, 0.0)),
            SymbolKind::Custom { .. } => None,
        }
    }
}

fn check_sign(tau: C64, dir: TimeDirection) -> Result<()> {
    match dir {
        TimeDirection::Forward if tau.re < 0.0 => Err(Error::Domain(format!("forward problem needs Re tau >= 0, got {tau}"))),
        TimeDirection::Backward if tau.re > 0.0 => Err(Error::Domain(format!("backward problem needs Re tau <= 0, got {tau}"))),
        _ => Ok(()),
    }
}

/// Boundary values `(1, -sqrt(|xi|^2 - i tau))` of the decaying mode.
pub fn stable_eigenvector(xi: &[f64], tau: C64, dir: TimeDirection) -> Result<(C64, C64)> {
    check_sign(tau, dir)?;
    let z = root_arg(xi.iter().map(|v| v * v).sum(), tau);
    let root = match dir {
        TimeDirection::Forward => sqrt_minus(z),
        TimeDirection::Backward => sqrt_plus(z),
    };
    Ok((C64::new(1.0, 0.0), -root))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() <= tol * (1.0 + b.norm())
    }

    #[test]
    fn eigenvector_examples() {
        let i = C64::new(0.0, 1.0);
        let (a, b) = stable_eigenvector(&[0.0], i, TimeDirection::Forward).unwrap();
        assert_eq!(a, C64::new(1.0, 0.0));
        assert!(close(b, C64::new(-1.0, 0.0), 1e-15));
        let (_, b) = stable_eigenvector(&[1.0], -2.0 * i, TimeDirection::Forward).unwrap();
        assert!(close(b, i, 1e-15));
        let (_, b) = stable_eigenvector(&[1.0], -2.0 * i, TimeDirection::Backward).unwrap();
        assert!(close(b, -i, 1e-15));
        assert!(stable_eigenvector(&[1.0], C64::new(-1.0, 0.0), TimeDirection::Forward).is_err());
        assert!(stable_eigenvector(&[1.0], C64::new(1.0, 0.0), TimeDirection::Backward).is_err());
    }

    #[test]
    fn builtin_pairings() {
        let tau = C64::new(0.3, -4.0);
        let xi = [1.2];
        let f = TimeDirection::Forward;
        assert!(close(BoundarySymbol::dirichlet().pairing(&xi, tau, f).unwrap(), C64::new(1.0, 0.0), 1e-14));
        assert!(close(BoundarySymbol::neumann().pairing(&xi, tau, f).unwrap(), C64::new(-1.0, 0.0), 1e-14));
        assert!(close(BoundarySymbol::transparent().pairing(&xi, tau, f).unwrap(), C64::new(2.0, 0.0), 1e-14));
        let back = BoundarySymbol::transparent().pairing(&xi, C64::new(0.0, -4.0), TimeDirection::Backward).unwrap();
        assert!(back.norm() < 1e-14);
    }

    #[test]
    fn custom_matches_builtin() {
        let c = BoundarySymbol::custom("t2", "1", "-1/sqrt_minus(xi2 - i*tau)").unwrap();
        let t = BoundarySymbol::transparent();
        for &(x, g, d) in &[(0.5, 0.0, 3.0), (2.0, 1.0, -9.0), (0.0, 0.2, 0.7)] {
            let tau = C64::new(g, d);
            let dir = TimeDirection::Forward;
            assert!(close(c.pairing(&[x], tau, dir).unwrap(), t.pairing(&[x], tau, dir).unwrap(), 1e-14));
        }
        assert!(close(c.b2_lambda_on_axis(1.0, -5.0), t.b2_lambda_on_axis(1.0, -5.0), 1e-14));
    }

    #[test]
    fn bounded_product_has_unit_modulus() {
        for s in [BoundarySymbol::neumann(), BoundarySymbol::transparent()] {
            for &(x2, d) in &[(1.0, 3.0), (1.0, -3.0), (0.01, 100.0)] {
                assert!((s.b2_lambda_on_axis(x2, d).norm() - 1.0).abs() < 1e-14);
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(500))]
        #[test]
        fn anisotropic_homogeneity(x in 0.01f64..10.0, g in 0.0f64..10.0, d in -50.0f64..50.0, big in any::<bool>()) {
            let lam = if big { 2.0 } else { 0.5 };
            let tau = C64::new(g, d);
            let tl = tau * lam * lam;
            for s in [BoundarySymbol::dirichlet(), BoundarySymbol::neumann(), BoundarySymbol::transparent()] {
                prop_assert!(close(s.b1(&[lam * x], tl), s.b1(&[x], tau), 1e-10));
                prop_assert!(close(s.b2(&[lam * x], tl), s.b2(&[x], tau) / lam, 1e-10));
                let a = s.pairing(&[lam * x], tl, TimeDirection::Forward).unwrap().norm();
                let b = s.pairing(&[x], tau, TimeDirection::Forward).unwrap().norm();
                prop_assert!((a - b).abs() <= 1e-10 * b);
            }
        }
    }
}
