//! Admissible exponent pairs and discrete mixed norms.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hs_spaces::lp_lq;
use crate::spectral_core::SampledField;

/// `(p, q)` with `2/p + d/q = d/2`, `p > 2`, as exact rationals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalPair {
    pub p: Ratio<i64>,
    pub q: Ratio<i64>,
}

impl RationalPair {
    pub fn as_f64(&self) -> (f64, f64) {
        (*self.p.numer() as f64 / *self.p.denom() as f64, *self.q.numer() as f64 / *self.q.denom() as f64)
    }
}

/// `count` admissible pairs, spread along the admissibility line with the middle
/// pair (`1/p` at half its range) always included.
pub fn admissible_pairs(d: usize, count: usize) -> Result<Vec<RationalPair>> {
    if !(1..=3).contains(&d) {
        return Err(Error::Domain(format!("d = {d} outside 1..=3")));
    }
    // 1/p ranges over (0, 1/2) for d >= 2 and (0, 1/4) for d = 1 (q finite)
    let top = if d == 1 { Ratio::new(1, 4) } else { Ratio::new(1, 2) };
    let k = (count + 1).div_ceil(2).max(1) as i64;
    let lo = k - (count as i64 - 1) / 2;
    let mut out = Vec::with_capacity(count);
    for j in lo..lo + count as i64 {
        let inv_p = top * Ratio::new(j, 2 * k);
        let inv_q = Ratio::new(1, 2) - Ratio::new(2, d as i64) * inv_p;
        out.push(RationalPair { p: inv_p.recip(), q: inv_q.recip() });
    }
    Ok(out)
}

pub fn is_admissible(d: usize, p: f64, q: f64) -> bool {
    p > 2.0 && q >= 2.0 && (2.0 / p + d as f64 / q - d as f64 / 2.0).abs() < 1e-12
}

/// `||u||_{L^p_t L^q}` with the physical cell measures; `inf` is the maximum.
pub fn lpq_norm(u: &SampledField, p: f64, q: f64) -> Result<f64> {
    if !(p >= 1.0 && q >= 1.0) {
        return Err(Error::Domain(format!("exponents ({p}, {q}) below 1")));
    }
    lp_lq(u, p, q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral_core::{DomainTag, Grid, YExtent};
    use num_complex::Complex64 as C64;

    fn has(d: usize, p: i64, q: i64) -> bool {
        admissible_pairs(d, 5).unwrap().iter().any(|r| r.p == Ratio::from(p) && r.q == Ratio::from(q))
    }

    #[test]
    fn known_pairs() {
        assert!(has(2, 4, 4));
        assert!(has(3, 4, 3));
        assert!(has(1, 8, 4));
        for d in 1..=3 {
            for count in [1, 2, 5, 8] {
                let ps = admissible_pairs(d, count).unwrap();
                assert_eq!(ps.len(), count);
                for r in ps {
                    let (p, q) = r.as_f64();
                    assert!(is_admissible(d, p, q), "{p} {q}");
                    let lhs = Ratio::new(2, 1) / r.p + Ratio::from(d as i64) / r.q;
                    assert_eq!(lhs, Ratio::new(d as i64, 2));
                }
            }
        }
        assert!(admissible_pairs(4, 3).is_err());
    }

    #[test]
    fn constant_field() {
        let g = Grid::new(2, 4.0, 8, 2.0, 8, 3.0, 8).unwrap();
        let mut u = SampledField::zeros(&g, DomainTag::VolumeSpacetime, YExtent::Half, g.t_values());
        assert_eq!(lpq_norm(&u, 4.0, 4.0).unwrap(), 0.0);
        u.values.iter_mut().for_each(|v| *v = C64::new(1.0, 0.0));
        let (p, q) = (3.0, 5.0);
        let exact = (4.0f64 * 2.0).powf(1.0 / q) * 3.0f64.powf(1.0 / p);
        assert!((lpq_norm(&u, p, q).unwrap() - exact).abs() < 1e-12);
        assert!((lpq_norm(&u, f64::INFINITY, q).unwrap() - 8.0f64.powf(1.0 / q)).abs() < 1e-12);
    }

    #[test]
    fn gaussian_against_refined_grid() {
        // u = e^{-(x^2 + y^2)} e^{-(t-1)^2}: ||u||_{L^4 L^4}^4 = (pi/4)^{3/2}
        let exact = (std::f64::consts::PI / 4.0).powf(1.5).powf(0.25);
        let g = Grid::new(2, 16.0, 64, 8.0, 64, 8.0, 64).unwrap().with_t0(-3.0);
        let u = SampledField::spacetime_from_fn(&g, YExtent::Full, g.t_values(), |x, y, t| C64::new((-(x[0] * x[0] + y * y) - (t - 1.0).powi(2)).exp(), 0.0));
        assert!((lpq_norm(&u, 4.0, 4.0).unwrap() - exact).abs() < 1e-6 * exact);
    }
}
