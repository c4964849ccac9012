//! Operations along the time axis: Besov norms by differences, extension,
//! restriction and reflection.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::norms::{NormSpec, NormVariant};
use crate::error::{Error, Result};
use crate::spectral_core::{BoundaryField, DomainTag, Representation, SampledField, ZERO};

/// Physical-space data sampled on a uniform time grid, stored `[space][time]`.
pub trait TimeSampled: Clone {
    fn time_values(&self) -> Vec<f64>;
    /// Physical samples and the spatial cell measure.
    fn samples(&self) -> Result<(Vec<C64>, f64)>;
    fn with_samples(&self, values: Vec<C64>) -> Self;
}

impl TimeSampled for BoundaryField {
    fn time_values(&self) -> Vec<f64> {
        self.grid.t_values()
    }

    fn samples(&self) -> Result<(Vec<C64>, f64)> {
        Ok((self.physical().values, self.grid.dx().powi(self.grid.m() as i32)))
    }

    fn with_samples(&self, values: Vec<C64>) -> Self {
        BoundaryField { grid: self.grid.clone(), repr: Representation::Physical, values }
    }
}

impl TimeSampled for SampledField {
    fn time_values(&self) -> Vec<f64> {
        self.times.clone()
    }

    fn samples(&self) -> Result<(Vec<C64>, f64)> {
        if self.repr != Representation::Physical {
            return Err(Error::Shape("time operations need physical samples".into()));
        }
        if self.tag != DomainTag::VolumeSpacetime {
            return Err(Error::Shape("time operations need a space-time field".into()));
        }
        Ok((self.values.clone(), self.grid.dx().powi(self.grid.m() as i32) * self.grid.dy()))
    }

    fn with_samples(&self, values: Vec<C64>) -> Self {
        let mut out = self.clone();
        out.repr = Representation::Physical;
        out.values = values;
        out
    }
}

struct TimeAxis {
    t0: f64,
    dt: f64,
    n: usize,
}

impl TimeAxis {
    fn of(times: &[f64]) -> Result<Self> {
        if times.len() < 2 {
            return Err(Error::Shape("need at least two time samples".into()));
        }
        let dt = times[1] - times[0];
        for (i, t) in times.iter().enumerate() {
            if (t - times[0] - i as f64 * dt).abs() > 1e-9 * (1.0 + t.abs()) {
                return Err(Error::Shape("time samples are not uniform".into()));
            }
        }
        Ok(TimeAxis { t0: times[0], dt, n: times.len() })
    }

    /// Slot holding time `t` exactly, if any.
    fn slot(&self, t: f64) -> Option<usize> {
        let r = (t - self.t0) / self.dt;
        let i = r.round();
        if (r - i).abs() > 1e-6 || i < 0.0 || i >= self.n as f64 {
            return None;
        }
        Some(i as usize)
    }

    fn aligned(&self, t: f64) -> bool {
        let r = (t - self.t0) / self.dt;
        (r - r.round()).abs() <= 1e-6
    }
}

fn lp_of<F: Fn(usize) -> f64>(norms: F, n: usize, dt: f64, p: f64) -> f64 {
    if p.is_infinite() {
        return (0..n).map(&norms).fold(0.0, f64::max);
    }
    ((0..n).map(|i| norms(i).powf(p)).sum::<f64>() * dt).powf(1.0 / p)
}

fn space_norm(v: &[C64], nt: usize, n: usize, meas: f64, q: f64) -> f64 {
    let it = v.iter().skip(n).step_by(nt);
    if q.is_infinite() {
        return it.map(|z| z.norm()).fold(0.0, f64::max);
    }
    (it.map(|z| z.norm().powf(q)).sum::<f64>() * meas).powf(1.0 / q)
}

/// `|| u ||_{L^p_t L^q_space}` of time-sampled data.
pub fn lp_lq<T: TimeSampled>(u: &T, p: f64, q: f64) -> Result<f64> {
    let times = u.time_values();
    let ax = TimeAxis::of(&times)?;
    let (v, meas) = u.samples()?;
    Ok(lp_of(|n| space_norm(&v, ax.n, n, meas, q), ax.n, ax.dt, p))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BesovReport {
    pub theta: f64,
    pub p: f64,
    pub q: f64,
    /// `(int_0^inf (||u(.+h) - u|| / h^theta)^2 dh/h)^{1/2}`
    pub seminorm: f64,
    pub lp: f64,
    pub total: f64,
    /// `(h, ||u(.+h) - u||)` at the dyadic shifts
    pub shifts: Vec<(f64, f64)>,
}

fn inner_exponent(inner: &NormSpec) -> Result<f64> {
    match inner.variant {
        NormVariant::Lebesgue { q, .. } => Ok(q),
        NormVariant::SobolevVolume | NormVariant::HsBoundary if inner.s == 0.0 => Ok(2.0),
        _ => Err(Error::Domain(format!("inner norm {:?} is not supported for time differences", inner.variant))),
    }
}

/// Shift difference `|| u(. + h) - u ||_{L^p L^q}` with `h = shift * dt`, periodic wrap.
fn shift_difference(v: &[C64], nt: usize, meas: f64, dt: f64, shift: usize, p: f64, q: f64) -> f64 {
    let ns = v.len() / nt;
    let norms: Vec<f64> = (0..nt)
        .map(|n| {
            let m = (n + shift) % nt;
            let it = (0..ns).map(|k| (v[k * nt + m] - v[k * nt + n]).norm());
            if q.is_infinite() {
                it.fold(0.0, f64::max)
            } else {
                (it.map(|z| z.powf(q)).sum::<f64>() * meas).powf(1.0 / q)
            }
        })
        .collect();
    lp_of(|n| norms[n], nt, dt, p)
}

/// Besov norm `B^theta_{p,2}(A)` in time by dyadic differences.
pub fn besov_time_norm<T: TimeSampled>(u: &T, theta: f64, p: f64, inner: &NormSpec) -> Result<BesovReport> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::Domain(format!("theta = {theta} outside (0, 1)")));
    }
    let q = inner_exponent(inner)?;
    let times = u.time_values();
    let ax = TimeAxis::of(&times)?;
    let (v, meas) = u.samples()?;
    let lt = ax.dt * ax.n as f64;
    let mut shifts = Vec::new();
    let mut s = 1usize;
    while (s as f64) * ax.dt <= lt / 4.0 + 1e-12 {
        shifts.push((s as f64 * ax.dt, shift_difference(&v, ax.n, meas, ax.dt, s, p, q)));
        s *= 2;
    }
    if shifts.is_empty() {
        return Err(Error::Shape("time window too short for a difference norm".into()));
    }
    let f = |&(h, d): &(f64, f64)| d * d * h.powf(-2.0 * theta);
    let mut acc = 0.0;
    let step = std::f64::consts::LN_2;
    for w in shifts.windows(2) {
        acc += 0.5 * step * (f(&w[0]) + f(&w[1]));
    }
    // below the first shift the difference is linear in h, beyond the last it saturates
    let (h0, d0) = shifts[0];
    acc += d0 * d0 * h0.powf(-2.0 * theta) / (2.0 - 2.0 * theta);
    let (h1, d1) = *shifts.last().unwrap();
    acc += d1 * d1 * h1.powf(-2.0 * theta) / (2.0 * theta);
    let lp = lp_of(|n| space_norm(&v, ax.n, n, meas, q), ax.n, ax.dt, p);
    let seminorm = acc.sqrt();
    Ok(BesovReport { theta, p, q, seminorm, lp, total: (acc + lp * lp).sqrt(), shifts })
}

/// Cutoff profile on `[0, 1)` with value 1 at 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Cutoff {
    /// `exp(1 - 1/(1 - s^2))`
    Bump,
    /// `1 - 3 s^2 + 2 s^3`
    Smoothstep,
}

impl Cutoff {
    pub fn eval(&self, s: f64) -> f64 {
        if s < 0.0 || s >= 1.0 {
            return if s < 0.0 { 1.0 } else { 0.0 };
        }
        match self {
            Cutoff::Bump => (1.0 - 1.0 / (1.0 - s * s)).exp(),
            Cutoff::Smoothstep => 1.0 - 3.0 * s * s + 2.0 * s * s * s,
        }
    }

    pub fn sup(&self) -> f64 {
        1.0
    }
}

fn map_time<T: TimeSampled>(u: &T, f: impl Fn(f64, &dyn Fn(f64) -> Option<usize>) -> Option<(usize, f64)>) -> Result<T> {
    let times = u.time_values();
    let ax = TimeAxis::of(&times)?;
    let (v, _) = u.samples()?;
    let nt = ax.n;
    let ns = v.len() / nt;
    let mut out = vec![ZERO; v.len()];
    let slot = |t: f64| ax.slot(t);
    for (n, &t) in times.iter().enumerate() {
        if let Some((src, c)) = f(t, &slot) {
            if c == 0.0 {
                continue;
            }
            for k in 0..ns {
                out[k * nt + n] = v[k * nt + src] * c;
            }
        }
    }
    Ok(u.with_samples(out))
}

/// Extension of data given on `[0, T]` to the whole line by reflection and cutoff.
pub fn extend_pt<T: TimeSampled>(u: &T, big_t: f64, chi: Cutoff) -> Result<T> {
    if !(big_t > 0.0 && big_t <= 1.0) {
        return Err(Error::Domain(format!("extension length T = {big_t} outside (0, 1]")));
    }
    let times = u.time_values();
    let ax = TimeAxis::of(&times)?;
    if !ax.aligned(0.0) || !ax.aligned(big_t) {
        return Err(Error::Domain("0 and T must be time samples".into()));
    }
    let eps = 1e-9 * ax.dt;
    map_time(u, |t, slot| {
        if t >= -eps && t <= big_t + eps {
            slot(t).map(|i| (i, 1.0))
        } else if t > big_t && t < 2.0 * big_t {
            slot(2.0 * big_t - t).map(|i| (i, chi.eval((t - big_t) / big_t)))
        } else if t < 0.0 && t > -big_t {
            slot(-t).map(|i| (i, chi.eval(-t / big_t)))
        } else {
            None
        }
    })
}

/// Zero extension of data on `t >= 0`.
pub fn extend_zero<T: TimeSampled>(u: &T) -> Result<T> {
    restrict(u, 0.0, f64::INFINITY)
}

/// Keep samples with `a <= t <= b`.
pub fn restrict<T: TimeSampled>(u: &T, a: f64, b: f64) -> Result<T> {
    let dt = {
        let t = u.time_values();
        if t.len() > 1 {
            t[1] - t[0]
        } else {
            1.0
        }
    };
    let eps = 1e-9 * dt;
    map_time(u, |t, slot| if t >= a - eps && t <= b + eps { slot(t).map(|i| (i, 1.0)) } else { None })
}

/// `S g(t) = g(t) - 3 g(-t) + 2 g(-2t)` for `t > 0`, zero for `t <= 0`.
///
/// Samples of `g` outside the window are taken as 0.
pub fn reflect_s<T: TimeSampled>(g: &T) -> Result<T> {
    let times = g.time_values();
    let ax = TimeAxis::of(&times)?;
    if !ax.aligned(0.0) {
        return Err(Error::Domain("t = 0 must be a time sample".into()));
    }
    let (v, _) = g.samples()?;
    let nt = ax.n;
    let ns = v.len() / nt;
    let mut out = vec![ZERO; v.len()];
    for (n, &t) in times.iter().enumerate() {
        if t <= 0.5 * ax.dt {
            continue;
        }
        let a = ax.slot(-t);
        let b = ax.slot(-2.0 * t);
        for k in 0..ns {
            let mut s = v[k * nt + n];
            if let Some(i) = a {
                s -= 3.0 * v[k * nt + i];
            }
            if let Some(i) = b {
                s += 2.0 * v[k * nt + i];
            }
            out[k * nt + n] = s;
        }
    }
    Ok(g.with_samples(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral_core::Grid;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sym_grid() -> Grid {
        // t in [-2, 2) with dt = 1/16
        Grid::new(2, 4.0, 8, 1.0, 4, 4.0, 64).unwrap().with_t0(-2.0)
    }

    fn l2() -> NormSpec {
        NormSpec::new(0.0, NormVariant::Lebesgue { p: 2.0, q: 2.0 }).unwrap()
    }

    #[test]
    fn extension_of_constant() {
        let g = sym_grid();
        let big_t = 0.5;
        let one = BoundaryField::from_fn(&g, |_, _| C64::new(1.0, 0.0));
        let e = extend_pt(&one, big_t, Cutoff::Bump).unwrap();
        let ts = g.t_values();
        for (n, &t) in ts.iter().enumerate() {
            let want = if (0.0..=big_t + 1e-12).contains(&t) {
                1.0
            } else if t > big_t && t < 2.0 * big_t {
                Cutoff::Bump.eval((t - big_t) / big_t)
            } else if t < 0.0 && t > -big_t {
                Cutoff::Bump.eval(-t / big_t)
            } else {
                0.0
            };
            assert!((e.at(3, n).re - want).abs() < 1e-14, "t={t}");
        }
        let zero = BoundaryField::zeros(&g);
        assert_eq!(extend_pt(&zero, big_t, Cutoff::Bump).unwrap().values, zero.physical().values);
        assert!(extend_pt(&one, 1.5, Cutoff::Bump).is_err());
        assert!(extend_pt(&one, 0.3, Cutoff::Bump).is_err());
    }

    #[test]
    fn extension_bound_on_random_data() {
        let g = sym_grid();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10 {
            let vals: Vec<C64> = (0..g.n_tan() * g.nt).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            let u = BoundaryField::new(&g, Representation::Physical, vals).unwrap();
            let u = restrict(&u, 0.0, 1.0).unwrap();
            let p = rng.gen_range(1.0..6.0);
            let e = extend_pt(&u, 1.0, Cutoff::Smoothstep).unwrap();
            assert!(lp_lq(&e, p, 2.0).unwrap() <= 3.0 * Cutoff::Smoothstep.sup() * lp_lq(&u, p, 2.0).unwrap());
        }
    }

    #[test]
    fn reflection_examples() {
        let g = sym_grid();
        for (f, want) in [
            (Box::new(|_t: f64| 1.0) as Box<dyn Fn(f64) -> f64>, Box::new(|_t: f64| 0.0) as Box<dyn Fn(f64) -> f64>),
            (Box::new(|t: f64| t), Box::new(|_t: f64| 0.0)),
            (Box::new(|t: f64| t * t), Box::new(|t: f64| 6.0 * t * t)),
        ] {
            let u = BoundaryField::from_fn(&g, |_, t| C64::new(f(t), 0.0));
            let s = reflect_s(&u).unwrap();
            for (n, &t) in g.t_values().iter().enumerate() {
                // -2t must lie in the window
                if t > 0.0 && t <= 1.0 {
                    assert!((s.at(0, n).re - want(t)).abs() < 1e-12, "t={t}");
                }
            }
        }
        let u = BoundaryField::from_fn(&g, |x, t| C64::new((-(t - 0.8).powi(2) * 10.0).exp() * x[0], 0.0));
        // data supported in t > 0
        let z = extend_zero(&restrict(&u, 0.5 * g.dt(), 10.0).unwrap()).unwrap();
        assert_eq!(reflect_s(&z).unwrap().values, z.values);
        assert_eq!(restrict(&z, 0.0, 10.0).unwrap().values, z.values);
    }

    /// L^2-normalised in time
    fn packet(g: &Grid, width: f64) -> BoundaryField {
        BoundaryField::from_fn(g, |x, t| C64::from_polar((-x[0] * x[0] - (t / width).powi(2)).exp() / width.sqrt(), 3.0 * t))
    }

    #[test]
    fn besov_against_refined_shifts() {
        let g = Grid::new(2, 8.0, 16, 1.0, 4, 32.0, 512).unwrap().with_t0(-16.0);
        let (theta, p) = (0.5, 2.0);
        let u = packet(&g, 1.0);
        let r = besov_time_norm(&u, theta, p, &l2()).unwrap();
        // oracle: every integer shift, trapezoid in h, same tails
        let (v, meas) = u.samples().unwrap();
        let dt = g.dt();
        let nmax = g.nt / 4;
        let d: Vec<f64> = (1..=nmax).map(|s| shift_difference(&v, g.nt, meas, dt, s, p, 2.0)).collect();
        let mut acc = 0.0;
        for s in 1..nmax {
            let (h0, h1) = (s as f64 * dt, (s + 1) as f64 * dt);
            acc += 0.5 * dt * (d[s - 1].powi(2) * h0.powf(-2.0 * theta - 1.0) + d[s].powi(2) * h1.powf(-2.0 * theta - 1.0));
        }
        acc += d[0].powi(2) * dt.powf(-2.0 * theta) / (2.0 - 2.0 * theta);
        acc += d[nmax - 1].powi(2) * (nmax as f64 * dt).powf(-2.0 * theta) / (2.0 * theta);
        let oracle = acc.sqrt();
        assert!((r.seminorm - oracle).abs() < 1e-2 * oracle, "{} {}", r.seminorm, oracle);
        let wide = besov_time_norm(&packet(&g, 1.5), theta, p, &l2()).unwrap();
        assert!(wide.seminorm < r.seminorm);
        assert_eq!(besov_time_norm(&BoundaryField::zeros(&g), theta, p, &l2()).unwrap().total, 0.0);
        assert!(besov_time_norm(&u, 1.0, p, &l2()).is_err());
    }

    #[test]
    fn besov_scaling() {
        let g = Grid::new(2, 8.0, 16, 1.0, 4, 64.0, 2048).unwrap().with_t0(-32.0);
        let (theta, p) = (0.4, 4.0);
        let base = besov_time_norm(&packet(&g, 1.0), theta, p, &l2()).unwrap().seminorm;
        for lam in [0.5, 2.0] {
            // u(lambda t) with u the width-1 packet
            let ul = BoundaryField::from_fn(&g, |x, t| C64::from_polar((-x[0] * x[0] - (lam * t).powi(2)).exp(), 3.0 * lam * t));
            assert_eq!(packet(&g, 1.0).at(1, 5), BoundaryField::from_fn(&g, |x, t| C64::from_polar((-x[0] * x[0] - t * t).exp(), 3.0 * t)).at(1, 5));
            let v = besov_time_norm(&ul, theta, p, &l2()).unwrap().seminorm;
            let want = base * lam.powf(theta - 1.0 / p);
            assert!((v - want).abs() < 0.05 * want, "lambda={lam}: {v} vs {want}");
        }
    }
}
