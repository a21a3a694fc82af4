//! Planar motions with infinitely many directions whose speed along each
//! axis depends on that coordinate: `c1(x)` horizontally, `c2(y)`
//! vertically.
//!
//! In the transformed coordinates `(u, v) = (Phi1(x), Phi2(y))` the motion
//! is the standard planar random flight at unit speed, so its law lives on
//! `D = {Phi1(x)^2 + Phi2(y)^2 < t^2}` plus a singular part of mass
//! `e^{-lambda t}` on the boundary.

use std::f64::consts::{PI, TAU};

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rates::RateFunction;
use crate::rng::path_rng;
use crate::special::gamma;
use crate::velocity::VelocityProfile;

/// Relative depth `sqrt(t^2 - r^2) / t`, with `r` the transformed radius,
/// below which the singular densities refuse to evaluate.
pub const BOUNDARY_GUARD: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct PlanarMotionSpec {
    pub profile_x: VelocityProfile,
    pub profile_y: VelocityProfile,
    pub lambda: f64,
    pub t: f64,
}

impl PlanarMotionSpec {
    pub fn new(profile_x: VelocityProfile, profile_y: VelocityProfile, lambda: f64, t: f64) -> Result<Self> {
        for (name, v) in [("lambda", lambda), ("t", t)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Domain(format!("{name} must be positive, got {v}")));
            }
        }
        for p in [&profile_x, &profile_y] {
            if !p.has_finite_transform() {
                return Err(Error::Divergence(format!("{p} has an infinite cone")));
            }
        }
        Ok(Self {
            profile_x,
            profile_y,
            lambda,
            t,
        })
    }

    /// `(Phi1(x), Phi2(y))`.
    pub fn transform(&self, x: f64, y: f64) -> Result<(f64, f64)> {
        Ok((self.profile_x.phi(x)?, self.profile_y.phi(y)?))
    }

    pub fn inverse_transform(&self, u: f64, v: f64) -> Result<(f64, f64)> {
        Ok((self.profile_x.phi_inverse(u)?, self.profile_y.phi_inverse(v)?))
    }

    /// Mass of the singular part carried by the boundary.
    pub fn boundary_mass(&self) -> f64 {
        (-self.lambda * self.t).exp()
    }

    /// `t^2 - Phi1(x)^2 - Phi2(y)^2`, or `None` when a transform is undefined.
    fn depth2(&self, x: f64, y: f64) -> Option<f64> {
        let (u, v) = self.transform(x, y).ok()?;
        Some((self.t - u.hypot(v)) * (self.t + u.hypot(v)))
    }

    fn jacobian(&self, x: f64, y: f64) -> f64 {
        1.0 / (self.profile_x.speed(x) * self.profile_y.speed(y))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanarBatch {
    pub positions: Vec<(f64, f64)>,
    pub event_counts: Vec<u32>,
    pub seed: u64,
    pub t: f64,
    pub n_paths: usize,
}

impl PlanarBatch {
    pub fn zero_event_fraction(&self) -> f64 {
        self.event_counts.iter().filter(|&&k| k == 0).count() as f64 / self.n_paths as f64
    }

    pub fn mean(&self) -> (f64, f64) {
        let n = self.n_paths as f64;
        let (sx, sy) = self
            .positions
            .iter()
            .fold((0.0, 0.0), |(a, b), &(x, y)| (a + x, b + y));
        (sx / n, sy / n)
    }
}

/// Endpoint in transformed coordinates of a flight that changes direction at
/// `times` (sorted, inside `(0, t)`), moving along `angles[j]` on leg `j`.
fn flight_end(times: &[f64], angles: &[f64], t: f64) -> (f64, f64) {
    let mut prev = 0.0;
    let (mut u, mut v) = (0.0, 0.0);
    for (j, &theta) in angles.iter().enumerate() {
        let end = times.get(j).copied().unwrap_or(t);
        let (s, c) = theta.sin_cos();
        u += (end - prev) * c;
        v += (end - prev) * s;
        prev = end;
    }
    (u, v)
}

/// Simulates `n` independent paths up to `spec.t`. Path `i` uses the random
/// stream `(seed, i)`.
pub fn simulate_planar(spec: &PlanarMotionSpec, n: usize, seed: u64) -> Result<PlanarBatch> {
    if n == 0 {
        return Err(Error::Domain("need at least one path".into()));
    }
    let rate = RateFunction::constant(spec.lambda)?;
    let t = spec.t;
    let paths = (0..n as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = path_rng(seed, i);
            let mut times = Vec::new();
            rate.for_each_event(0.0, t, &mut rng, |tau| times.push(tau));
            let angles: Vec<f64> = (0..=times.len()).map(|_| TAU * rng.gen::<f64>()).collect();
            let (u, v) = flight_end(&times, &angles, t);
            let (x, y) = spec.inverse_transform(u, v)?;
            Ok(((x, y), times.len() as u32))
        })
        .collect::<Result<Vec<_>>>()?;
    let (positions, event_counts) = paths.into_iter().unzip();
    Ok(PlanarBatch {
        positions,
        event_counts,
        seed,
        t,
        n_paths: n,
    })
}

fn guard(spec: &PlanarMotionSpec, x: f64, y: f64) -> Result<Option<f64>> {
    let Some(d2) = spec.depth2(x, y) else {
        return Ok(None);
    };
    if d2 <= 0.0 {
        return Ok(None);
    }
    let s = d2.sqrt();
    if s < BOUNDARY_GUARD * spec.t {
        return Err(Error::Boundary);
    }
    Ok(Some(s))
}

/// Absolutely continuous part of the law,
/// `lambda e^{-lambda (t - s)} / (2 pi c1(x) c2(y) s)` with
/// `s = sqrt(t^2 - Phi1(x)^2 - Phi2(y)^2)`; zero outside the support.
pub fn density_planar(spec: &PlanarMotionSpec, x: f64, y: f64) -> Result<f64> {
    Ok(match guard(spec, x, y)? {
        Some(s) => {
            let l = spec.lambda;
            l * (-l * (spec.t - s)).exp() / (2.0 * PI * s) * spec.jacobian(x, y)
        }
        None => 0.0,
    })
}

/// Law of the position given `n_events >= 1` changes of direction,
/// `(n / (2 pi t^n)) s^{n-2} / (c1(x) c2(y))`.
pub fn conditional_density(spec: &PlanarMotionSpec, n_events: u32, x: f64, y: f64) -> Result<f64> {
    if n_events == 0 {
        return Err(Error::Domain(
            "without events the law sits on the boundary".into(),
        ));
    }
    let n = f64::from(n_events);
    let inside = if n_events == 1 {
        guard(spec, x, y)?
    } else {
        spec.depth2(x, y).filter(|&d2| d2 > 0.0).map(f64::sqrt)
    };
    Ok(match inside {
        Some(s) => n / (2.0 * PI * spec.t) * (s / spec.t).powi(n_events as i32 - 2) / spec.t
            * spec.jacobian(x, y),
        None => 0.0,
    })
}

/// Open support `Phi1(x)^2 + Phi2(y)^2 < t^2`.
pub fn support_contains(spec: &PlanarMotionSpec, x: f64, y: f64) -> bool {
    spec.depth2(x, y).is_some_and(|d2| d2 > 0.0)
}

/// Closed support with the transformed radius allowed to exceed `t` by
/// `tol * t`.
pub fn support_contains_closed(spec: &PlanarMotionSpec, x: f64, y: f64, tol: f64) -> bool {
    spec.transform(x, y)
        .is_ok_and(|(u, v)| u.hypot(v) <= spec.t * (1.0 + tol))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryPoint {
    /// Angle in the transformed plane.
    pub phi_angle: f64,
    pub x: f64,
    pub y: f64,
}

/// `m` points of the support boundary, equispaced in the transformed angle.
pub fn boundary_polyline(spec: &PlanarMotionSpec, m: usize) -> Result<Vec<BoundaryPoint>> {
    if m < 8 {
        return Err(Error::Domain(format!("need at least 8 boundary points, got {m}")));
    }
    (0..m)
        .map(|k| {
            let a = TAU * k as f64 / m as f64;
            let (s, c) = a.sin_cos();
            let (x, y) = spec.inverse_transform(spec.t * c, spec.t * s)?;
            Ok(BoundaryPoint { phi_angle: a, x, y })
        })
        .collect()
}

/// Shape class of a superellipse `|x|^n + |y|^n = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LameShape {
    /// `n < 2`, e.g. the astroid.
    Hypoelliptic,
    Elliptic,
    /// `n > 2`.
    Hyperelliptic,
    /// Different exponents on the two axes.
    Mixed,
}

/// Support of the motion with power speeds `c1(x) = |x|^gamma / c1` and
/// `c2(y) = |y|^beta / c2`: the Lamé curve
/// `(c1 |x|^{1-gamma} / (1-gamma))^2 + (c2 |y|^{1-beta} / (1-beta))^2 < t^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LameSupport {
    pub gamma_exp: f64,
    pub beta_exp: f64,
    pub c1: f64,
    pub c2: f64,
    pub t: f64,
}

impl LameSupport {
    pub fn new(gamma_exp: f64, beta_exp: f64, c1: f64, c2: f64, t: f64) -> Result<Self> {
        if !(gamma_exp < 1.0 && beta_exp < 1.0) {
            return Err(Error::Divergence(format!(
                "exponents must be below 1, got {gamma_exp} and {beta_exp}"
            )));
        }
        for (name, v) in [("c1", c1), ("c2", c2), ("t", t)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Domain(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(Self {
            gamma_exp,
            beta_exp,
            c1,
            c2,
            t,
        })
    }

    /// The astroid `|x|^{2/3} + |y|^{2/3} = t^2`.
    pub fn astroid(t: f64) -> Result<Self> {
        Self::new(2.0 / 3.0, 2.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, t)
    }

    pub fn profiles(&self) -> Result<(VelocityProfile, VelocityProfile)> {
        Ok((
            VelocityProfile::power(self.gamma_exp, self.c1)?,
            VelocityProfile::power(self.beta_exp, self.c2)?,
        ))
    }

    pub fn motion(&self, lambda: f64) -> Result<PlanarMotionSpec> {
        let (px, py) = self.profiles()?;
        PlanarMotionSpec::new(px, py, lambda, self.t)
    }

    /// Left-hand side of the curve equation.
    pub fn level(&self, x: f64, y: f64) -> f64 {
        let a = self.c1 * x.abs().powf(1.0 - self.gamma_exp) / (1.0 - self.gamma_exp);
        let b = self.c2 * y.abs().powf(1.0 - self.beta_exp) / (1.0 - self.beta_exp);
        a * a + b * b
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        self.level(x, y) < self.t * self.t
    }

    /// Superellipse exponents `2 (1 - gamma)` and `2 (1 - beta)`.
    pub fn exponents(&self) -> (f64, f64) {
        (2.0 * (1.0 - self.gamma_exp), 2.0 * (1.0 - self.beta_exp))
    }

    pub fn shape(&self) -> LameShape {
        let (n1, n2) = self.exponents();
        if n1 != n2 {
            LameShape::Mixed
        } else if n1 < 2.0 {
            LameShape::Hypoelliptic
        } else if n1 > 2.0 {
            LameShape::Hyperelliptic
        } else {
            LameShape::Elliptic
        }
    }
}

/// Law at time `t` of the `d`-dimensional motion under the rate `alpha / t`:
/// `Gamma(alpha + d/2) / (pi^{d/2} Gamma(alpha) t^{d + 2 alpha - 2})
/// (t^2 - sum Phi_j(x_j)^2)^{alpha - 1} / prod c_j(x_j)`.
pub fn density_epd_ddim(profiles: &[VelocityProfile], alpha: f64, t: f64, x: &[f64]) -> Result<f64> {
    if profiles.is_empty() || profiles.len() != x.len() {
        return Err(Error::Domain(format!(
            "{} profiles for a point of dimension {}",
            profiles.len(),
            x.len()
        )));
    }
    for (name, v) in [("alpha", alpha), ("t", t)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::Domain(format!("{name} must be positive, got {v}")));
        }
    }
    let d = profiles.len() as f64;
    let mut r2 = 0.0;
    let mut jac = 1.0;
    for (p, &xj) in profiles.iter().zip(x) {
        let y = match p.phi(xj) {
            Ok(y) => y,
            Err(_) => return Ok(0.0),
        };
        r2 += y * y;
        jac /= p.speed(xj);
    }
    let gap = (t - r2.sqrt()) * (t + r2.sqrt());
    if gap <= 0.0 {
        return Ok(0.0);
    }
    if alpha < 1.0 && gap.sqrt() < BOUNDARY_GUARD * t {
        return Err(Error::Boundary);
    }
    let norm = gamma(alpha + 0.5 * d)? / (PI.powf(0.5 * d) * gamma(alpha)? * t.powf(d + 2.0 * alpha - 2.0));
    Ok(norm * gap.powf(alpha - 1.0) * jac)
}

/// A path with exactly `changes` changes of direction, drawn from the law
/// conditional on that count and traced with `points_per_leg` points per
/// straight transformed leg. Includes the origin as first point.
pub fn sample_path(
    spec: &PlanarMotionSpec,
    changes: usize,
    seed: u64,
    points_per_leg: usize,
) -> Result<Vec<(f64, f64)>> {
    let mut rng = path_rng(seed, changes as u64);
    let mut times: Vec<f64> = (0..changes).map(|_| spec.t * rng.gen::<f64>()).collect();
    times.sort_by(f64::total_cmp);
    let angles: Vec<f64> = (0..=changes).map(|_| TAU * rng.gen::<f64>()).collect();
    let per = points_per_leg.max(1);
    let mut out = vec![(0.0, 0.0)];
    let (mut u, mut v, mut prev) = (0.0, 0.0, 0.0);
    for (j, &theta) in angles.iter().enumerate() {
        let end = times.get(j).copied().unwrap_or(spec.t);
        let (s, c) = theta.sin_cos();
        for k in 1..=per {
            let len = (end - prev) * k as f64 / per as f64;
            out.push(spec.inverse_transform(u + len * c, v + len * s)?);
        }
        u += (end - prev) * c;
        v += (end - prev) * s;
        prev = end;
    }
    Ok(out)
}

/// Boundary curves of the supports drawn in the reference figure: unit
/// constants and superellipse exponents `n = 2 (1 - gamma)` in
/// `{2/3, 3/2, 2, 3}`.
pub fn figure1_supports(t: f64) -> Result<Vec<LameSupport>> {
    [2.0 / 3.0, 1.5, 2.0, 3.0]
        .iter()
        .map(|&n| {
            let g = 1.0 - 0.5 * n;
            LameSupport::new(g, g, 1.0, 1.0, t)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{integrate_tanh_sinh, QuadSettings};

    fn unit_spec(lambda: f64, t: f64) -> PlanarMotionSpec {
        PlanarMotionSpec::new(VelocityProfile::unit(), VelocityProfile::unit(), lambda, t).unwrap()
    }

    /// Mass of a radially symmetric density (constant unit profiles) on the
    /// disc of radius `t`.
    fn polar_mass<F: Fn(f64) -> f64>(f: F, t: f64, tol: f64) -> f64 {
        let s = QuadSettings::with_abs_tol(tol);
        TAU * integrate_tanh_sinh(|r, _| r * f(r), 0.0, t, s).unwrap()
    }

    #[test]
    fn origin_values() {
        let spec = unit_spec(1.7, 2.0);
        let v = density_planar(&spec, 0.0, 0.0).unwrap();
        assert!((v - 1.7 / (2.0 * PI * 2.0)).abs() < 1e-15);
        let c = conditional_density(&spec, 1, 0.0, 0.0).unwrap();
        assert!((c - 1.0 / (2.0 * PI * 4.0)).abs() < 1e-15);
        for &(x, y) in &[(0.0, 0.0), (1.2, -0.9), (-0.1, 1.9)] {
            let u = conditional_density(&spec, 2, x, y).unwrap();
            assert!((u - 1.0 / (PI * 4.0)).abs() < 1e-15);
        }
        assert_eq!(density_planar(&spec, 2.0, 0.1).unwrap(), 0.0);
        assert_eq!(density_planar(&spec, 2.0, 0.0).unwrap(), 0.0);
        assert!(conditional_density(&spec, 0, 0.0, 0.0).is_err());
    }

    #[test]
    fn boundary_guard() {
        let spec = unit_spec(1.0, 1.0);
        let edge = density_planar(&spec, 1.0 - 1e-15, 0.0).unwrap();
        assert!(edge.is_finite() && edge > 0.0);
        assert!(density_planar(&spec, 1.0 - 1e-9, 0.0).unwrap() > 0.0);
    }

    #[test]
    fn masses_constant_profile() {
        let (l, t) = (1.3, 1.5);
        let spec = unit_spec(l, t);
        let ac = polar_mass(|r| density_planar(&spec, r, 0.0).unwrap(), t, 1e-10);
        assert!((ac - (1.0 - (-l * t).exp())).abs() < 1e-7, "{ac}");
        let m = polar_mass(|r| conditional_density(&spec, 1, r, 0.0).unwrap(), t, 1e-10);
        assert!((m - 1.0).abs() < 1e-7, "n 1: {m}");
        for n in 2..=6 {
            let m = polar_mass(|r| conditional_density(&spec, n, r, 0.0).unwrap(), t, 1e-12);
            assert!((m - 1.0).abs() < 1e-10, "n {n}: {m}");
        }
    }

    #[test]
    fn poisson_mixture_reproduces_density() {
        let p = VelocityProfile::power(0.5, 1.0).unwrap();
        let spec = PlanarMotionSpec::new(p.clone(), p, 2.0, 1.0).unwrap();
        for &(x, y) in &[(0.1, 0.05), (-0.05, 0.1), (0.02, -0.15)] {
            let target = density_planar(&spec, x, y).unwrap();
            let lt = spec.lambda * spec.t;
            let mut w = (-lt).exp();
            let mut sum = 0.0;
            for n in 1..200u32 {
                w *= lt / f64::from(n);
                let term = w * conditional_density(&spec, n, x, y).unwrap();
                sum += term;
                if term < 1e-16 * sum {
                    break;
                }
            }
            assert!((sum - target).abs() < 1e-12 * target, "{sum} vs {target}");
        }
    }

    #[test]
    fn shapes_of_supports() {
        let astroid = LameSupport::astroid(1.5).unwrap();
        let spec = astroid.motion(1.0).unwrap();
        for b in boundary_polyline(&spec, 64).unwrap() {
            let lhs = b.x.abs().powf(2.0 / 3.0) + b.y.abs().powf(2.0 / 3.0);
            assert!((lhs - 2.25).abs() < 1e-9);
            assert!((astroid.level(b.x, b.y) - 2.25).abs() < 1e-9);
        }
        assert_eq!(astroid.shape(), LameShape::Hypoelliptic);
        let ellipse = LameSupport::new(0.0, 0.0, 2.0, 0.5, 1.0).unwrap();
        let spec = ellipse.motion(1.0).unwrap();
        for b in boundary_polyline(&spec, 16).unwrap() {
            assert!((4.0 * b.x * b.x + 0.25 * b.y * b.y - 1.0).abs() < 1e-12);
        }
        assert_eq!(ellipse.shape(), LameShape::Elliptic);
        let shapes: Vec<_> = figure1_supports(1.0).unwrap().iter().map(LameSupport::shape).collect();
        assert_eq!(
            shapes,
            [
                LameShape::Hypoelliptic,
                LameShape::Hypoelliptic,
                LameShape::Elliptic,
                LameShape::Hyperelliptic
            ]
        );
        assert!(boundary_polyline(&spec, 4).is_err());
        assert!(LameSupport::new(1.0, 0.0, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn support_membership_matches_lame_level() {
        let s = LameSupport::new(0.25, -0.5, 0.7, 1.3, 1.2).unwrap();
        let spec = s.motion(1.0).unwrap();
        for i in -10..=10 {
            for j in -10..=10 {
                let (x, y) = (0.13 * f64::from(i), 0.11 * f64::from(j));
                if (s.level(x, y) - 1.44).abs() > 1e-9 {
                    assert_eq!(support_contains(&spec, x, y), s.contains(x, y), "{x} {y}");
                }
            }
        }
    }

    #[test]
    fn epd_ddim_reductions() {
        let unit = VelocityProfile::unit();
        let p = VelocityProfile::power(0.5, 1.0).unwrap();
        for &alpha in &[0.5, 1.0, 2.5] {
            let m = crate::telegraph1d::density_epd(&p, alpha, 1.3).unwrap();
            for k in 0..20 {
                let x = -0.4 + 0.04 * f64::from(k) + 0.001;
                let a = density_epd_ddim(std::slice::from_ref(&p), alpha, 1.3, &[x]).unwrap();
                let b = m.ac_density(x);
                assert!((a - b).abs() <= 1e-12 * b.abs().max(1e-300), "alpha {alpha} x {x}");
            }
        }
        let two = [unit.clone(), unit.clone()];
        let v = density_epd_ddim(&two, 1.0, 2.0, &[0.3, -1.1]).unwrap();
        assert!((v - 1.0 / (PI * 4.0)).abs() < 1e-15);
        let m = polar_mass(|r| density_epd_ddim(&two, 1.5, 1.0, &[r, 0.0]).unwrap(), 1.0, 1e-12);
        assert!((m - 1.0).abs() < 1e-10);
        assert!(density_epd_ddim(&two, 1.0, 1.0, &[0.3]).is_err());
    }

    #[test]
    fn sampler_basics() {
        let p = VelocityProfile::power(0.5, 1.0).unwrap();
        let spec = PlanarMotionSpec::new(p.clone(), p, 1.0, 1.0).unwrap();
        let b = simulate_planar(&spec, 50_000, 5).unwrap();
        for (&(x, y), &k) in b.positions.iter().zip(&b.event_counts) {
            assert!(support_contains_closed(&spec, x, y, 1e-9));
            if k == 0 {
                let (u, v) = spec.transform(x, y).unwrap();
                assert!((u.hypot(v) - 1.0).abs() < 1e-12);
            }
        }
        let frac = b.zero_event_fraction();
        let e = (-1.0f64).exp();
        assert!((frac - e).abs() < 3.0 * (e * (1.0 - e) / 50_000.0).sqrt());
        assert_eq!(b, simulate_planar(&spec, 50_000, 5).unwrap());
    }

    #[test]
    fn sample_paths_stay_inside() {
        let spec = LameSupport::astroid(1.0).unwrap().motion(1.0).unwrap();
        for k in [0, 2, 3, 4] {
            let path = sample_path(&spec, k, 11, 32).unwrap();
            assert_eq!(path.len(), 1 + 32 * (k + 1));
            assert!(path.iter().all(|&(x, y)| support_contains_closed(&spec, x, y, 1e-9)));
        }
    }

    #[test]
    fn reflections() {
        let p = VelocityProfile::power(-0.5, 2.0).unwrap();
        let q = VelocityProfile::power(0.3, 1.0).unwrap();
        let spec = PlanarMotionSpec::new(p, q, 1.0, 1.0).unwrap();
        let f = |x, y| density_planar(&spec, x, y).unwrap();
        for &(x, y) in &[(0.1, 0.2), (0.05, 0.3)] {
            assert_eq!(f(x, y), f(-x, y));
            assert_eq!(f(x, y), f(x, -y));
        }
    }
}
