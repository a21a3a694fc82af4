use rand::Rng;
use rayon::prelude::*;

use super::PathBatch;
use crate::error::{Error, Result};
use crate::rates::RateFunction;
use crate::rng::path_rng;
use crate::velocity::VelocityProfile;

fn check_args(profile: &VelocityProfile, t: f64, n: usize) -> Result<()> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("time must be positive, got {t}")));
    }
    if n == 0 {
        return Err(Error::Domain("need at least one path".into()));
    }
    if !profile.has_finite_transform() {
        return Err(Error::Divergence(format!("{profile} has an infinite cone")));
    }
    Ok(())
}

fn initial_direction<R: Rng>(rng: &mut R) -> i8 {
    if rng.gen::<bool>() {
        1
    } else {
        -1
    }
}

/// Unit-speed motion in transformed coordinates: returns (y, events, direction).
fn transformed_path<R: Rng>(rate: &RateFunction, t: f64, rng: &mut R) -> (f64, u32, i8) {
    let mut dir = initial_direction(rng);
    let mut s = rate.start_time(t);
    let mut y = 0.0;
    let mut k = 0u32;
    rate.for_each_event(s, t, rng, |tau| {
        y += f64::from(dir) * (tau - s);
        dir = -dir;
        s = tau;
        k += 1;
    });
    y += f64::from(dir) * (t - s);
    (y, k, dir)
}

/// Symmetric telegraph motion with speed `c(x)`, direction switches at the
/// events of `rate`, starting at the origin in a uniformly random direction.
///
/// Path `i` draws from the stream `(seed, i)`, so the batch is identical for
/// any number of worker threads.
pub fn simulate_symmetric(
    profile: &VelocityProfile,
    rate: &RateFunction,
    t: f64,
    n: usize,
    seed: u64,
) -> Result<PathBatch> {
    check_args(profile, t, n)?;
    let paths = (0..n as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = path_rng(seed, i);
            let (y, k, d) = transformed_path(rate, t, &mut rng);
            Ok((profile.phi_inverse(y)?, k, d))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PathBatch::from_paths(paths, seed, t))
}

/// Asymmetric motion: holding times are exponential with rate `lambda1`
/// while moving forward and `lambda2` while moving backward.
pub fn simulate_asymmetric(
    profile: &VelocityProfile,
    lambda1: f64,
    lambda2: f64,
    t: f64,
    n: usize,
    seed: u64,
) -> Result<PathBatch> {
    check_args(profile, t, n)?;
    for (name, v) in [("lambda1", lambda1), ("lambda2", lambda2)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::Domain(format!("{name} must be positive, got {v}")));
        }
    }
    let paths = (0..n as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = path_rng(seed, i);
            let mut dir = initial_direction(&mut rng);
            let mut s = 0.0;
            let mut y = 0.0;
            let mut k = 0u32;
            loop {
                let rate = if dir > 0 { lambda1 } else { lambda2 };
                let u: f64 = rng.gen();
                let tau = s - (1.0 - u).ln() / rate;
                if tau > t {
                    break;
                }
                y += f64::from(dir) * (tau - s);
                dir = -dir;
                s = tau;
                k += 1;
            }
            y += f64::from(dir) * (t - s);
            Ok((profile.phi_inverse(y)?, k, dir))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PathBatch::from_paths(paths, seed, t))
}

/// Controls for the direct ODE integration cross-check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rk4Settings {
    /// Absolute error allowed per step.
    pub abs_tol: f64,
    /// Relative error allowed per step. Near a zero of `c` the solution is
    /// not Lipschitz in its initial value, so a small absolute error there
    /// turns into a time lag; the relative test forces short steps instead.
    pub rel_tol: f64,
    /// The first stretch of length `seed_fraction * t` is taken from the
    /// exact solution: at a zero of `c` the ODE `x' = c(x)` does not leave
    /// the origin.
    pub seed_fraction: f64,
}

impl Default for Rk4Settings {
    fn default() -> Self {
        Self {
            abs_tol: 1e-300,
            rel_tol: 1e-11,
            seed_fraction: 1e-9,
        }
    }
}

fn rk4_step(profile: &VelocityProfile, x: f64, v: f64, h: f64) -> f64 {
    let f = |x: f64| v * profile.speed(x);
    let k1 = f(x);
    let k2 = f(x + 0.5 * h * k1);
    let k3 = f(x + 0.5 * h * k2);
    let k4 = f(x + h * k3);
    x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
}

/// Integrates `x' = dir c(x)` over `duration` with step-doubling control.
fn integrate_leg(profile: &VelocityProfile, mut x: f64, dir: f64, duration: f64, s: &Rk4Settings) -> f64 {
    let mut remaining = duration;
    let mut h = (duration * 1e-3).max(1e-12);
    while remaining > 0.0 {
        let step = h.min(remaining);
        let full = rk4_step(profile, x, dir, step);
        let half = rk4_step(profile, x, dir, 0.5 * step);
        let two = rk4_step(profile, half, dir, 0.5 * step);
        let err = (two - full).abs() / 15.0;
        let scale = s.abs_tol + s.rel_tol * two.abs();
        if err <= scale || step < 1e-15 * duration.max(1.0) {
            x = two + (two - full) / 15.0;
            remaining -= step;
            if err < 0.1 * scale {
                h = step * 2.0;
            }
        } else {
            h = 0.5 * step;
        }
    }
    x
}

/// Cross-check of [`simulate_symmetric`]: identical event times, but each
/// leg is integrated directly in `x` with adaptive RK4 instead of through
/// the transform.
pub fn simulate_symmetric_rk4(
    profile: &VelocityProfile,
    rate: &RateFunction,
    t: f64,
    n: usize,
    seed: u64,
    settings: Rk4Settings,
) -> Result<PathBatch> {
    check_args(profile, t, n)?;
    let paths = (0..n as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = path_rng(seed, i);
            let mut dir = initial_direction(&mut rng);
            let start = rate.start_time(t);
            let mut events = Vec::new();
            rate.for_each_event(start, t, &mut rng, |tau| events.push(tau));
            events.push(t);
            let lead = (settings.seed_fraction * t).min(events[0] - start);
            let mut x = profile.phi_inverse(f64::from(dir) * lead)?;
            let mut s = start + lead;
            let k = events.len() as u32 - 1;
            for (j, &tau) in events.iter().enumerate() {
                x = integrate_leg(profile, x, f64::from(dir), tau - s, &settings);
                s = tau;
                if j + 1 < events.len() {
                    dir = -dir;
                }
            }
            Ok((x, k, dir))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PathBatch::from_paths(paths, seed, t))
}
