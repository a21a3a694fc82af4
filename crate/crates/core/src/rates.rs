//! Time-dependent switching rates `lambda(t)` and exact event-time sampling.
//!
//! Every supported kind has a closed-form integrated rate
//! `Lambda(s, t) = int_s^t lambda(u) du`, so the next event after `s` is drawn
//! by solving `Lambda(s, T) = -ln U` directly (no thinning).

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::config::parse_spec;
use crate::error::{Error, Result};

/// Default start offset, as a fraction of the horizon, for rates whose
/// integrated rate diverges at the origin.
pub const DEFAULT_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RateKind {
    /// `lambda(t) = lambda`
    Constant { lambda: f64 },
    /// `lambda(t) = lambda tanh(lambda t)`
    Tanh { lambda: f64 },
    /// `lambda(t) = lambda coth(lambda t)`
    Coth { lambda: f64 },
    /// `lambda(t) = alpha / t`
    Epd { alpha: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFunction {
    kind: RateKind,
    eps: f64,
}

/// `ln cosh x` without overflow.
fn ln_cosh(x: f64) -> f64 {
    let a = x.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

/// `ln sinh x` for `x > 0` without overflow.
fn ln_sinh(x: f64) -> f64 {
    if x < 1.0 {
        x.sinh().ln()
    } else {
        x + (-(-2.0 * x).exp()).ln_1p() - std::f64::consts::LN_2
    }
}

/// Solves `ln cosh y = l` for `y >= 0`, `l >= 0`.
fn acosh_exp(l: f64) -> f64 {
    l + (1.0 + (-(-2.0 * l).exp_m1()).sqrt()).ln()
}

/// Solves `ln sinh y = l` for `y > 0`.
fn asinh_exp(l: f64) -> f64 {
    if l < 0.0 {
        l.exp().asinh()
    } else {
        l + (1.0 + (1.0 + (-2.0 * l).exp()).sqrt()).ln()
    }
}

impl RateFunction {
    pub fn new(kind: RateKind) -> Result<Self> {
        let v = match kind {
            RateKind::Constant { lambda } | RateKind::Tanh { lambda } | RateKind::Coth { lambda } => {
                lambda
            }
            RateKind::Epd { alpha } => alpha,
        };
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::Domain(format!("rate parameter must be positive, got {v}")));
        }
        Ok(Self {
            kind,
            eps: DEFAULT_EPS,
        })
    }

    pub fn constant(lambda: f64) -> Result<Self> {
        Self::new(RateKind::Constant { lambda })
    }

    pub fn tanh(lambda: f64) -> Result<Self> {
        Self::new(RateKind::Tanh { lambda })
    }

    pub fn coth(lambda: f64) -> Result<Self> {
        Self::new(RateKind::Coth { lambda })
    }

    pub fn epd(alpha: f64) -> Result<Self> {
        Self::new(RateKind::Epd { alpha })
    }

    /// Start offset as a fraction of the horizon, used by the coth and EPD kinds.
    pub fn with_eps(mut self, eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::Domain(format!("eps must lie in (0, 1), got {eps}")));
        }
        self.eps = eps;
        Ok(self)
    }

    pub fn kind(&self) -> RateKind {
        self.kind
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// Whether `Lambda(0, t)` is finite.
    pub fn starts_at_origin(&self) -> bool {
        matches!(self.kind, RateKind::Constant { .. } | RateKind::Tanh { .. })
    }

    /// Time at which sampled paths start for horizon `t_max`.
    pub fn start_time(&self, t_max: f64) -> f64 {
        if self.starts_at_origin() {
            0.0
        } else {
            self.eps * t_max
        }
    }

    /// `lambda(t)`.
    pub fn rate_at(&self, t: f64) -> Result<f64> {
        match self.kind {
            RateKind::Constant { lambda } => Ok(lambda),
            RateKind::Tanh { lambda } => {
                if t < 0.0 {
                    return Err(Error::Domain(format!("rate evaluated at t = {t}")));
                }
                Ok(lambda * (lambda * t).tanh())
            }
            RateKind::Coth { lambda } => {
                if !(t > 0.0) {
                    return Err(Error::Domain(format!("coth rate needs t > 0, got {t}")));
                }
                Ok(lambda / (lambda * t).tanh())
            }
            RateKind::Epd { alpha } => {
                if !(t > 0.0) {
                    return Err(Error::Domain(format!("alpha/t rate needs t > 0, got {t}")));
                }
                Ok(alpha / t)
            }
        }
    }

    /// `Lambda(s, t) = int_s^t lambda(u) du`; `+inf` when it diverges at `s = 0`.
    pub fn integrated_rate(&self, s: f64, t: f64) -> Result<f64> {
        if !(s >= 0.0 && t >= s) {
            return Err(Error::Domain(format!("need 0 <= s <= t, got s = {s}, t = {t}")));
        }
        if s == t {
            return Ok(0.0);
        }
        Ok(match self.kind {
            RateKind::Constant { lambda } => lambda * (t - s),
            RateKind::Tanh { lambda } => ln_cosh(lambda * t) - ln_cosh(lambda * s),
            RateKind::Coth { lambda } => {
                if s == 0.0 {
                    f64::INFINITY
                } else {
                    ln_sinh(lambda * t) - ln_sinh(lambda * s)
                }
            }
            RateKind::Epd { alpha } => {
                if s == 0.0 {
                    f64::INFINITY
                } else {
                    alpha * (t / s).ln()
                }
            }
        })
    }

    /// The `T > s` solving `Lambda(s, T) = e` for `e >= 0`.
    pub fn next_event_after(&self, s: f64, e: f64) -> f64 {
        match self.kind {
            RateKind::Constant { lambda } => s + e / lambda,
            RateKind::Tanh { lambda } => acosh_exp(ln_cosh(lambda * s) + e) / lambda,
            RateKind::Coth { lambda } => asinh_exp(ln_sinh(lambda * s) + e) / lambda,
            RateKind::Epd { alpha } => s * (e / alpha).exp(),
        }
    }

    /// Event times in `(t0, t_max]`, strictly increasing, with `t0` from
    /// [`RateFunction::start_time`].
    pub fn sample_event_times<R: Rng + ?Sized>(&self, t_max: f64, rng: &mut R) -> Vec<f64> {
        let mut times = Vec::new();
        self.for_each_event(self.start_time(t_max), t_max, rng, |t| times.push(t));
        times
    }

    /// Streams event times in `(start, t_max]` into `on_event`.
    pub(crate) fn for_each_event<R: Rng + ?Sized, F: FnMut(f64)>(
        &self,
        start: f64,
        t_max: f64,
        rng: &mut R,
        mut on_event: F,
    ) {
        let mut s = start;
        loop {
            let u: f64 = rng.gen();
            // 1 - u lies in (0, 1], so the exponential draw is finite.
            let e = -(1.0 - u).ln();
            let next = self.next_event_after(s, e);
            if !(next <= t_max) || next <= s {
                break;
            }
            on_event(next);
            s = next;
        }
    }

    /// `lambda'(t) + lambda(t)^2` in closed form.
    pub fn riccati_residual(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::Domain(format!("need t > 0, got {t}")));
        }
        Ok(match self.kind {
            RateKind::Constant { lambda } => lambda * lambda,
            RateKind::Tanh { lambda } => {
                let th = (lambda * t).tanh();
                let sech2 = 1.0 - th * th;
                lambda * lambda * sech2 + lambda * lambda * th * th
            }
            RateKind::Coth { lambda } => {
                let cth = 1.0 / (lambda * t).tanh();
                let csch = 1.0 / (lambda * t).sinh();
                -lambda * lambda * csch * csch + lambda * lambda * cth * cth
            }
            RateKind::Epd { alpha } => -alpha / (t * t) + alpha * alpha / (t * t),
        })
    }

    /// Time-change factor with `gamma'/gamma = -2 lambda`, normalized to 1 at
    /// the origin when `Lambda(0, .)` is finite and at `t0` otherwise.
    pub fn gamma_factor(&self, t: f64, t0: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::Domain(format!("need t > 0, got {t}")));
        }
        Ok(match self.kind {
            RateKind::Constant { lambda } => (-2.0 * lambda * t).exp(),
            RateKind::Tanh { lambda } => {
                let sech = 1.0 / (lambda * t).cosh();
                sech * sech
            }
            RateKind::Coth { .. } | RateKind::Epd { .. } => {
                if !(t0 > 0.0 && t0 <= t) {
                    return Err(Error::Domain(format!("need 0 < t0 <= t, got t0 = {t0}")));
                }
                (-2.0 * self.integrated_rate(t0, t)?).exp()
            }
        })
    }
}

impl fmt::Display for RateFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            RateKind::Constant { lambda } => write!(f, "rate:constant:lambda={lambda}")?,
            RateKind::Tanh { lambda } => write!(f, "rate:tanh:lambda={lambda}")?,
            RateKind::Coth { lambda } => write!(f, "rate:coth:lambda={lambda}")?,
            RateKind::Epd { alpha } => write!(f, "rate:epd:alpha={alpha}")?,
        }
        if !self.starts_at_origin() {
            write!(f, ",eps={}", self.eps)?;
        }
        Ok(())
    }
}

impl FromStr for RateFunction {
    type Err = Error;

    /// `rate:constant:lambda=1`, `rate:tanh:lambda=1`, `rate:coth:lambda=1`,
    /// `rate:epd:alpha=1.5`, each optionally with `eps=1e-9`. The `rate:`
    /// prefix may be omitted.
    fn from_str(s: &str) -> Result<Self> {
        let body = s.strip_prefix("rate:").unwrap_or(s);
        let (kind, params) = parse_spec(body)?;
        let r = match kind.as_str() {
            "constant" => Self::constant(params.number("lambda")?),
            "tanh" => Self::tanh(params.number("lambda")?),
            "coth" => Self::coth(params.number("lambda")?),
            "epd" => Self::epd(params.number("alpha")?),
            other => Err(Error::Parse(format!("unknown rate kind `{other}`"))),
        }?;
        match params.optional_number("eps")? {
            Some(eps) => r.with_eps(eps),
            None => Ok(r),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{integrate, QuadSettings};
    use crate::rng::path_rng;

    #[test]
    fn rate_values() {
        let t = RateFunction::tanh(2.0).unwrap();
        assert!((t.rate_at(50.0).unwrap() - 2.0).abs() < 1e-15);
        assert_eq!(RateFunction::epd(3.0).unwrap().rate_at(2.0).unwrap(), 1.5);
        let c = RateFunction::constant(0.7).unwrap();
        assert_eq!(c.rate_at(0.0).unwrap(), 0.7);
        assert_eq!(c.rate_at(123.0).unwrap(), 0.7);
        assert!(RateFunction::coth(1.0).unwrap().rate_at(0.0).is_err());
        assert!(RateFunction::epd(1.0).unwrap().rate_at(-1.0).is_err());
        assert!(RateFunction::constant(0.0).is_err());
    }

    #[test]
    fn integrated_rate_closed_forms() {
        let q = QuadSettings::with_abs_tol(1e-12);
        for &lambda in &[0.5, 1.0, 3.0] {
            let r = RateFunction::tanh(lambda).unwrap();
            for &t in &[0.1, 1.0, 4.0] {
                let oracle = integrate(|u| r.rate_at(u).unwrap(), 0.0, t, q).unwrap();
                assert!((r.integrated_rate(0.0, t).unwrap() - oracle).abs() < 1e-9);
                assert!((r.integrated_rate(0.0, t).unwrap() - (lambda * t).cosh().ln()).abs() < 1e-12);
            }
        }
        let c = RateFunction::coth(1.0).unwrap();
        assert_eq!(c.integrated_rate(0.0, 1.0).unwrap(), f64::INFINITY);
        let oracle = integrate(|u| c.rate_at(u).unwrap(), 0.5, 2.0, q).unwrap();
        assert!((c.integrated_rate(0.5, 2.0).unwrap() - oracle).abs() < 1e-9);
        assert_eq!(RateFunction::epd(1.0).unwrap().integrated_rate(0.0, 1.0).unwrap(), f64::INFINITY);
        assert_eq!(RateFunction::constant(2.0).unwrap().integrated_rate(1.0, 3.0).unwrap(), 4.0);
        assert!(c.integrated_rate(2.0, 1.0).is_err());
    }

    #[test]
    fn integrated_rate_is_additive() {
        let rates = [
            RateFunction::constant(1.3).unwrap(),
            RateFunction::tanh(0.8).unwrap(),
            RateFunction::coth(2.0).unwrap(),
            RateFunction::epd(1.5).unwrap(),
        ];
        for r in &rates {
            let (s, u, t) = (0.2, 0.9, 3.1);
            let lhs = r.integrated_rate(s, u).unwrap() + r.integrated_rate(u, t).unwrap();
            assert!((lhs - r.integrated_rate(s, t).unwrap()).abs() < 1e-12, "{r}");
        }
    }

    #[test]
    fn next_event_inverts_integrated_rate() {
        let rates = [
            RateFunction::constant(1.3).unwrap(),
            RateFunction::tanh(0.8).unwrap(),
            RateFunction::tanh(40.0).unwrap(),
            RateFunction::coth(2.0).unwrap(),
            RateFunction::coth(30.0).unwrap(),
            RateFunction::epd(0.5).unwrap(),
        ];
        for r in &rates {
            for &s in &[1e-6, 0.01, 0.5, 2.0] {
                for &e in &[1e-8, 0.3, 2.0, 15.0] {
                    let t = r.next_event_after(s, e);
                    let back = r.integrated_rate(s, t).unwrap();
                    assert!((back - e).abs() < 1e-8 * e.max(1.0), "{r} s={s} e={e}: {back}");
                }
            }
        }
    }

    #[test]
    fn constant_gaps_are_exponential() {
        let r = RateFunction::constant(2.0).unwrap();
        let n = 100_000;
        let gaps: Vec<f64> = (0..n)
            .map(|i| r.sample_event_times(20.0, &mut path_rng(7, i))[0])
            .collect();
        let mean = gaps.iter().sum::<f64>() / n as f64;
        let se = 0.5 / (n as f64).sqrt();
        assert!((mean - 0.5).abs() < 3.0 * se, "mean gap {mean}");
    }

    #[test]
    fn tanh_mean_count_is_integrated_rate() {
        let r = RateFunction::tanh(1.5).unwrap();
        let t_max = 2.0;
        let runs = 100_000;
        let counts: Vec<f64> = (0..runs)
            .map(|i| r.sample_event_times(t_max, &mut path_rng(11, i)).len() as f64)
            .collect();
        let mean = counts.iter().sum::<f64>() / runs as f64;
        let expected = r.integrated_rate(0.0, t_max).unwrap();
        // Poisson count: variance equals mean
        let se = (expected / runs as f64).sqrt();
        assert!((mean - expected).abs() < 3.0 * se, "{mean} vs {expected}");
    }

    #[test]
    fn coth_zero_event_fraction_vanishes() {
        let mut fractions = Vec::new();
        for &eps in &[1e-2, 1e-4, 1e-6] {
            let r = RateFunction::coth(1.0).unwrap().with_eps(eps).unwrap();
            let zero = (0..20_000)
                .filter(|&i| r.sample_event_times(1.0, &mut path_rng(3, i)).is_empty())
                .count();
            fractions.push(zero as f64 / 20_000.0);
        }
        assert!(fractions[0] > fractions[1] && fractions[1] > fractions[2]);
        assert!(fractions[2] < 1e-4 * 10.0);
    }

    #[test]
    fn events_are_strictly_increasing() {
        let r = RateFunction::epd(2.0).unwrap();
        let ts = r.sample_event_times(1.0, &mut path_rng(5, 9));
        assert!(!ts.is_empty());
        assert!(ts.windows(2).all(|w| w[0] < w[1]));
        assert!(ts[0] > r.start_time(1.0) && *ts.last().unwrap() <= 1.0);
    }

    #[test]
    fn riccati() {
        for r in [RateFunction::tanh(1.7).unwrap(), RateFunction::coth(0.9).unwrap()] {
            let vals: Vec<f64> = (1..=100).map(|i| r.riccati_residual(0.1 * i as f64).unwrap()).collect();
            let (lo, hi) = vals.iter().fold((f64::MAX, f64::MIN), |(a, b), &v| (a.min(v), b.max(v)));
            assert!(hi - lo <= 1e-12, "{r}: spread {}", hi - lo);
            let lambda = match r.kind() {
                RateKind::Tanh { lambda } | RateKind::Coth { lambda } => lambda,
                _ => unreachable!(),
            };
            assert!((vals[0] - lambda * lambda).abs() < 1e-12);
        }
        let e = RateFunction::epd(3.0).unwrap();
        assert!((e.riccati_residual(2.0).unwrap() - 6.0 / 4.0).abs() < 1e-15);
        // closed form agrees with a finite-difference derivative
        let r = RateFunction::coth(1.2).unwrap();
        let (t, h) = (0.7, 1e-5);
        let d = (r.rate_at(t + h).unwrap() - r.rate_at(t - h).unwrap()) / (2.0 * h);
        let fd = d + r.rate_at(t).unwrap().powi(2);
        assert!((fd - r.riccati_residual(t).unwrap()).abs() < 1e-8);
    }

    #[test]
    fn gamma_factor_values() {
        let t = RateFunction::tanh(1.3).unwrap();
        let sech = 1.0 / (1.3f64 * 0.8).cosh();
        assert!((t.gamma_factor(0.8, 0.0).unwrap() - sech * sech).abs() < 1e-15);
        let c = RateFunction::constant(1.0).unwrap();
        assert!((c.gamma_factor(1.0, 0.0).unwrap() - (-2.0f64).exp()).abs() < 1e-16);
        let e = RateFunction::epd(1.0).unwrap();
        let g1 = e.gamma_factor(1.0, 0.1).unwrap();
        let g2 = e.gamma_factor(2.0, 0.1).unwrap();
        assert!((g1 / g2 - 4.0).abs() < 1e-12);
    }

    #[test]
    fn parse_round_trip() {
        for s in ["rate:constant:lambda=1", "rate:tanh:lambda=2.5", "rate:epd:alpha=1.5,eps=0.001"] {
            let r: RateFunction = s.parse().unwrap();
            assert_eq!(r.to_string().parse::<RateFunction>().unwrap(), r);
        }
        let r: RateFunction = "coth:lambda=1".parse().unwrap();
        assert_eq!(r.eps(), DEFAULT_EPS);
        assert!("rate:poly:lambda=1".parse::<RateFunction>().is_err());
    }
}
