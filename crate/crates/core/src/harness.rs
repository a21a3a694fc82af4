//! Goodness-of-fit statistics, mass checks and finite-difference residuals
//! used to validate samplers and closed-form laws.

use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::quad::QuadSettings;
use crate::rates::RateFunction;
use crate::telegraph1d::{lorentz_coefficient, lorentz_transform, DensityModel1D};
use crate::velocity::VelocityProfile;

/// Outcome of one validation check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub name: String,
    pub statistic: f64,
    pub threshold: f64,
    pub passed: bool,
    pub seed: Option<u64>,
    pub n: Option<u64>,
    pub details: String,
}

impl ValidationReport {
    /// Passes when `statistic <= threshold`.
    pub fn at_most(name: impl Into<String>, statistic: f64, threshold: f64) -> Self {
        Self::build(name, statistic, threshold, statistic <= threshold)
    }

    /// Passes when `statistic >= threshold` (p-values).
    pub fn at_least(name: impl Into<String>, statistic: f64, threshold: f64) -> Self {
        Self::build(name, statistic, threshold, statistic >= threshold)
    }

    /// Passes when `|statistic - target| <= tol`; `threshold` records `tol`.
    pub fn within(name: impl Into<String>, statistic: f64, target: f64, tol: f64) -> Self {
        let mut r = Self::build(name, statistic, tol, (statistic - target).abs() <= tol);
        r.details = format!("target {target}");
        r
    }

    fn build(name: impl Into<String>, statistic: f64, threshold: f64, passed: bool) -> Self {
        Self {
            name: name.into(),
            statistic,
            threshold,
            passed: passed && statistic.is_finite(),
            seed: None,
            n: None,
            details: String::new(),
        }
    }

    /// A check that could not be carried out.
    pub fn failed(name: impl Into<String>, err: &Error) -> Self {
        let mut r = Self::build(name, f64::NAN, f64::NAN, false);
        r.details = format!("error: {err}");
        r
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn with_n(mut self, n: u64) -> Self {
        self.n = Some(n);
        self
    }

    pub fn with_details(mut self, details: impl AsRef<str>) -> Self {
        if !self.details.is_empty() {
            self.details.push_str("; ");
        }
        self.details.push_str(details.as_ref());
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("reports serialize")
    }
}

fn next_down(x: f64) -> f64 {
    if x.is_nan() || x == f64::NEG_INFINITY {
        return x;
    }
    if x == 0.0 {
        return -f64::from_bits(1);
    }
    let bits = x.to_bits();
    f64::from_bits(if x > 0.0 { bits - 1 } else { bits + 1 })
}

/// Kolmogorov–Smirnov distance between the empirical law of `samples` and a
/// CDF that may have jumps: `cdf_left(x)` is the left limit `P(X < x)`.
pub fn ks_statistic_with_left<F, G>(samples: &[f64], cdf: F, cdf_left: G) -> f64
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < xs.len() {
        let v = xs[i];
        let mut j = i;
        while j < xs.len() && xs[j] == v {
            j += 1;
        }
        let below = i as f64 / n;
        let upto = j as f64 / n;
        d = d.max((upto - cdf(v)).abs()).max((below - cdf_left(v)).abs());
        i = j;
    }
    d
}

/// Kolmogorov–Smirnov distance; left limits of `cdf` are taken one ulp
/// below each sample, so point masses are handled.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    ks_statistic_with_left(samples, &cdf, |x| cdf(next_down(x)))
}

/// Two-sample Kolmogorov–Smirnov distance.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let v = a[i].min(b[j]);
        while i < a.len() && a[i] <= v {
            i += 1;
        }
        while j < b.len() && b[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Rectangular bins with expected probabilities; bins without a mass are
/// left out and counted with everything else in the complement bin.
#[derive(Debug, Clone, PartialEq)]
pub struct BinGrid {
    pub x_edges: Vec<f64>,
    pub y_edges: Vec<f64>,
    /// Row-major over `(ix, iy)`: index `ix * ny + iy`.
    pub masses: Vec<Option<f64>>,
}

impl BinGrid {
    pub fn nx(&self) -> usize {
        self.x_edges.len() - 1
    }

    pub fn ny(&self) -> usize {
        self.y_edges.len() - 1
    }

    fn locate(edges: &[f64], v: f64) -> Option<usize> {
        if !(v >= edges[0] && v < edges[edges.len() - 1]) {
            return None;
        }
        let k = edges.partition_point(|&e| e <= v);
        Some(k - 1)
    }

    /// Index of the bin holding `(x, y)`, if any.
    pub fn bin_of(&self, x: f64, y: f64) -> Option<usize> {
        Some(Self::locate(&self.x_edges, x)? * self.ny() + Self::locate(&self.y_edges, y)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Chi2Outcome {
    pub statistic: f64,
    pub p_value: f64,
    pub dof: usize,
}

/// Pearson chi-square test of `samples` against `bins`. Bins expecting fewer
/// than 5 samples are pooled with the complement.
pub fn chi2_2d(samples: &[(f64, f64)], bins: &BinGrid) -> Result<Chi2Outcome> {
    let cells = bins.nx() * bins.ny();
    if bins.masses.len() != cells {
        return Err(Error::Domain(format!(
            "{} masses for {cells} bins",
            bins.masses.len()
        )));
    }
    let total_mass: f64 = bins.masses.iter().flatten().sum();
    if total_mass > 1.0 + 1e-9 {
        return Err(Error::Domain(format!("bin masses sum to {total_mass} > 1")));
    }
    let n = samples.len() as f64;
    let mut counts = vec![0u64; cells];
    let mut in_bins = 0u64;
    for &(x, y) in samples {
        if let Some(k) = bins.bin_of(x, y) {
            if bins.masses[k].is_some() {
                counts[k] += 1;
                in_bins += 1;
            }
        }
    }
    // (observed, expected) per effective bin
    let mut kept = Vec::new();
    let mut rest_obs = samples.len() as f64 - in_bins as f64;
    let mut rest_exp = n * (1.0 - total_mass).max(0.0);
    for (k, m) in bins.masses.iter().enumerate() {
        if let Some(m) = m {
            let e = n * m;
            if e < 5.0 {
                rest_obs += counts[k] as f64;
                rest_exp += e;
            } else {
                kept.push((counts[k] as f64, e));
            }
        }
    }
    if rest_exp >= 5.0 {
        kept.push((rest_obs, rest_exp));
    } else if let Some(big) = kept.iter_mut().max_by(|a, b| a.1.total_cmp(&b.1)) {
        big.0 += rest_obs;
        big.1 += rest_exp;
    }
    if kept.len() < 2 {
        return Err(Error::Degenerate(format!(
            "{} effective bins after merging",
            kept.len()
        )));
    }
    let statistic: f64 = kept.iter().map(|&(o, e)| (o - e) * (o - e) / e).sum();
    let dof = kept.len() - 1;
    let dist = ChiSquared::new(dof as f64).map_err(|e| Error::Domain(e.to_string()))?;
    Ok(Chi2Outcome {
        statistic,
        p_value: dist.sf(statistic),
        dof,
    })
}

/// Total mass of a 1-d law: quadrature of the continuous part plus atoms.
pub fn quadrature_mass(model: &DensityModel1D) -> Result<f64> {
    Ok(model.ac_mass(QuadSettings::with_abs_tol(1e-12))? + model.atom_mass())
}

/// How the space-varying second-order operator is written.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OperatorForm {
    /// `c d/dx (c du/dx)`.
    Velocity,
    /// `d/dx (c d/dx (c u))`, the form obeyed by a density carrying `1/c`.
    Divergence,
}

/// Equations whose residual [`pde_residual_grid`] evaluates. Unknowns are
/// functions of `(x, t)`, or `(x, y, t)` for the planar equation.
#[derive(Debug, Clone)]
pub enum Equation {
    /// `u_tt + 2 lambda u_t = L u`.
    Telegraph {
        lambda: f64,
        profile: VelocityProfile,
        form: OperatorForm,
    },
    /// `u_tt + (l1 + l2) u_t = L u + (l1 - l2) D u`, with `D = c d/dx` in
    /// the velocity form and `d/dx (c .)` in the divergence form.
    TelegraphDrift {
        lambda1: f64,
        lambda2: f64,
        profile: VelocityProfile,
        form: OperatorForm,
    },
    /// `u_tt + 2 lambda u_t = L_x u + L_y u`.
    DampedWave2d {
        lambda: f64,
        profile_x: VelocityProfile,
        profile_y: VelocityProfile,
        form: OperatorForm,
    },
    /// `u_tt + (2 alpha / t) u_t = L u`.
    Epd {
        alpha: f64,
        profile: VelocityProfile,
        form: OperatorForm,
    },
    /// `u_tt + 2 lambda(t) u_t = L u`.
    Nonhomog {
        rate: RateFunction,
        profile: VelocityProfile,
        form: OperatorForm,
    },
    /// `v_tt - k v = L v`.
    KleinGordon {
        k: f64,
        profile: VelocityProfile,
        form: OperatorForm,
    },
}

impl Equation {
    fn is_planar(&self) -> bool {
        matches!(self, Equation::DampedWave2d { .. })
    }

    /// Profiles `(x, Some(y))` that define the cone of the equation.
    fn profiles(&self) -> (&VelocityProfile, Option<&VelocityProfile>) {
        match self {
            Equation::Telegraph { profile, .. }
            | Equation::TelegraphDrift { profile, .. }
            | Equation::Epd { profile, .. }
            | Equation::Nonhomog { profile, .. }
            | Equation::KleinGordon { profile, .. } => (profile, None),
            Equation::DampedWave2d {
                profile_x, profile_y, ..
            } => (profile_x, Some(profile_y)),
        }
    }
}

/// Flux-differenced `L u` along one axis; `g(s)` is the unknown restricted
/// to that axis.
fn space_operator<G: Fn(f64) -> f64>(g: G, p: &VelocityProfile, form: OperatorForm, s: f64, h: f64) -> f64 {
    let c = |z: f64| p.speed(z);
    let (cm, cp) = (c(s - 0.5 * h), c(s + 0.5 * h));
    match form {
        OperatorForm::Velocity => {
            let (um, u0, up) = (g(s - h), g(s), g(s + h));
            c(s) * (cp * (up - u0) - cm * (u0 - um)) / (h * h)
        }
        OperatorForm::Divergence => {
            let w = |z: f64| c(z) * g(z);
            let (wm, w0, wp) = (w(s - h), w(s), w(s + h));
            (cp * (wp - w0) - cm * (w0 - wm)) / (h * h)
        }
    }
}

/// Central first derivative of the drift term.
fn drift_operator<G: Fn(f64) -> f64>(g: G, p: &VelocityProfile, form: OperatorForm, s: f64, h: f64) -> f64 {
    match form {
        OperatorForm::Velocity => p.speed(s) * (g(s + h) - g(s - h)) / (2.0 * h),
        OperatorForm::Divergence => {
            (p.speed(s + h) * g(s + h) - p.speed(s - h) * g(s - h)) / (2.0 * h)
        }
    }
}

/// Residual of `eq` for `u(x, y, t)` at one point, all derivatives by
/// second-order central differences with step `h`. For one-dimensional
/// equations `y` is passed through unchanged.
pub fn pde_residual_at<U>(u: &U, eq: &Equation, x: f64, y: f64, t: f64, h: f64) -> Result<f64>
where
    U: Fn(f64, f64, f64) -> f64,
{
    let u0 = u(x, y, t);
    let (um, up) = (u(x, y, t - h), u(x, y, t + h));
    let u_tt = (up - 2.0 * u0 + um) / (h * h);
    let u_t = (up - um) / (2.0 * h);
    let along_x = |s: f64| u(s, y, t);
    Ok(match eq {
        Equation::Telegraph { lambda, profile, form } => {
            u_tt + 2.0 * lambda * u_t - space_operator(along_x, profile, *form, x, h)
        }
        Equation::TelegraphDrift {
            lambda1,
            lambda2,
            profile,
            form,
        } => {
            u_tt + (lambda1 + lambda2) * u_t
                - space_operator(along_x, profile, *form, x, h)
                - (lambda1 - lambda2) * drift_operator(along_x, profile, *form, x, h)
        }
        Equation::DampedWave2d {
            lambda,
            profile_x,
            profile_y,
            form,
        } => {
            let along_y = |s: f64| u(x, s, t);
            u_tt + 2.0 * lambda * u_t
                - space_operator(along_x, profile_x, *form, x, h)
                - space_operator(along_y, profile_y, *form, y, h)
        }
        Equation::Epd { alpha, profile, form } => {
            u_tt + 2.0 * alpha / t * u_t - space_operator(along_x, profile, *form, x, h)
        }
        Equation::Nonhomog { rate, profile, form } => {
            u_tt + 2.0 * rate.rate_at(t)? * u_t - space_operator(along_x, profile, *form, x, h)
        }
        Equation::KleinGordon { k, profile, form } => {
            u_tt - k * u0 - space_operator(along_x, profile, *form, x, h)
        }
    })
}

/// Evaluation points for residual checks: a lattice of `points` values per
/// axis, fixed independently of the difference step so that residuals at
/// different steps can be compared.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualGrid {
    pub x: (f64, f64),
    /// Only used by planar equations.
    pub y: (f64, f64),
    pub t: (f64, f64),
    pub points: usize,
    /// Require every point to sit at least `10 h` inside the cone
    /// `|Phi(x)| < t` (resp. `Phi1^2 + Phi2^2 < t^2`).
    pub inside_cone: bool,
}

impl ResidualGrid {
    pub fn new(x: (f64, f64), t: (f64, f64), points: usize) -> Self {
        Self {
            x,
            y: (0.0, 0.0),
            t,
            points,
            inside_cone: true,
        }
    }

    pub fn with_y(mut self, y: (f64, f64)) -> Self {
        self.y = y;
        self
    }

    /// For test functions that are not laws and have no cone.
    pub fn anywhere(mut self) -> Self {
        self.inside_cone = false;
        self
    }

    fn axis(range: (f64, f64), points: usize) -> Vec<f64> {
        if points <= 1 {
            return vec![0.5 * (range.0 + range.1)];
        }
        (0..points)
            .map(|i| range.0 + (range.1 - range.0) * i as f64 / (points - 1) as f64)
            .collect()
    }

    fn lattice(&self, planar: bool) -> Vec<(f64, f64, f64)> {
        let xs = Self::axis(self.x, self.points);
        let ys = if planar {
            Self::axis(self.y, self.points)
        } else {
            vec![self.y.0]
        };
        let ts = Self::axis(self.t, self.points);
        let mut out = Vec::with_capacity(xs.len() * ys.len() * ts.len());
        for &t in &ts {
            for &x in &xs {
                for &y in &ys {
                    out.push((x, y, t));
                }
            }
        }
        out
    }
}

fn check_clearance(eq: &Equation, x: f64, y: f64, t: f64, h: f64) -> Result<()> {
    let margin = 10.0 * h;
    let violation = || {
        Error::DomainViolation(format!(
            "({x}, {y}, {t}) is closer than 10h = {margin} to the cone edge"
        ))
    };
    let reach = t - margin;
    if reach <= 0.0 {
        return Err(violation());
    }
    let (px, py) = eq.profiles();
    let far_x = px.phi(x - margin)?.abs().max(px.phi(x + margin)?.abs());
    let far_y = match py {
        Some(p) => p.phi(y - margin)?.abs().max(p.phi(y + margin)?.abs()),
        None => 0.0,
    };
    if far_x.hypot(far_y) >= reach {
        return Err(violation());
    }
    Ok(())
}

/// Largest absolute residual of `eq` for `u` over `grid` at step `h`.
pub fn pde_residual_grid<U>(u: &U, eq: &Equation, grid: &ResidualGrid, h: f64) -> Result<f64>
where
    U: Fn(f64, f64, f64) -> f64 + Sync,
{
    if !(h > 0.0) {
        return Err(Error::Domain(format!("step must be positive, got {h}")));
    }
    let pts = grid.lattice(eq.is_planar());
    pts.par_iter()
        .map(|&(x, y, t)| {
            if grid.inside_cone {
                check_clearance(eq, x, y, t, h)?;
            }
            Ok(pde_residual_at(u, eq, x, y, t, h)?.abs())
        })
        .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))
}

/// `residual(h) / residual(h / 2)`; close to 4 for a solution under
/// second-order differences.
pub fn residual_ratio<U>(u: &U, eq: &Equation, grid: &ResidualGrid, h: f64) -> Result<f64>
where
    U: Fn(f64, f64, f64) -> f64 + Sync,
{
    Ok(pde_residual_grid(u, eq, grid, h)? / pde_residual_grid(u, eq, grid, 0.5 * h)?)
}

/// Largest gap, over `grid`, between the drifted telegraph residual of
/// `p(x, t) = w(x', t')` and `(1 - B^2)` times the classical telegraph
/// residual of `w` at the Lorentz-transformed point `(x', t')`.
pub fn lorentz_residual_gap<W>(
    w: &W,
    lambda1: f64,
    lambda2: f64,
    profile: &VelocityProfile,
    grid: &ResidualGrid,
    h: f64,
) -> Result<f64>
where
    W: Fn(f64, f64) -> f64 + Sync,
{
    let b = lorentz_coefficient(lambda1, lambda2)?;
    let drift = Equation::TelegraphDrift {
        lambda1,
        lambda2,
        profile: profile.clone(),
        form: OperatorForm::Velocity,
    };
    let classical = Equation::Telegraph {
        lambda: 0.5 * (lambda1 + lambda2),
        profile: VelocityProfile::unit(),
        form: OperatorForm::Velocity,
    };
    let pulled = |x: f64, _: f64, t: f64| match lorentz_transform(lambda1, lambda2, profile, x, t) {
        Ok((xp, tp)) => w(xp, tp),
        Err(_) => f64::NAN,
    };
    let plain = |x: f64, _: f64, t: f64| w(x, t);
    grid.lattice(false)
        .par_iter()
        .map(|&(x, _, t)| {
            let rel = pde_residual_at(&pulled, &drift, x, 0.0, t, h)?;
            let (xp, tp) = lorentz_transform(lambda1, lambda2, profile, x, t)?;
            let tel = pde_residual_at(&plain, &classical, xp, 0.0, tp, h)?;
            Ok((rel - (1.0 - b * b) * tel).abs())
        })
        .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))
}
