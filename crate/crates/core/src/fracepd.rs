//! Time-fractional Euler–Poisson–Darboux equation
//! `(D^{2nu} + C1 t^{-nu} D^nu) u = L u` with `L = sum_j d^{2n}/dx_j^{2n}`,
//! and its parabolic solutions `u = t^{-nu} [1 - C2 S(x) / t^{2nu}]`,
//! `S(x) = sum_j x_j^{2n}`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::special::{gamma, grunwald_letnikov, power_rule_ratio, recip_gamma};
use crate::telegraph1d::DensityModel1D;
use crate::velocity::VelocityProfile;

/// Values of `nu` excluded outright.
pub const SINGULAR_NU: [f64; 4] = [0.5, 1.0 / 3.0, 0.25, 0.2];

/// Further `nu` in (0, 1) where some `Gamma(1 - k nu)`, `k <= 5`, has a pole.
pub const EXTENDED_SINGULAR_NU: [f64; 5] = [0.4, 0.6, 2.0 / 3.0, 0.75, 0.8];

const NU_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FracEPDParams {
    pub nu: f64,
    pub d: u32,
    pub n: u32,
    pub c1: f64,
    pub c2: f64,
    /// `N = (3/4) sqrt(C2)`, only for `d = n = 1` and `C2 > 0`.
    pub normalizer: Option<f64>,
}

fn factorial(k: u32) -> f64 {
    (1..=k).map(f64::from).product()
}

fn check_nu(nu: f64) -> Result<()> {
    if !(nu > 0.0 && nu < 1.0) {
        return Err(Error::Domain(format!("nu must lie in (0, 1), got {nu}")));
    }
    if SINGULAR_NU.iter().any(|&s| (nu - s).abs() < NU_TOL) {
        return Err(Error::SingularNu(nu));
    }
    for k in 1..=5 {
        let arg = 1.0 - f64::from(k) * nu;
        if arg <= 0.0 && (arg - arg.round()).abs() < NU_TOL {
            return Err(Error::ExtendedSingularity { nu, arg: arg.round() });
        }
    }
    Ok(())
}

fn ratio(num: f64, den: f64) -> Result<f64> {
    Ok(gamma(num)? * recip_gamma(den)?)
}

/// Coefficients of the equation and of its parabolic solution.
pub fn make_params(nu: f64, d: u32, n: u32) -> Result<FracEPDParams> {
    check_nu(nu)?;
    if d == 0 || n == 0 {
        return Err(Error::Domain(format!("d and n must be positive, got d={d}, n={n}")));
    }
    let c1 = -ratio(1.0 - 4.0 * nu, 1.0 - 5.0 * nu)?;
    let a = ratio(1.0 - nu, 1.0 - 3.0 * nu)?;
    let b = ratio(1.0 - nu, 1.0 - 2.0 * nu)?;
    let c2 = -(a + c1 * b) / (factorial(2 * n) * f64::from(d));
    let normalizer = (d == 1 && n == 1 && c2 > 0.0).then(|| 0.75 * c2.sqrt());
    Ok(FracEPDParams {
        nu,
        d,
        n,
        c1,
        c2,
        normalizer,
    })
}

fn spatial_sum(params: &FracEPDParams, x: &[f64]) -> f64 {
    assert_eq!(x.len(), params.d as usize, "point has wrong dimension");
    x.iter().map(|v| v.powi(2 * params.n as i32)).sum()
}

/// The two-term solution without clamping.
pub fn eval_unclamped(params: &FracEPDParams, x: &[f64], t: f64) -> f64 {
    let s = spatial_sum(params, x);
    t.powf(-params.nu) * (1.0 - params.c2 * s * t.powf(-2.0 * params.nu))
}

/// The solution, set to zero outside its support when `C2 > 0`.
///
/// # Panics
/// If `x.len()` differs from `params.d`.
pub fn eval_solution(params: &FracEPDParams, x: &[f64], t: f64) -> f64 {
    let u = eval_unclamped(params, x, t);
    if params.c2 > 0.0 {
        u.max(0.0)
    } else {
        u
    }
}

/// Coefficients of the equation's residual on the power basis, together with
/// the size of the largest term that enters each.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualTerms {
    /// Coefficient of `t^{-3nu}`.
    pub coeff_3nu: f64,
    /// Coefficient of `S(x) t^{-5nu}`.
    pub coeff_5nu: f64,
    pub scale_3nu: f64,
    pub scale_5nu: f64,
}

impl ResidualTerms {
    /// Largest of the two coefficients relative to its own scale.
    pub fn relative(&self) -> f64 {
        (self.coeff_3nu.abs() / self.scale_3nu).max(self.coeff_5nu.abs() / self.scale_5nu)
    }
}

/// Applies the equation to `u = t^{-nu} - C2 S(x) t^{-3nu}` with the power
/// rule `D^a t^b = Gamma(b+1)/Gamma(b+1-a) t^{b-a}` and collects powers of
/// `t`, using `params.c1` and `params.c2` as given.
pub fn residual_terms(params: &FracEPDParams) -> Result<ResidualTerms> {
    let nu = params.nu;
    check_nu(nu)?;
    // t^{-3nu}: D^{2nu} t^{-nu} + C1 t^{-nu} D^nu t^{-nu} - L(-C2 S t^{-3nu})
    let lhs_a = power_rule_ratio(2.0 * nu, -nu)?;
    let lhs_b = params.c1 * power_rule_ratio(nu, -nu)?;
    let rhs = -params.c2 * factorial(2 * params.n) * f64::from(params.d);
    // S t^{-5nu}: -C2 [D^{2nu} t^{-3nu} + C1 t^{-nu} D^nu t^{-3nu}]
    let five_a = -params.c2 * power_rule_ratio(2.0 * nu, -3.0 * nu)?;
    let five_b = -params.c2 * params.c1 * power_rule_ratio(nu, -3.0 * nu)?;
    Ok(ResidualTerms {
        coeff_3nu: lhs_a + lhs_b - rhs,
        coeff_5nu: five_a + five_b,
        scale_3nu: lhs_a.abs().max(lhs_b.abs()).max(rhs.abs()),
        scale_5nu: five_a.abs().max(five_b.abs()).max(f64::MIN_POSITIVE),
    })
}

/// `(coefficient of t^{-3nu}, coefficient of S t^{-5nu})`; both vanish for a
/// solution.
pub fn residual_coefficients(params: &FracEPDParams) -> Result<(f64, f64)> {
    let r = residual_terms(params)?;
    Ok((r.coeff_3nu, r.coeff_5nu))
}

/// Residual of the equation at `(x, t)` with the time derivatives taken by
/// Grünwald–Letnikov at step `h` on the unclamped solution, divided by the
/// largest term. Independent of the power-rule algebra.
pub fn gl_relative_residual(params: &FracEPDParams, x: &[f64], t: f64, h: f64) -> f64 {
    let s = spatial_sum(params, x);
    let u = |tau: f64| tau.powf(-params.nu) - params.c2 * s * tau.powf(-3.0 * params.nu);
    let d2 = grunwald_letnikov(u, 2.0 * params.nu, t, h);
    let d1 = params.c1 * t.powf(-params.nu) * grunwald_letnikov(u, params.nu, t, h);
    let spatial = -params.c2 * factorial(2 * params.n) * f64::from(params.d) * t.powf(-3.0 * params.nu);
    (d2 + d1 - spatial).abs() / d2.abs().max(d1.abs()).max(spatial.abs())
}

/// One row of a `nu` scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanPoint {
    pub nu: f64,
    pub c1: f64,
    pub c2: f64,
}

impl ScanPoint {
    pub fn positive(&self) -> bool {
        self.c2 > 0.0
    }
}

/// All grid points `k * step` in (0, 1) farther than `step / 2` from every
/// excluded value, with their coefficients, in increasing order.
pub fn scan_grid(d: u32, n: u32, step: f64) -> Result<Vec<ScanPoint>> {
    if !(step > 0.0 && step <= 0.1) {
        return Err(Error::Domain(format!("grid step must lie in (0, 0.1], got {step}")));
    }
    let count = ((1.0 / step).ceil() as u64).saturating_sub(1);
    let radius = 0.5 * step * (1.0 - 1e-9);
    // k / m is exact at the grid's round values when step = 1 / m
    let m = (1.0 / step).round();
    let per_unit = ((1.0 / step - m).abs() < 1e-9 * m).then_some(m);
    let points: Vec<Option<ScanPoint>> = (1..=count)
        .into_par_iter()
        .map(|k| {
            let nu = match per_unit {
                Some(m) => k as f64 / m,
                None => k as f64 * step,
            };
            if nu >= 1.0
                || SINGULAR_NU
                    .iter()
                    .chain(&EXTENDED_SINGULAR_NU)
                    .any(|&s| (nu - s).abs() < radius)
            {
                return Ok(None);
            }
            let p = make_params(nu, d, n)?;
            Ok(Some(ScanPoint { nu, c1: p.c1, c2: p.c2 }))
        })
        .collect::<Result<_>>()?;
    Ok(points.into_iter().flatten().collect())
}

/// The grid points of [`scan_grid`] with `C2 > 0`.
pub fn scan_nu(d: u32, n: u32, step: f64) -> Result<Vec<(f64, f64)>> {
    Ok(scan_grid(d, n, step)?
        .into_iter()
        .filter(ScanPoint::positive)
        .map(|p| (p.nu, p.c2))
        .collect())
}

/// The one-dimensional solution normalized to a probability density,
/// `(N / t^nu) [1 - C2 y^2 / t^{2nu}]` in `y = Phi(x)` with support
/// `|y| < t^nu / sqrt(C2)`; in `x` it carries the factor `1 / c(x)`.
pub fn normalized_law_1d(nu: f64, t: f64, profile: Option<&VelocityProfile>) -> Result<DensityModel1D> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("time must be positive, got {t}")));
    }
    let params = make_params(nu, 1, 1)?;
    let norm = params.normalizer.ok_or(Error::NonPositiveC2(params.c2))?;
    let c2 = params.c2;
    let tn = t.powf(nu);
    let reach = tn / c2.sqrt();
    let unit = VelocityProfile::unit();
    let profile = profile.unwrap_or(&unit);
    DensityModel1D::from_transformed(profile, reach, t, &[], move |y| {
        (norm / tn) * (1.0 - c2 * y * y / (tn * tn))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::QuadSettings;

    fn grid() -> Vec<f64> {
        (1..20)
            .map(|k| f64::from(k) * 0.05)
            .filter(|&nu| check_nu(nu).is_ok())
            .collect()
    }

    #[test]
    fn exclusions() {
        for nu in SINGULAR_NU {
            assert_eq!(make_params(nu, 1, 1), Err(Error::SingularNu(nu)));
        }
        for nu in EXTENDED_SINGULAR_NU {
            assert!(matches!(make_params(nu, 1, 1), Err(Error::ExtendedSingularity { .. })));
        }
        assert!(matches!(
            make_params(0.75, 1, 1),
            Err(Error::ExtendedSingularity { arg, .. }) if arg == -2.0
        ));
        assert!(make_params(0.0, 1, 1).is_err());
        assert!(make_params(1.0, 1, 1).is_err());
        assert!(make_params(0.3, 0, 1).is_err());
    }

    #[test]
    fn scaling_in_d_and_n() {
        for nu in grid() {
            let base = make_params(nu, 1, 1).unwrap();
            for d in 1..=3 {
                let p = make_params(nu, d, 1).unwrap();
                assert!((p.c2 * f64::from(d) - base.c2).abs() <= 1e-14 * base.c2.abs());
                assert_eq!(p.c1, base.c1);
            }
            for n in 1..=3 {
                let p = make_params(nu, 1, n).unwrap();
                let scaled = p.c2 * factorial(2 * n);
                assert!((scaled - 2.0 * base.c2).abs() <= 1e-14 * base.c2.abs());
            }
        }
    }

    #[test]
    fn closed_form_at_n1() {
        // C2 = -(1/(2d)) [G(1-nu)/G(1-3nu) - G(1-4nu)/G(1-5nu) G(1-nu)/G(1-2nu)]
        for nu in grid() {
            let g = |x: f64| gamma(x).unwrap();
            let d = 2.0;
            let expected =
                -(g(1.0 - nu) / g(1.0 - 3.0 * nu) - g(1.0 - 4.0 * nu) / g(1.0 - 5.0 * nu) * g(1.0 - nu) / g(1.0 - 2.0 * nu))
                    / (2.0 * d);
            let p = make_params(nu, 2, 1).unwrap();
            assert!((p.c2 - expected).abs() <= 1e-13 * expected.abs(), "nu {nu}");
        }
    }

    #[test]
    fn residuals_vanish_on_grid() {
        for nu in grid() {
            for d in 1..=3 {
                for n in 1..=2 {
                    let p = make_params(nu, d, n).unwrap();
                    let r = residual_terms(&p).unwrap();
                    assert!(r.relative() < 1e-10, "nu {nu} d {d} n {n}: {r:?}");
                }
            }
        }
    }

    #[test]
    fn perturbations_are_detected() {
        let p = make_params(0.3, 1, 1).unwrap();
        let bad_c2 = FracEPDParams { c2: p.c2 * 1.01, ..p };
        let r = residual_terms(&bad_c2).unwrap();
        assert!(r.coeff_3nu.abs() / r.scale_3nu > 1e-4);
        let bad_c1 = FracEPDParams { c1: p.c1 * 1.01, ..p };
        let r = residual_terms(&bad_c1).unwrap();
        assert!(r.coeff_5nu.abs() / r.scale_5nu > 1e-4);
    }

    #[test]
    fn solution_values() {
        for nu in [0.1, 0.3, 0.7] {
            let p = make_params(nu, 1, 1).unwrap();
            let t: f64 = 1.7;
            assert_eq!(eval_solution(&p, &[0.0], t), t.powf(-nu));
            if p.c2 > 0.0 {
                let edge = t.powf(nu) / p.c2.sqrt();
                assert!(eval_solution(&p, &[edge], t).abs() < 1e-14);
                assert_eq!(eval_solution(&p, &[2.0 * edge], t), 0.0);
            } else {
                let a = eval_solution(&p, &[10.0], t);
                let b = eval_solution(&p, &[20.0], t);
                assert!(a > 0.0 && b > a);
            }
        }
    }

    #[test]
    fn grunwald_letnikov_agrees() {
        for nu in [0.05, 0.1, 0.15] {
            let p = make_params(nu, 1, 1).unwrap();
            let t: f64 = 1.0;
            let x = if p.c2 > 0.0 { 0.5 * t.powf(nu) / p.c2.sqrt() } else { 0.5 };
            let r = gl_relative_residual(&p, &[x], t, 1e-5);
            assert!(r < 1e-3, "nu {nu}: {r}");
        }
    }

    #[test]
    fn scan_respects_exclusions() {
        let step = 0.01;
        let all = scan_grid(1, 1, step).unwrap();
        assert!(!all.is_empty());
        for w in all.windows(2) {
            assert!(w[0].nu < w[1].nu);
        }
        for p in &all {
            assert!(p.nu > 0.0 && p.nu < 1.0);
            for s in SINGULAR_NU.iter().chain(&EXTENDED_SINGULAR_NU) {
                assert!((p.nu - s).abs() >= 0.5 * step * (1.0 - 1e-6));
            }
        }
        let pos = scan_nu(1, 1, step).unwrap();
        assert!(pos.iter().all(|&(_, c2)| c2 > 0.0));
        for d in 2..=3 {
            let other: Vec<f64> = scan_nu(d, 1, step).unwrap().iter().map(|p| p.0).collect();
            assert_eq!(other, pos.iter().map(|p| p.0).collect::<Vec<_>>());
        }
        assert!(scan_grid(1, 1, 0.2).is_err());
    }

    #[test]
    fn normalized_law() {
        let nu = scan_nu(1, 1, 0.01).unwrap()[0].0;
        let t = 1.3;
        let m = normalized_law_1d(nu, t, None).unwrap();
        let p = make_params(nu, 1, 1).unwrap();
        let reach = t.powf(nu) / p.c2.sqrt();
        assert!((m.support().1 - reach).abs() < 1e-14 * reach);
        assert!((p.normalizer.unwrap() * 4.0 / (3.0 * p.c2.sqrt()) - 1.0).abs() < 1e-15);
        let mass = m.ac_mass(QuadSettings::with_abs_tol(1e-13)).unwrap();
        assert!((mass - 1.0).abs() < 1e-10);
        let prof = VelocityProfile::power(0.5, 1.0).unwrap();
        let m = normalized_law_1d(nu, t, Some(&prof)).unwrap();
        let edge = prof.phi_inverse(reach).unwrap();
        assert!((m.support().1 - edge).abs() < 1e-14 * edge);
        assert!(m.sample_grid(1000).iter().all(|&(_, v)| v >= 0.0));
        let neg = scan_grid(1, 1, 0.01).unwrap().into_iter().find(|p| !p.positive()).unwrap();
        assert!(matches!(normalized_law_1d(neg.nu, t, None), Err(Error::NonPositiveC2(_))));
    }
}
