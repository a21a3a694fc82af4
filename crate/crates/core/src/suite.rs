//! Named validation suites. Each returns one [`ValidationReport`] per check;
//! stochastic checks record their seed and sample size.

use std::f64::consts::TAU;
use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fracepd::{gl_relative_residual, make_params, normalized_law_1d, residual_terms, scan_grid};
use crate::harness::{
    chi2_2d, ks_statistic_with_left, ks_two_sample, lorentz_residual_gap, pde_residual_grid,
    quadrature_mass, BinGrid, Equation, OperatorForm, ResidualGrid, ValidationReport,
};
use crate::io::{render_svg, SvgCurve, PALETTE};
use crate::planar::{
    boundary_polyline, conditional_density, density_planar, figure1_supports, simulate_planar,
    LameSupport, PlanarMotionSpec,
};
use crate::quad::{integrate, integrate_2d, QuadSettings};
use crate::rates::RateFunction;
use crate::telegraph1d::{
    density_coth, density_epd, density_symmetric, density_tanh, simulate_asymmetric,
    simulate_symmetric, DensityModel1D, PathBatch,
};
use crate::velocity::VelocityProfile;

/// Suite names accepted by [`run_suite`], in the order `all` runs them.
pub const SUITES: [&str; 9] = [
    "classical",
    "cone",
    "tanh-coth",
    "riccati",
    "epd",
    "fracepd",
    "planar",
    "geometry",
    "asymmetric",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SuiteOptions {
    /// Paths per Monte Carlo check.
    pub paths: usize,
    pub seed: u64,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            paths: 1_000_000,
            seed: 20_240_601,
        }
    }
}

/// KS threshold at the default sample size.
pub const KS_THRESHOLD: f64 = 0.005;

/// [`KS_THRESHOLD`] rescaled as `1 / sqrt(n)` to other sample sizes, so that
/// every size is tested at the same significance.
pub fn ks_threshold(n: usize) -> f64 {
    KS_THRESHOLD * (1e6 / n as f64).sqrt()
}
pub const CHI2_P_THRESHOLD: f64 = 0.01;
const CDF_CELLS: usize = 1 << 14;

/// Runs a suite by name, or every suite for `"all"`.
pub fn run_suite(name: &str, opts: SuiteOptions) -> Result<Vec<ValidationReport>> {
    if name == "all" {
        let mut out = Vec::new();
        for s in SUITES {
            out.extend(run_suite(s, opts)?);
        }
        return Ok(out);
    }
    Ok(match name {
        "classical" => classical(opts),
        "cone" => cone(opts),
        "tanh-coth" => tanh_coth(opts),
        "riccati" => riccati(),
        "epd" => epd(),
        "fracepd" => fracepd(),
        "planar" => planar(opts),
        "geometry" => geometry(),
        "asymmetric" => asymmetric(opts),
        other => {
            return Err(Error::Parse(format!(
                "unknown suite `{other}`; expected all or one of {}",
                SUITES.join(", ")
            )))
        }
    })
}

/// Turns an error into a failed report under the same name.
fn check(name: &str, f: impl FnOnce() -> Result<ValidationReport>) -> ValidationReport {
    f().unwrap_or_else(|e| ValidationReport::failed(name, &e))
}

/// KS distance of the whole batch against the full law, atoms included.
fn ks_full(batch: &PathBatch, model: &DensityModel1D) -> Result<f64> {
    let tab = model.tabulate_cdf(CDF_CELLS)?;
    Ok(ks_statistic_with_left(&batch.positions, |x| tab.cdf(x), |x| tab.cdf_left(x)))
}

/// KS distance of the switched paths against the normalized continuous part.
fn ks_ac(batch: &PathBatch, model: &DensityModel1D) -> Result<f64> {
    let tab = model.tabulate_cdf(CDF_CELLS)?.conditional_ac();
    Ok(ks_statistic_with_left(&batch.switched_positions(), |x| tab.cdf(x), |x| tab.cdf_left(x)))
}

/// `|observed - p| / sigma` for a binomial fraction.
fn z_score(observed: f64, p: f64, n: usize) -> f64 {
    (observed - p).abs() / (p * (1.0 - p) / n as f64).sqrt()
}

fn classical(opts: SuiteOptions) -> Vec<ValidationReport> {
    let (lambda, t) = (1.0, 1.0);
    let unit = VelocityProfile::unit();
    let seed = opts.seed;
    let n = opts.paths;
    let start = Instant::now();
    let batch = RateFunction::constant(lambda).and_then(|r| simulate_symmetric(&unit, &r, t, n, seed));
    let elapsed = start.elapsed().as_secs_f64();
    let batch = match batch {
        Ok(b) => b,
        Err(e) => return vec![ValidationReport::failed("classical/simulate", &e)],
    };
    let meta = |r: ValidationReport| r.with_seed(seed).with_n(n as u64);
    vec![
        check("classical/ks-ac", || {
            let model = density_symmetric(&unit, lambda, t)?;
            Ok(meta(ValidationReport::at_most("classical/ks-ac", ks_ac(&batch, &model)?, ks_threshold(n))))
        }),
        check("classical/ks-full", || {
            let model = density_symmetric(&unit, lambda, t)?;
            Ok(meta(ValidationReport::at_most("classical/ks-full", ks_full(&batch, &model)?, ks_threshold(n))))
        }),
        meta(
            ValidationReport::at_most(
                "classical/atom-fraction-z",
                z_score(batch.zero_event_fraction(), (-lambda * t).exp(), n),
                3.0,
            )
            .with_details(format!("fraction {}", batch.zero_event_fraction())),
        ),
        meta(ValidationReport::at_most("classical/runtime-s", elapsed, 60.0)),
    ]
}

fn cone(opts: SuiteOptions) -> Vec<ValidationReport> {
    let (gamma_exp, t): (f64, f64) = (0.5, 2.0);
    let edge: f64 = ((1.0 - gamma_exp) * t).powf(1.0 / (1.0 - gamma_exp));
    vec![
        check("cone/endpoint", || {
            let p = VelocityProfile::power(gamma_exp, 1.0)?;
            let c = p.cone_endpoints(t)?;
            Ok(ValidationReport::at_most("cone/endpoint", (c.hi - edge).abs().max((c.lo + edge).abs()), 1e-12))
        }),
        check("cone/violations", || {
            let p = VelocityProfile::power(gamma_exp, 1.0)?;
            let r = RateFunction::constant(1.0)?;
            let b = simulate_symmetric(&p, &r, t, opts.paths, opts.seed)?;
            let bad = b.positions.iter().filter(|x| !(x.abs() <= edge + 1e-9)).count();
            Ok(ValidationReport::at_most("cone/violations", bad as f64, 0.0)
                .with_seed(opts.seed)
                .with_n(opts.paths as u64))
        }),
    ]
}

fn tanh_coth(opts: SuiteOptions) -> Vec<ValidationReport> {
    let (lambda, t) = (1.0, 1.5);
    let n = opts.paths;
    let seed = opts.seed.wrapping_add(1);
    let mut out = vec![check("tanh/zero-event-z", || {
        let r = RateFunction::tanh(lambda)?;
        let b = simulate_symmetric(&VelocityProfile::unit(), &r, t, n, seed)?;
        let p = 1.0 / (lambda * t).cosh();
        Ok(ValidationReport::at_most("tanh/zero-event-z", z_score(b.zero_event_fraction(), p, n), 3.0)
            .with_seed(seed)
            .with_n(n as u64)
            .with_details(format!("fraction {} vs {p}", b.zero_event_fraction())))
    })];
    let profiles = [
        ("unit", VelocityProfile::unit()),
        ("sqrt", VelocityProfile::power(0.5, 1.0).expect("valid profile")),
    ];
    for (pname, p) in &profiles {
        let name = format!("tanh/mass/{pname}");
        out.push(check(&name, || {
            let m = density_tanh(p, lambda, t)?;
            Ok(ValidationReport::within(&name, quadrature_mass(&m)?, 1.0, 1e-6))
        }));
        let name = format!("coth/mass/{pname}");
        out.push(check(&name, || {
            let m = density_coth(p, lambda, t)?;
            if !m.atoms().is_empty() {
                return Err(Error::Degenerate("coth law carries atoms".into()));
            }
            Ok(ValidationReport::within(&name, quadrature_mass(&m)?, 1.0, 1e-6))
        }));
    }
    for (kind, rate, model) in [
        ("tanh", RateFunction::tanh(lambda), density_tanh(&profiles[1].1, lambda, t)),
        ("coth", RateFunction::coth(lambda), density_coth(&profiles[1].1, lambda, t)),
    ] {
        let name = format!("{kind}/ks-full");
        let seed = seed.wrapping_add(if kind == "tanh" { 10 } else { 20 });
        out.push(check(&name, || {
            let b = simulate_symmetric(&profiles[1].1, &rate?, t, n, seed)?;
            Ok(ValidationReport::at_most(&name, ks_full(&b, &model?)?, ks_threshold(n))
                .with_seed(seed)
                .with_n(n as u64))
        }));
    }
    out
}

fn riccati() -> Vec<ValidationReport> {
    let lambda = 1.0;
    let ts: Vec<f64> = (0..=990).map(|k| 0.1 + 0.01 * f64::from(k)).collect();
    let mut out = Vec::new();
    for (kind, rate) in [("tanh", RateFunction::tanh(lambda)), ("coth", RateFunction::coth(lambda))] {
        let name = format!("riccati/{kind}");
        out.push(check(&name, || {
            let rate = rate.clone()?;
            let r0 = rate.riccati_residual(ts[0])?;
            let mut worst: f64 = 0.0;
            for &t in &ts {
                worst = worst.max((rate.riccati_residual(t)? - r0).abs());
            }
            Ok(ValidationReport::at_most(&name, worst, 1e-12).with_details(format!("constant {r0}")))
        }));
        // independent of the closed-form derivative: central differences of the rate itself
        let name = format!("riccati/{kind}/finite-difference");
        out.push(check(&name, || {
            let rate = rate?;
            let mut worst: f64 = 0.0;
            for &t in ts.iter().step_by(10) {
                let h = 1e-3 * t;
                let l = rate.rate_at(t)?;
                let f = |k: f64| rate.rate_at(t + k * h);
                let dl = (f(-2.0)? - 8.0 * f(-1.0)? + 8.0 * f(1.0)? - f(2.0)?) / (12.0 * h);
                worst = worst.max((dl + l * l - lambda * lambda).abs());
            }
            Ok(ValidationReport::at_most(&name, worst, 1e-6))
        }));
    }
    out
}

fn epd() -> Vec<ValidationReport> {
    let unit = VelocityProfile::unit();
    let mut out = vec![check("epd/alpha1-uniform", || {
        let t = 1.7;
        let m = density_epd(&unit, 1.0, t)?;
        let worst = m
            .sample_grid(1001)
            .iter()
            .map(|&(_, p)| (p * 2.0 * t - 1.0).abs())
            .fold(0.0, f64::max);
        if !m.atoms().is_empty() {
            return Err(Error::Degenerate("uniform law carries atoms".into()));
        }
        Ok(ValidationReport::at_most("epd/alpha1-uniform", worst, 4.0 * f64::EPSILON))
    })];
    let sqrt = VelocityProfile::power(0.5, 1.0).expect("valid profile");
    for alpha in [0.5, 2.5] {
        for (pname, p) in [("unit", &unit), ("sqrt", &sqrt)] {
            let name = format!("epd/mass/alpha={alpha}/{pname}");
            out.push(check(&name, || {
                Ok(ValidationReport::within(&name, quadrature_mass(&density_epd(p, alpha, 1.3)?)?, 1.0, 1e-6))
            }));
        }
    }
    let cases = [
        (0.5, &unit, OperatorForm::Velocity, (-0.4, 0.4), (1.0, 1.6)),
        (2.0, &unit, OperatorForm::Velocity, (-0.4, 0.4), (1.0, 1.6)),
        (2.5, &unit, OperatorForm::Velocity, (-0.4, 0.4), (1.0, 1.6)),
        (2.5, &sqrt, OperatorForm::Divergence, (0.05, 0.25), (1.5, 2.0)),
    ];
    for (alpha, p, form, xr, tr) in cases {
        let name = format!("epd/residual-ratio/alpha={alpha}/{p}");
        out.push(check(&name, || {
            let eq = Equation::Epd {
                alpha,
                profile: p.clone(),
                form,
            };
            let u = |x: f64, _: f64, t: f64| density_epd(p, alpha, t).map_or(f64::NAN, |m| m.ac_density(x));
            let grid = ResidualGrid::new(xr, tr, 6);
            let h = 1e-2;
            let r1 = pde_residual_grid(&u, &eq, &grid, h)?;
            let r2 = pde_residual_grid(&u, &eq, &grid, 0.5 * h)?;
            Ok(ValidationReport::within(&name, r1 / r2, 4.0, 0.8).with_details(format!("residuals {r1} {r2}")))
        }));
    }
    out
}

fn fracepd() -> Vec<ValidationReport> {
    let start = Instant::now();
    let mut out = Vec::new();
    let name = "fracepd/residual-coefficients";
    out.push(check(name, || {
        let mut worst: f64 = 0.0;
        let mut count = 0;
        for d in 1..=3 {
            for n in 1..=2 {
                for p in scan_grid(d, n, 0.05)? {
                    worst = worst.max(residual_terms(&make_params(p.nu, d, n)?)?.relative());
                    count += 1;
                }
            }
        }
        Ok(ValidationReport::at_most(name, worst, 1e-10).with_details(format!("{count} (nu, d, n) cases")))
    }));
    let name = "fracepd/grunwald-letnikov";
    out.push(check(name, || {
        let mut worst: f64 = 0.0;
        for nu in [0.05, 0.1, 0.15] {
            for d in 1..=3u32 {
                let p = make_params(nu, d, 1)?;
                let t: f64 = 1.0;
                let half = if p.c2 > 0.0 { 0.5 * t.powf(nu) / (p.c2 * f64::from(d)).sqrt() } else { 0.5 };
                let x = vec![half; d as usize];
                worst = worst.max(gl_relative_residual(&p, &x, t, 1e-5));
            }
        }
        Ok(ValidationReport::at_most(name, worst, 1e-3))
    }));
    let name = "fracepd/normalizer";
    out.push(check(name, || {
        // int_{-a}^{a} N (1 - y^2 / a^2) dy / t^nu with a = t^nu / sqrt(C2) equals 4 N / (3 sqrt(C2))
        let mut worst: f64 = 0.0;
        for p in scan_grid(1, 1, 0.05)?.into_iter().filter(|p| p.positive()) {
            let params = make_params(p.nu, 1, 1)?;
            let n = params.normalizer.ok_or(Error::NonPositiveC2(params.c2))?;
            worst = worst.max((4.0 * n / (3.0 * params.c2.sqrt()) - 1.0).abs());
        }
        Ok(ValidationReport::at_most(name, worst, 4.0 * f64::EPSILON))
    }));
    let name = "fracepd/law-mass";
    out.push(check(name, || {
        let sqrt = VelocityProfile::power(0.5, 1.0)?;
        let mut worst: f64 = 0.0;
        for p in scan_grid(1, 1, 0.05)?.into_iter().filter(|p| p.positive()) {
            for prof in [None, Some(&sqrt)] {
                let m = normalized_law_1d(p.nu, 1.3, prof)?;
                worst = worst.max((m.ac_mass(QuadSettings::with_abs_tol(1e-13))? - 1.0).abs());
            }
        }
        Ok(ValidationReport::at_most(name, worst, 1e-10))
    }));
    out.push(ValidationReport::at_most("fracepd/runtime-s", start.elapsed().as_secs_f64(), 10.0));
    out
}

/// Mass on the disc of radius `t` of a radially symmetric density (unit
/// profiles), integrated along a ray with `r = t sin(theta)` so that the
/// `1 / sqrt(t^2 - r^2)` edge singularity cancels.
fn polar_mass<F: Fn(f64) -> Result<f64>>(f: F, t: f64) -> Result<f64> {
    let err = std::cell::Cell::new(None);
    let m = integrate(
        |theta| {
            let (s, c) = theta.sin_cos();
            match f(t * s) {
                Ok(v) => v * t * s * t * c,
                Err(e) => {
                    err.set(Some(e));
                    0.0
                }
            }
        },
        0.0,
        std::f64::consts::FRAC_PI_2,
        QuadSettings::with_abs_tol(1e-11),
    )?;
    match err.take() {
        Some(e) => Err(e),
        None => Ok(TAU * m),
    }
}

/// Bins over the bounding box of the support, with the exact mass of every
/// bin whose corners all lie within `inner * t` in transformed radius.
pub fn planar_bins(spec: &PlanarMotionSpec, per_axis: usize, inner: f64) -> Result<BinGrid> {
    let xh = spec.profile_x.phi_inverse(spec.t)?;
    let yh = spec.profile_y.phi_inverse(spec.t)?;
    let edges = |h: f64| -> Vec<f64> {
        (0..=per_axis).map(|k| -h + 2.0 * h * k as f64 / per_axis as f64).collect()
    };
    let (x_edges, y_edges) = (edges(xh), edges(yh));
    let ux: Vec<f64> = x_edges.iter().map(|&x| spec.profile_x.phi(x)).collect::<Result<_>>()?;
    let vy: Vec<f64> = y_edges.iter().map(|&y| spec.profile_y.phi(y)).collect::<Result<_>>()?;
    let (l, t) = (spec.lambda, spec.t);
    // law of the transformed position, identical for every pair of profiles
    let q = |u: f64, v: f64| {
        let s = ((t - u.hypot(v)) * (t + u.hypot(v))).sqrt();
        l * (-l * (t - s)).exp() / (TAU * s)
    };
    let masses = (0..per_axis * per_axis)
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k / per_axis, k % per_axis);
            let (u0, u1, v0, v1) = (ux[i], ux[i + 1], vy[j], vy[j + 1]);
            let far = u0.abs().max(u1.abs()).hypot(v0.abs().max(v1.abs()));
            if far > inner * t {
                return Ok(None);
            }
            integrate_2d(q, u0, u1, |_| v0, |_| v1, QuadSettings::with_abs_tol(1e-13)).map(Some)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BinGrid {
        x_edges,
        y_edges,
        masses,
    })
}

fn planar(opts: SuiteOptions) -> Vec<ValidationReport> {
    let (lambda, t) = (1.0, 1.0);
    let unit = VelocityProfile::unit();
    let spec = PlanarMotionSpec::new(unit.clone(), unit.clone(), lambda, t).expect("valid spec");
    let mut out = vec![check("planar/ac-mass", || {
        let m = polar_mass(|r| density_planar(&spec, r, 0.0), t)?;
        Ok(ValidationReport::within("planar/ac-mass", m, 1.0 - (-lambda * t).exp(), 1e-4))
    })];
    for n in 1..=6u32 {
        let name = format!("planar/conditional-mass/n={n}");
        out.push(check(&name, || {
            Ok(ValidationReport::within(&name, polar_mass(|r| conditional_density(&spec, n, r, 0.0), t)?, 1.0, 1e-6))
        }));
    }
    out.push(check("planar/poisson-mixture", || {
        let lt = lambda * t;
        let mut worst: f64 = 0.0;
        for &(x, y) in &[(0.0, 0.0), (0.3, -0.2), (-0.5, 0.6), (0.9, 0.1), (0.05, -0.95)] {
            let target = density_planar(&spec, x, y)?;
            let (mut w, mut sum) = ((-lt).exp(), 0.0);
            for n in 1..=60u32 {
                w *= lt / f64::from(n);
                sum += w * conditional_density(&spec, n, x, y)?;
            }
            worst = worst.max((sum - target).abs());
        }
        Ok(ValidationReport::at_most("planar/poisson-mixture", worst, 1e-6))
    }));
    out.push(check("planar/n2-uniform", || {
        let u = 1.0 / (std::f64::consts::PI * t * t);
        let mut worst: f64 = 0.0;
        for &(x, y) in &[(0.0, 0.0), (0.3, -0.2), (-0.5, 0.6), (0.99, 0.0)] {
            worst = worst.max((conditional_density(&spec, 2, x, y)? - u).abs() / u);
        }
        Ok(ValidationReport::at_most("planar/n2-uniform", worst, 2.0 * f64::EPSILON))
    }));
    let ellipse = PlanarMotionSpec::new(
        VelocityProfile::constant(1.0).expect("valid profile"),
        VelocityProfile::constant(0.5).expect("valid profile"),
        lambda,
        t,
    )
    .expect("valid spec");
    let sqrt = VelocityProfile::power(0.5, 1.0).expect("valid profile");
    let power = PlanarMotionSpec::new(sqrt.clone(), sqrt, lambda, t).expect("valid spec");
    for (label, s, offset) in [("constant", &ellipse, 100u64), ("power", &power, 200)] {
        let name = format!("planar/chi2/{label}");
        let seed = opts.seed.wrapping_add(offset);
        out.push(check(&name, || {
            // 50 x 50 at the default size, fewer for small runs so bins keep counts
            let per_axis = ((opts.paths as f64 / 400.0).sqrt() as usize).clamp(4, 50);
            let bins = planar_bins(s, per_axis, 0.98)?;
            let batch = simulate_planar(s, opts.paths, seed)?;
            let r = chi2_2d(&batch.positions, &bins)?;
            Ok(ValidationReport::at_least(&name, r.p_value, CHI2_P_THRESHOLD)
                .with_seed(seed)
                .with_n(opts.paths as u64)
                .with_details(format!("chi2 {} on {} dof", r.statistic, r.dof)))
        }));
    }
    out
}

/// Largest relative deviation from the Lamé equation along a boundary polyline.
fn lame_error(shape: &LameSupport, m: usize) -> Result<f64> {
    let pts = boundary_polyline(&shape.motion(1.0)?, m)?;
    let t2 = shape.t * shape.t;
    Ok(pts.iter().map(|p| (shape.level(p.x, p.y) - t2).abs() / t2).fold(0.0, f64::max))
}

/// Figure with the four support curves of [`figure1_supports`].
pub fn figure1_svg(t: f64, points: usize) -> Result<String> {
    let mut curves = Vec::new();
    for (k, s) in figure1_supports(t)?.iter().enumerate() {
        let pts = boundary_polyline(&s.motion(1.0)?, points)?;
        let (n, _) = s.exponents();
        curves.push(SvgCurve::closed(
            format!("n={n:.4}"),
            pts.iter().map(|p| (p.x, p.y)).collect(),
            PALETTE[k % PALETTE.len()],
        ));
    }
    Ok(render_svg(&curves, 600))
}

fn geometry() -> Vec<ValidationReport> {
    let t = 1.0;
    let mut out = Vec::new();
    for (label, shape) in [
        ("astroid", LameSupport::astroid(t)),
        ("ellipse", LameSupport::new(0.0, 0.0, 1.0, 2.0, t)),
        ("circle", LameSupport::new(0.0, 0.0, 1.5, 1.5, t)),
    ] {
        let name = format!("geometry/lame/{label}");
        out.push(check(&name, || {
            Ok(ValidationReport::at_most(&name, lame_error(&shape?, 720)?, 1e-9))
        }));
    }
    out.push(check("geometry/figure1-curves", || {
        let mut worst: f64 = 0.0;
        for s in figure1_supports(t)? {
            worst = worst.max(lame_error(&s, 720)?);
        }
        Ok(ValidationReport::at_most("geometry/figure1-curves", worst, 1e-9))
    }));
    out.push(check("geometry/figure1-svg", || {
        let svg = figure1_svg(t, 720)?;
        let paths = svg.matches("<path ").count();
        let labels = ["n=0.6667", "n=1.5000", "n=2.0000", "n=3.0000"];
        let missing = labels.iter().filter(|l| !svg.contains(&format!("data-label=\"{l}\""))).count();
        Ok(ValidationReport::at_most("geometry/figure1-svg", (paths as f64 - 4.0).abs() + missing as f64, 0.0)
            .with_details(format!("{paths} curves")))
    }));
    out
}

fn asymmetric(opts: SuiteOptions) -> Vec<ValidationReport> {
    let (lambda, t) = (1.0, 1.0);
    let n = opts.paths;
    let sqrt = VelocityProfile::power(0.5, 1.0).expect("valid profile");
    let seed = opts.seed.wrapping_add(300);
    let mut out = Vec::new();
    let name = "asymmetric/equal-rates/ks";
    out.push(check(name, || {
        let b = simulate_asymmetric(&sqrt, lambda, lambda, t, n, seed)?;
        let model = density_symmetric(&sqrt, lambda, t)?;
        Ok(ValidationReport::at_most(name, ks_full(&b, &model)?, ks_threshold(n))
            .with_seed(seed)
            .with_n(n as u64))
    }));
    let name = "asymmetric/equal-rates/two-sample-ks";
    out.push(check(name, || {
        let a = simulate_asymmetric(&sqrt, lambda, lambda, t, n, seed)?;
        let s = simulate_symmetric(&sqrt, &RateFunction::constant(lambda)?, t, n, seed.wrapping_add(1))?;
        Ok(ValidationReport::at_most(name, ks_two_sample(&a.positions, &s.positions), ks_threshold(n))
            .with_seed(seed)
            .with_n(n as u64))
    }));
    let name = "asymmetric/lorentz-ratio";
    out.push(check(name, || {
        let w = |x: f64, t: f64| (-x * x - t * t).exp();
        let grid = ResidualGrid::new((0.2, 0.8), (0.3, 0.9), 5).anywhere();
        let g1 = lorentz_residual_gap(&w, 3.0, 1.0, &sqrt, &grid, 2e-3)?;
        let g2 = lorentz_residual_gap(&w, 3.0, 1.0, &sqrt, &grid, 1e-3)?;
        Ok(ValidationReport::within(name, g1 / g2, 4.0, 0.8).with_details(format!("gaps {g1} {g2}")))
    }));
    out
}
