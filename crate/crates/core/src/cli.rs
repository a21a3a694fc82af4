//! The `telegraph` command line: argument parsing and the subcommands.
//! Every option may also come from a JSON file given with `--config`;
//! options on the command line take precedence.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::config::{positive, OutputFormat, RunConfig};
use crate::error::{Error, Result};
use crate::fracepd::{normalized_law_1d, scan_grid};
use crate::harness::ValidationReport;
use crate::io::{
    render_svg, write_boundary_csv, write_density_csv, write_path_batch_csv,
    write_planar_batch_csv, write_planar_density_csv, write_scan_csv, SvgCurve, PALETTE,
};
use crate::planar::{boundary_polyline, sample_path, simulate_planar, PlanarMotionSpec};
use crate::rates::{RateFunction, RateKind};
use crate::suite::{figure1_svg, run_suite, SuiteOptions};
use crate::telegraph1d::{
    density_coth, density_epd, density_symmetric, density_tanh, simulate_asymmetric,
    simulate_symmetric, simulate_symmetric_rk4, DensityModel1D, PathBatch, Rk4Settings,
};
use crate::velocity::VelocityProfile;

#[derive(Debug, Parser)]
#[command(name = "telegraph", version, about = "Random motions with space-varying speed")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Terminal positions of 1-d paths (symmetric, asymmetric or time-varying rate).
    #[command(name = "simulate-1d")]
    Simulate1d(Flags),
    /// Terminal positions of planar random flights.
    #[command(name = "simulate-planar")]
    SimulatePlanar(Flags),
    /// A law sampled on a grid.
    Density(Flags),
    /// Boundary of the planar support, as CSV or SVG.
    Support(Flags),
    /// Run a named validation suite and print JSON reports.
    Verify(Flags),
    /// Coefficients of the fractional equation over a grid of nu.
    #[command(name = "scan-nu")]
    ScanNu(Flags),
}

/// Options shared by every subcommand; each uses the ones it needs.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// JSON file with any of the options below.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// `unit`, `constant:c=..`, `power:gamma=..,scale=..` or `custom:name=..`.
    #[arg(long)]
    pub profile: Option<String>,
    /// Profile of the second coordinate for planar runs.
    #[arg(long)]
    pub profile_y: Option<String>,
    /// `constant:lambda=..`, `tanh:lambda=..`, `coth:lambda=..`, `epd:alpha=..`,
    /// or a bare kind taking `--lambda` / `--alpha`.
    #[arg(long)]
    pub rate: Option<String>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub lambda1: Option<f64>,
    #[arg(long)]
    pub lambda2: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub nu: Option<f64>,
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long)]
    pub paths: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Grid step (scan-nu).
    #[arg(long)]
    pub grid: Option<f64>,
    /// Number of grid or boundary points.
    #[arg(long)]
    pub points: Option<usize>,
    /// symmetric, tanh, coth, epd, fracepd or planar (density).
    #[arg(long)]
    pub law: Option<String>,
    /// Validation suite name, or `all`.
    #[arg(long)]
    pub suite: Option<String>,
    /// Spatial dimension (scan-nu).
    #[arg(long)]
    pub dim: Option<u32>,
    /// Order of the spatial operator (scan-nu).
    #[arg(long)]
    pub order: Option<u32>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// csv, json or svg.
    #[arg(long)]
    pub format: Option<OutputFormat>,
    /// Draw the four reference support curves (support).
    #[arg(long)]
    pub figure1: bool,
    /// Integrate each leg with adaptive RK4 instead of the transform (simulate-1d).
    #[arg(long)]
    pub rk4: bool,
}

impl Flags {
    fn as_config(&self) -> RunConfig {
        RunConfig {
            profile: self.profile.clone(),
            profile_y: self.profile_y.clone(),
            rate: self.rate.clone(),
            lambda: self.lambda,
            lambda1: self.lambda1,
            lambda2: self.lambda2,
            alpha: self.alpha,
            nu: self.nu,
            t: self.t,
            paths: self.paths,
            seed: self.seed,
            grid: self.grid,
            points: self.points,
            law: self.law.clone(),
            suite: self.suite.clone(),
            dim: self.dim,
            order: self.order,
            out: self.out.clone(),
            format: self.format,
            figure1: self.figure1.then_some(true),
            rk4: self.rk4.then_some(true),
        }
    }

    /// Config file merged with the flags.
    pub fn resolve(&self) -> Result<RunConfig> {
        let flags = self.as_config();
        match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
                Ok(RunConfig::from_json(&text)?.overlay(flags))
            }
            None => Ok(flags),
        }
    }
}

/// How a run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    ValidationFailed,
}

/// Exit status for an error: 2 for bad input, 1 otherwise.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Parse(_) | Error::Domain(_) | Error::Divergence(_) | Error::SingularNu(_)
        | Error::ExtendedSingularity { .. } | Error::NonPositiveC2(_) => 2,
        _ => 1,
    }
}

fn parse_profile(s: Option<&str>) -> Result<VelocityProfile> {
    match s {
        None | Some("unit") => Ok(VelocityProfile::unit()),
        Some(s) => s.parse(),
    }
}

fn parse_rate(cfg: &RunConfig) -> Result<Option<RateFunction>> {
    let Some(spec) = cfg.rate.as_deref() else {
        return cfg.lambda.map(RateFunction::constant).transpose();
    };
    let bare = spec.strip_prefix("rate:").unwrap_or(spec);
    if bare.contains(':') {
        return spec.parse().map(Some);
    }
    let need = |v: Option<f64>, name: &str| {
        v.ok_or_else(|| Error::Parse(format!("rate `{bare}` needs --{name}")))
    };
    Ok(Some(match bare {
        "constant" => RateFunction::constant(need(cfg.lambda, "lambda")?)?,
        "tanh" => RateFunction::tanh(need(cfg.lambda, "lambda")?)?,
        "coth" => RateFunction::coth(need(cfg.lambda, "lambda")?)?,
        "epd" => RateFunction::epd(need(cfg.alpha, "alpha")?)?,
        other => return Err(Error::Parse(format!("unknown rate kind `{other}`"))),
    }))
}

fn paths(cfg: &RunConfig) -> Result<usize> {
    let n = cfg.paths.ok_or_else(|| Error::Parse("--paths is required".into()))?;
    if n == 0 {
        return Err(Error::Parse("--paths must be positive".into()));
    }
    usize::try_from(n).map_err(|_| Error::Parse(format!("--paths {n} is too large")))
}

fn open_output(out: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Error::Parse(format!("cannot create {}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn io_err(e: io::Error) -> Error {
    Error::Degenerate(format!("write failed: {e}"))
}

fn emit<F>(cfg: &RunConfig, f: F) -> Result<()>
where
    F: FnOnce(&mut dyn Write) -> io::Result<()>,
{
    let mut w = open_output(cfg.out.as_deref())?;
    f(&mut *w).map_err(io_err)?;
    w.flush().map_err(io_err)
}

fn format_of(cfg: &RunConfig, allowed: &[OutputFormat]) -> Result<OutputFormat> {
    let f = cfg.format.unwrap_or(allowed[0]);
    if allowed.contains(&f) {
        Ok(f)
    } else {
        Err(Error::Parse(format!("format {f:?} is not available here")))
    }
}

/// Runs one subcommand.
pub fn run(command: &Command) -> Result<Outcome> {
    match command {
        Command::Simulate1d(f) => simulate_1d(&f.resolve()?),
        Command::SimulatePlanar(f) => simulate_2d(&f.resolve()?),
        Command::Density(f) => density(&f.resolve()?),
        Command::Support(f) => support(&f.resolve()?),
        Command::Verify(f) => verify(&f.resolve()?),
        Command::ScanNu(f) => scan(&f.resolve()?),
    }
}

fn batch_json(b: &PathBatch) -> serde_json::Value {
    let rows: Vec<_> = (0..b.n_paths)
        .map(|i| json!({"path_id": i, "x": b.positions[i], "n_events": b.event_counts[i], "direction": b.directions[i]}))
        .collect();
    json!({"seed": b.seed, "t": b.t, "paths": rows})
}

fn simulate_1d(cfg: &RunConfig) -> Result<Outcome> {
    let seed = cfg.require_seed()?;
    let t = cfg.require_t()?;
    let n = paths(cfg)?;
    let profile = parse_profile(cfg.profile.as_deref())?;
    let format = format_of(cfg, &[OutputFormat::Csv, OutputFormat::Json])?;
    let batch = match (cfg.lambda1, cfg.lambda2) {
        (Some(l1), Some(l2)) => {
            if cfg.rate.is_some() || cfg.rk4.unwrap_or(false) {
                return Err(Error::Parse("--lambda1/--lambda2 exclude --rate and --rk4".into()));
            }
            simulate_asymmetric(&profile, positive("lambda1", l1)?, positive("lambda2", l2)?, t, n, seed)?
        }
        (None, None) => {
            let rate = parse_rate(cfg)?
                .ok_or_else(|| Error::Parse("give --rate, --lambda or --lambda1/--lambda2".into()))?;
            if cfg.rk4.unwrap_or(false) {
                simulate_symmetric_rk4(&profile, &rate, t, n, seed, Rk4Settings::default())?
            } else {
                simulate_symmetric(&profile, &rate, t, n, seed)?
            }
        }
        _ => return Err(Error::Parse("--lambda1 and --lambda2 go together".into())),
    };
    emit(cfg, |w| match format {
        OutputFormat::Json => writeln!(w, "{}", batch_json(&batch)),
        _ => write_path_batch_csv(w, &batch),
    })?;
    Ok(Outcome::Success)
}

fn planar_spec(cfg: &RunConfig) -> Result<PlanarMotionSpec> {
    let lambda = positive("lambda", cfg.lambda.ok_or_else(|| Error::Parse("--lambda is required".into()))?)?;
    let px = parse_profile(cfg.profile.as_deref())?;
    let py = match cfg.profile_y.as_deref() {
        Some(s) => parse_profile(Some(s))?,
        None => px.clone(),
    };
    PlanarMotionSpec::new(px, py, lambda, cfg.require_t()?)
}

fn simulate_2d(cfg: &RunConfig) -> Result<Outcome> {
    let seed = cfg.require_seed()?;
    let n = paths(cfg)?;
    let spec = planar_spec(cfg)?;
    let format = format_of(cfg, &[OutputFormat::Csv, OutputFormat::Json])?;
    let batch = simulate_planar(&spec, n, seed)?;
    emit(cfg, |w| match format {
        OutputFormat::Json => {
            let rows: Vec<_> = batch
                .positions
                .iter()
                .zip(&batch.event_counts)
                .enumerate()
                .map(|(i, (&(x, y), k))| json!({"path_id": i, "x": x, "y": y, "n_events": k}))
                .collect();
            writeln!(w, "{}", json!({"seed": seed, "t": spec.t, "paths": rows}))
        }
        _ => write_planar_batch_csv(w, &batch),
    })?;
    Ok(Outcome::Success)
}

fn law_1d(cfg: &RunConfig, law: &str) -> Result<DensityModel1D> {
    let t = cfg.require_t()?;
    let p = parse_profile(cfg.profile.as_deref())?;
    let lambda = || cfg.lambda.ok_or_else(|| Error::Parse(format!("law `{law}` needs --lambda")));
    match law {
        "symmetric" => density_symmetric(&p, lambda()?, t),
        "tanh" => density_tanh(&p, lambda()?, t),
        "coth" => density_coth(&p, lambda()?, t),
        "epd" => density_epd(&p, cfg.alpha.ok_or_else(|| Error::Parse("law `epd` needs --alpha".into()))?, t),
        "fracepd" => normalized_law_1d(cfg.nu.ok_or_else(|| Error::Parse("law `fracepd` needs --nu".into()))?, t, Some(&p)),
        other => Err(Error::Parse(format!("unknown law `{other}`"))),
    }
}

/// Law named by `--law`, else implied by `--rate`, `--nu` or `--profile-y`.
fn law_name(cfg: &RunConfig) -> Result<String> {
    if let Some(l) = &cfg.law {
        return Ok(l.clone());
    }
    if cfg.profile_y.is_some() {
        return Ok("planar".into());
    }
    if cfg.nu.is_some() {
        return Ok("fracepd".into());
    }
    if let Some(rate) = parse_rate(cfg)? {
        return Ok(match rate.kind() {
            RateKind::Constant { .. } => "symmetric",
            RateKind::Tanh { .. } => "tanh",
            RateKind::Coth { .. } => "coth",
            RateKind::Epd { .. } => "epd",
        }
        .into());
    }
    if cfg.alpha.is_some() {
        return Ok("epd".into());
    }
    Err(Error::Parse("give --law, --rate, --lambda, --alpha or --nu".into()))
}

fn density(cfg: &RunConfig) -> Result<Outcome> {
    let law = law_name(cfg)?;
    let points = cfg.points.unwrap_or(201);
    let format = format_of(cfg, &[OutputFormat::Csv, OutputFormat::Json])?;
    if law == "planar" {
        if format != OutputFormat::Csv {
            return Err(Error::Parse("the planar density is written as CSV".into()));
        }
        let spec = planar_spec(cfg)?;
        emit(cfg, |w| write_planar_density_csv(w, &spec, points))?;
        return Ok(Outcome::Success);
    }
    // a rate given as a spec string carries its own parameters
    let mut cfg = cfg.clone();
    if let Some(rate) = parse_rate(&cfg)? {
        match rate.kind() {
            RateKind::Constant { lambda } | RateKind::Tanh { lambda } | RateKind::Coth { lambda } => {
                cfg.lambda = Some(lambda)
            }
            RateKind::Epd { alpha } => cfg.alpha = Some(alpha),
        }
    }
    let model = law_1d(&cfg, &law)?;
    emit(&cfg, |w| match format {
        OutputFormat::Json => {
            let (lo, hi) = model.support();
            let grid: Vec<_> = model.sample_grid(points).iter().map(|&(x, p)| json!([x, p])).collect();
            writeln!(
                w,
                "{}",
                json!({"atoms": model.atoms(), "support": [lo, hi], "t": model.time(), "pdf": grid})
            )
        }
        _ => write_density_csv(w, &model, points),
    })?;
    Ok(Outcome::Success)
}

fn support(cfg: &RunConfig) -> Result<Outcome> {
    let points = cfg.points.unwrap_or(720);
    let format = format_of(cfg, &[OutputFormat::Csv, OutputFormat::Svg])?;
    if cfg.figure1.unwrap_or(false) {
        if format != OutputFormat::Svg {
            return Err(Error::Parse("--figure1 is drawn as SVG; add --format svg".into()));
        }
        let svg = figure1_svg(cfg.t.unwrap_or(1.0), points)?;
        emit(cfg, |w| w.write_all(svg.as_bytes()))?;
        return Ok(Outcome::Success);
    }
    let mut spec_cfg = cfg.clone();
    spec_cfg.lambda = Some(cfg.lambda.unwrap_or(1.0));
    let spec = planar_spec(&spec_cfg)?;
    let boundary = boundary_polyline(&spec, points.max(8))?;
    match format {
        OutputFormat::Svg => {
            let mut curves = vec![SvgCurve::closed(
                "support",
                boundary.iter().map(|p| (p.x, p.y)).collect(),
                PALETTE[0],
            )];
            // optional sample paths, one per number of changes of direction
            if let Some(k) = cfg.paths {
                let seed = cfg.require_seed()?;
                for changes in 0..k.min(64) as usize {
                    let path = sample_path(&spec, changes + 1, seed, 16)?;
                    curves.push(SvgCurve::open(
                        format!("path-{}", changes + 1),
                        path,
                        PALETTE[1 + changes % (PALETTE.len() - 1)],
                    ));
                }
            }
            let svg = render_svg(&curves, 600);
            emit(cfg, |w| w.write_all(svg.as_bytes()))?;
        }
        _ => emit(cfg, |w| write_boundary_csv(w, &boundary))?,
    }
    Ok(Outcome::Success)
}

fn verify(cfg: &RunConfig) -> Result<Outcome> {
    let mut opts = SuiteOptions::default();
    if let Some(seed) = cfg.seed {
        opts.seed = seed;
    }
    if cfg.paths.is_some() {
        opts.paths = paths(cfg)?;
    }
    let reports = run_suite(cfg.suite.as_deref().unwrap_or("all"), opts)?;
    let failed: Vec<&ValidationReport> = reports.iter().filter(|r| !r.passed).collect();
    emit(cfg, |w| {
        for r in &reports {
            writeln!(w, "{}", r.to_json())?;
        }
        Ok(())
    })?;
    for r in &failed {
        eprintln!("FAIL {} statistic={} threshold={} {}", r.name, r.statistic, r.threshold, r.details);
    }
    eprintln!("{} of {} checks passed", reports.len() - failed.len(), reports.len());
    Ok(if failed.is_empty() {
        Outcome::Success
    } else {
        Outcome::ValidationFailed
    })
}

fn scan(cfg: &RunConfig) -> Result<Outcome> {
    let d = cfg.dim.unwrap_or(1);
    let n = cfg.order.unwrap_or(1);
    let step = cfg.grid.unwrap_or(0.01);
    let format = format_of(cfg, &[OutputFormat::Csv, OutputFormat::Json])?;
    let rows = scan_grid(d, n, step)?;
    emit(cfg, |w| match format {
        OutputFormat::Json => writeln!(w, "{}", json!({"d": d, "n": n, "step": step, "points": rows})),
        _ => write_scan_csv(w, &rows),
    })?;
    Ok(Outcome::Success)
}
