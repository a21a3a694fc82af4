//! Output formats. Floats are written with Rust's shortest round-trip
//! formatting, so parsing a field gives back the exact value.

use std::fmt::Write as _;
use std::io::{self, Write};

use serde::Serialize;

use crate::fracepd::ScanPoint;
use crate::planar::{BoundaryPoint, PlanarBatch, PlanarMotionSpec};
use crate::telegraph1d::{Atom, DensityModel1D, PathBatch};

/// Round-trip decimal form of `v`.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:?}")
    } else if v.is_nan() {
        "NaN".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

pub fn write_path_batch_csv<W: Write + ?Sized>(w: &mut W, batch: &PathBatch) -> io::Result<()> {
    writeln!(w, "path_id,x,n_events,direction")?;
    for i in 0..batch.n_paths {
        writeln!(
            w,
            "{i},{},{},{}",
            fmt_f64(batch.positions[i]),
            batch.event_counts[i],
            batch.directions[i]
        )?;
    }
    Ok(())
}

pub fn write_planar_batch_csv<W: Write + ?Sized>(w: &mut W, batch: &PlanarBatch) -> io::Result<()> {
    writeln!(w, "path_id,x,y,n_events")?;
    for (i, (&(x, y), k)) in batch.positions.iter().zip(&batch.event_counts).enumerate() {
        writeln!(w, "{i},{},{},{k}", fmt_f64(x), fmt_f64(y))?;
    }
    Ok(())
}

#[derive(Serialize)]
struct DensityHeader<'a> {
    atoms: &'a [Atom],
    support: [f64; 2],
    t: f64,
}

/// Header of a density table: atoms, support interval and time.
pub fn density_header(model: &DensityModel1D) -> String {
    let (lo, hi) = model.support();
    serde_json::to_string(&DensityHeader {
        atoms: model.atoms(),
        support: [lo, hi],
        t: model.time(),
    })
    .expect("header serializes")
}

/// `# <json header>` followed by `x,pdf` rows of the continuous part.
pub fn write_density_csv<W: Write + ?Sized>(w: &mut W, model: &DensityModel1D, points: usize) -> io::Result<()> {
    writeln!(w, "# {}", density_header(model))?;
    writeln!(w, "x,pdf")?;
    for (x, p) in model.sample_grid(points) {
        writeln!(w, "{},{}", fmt_f64(x), fmt_f64(p))?;
    }
    Ok(())
}

#[derive(Serialize)]
struct PlanarHeader {
    boundary_mass: f64,
    x_range: [f64; 2],
    y_range: [f64; 2],
    t: f64,
}

/// Planar density on a `points x points` grid over the bounding box of the
/// support: `# <json header>` followed by `x,y,pdf` rows. Points where the
/// density refuses to evaluate (at the boundary) are written as `NaN`.
pub fn write_planar_density_csv<W: Write + ?Sized>(w: &mut W, spec: &PlanarMotionSpec, points: usize) -> io::Result<()> {
    let bound = |p: &crate::velocity::VelocityProfile| p.phi_inverse(spec.t).unwrap_or(f64::NAN);
    let (xh, yh) = (bound(&spec.profile_x), bound(&spec.profile_y));
    let header = PlanarHeader {
        boundary_mass: spec.boundary_mass(),
        x_range: [-xh, xh],
        y_range: [-yh, yh],
        t: spec.t,
    };
    writeln!(w, "# {}", serde_json::to_string(&header).expect("header serializes"))?;
    writeln!(w, "x,y,pdf")?;
    let m = points.max(1);
    let at = |h: f64, i: usize| -h + 2.0 * h * (i as f64 + 0.5) / m as f64;
    for i in 0..m {
        for j in 0..m {
            let (x, y) = (at(xh, i), at(yh, j));
            let p = crate::planar::density_planar(spec, x, y).unwrap_or(f64::NAN);
            writeln!(w, "{},{},{}", fmt_f64(x), fmt_f64(y), fmt_f64(p))?;
        }
    }
    Ok(())
}

pub fn write_boundary_csv<W: Write + ?Sized>(w: &mut W, points: &[BoundaryPoint]) -> io::Result<()> {
    writeln!(w, "phi_angle,x,y")?;
    for p in points {
        writeln!(w, "{},{},{}", fmt_f64(p.phi_angle), fmt_f64(p.x), fmt_f64(p.y))?;
    }
    Ok(())
}

pub fn write_scan_csv<W: Write + ?Sized>(w: &mut W, points: &[ScanPoint]) -> io::Result<()> {
    writeln!(w, "nu,c1,c2,positive")?;
    for p in points {
        writeln!(w, "{},{},{},{}", fmt_f64(p.nu), fmt_f64(p.c1), fmt_f64(p.c2), p.positive())?;
    }
    Ok(())
}

/// A closed curve or an open path to draw.
#[derive(Debug, Clone, PartialEq)]
pub struct SvgCurve {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub closed: bool,
    pub stroke: String,
    pub width: f64,
}

impl SvgCurve {
    pub fn closed(label: impl Into<String>, points: Vec<(f64, f64)>, stroke: &str) -> Self {
        Self {
            label: label.into(),
            points,
            closed: true,
            stroke: stroke.into(),
            width: 1.5,
        }
    }

    pub fn open(label: impl Into<String>, points: Vec<(f64, f64)>, stroke: &str) -> Self {
        Self {
            label: label.into(),
            points,
            closed: false,
            stroke: stroke.into(),
            width: 0.75,
        }
    }
}

pub const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

/// Square SVG drawing of `curves` with axes, scaled to fit; the `y` axis
/// points up. Each curve is one `<path>` with a `data-label` attribute.
pub fn render_svg(curves: &[SvgCurve], size: u32) -> String {
    let extent = curves
        .iter()
        .flat_map(|c| c.points.iter())
        .map(|&(x, y)| x.abs().max(y.abs()))
        .filter(|v| v.is_finite())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE)
        * 1.05;
    let half = f64::from(size) / 2.0;
    let px = |x: f64| half + x / extent * half;
    let py = |y: f64| half - y / extent * half;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r##"<g stroke="#999999" stroke-width="0.5"><line x1="0" y1="{half}" x2="{size}" y2="{half}"/><line x1="{half}" y1="0" x2="{half}" y2="{size}"/></g>"##
    );
    for c in curves {
        let mut d = String::new();
        for (k, &(x, y)) in c.points.iter().filter(|p| p.0.is_finite() && p.1.is_finite()).enumerate() {
            let _ = write!(d, "{}{:.3},{:.3} ", if k == 0 { 'M' } else { 'L' }, px(x), py(y));
        }
        if c.closed {
            d.push('Z');
        }
        let _ = writeln!(
            s,
            r#"<path data-label="{}" d="{}" fill="none" stroke="{}" stroke-width="{}"/>"#,
            c.label,
            d.trim_end(),
            c.stroke,
            c.width
        );
    }
    s.push_str("</svg>\n");
    s
}
