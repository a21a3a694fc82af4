//! Support curves of planar motions with power speeds: the four reference
//! superellipses and the astroid with a few sample paths, written as SVG.
//!
//! cargo run --release --example lame_supports_svg -- [output directory]

use std::path::PathBuf;

use telegraph_core::io::{render_svg, SvgCurve, PALETTE};
use telegraph_core::planar::{boundary_polyline, sample_path, LameSupport};
use telegraph_core::suite::figure1_svg;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| ".".into()));
    std::fs::create_dir_all(&dir)?;

    let fig = dir.join("supports.svg");
    std::fs::write(&fig, figure1_svg(1.0, 720)?)?;
    println!("wrote {}", fig.display());

    let astroid = LameSupport::astroid(1.0)?;
    println!("astroid is {:?}", astroid.shape());
    let spec = astroid.motion(2.0)?;
    let mut curves = vec![SvgCurve::closed(
        "astroid",
        boundary_polyline(&spec, 720)?.iter().map(|p| (p.x, p.y)).collect(),
        PALETTE[0],
    )];
    for (changes, colour) in PALETTE.iter().enumerate().skip(1).take(4) {
        curves.push(SvgCurve::open(format!("path-{changes}"), sample_path(&spec, changes, 17, 40)?, colour));
    }
    let out = dir.join("astroid.svg");
    std::fs::write(&out, render_svg(&curves, 600))?;
    println!("wrote {}", out.display());
    Ok(())
}
