//! Planar random flight with a different speed along each axis: the law,
//! its conditional pieces, and a chi-square test of the sampler.
//!
//! cargo run --release --example planar_flight

use telegraph_core::harness::chi2_2d;
use telegraph_core::planar::{conditional_density, density_planar, simulate_planar, PlanarMotionSpec};
use telegraph_core::suite::planar_bins;
use telegraph_core::VelocityProfile;

fn main() -> telegraph_core::Result<()> {
    let spec = PlanarMotionSpec::new(
        VelocityProfile::power(0.5, 1.0)?,
        VelocityProfile::constant(0.5)?,
        1.0,
        1.0,
    )?;
    println!("mass on the boundary: {:.5}", spec.boundary_mass());
    for (x, y) in [(0.01, 0.0), (0.05, 0.1), (0.1, -0.3)] {
        println!(
            "({x}, {y}): density {:.5}, given 1 switch {:.5}, given 2 switches {:.5}",
            density_planar(&spec, x, y)?,
            conditional_density(&spec, 1, x, y)?,
            conditional_density(&spec, 2, x, y)?
        );
    }

    let batch = simulate_planar(&spec, 1_000_000, 9)?;
    let bins = planar_bins(&spec, 50, 0.98)?;
    let r = chi2_2d(&batch.positions, &bins)?;
    println!("chi-square {:.1} on {} dof, p = {:.3}", r.statistic, r.dof, r.p_value);
    Ok(())
}
