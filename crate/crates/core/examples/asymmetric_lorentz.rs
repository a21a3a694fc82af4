//! Different switching rates in the two directions, and the Lorentz-type
//! change of variables that removes the drift.
//!
//! cargo run --release --example asymmetric_lorentz

use telegraph_core::harness::{lorentz_residual_gap, ResidualGrid};
use telegraph_core::telegraph1d::{lorentz_coefficient, lorentz_transform, simulate_asymmetric};
use telegraph_core::VelocityProfile;

fn main() -> telegraph_core::Result<()> {
    let profile = VelocityProfile::power(0.5, 1.0)?;
    let (l1, l2, t) = (3.0, 1.0, 1.0);

    let b = simulate_asymmetric(&profile, l1, l2, t, 500_000, 5)?;
    println!("mean position with lambda1 = {l1}, lambda2 = {l2}: {:.5}", b.mean());

    let beta = lorentz_coefficient(l1, l2)?;
    println!("B = {beta}");
    for (x, s) in [(0.1, 0.5), (0.3, 1.0), (0.6, 2.0)] {
        let (xp, tp) = lorentz_transform(l1, l2, &profile, x, s)?;
        println!("(x, t) = ({x}, {s}) -> ({xp:.5}, {tp:.5})");
    }

    // residual of the drifted equation minus (1 - B^2) times the classical one
    let w = |x: f64, t: f64| (-x * x - t * t).exp();
    let grid = ResidualGrid::new((0.2, 0.8), (0.3, 0.9), 5).anywhere();
    for h in [4e-3, 2e-3, 1e-3] {
        println!("h = {h:e}: gap {:.3e}", lorentz_residual_gap(&w, l1, l2, &profile, &grid, h)?);
    }
    Ok(())
}
