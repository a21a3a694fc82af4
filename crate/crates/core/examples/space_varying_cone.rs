//! Speed depending on position: the cone for c(x) = sqrt|x|, and the
//! transform-based sampler against direct RK4 integration of each leg.
//!
//! cargo run --release --example space_varying_cone

use telegraph_core::telegraph1d::{density_symmetric, simulate_symmetric, simulate_symmetric_rk4, Rk4Settings};
use telegraph_core::{RateFunction, VelocityProfile};

fn main() -> telegraph_core::Result<()> {
    let profile = VelocityProfile::power(0.5, 1.0)?;
    let rate = RateFunction::constant(1.0)?;
    for t in [0.5, 1.0, 2.0, 4.0] {
        let cone = profile.cone_endpoints(t)?;
        println!("t = {t}: reachable set [{:.4}, {:.4}]", cone.lo, cone.hi);
    }

    let t = 2.0;
    let batch = simulate_symmetric(&profile, &rate, t, 200_000, 1)?;
    let widest = batch.positions.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    println!("\nlargest |x| over 200000 paths at t = {t}: {widest}");

    let ode = simulate_symmetric_rk4(&profile, &rate, t, 500, 1, Rk4Settings::default())?;
    let gap = batch.positions[..500]
        .iter()
        .zip(&ode.positions)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    println!("largest pathwise gap, transform vs RK4: {gap:.2e}");

    // the density carries 1/c(x) and blows up at the origin, where motion is slow
    let law = density_symmetric(&profile, 1.0, t)?;
    println!("\n     x      density");
    for x in [0.01, 0.05, 0.1, 0.25, 0.5, 0.75, 0.99] {
        println!("{x:>7.3}  {:.5}", law.ac_density(x));
    }
    Ok(())
}
