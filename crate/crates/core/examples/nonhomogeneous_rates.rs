//! Switching at the events of a Poisson process with rate lambda(t): the
//! tanh, coth and alpha/t cases, their laws and the Riccati identity.
//!
//! cargo run --release --example nonhomogeneous_rates

use telegraph_core::harness::quadrature_mass;
use telegraph_core::telegraph1d::{density_coth, density_epd, density_tanh, simulate_symmetric};
use telegraph_core::{RateFunction, VelocityProfile};

fn main() -> telegraph_core::Result<()> {
    let (lambda, t) = (1.0, 1.5);
    let profile = VelocityProfile::power(0.5, 1.0)?;

    for (name, rate, law) in [
        ("tanh", RateFunction::tanh(lambda)?, density_tanh(&profile, lambda, t)?),
        ("coth", RateFunction::coth(lambda)?, density_coth(&profile, lambda, t)?),
        ("2/t", RateFunction::epd(2.0)?, density_epd(&profile, 2.0, t)?),
    ] {
        let b = simulate_symmetric(&profile, &rate, t, 400_000, 3)?;
        println!(
            "{name:>5}: atoms {:.5}, simulated no-switch fraction {:.5}, total mass {:.10}",
            law.atom_mass() + 0.0,
            b.zero_event_fraction(),
            quadrature_mass(&law)?
        );
        if let Ok(r) = rate.riccati_residual(t) {
            println!("       lambda' + lambda^2 at t = {t}: {r:.12}");
        }
    }
    Ok(())
}
