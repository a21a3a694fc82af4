//! Classical telegraph motion: Monte Carlo against the explicit law.
//!
//! cargo run --release --example telegraph_1d

use telegraph_core::harness::{ks_statistic_with_left, quadrature_mass};
use telegraph_core::telegraph1d::{density_symmetric, simulate_symmetric};
use telegraph_core::{RateFunction, VelocityProfile};

fn main() -> telegraph_core::Result<()> {
    let (lambda, t, n, seed) = (1.0, 1.0, 1_000_000, 7);
    let unit = VelocityProfile::unit();
    let rate = RateFunction::constant(lambda)?;

    let batch = simulate_symmetric(&unit, &rate, t, n, seed)?;
    let law = density_symmetric(&unit, lambda, t)?;

    println!("paths without a switch: {:.5} (law {:.5})", batch.zero_event_fraction(), (-lambda * t).exp());
    println!("mass of the law: {:.12}", quadrature_mass(&law)?);

    let cdf = law.tabulate_cdf(1 << 14)?;
    let d = ks_statistic_with_left(&batch.positions, |x| cdf.cdf(x), |x| cdf.cdf_left(x));
    println!("KS distance, {n} paths: {d:.5}");

    println!("\n     x      density");
    for (x, p) in law.sample_grid(11) {
        println!("{x:>7.3}  {p:.6}");
    }
    Ok(())
}
