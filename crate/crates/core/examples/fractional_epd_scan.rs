//! The time-fractional equation: coefficients over nu, where the solution
//! stays positive, and the resulting probability law.
//!
//! cargo run --release --example fractional_epd_scan

use telegraph_core::fracepd::{make_params, normalized_law_1d, residual_terms, scan_grid};
use telegraph_core::quad::QuadSettings;

fn main() -> telegraph_core::Result<()> {
    println!("  nu      C1          C2       residual");
    for p in scan_grid(1, 1, 0.05)? {
        let r = residual_terms(&make_params(p.nu, 1, 1)?)?.relative();
        println!("{:>5.2} {:>10.5} {:>12.6}  {r:.1e}{}", p.nu, p.c1, p.c2, if p.positive() { "  law" } else { "" });
    }

    let nu = 0.3;
    let law = normalized_law_1d(nu, 1.0, None)?;
    let (lo, hi) = law.support();
    println!("\nnu = {nu}: support [{lo:.4}, {hi:.4}], mass {:.12}", law.ac_mass(QuadSettings::default())?);
    Ok(())
}
