//! Runs the validation suites and prints one line per check.
//!
//! cargo run --release --example validation_suite -- [suite] [paths]

use telegraph_core::suite::{run_suite, SuiteOptions};

fn main() -> telegraph_core::Result<()> {
    let mut args = std::env::args().skip(1);
    let suite = args.next().unwrap_or_else(|| "all".into());
    let mut opts = SuiteOptions::default();
    if let Some(n) = args.next().and_then(|v| v.parse().ok()) {
        opts.paths = n;
    }
    let reports = run_suite(&suite, opts)?;
    for r in &reports {
        println!(
            "{} {:<45} {:>12.4e}  (threshold {:.1e}) {}",
            if r.passed { "ok  " } else { "FAIL" },
            r.name,
            r.statistic,
            r.threshold,
            r.details
        );
    }
    let failed = reports.iter().filter(|r| !r.passed).count();
    println!("{} checks, {failed} failed", reports.len());
    Ok(())
}
