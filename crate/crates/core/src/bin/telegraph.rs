use std::process::ExitCode;

use clap::Parser;
use telegraph_core::cli::{exit_code, run, Cli, Outcome};

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("TELEGRAPH_WORKERS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                eprintln!("telegraph: cannot set worker count: {e}");
            }
        }
    }
    match run(&cli.command) {
        Ok(Outcome::Success) => ExitCode::SUCCESS,
        Ok(Outcome::ValidationFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("telegraph: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
