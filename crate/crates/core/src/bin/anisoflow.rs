use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use anisoflow::cli;

/// Normalized anisotropic curvature flows of star-shaped curves and surfaces.
#[derive(Parser)]
#[command(name = "anisoflow", version)]
struct Args {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Integrate a run configuration and write its diagnostics.
    Run { config: PathBuf },
    /// Run self-check suites: symfunc, oracle, ode, profiles or all.
    Verify {
        #[arg(default_value = "all")]
        suite: String,
    },
    /// Compare a sphere run against the exact sphere ODE.
    OdeCompare { config: PathBuf },
}

fn main() -> ExitCode {
    let code = match Args::parse().cmd {
        Cmd::Run { config } => cli::cmd_run(&config),
        Cmd::Verify { suite } => cli::cmd_verify(&suite),
        Cmd::OdeCompare { config } => cli::cmd_ode_compare(&config),
    };
    ExitCode::from(code as u8)
}
