//! Drives a run from a config file, the same path the `anisoflow run`
//! command takes. Defaults to configs/curve.cfg next to this file.

use std::path::PathBuf;

use anisoflow::cli::{execute, load_config};

fn main() -> anisoflow::Result<()> {
    let path = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/configs/curve.cfg"));
    let config = load_config(&path)?;
    print!("{}", config.to_text());
    let report = execute(&config)?;
    println!("\n{}", report.summary());
    Ok(())
}
