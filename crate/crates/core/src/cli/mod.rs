//! Command implementations behind the `anisoflow` binary.
//!
//! Exit codes: 0 success, 1 configuration error, 2 runtime error during
//! integration, 3 failed verification.

pub mod config;
pub mod svg;

use std::fs::OpenOptions;
use std::io::Write;
use std::path::Path;

pub use config::{parse_config, RunConfig};

use crate::diagnostics::DecayFit;
use crate::error::{Error, Result};
use crate::flow::{save_checkpoint, FlowState, Integrator, RunOutcome};
use crate::ode::{self, OdeComparison};
use crate::verify::{Suite, SuiteReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

/// Environment variable overriding the worker count.
pub const THREADS_ENV: &str = "ANISOFLOW_THREADS";

/// Exit code for an error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Syntax { .. }
        | Error::Config(_)
        | Error::InvalidProfile(_)
        | Error::InvalidGrid(_)
        | Error::UnsupportedDimension(_)
        | Error::IndexOutOfRange { .. } => EXIT_CONFIG,
        _ => EXIT_RUNTIME,
    }
}

/// Sizes the global rayon pool from `ANISOFLOW_THREADS` when set. Results do
/// not depend on the worker count.
pub fn init_threads() -> Result<()> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::Config(vec![format!("{THREADS_ENV}: '{v}' is not a positive integer")]))?;
    // a pool that is already built (e.g. in tests) keeps its size
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config(vec![format!("{}: {e}", path.display())]))?;
    parse_config(&text)
}

fn ensure_writable(path: &Path) -> Result<()> {
    OpenOptions::new()
        .write(true)
        .create(true)
        .truncate(false)
        .open(path)
        .map(|_| ())
        .map_err(|e| Error::Config(vec![format!("output path {}: {e}", path.display())]))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Run result plus the tail fit of the oscillation, if it could be fitted.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub outcome: RunOutcome,
    pub osc_fit: Option<DecayFit>,
}

impl RunReport {
    pub fn summary(&self) -> String {
        let s = &self.outcome.state;
        let osc = self.outcome.series.last().map_or(f64::NAN, |r| r.osc);
        let rate = self.osc_fit.as_ref().map_or("n/a".to_string(), |f| format!("{:.4}", f.rate));
        format!(
            "stop={} tau={:.6} steps={} osc={:.3e} osc_rate={rate}",
            self.outcome.reason, s.tau, s.step_count, osc
        )
    }
}

/// Integrates a configuration and writes the requested outputs. Output
/// paths are probed before any integration work.
pub fn execute(config: &RunConfig) -> Result<RunReport> {
    for p in [&config.output.csv, &config.output.plot, &config.output.checkpoint].into_iter().flatten() {
        ensure_writable(p)?;
    }
    let graph = config.initial_graph()?;
    let state = FlowState::new(config.profile.clone(), graph);
    let outcome = Integrator::new(&config.grid, config.control.clone()).run(state)?;
    if let Some(p) = &config.output.csv {
        write_file(p, &outcome.series.to_csv())?;
    }
    if let Some(p) = &config.output.plot {
        write_file(p, &svg::plot_svg(&outcome.series))?;
    }
    if let Some(p) = &config.output.checkpoint {
        save_checkpoint(&outcome.state, p)?;
    }
    let osc_fit = outcome.series.tail_fit(|r| r.osc).ok();
    Ok(RunReport { outcome, osc_fit })
}

fn report_error(err: &Error) -> i32 {
    let code = exit_code(err);
    match err {
        Error::Config(list) => {
            eprintln!("config error:");
            for e in list {
                eprintln!("  {e}");
            }
        }
        other if code == EXIT_CONFIG => eprintln!("config error: {other}"),
        other => eprintln!("runtime error: {other}"),
    }
    code
}

/// `run <config>`.
pub fn cmd_run(path: &Path) -> i32 {
    let result = init_threads().and_then(|_| load_config(path)).and_then(|c| execute(&c));
    match result {
        Ok(report) => {
            println!("{}", report.summary());
            EXIT_OK
        }
        Err(e) => report_error(&e),
    }
}

/// Runs the named suites ("all" for every suite).
pub fn run_suites(name: &str) -> Result<Vec<SuiteReport>> {
    let suites = Suite::parse(name).ok_or_else(|| {
        Error::Config(vec![format!("unknown suite '{name}' (symfunc|oracle|ode|profiles|all)")])
    })?;
    Ok(suites.into_iter().map(Suite::run).collect())
}

/// `verify [suite]`.
pub fn cmd_verify(name: &str) -> i32 {
    if let Err(e) = init_threads() {
        return report_error(&e);
    }
    match run_suites(name) {
        Ok(reports) => {
            let mut out = std::io::stdout().lock();
            for r in &reports {
                let _ = write!(out, "{r}");
            }
            let ok = reports.iter().all(SuiteReport::passed);
            let _ = writeln!(out, "verify {name}: {}", if ok { "pass" } else { "FAIL" });
            if ok {
                EXIT_OK
            } else {
                EXIT_VERIFY
            }
        }
        Err(e) => report_error(&e),
    }
}

/// Compares a sphere run with the sphere ODE. Requires `kind = sphere`
/// initial data; the horizon is the config's t_end.
pub fn ode_compare(config: &RunConfig) -> Result<OdeComparison> {
    let config::InitialData::Sphere { r0 } = config.initial else {
        return Err(Error::Config(vec!["initial.kind: ode-compare needs kind = sphere".into()]));
    };
    ode::pde_vs_ode_check(&config.profile, r0, config.control.t_end, config.grid, &config.control)
}

/// `ode-compare <config>`; fails verification when the relative deviation
/// exceeds 1e-4.
pub fn cmd_ode_compare(path: &Path) -> i32 {
    let result = init_threads().and_then(|_| load_config(path)).and_then(|c| ode_compare(&c));
    match result {
        Ok(c) => {
            println!(
                "tau={:.6} steps={} r_pde={:.12} r_ref={:.12} ({}) max_rel_dev={:.3e} max_nonuniform={:.3e}",
                c.final_tau,
                c.steps,
                c.final_radius,
                c.reference_radius,
                if c.closed_form { "closed form" } else { "rk4" },
                c.max_rel_deviation,
                c.max_nonuniformity
            );
            if c.max_rel_deviation <= 1e-4 {
                EXIT_OK
            } else {
                EXIT_VERIFY
            }
        }
        Err(e) => report_error(&e),
    }
}
