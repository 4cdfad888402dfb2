use std::path::Path;
use std::process::Command;

use anisoflow::cli::{self, parse_config, EXIT_CONFIG, EXIT_OK, EXIT_RUNTIME};
use anisoflow::Error;

const CURVE: &str = "[profile]
n = 1
k = 1
alpha = 1
beta = 2
g.kind = zero

[grid]
N = 64

[initial]
kind = fourier
terms = 0.1 cos 2, 0.02 sin 3

[control]
t_end = 0.2
record_every = 5
";

fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_anisoflow"))
}

#[test]
fn config_text_round_trips() {
    let text = CURVE.to_string() + "[output]\ncsv_path = a.csv\nplot_path = a.svg\n";
    let c = parse_config(&text).unwrap();
    assert_eq!(parse_config(&c.to_text()).unwrap(), c);
    let sphere = "[profile]\nn = 2\nk = 2\nalpha = 1\nbeta = 4\ng.kind = expflat\ng.p = 1\n[grid]\nN_lat = 16\nN_lon = 32\n[initial]\nkind = fourier\nterms = 0.15 Y 2 0, 0.01 Y 3 -1\n";
    let c = parse_config(sphere).unwrap();
    assert_eq!(parse_config(&c.to_text()).unwrap(), c);
}

#[test]
fn config_errors_name_key_and_line() {
    let text = CURVE.replace("N = 64", "N = many").replace("t_end = 0.2", "t_end = -1");
    let err = parse_config(&text).unwrap_err();
    let msg = err.to_string();
    assert!(msg.contains("grid.N (line 9)"), "{msg}");
    assert!(msg.contains("control.t_end"), "{msg}");
    assert_eq!(cli::exit_code(&err), EXIT_CONFIG);
}

#[test]
fn unwritable_output_is_a_config_error_before_integration() {
    let dir = tempfile::tempdir().unwrap();
    let text = CURVE.replace("t_end = 0.2", "t_end = 1e9") + "[output]\ncsv_path = /nonexistent-dir/x/run.csv\n";
    let cfg = write(dir.path(), "bad.cfg", &text);
    let start = std::time::Instant::now();
    assert_eq!(cli::cmd_run(&cfg), EXIT_CONFIG);
    assert!(start.elapsed().as_secs_f64() < 5.0);
}

#[test]
fn missing_config_file_exits_1() {
    assert_eq!(cli::cmd_run(Path::new("/nonexistent/run.cfg")), EXIT_CONFIG);
}

#[test]
fn non_convex_start_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "nc.cfg", &CURVE.replace("0.1 cos 2, 0.02 sin 3", "0.3 cos 2"));
    let c = cli::load_config(&cfg).unwrap();
    let err = cli::execute(&c).unwrap_err();
    assert!(matches!(err, Error::ConeViolation { tau, .. } if tau == 0.0), "{err}");
    assert_eq!(cli::cmd_run(&cfg), EXIT_RUNTIME);
}

#[test]
fn run_writes_identical_csv_and_a_plot() {
    let dir = tempfile::tempdir().unwrap();
    let out = |name: &str| dir.path().join(name).display().to_string();
    let text = format!(
        "{CURVE}[output]\ncsv_path = {}\nplot_path = {}\ncheckpoint_path = {}\n",
        out("a.csv"),
        out("a.svg"),
        out("a.ckpt")
    );
    let cfg = write(dir.path(), "run.cfg", &text);
    assert_eq!(cli::cmd_run(&cfg), EXIT_OK);
    let first = std::fs::read(out("a.csv")).unwrap();
    assert_eq!(cli::cmd_run(&cfg), EXIT_OK);
    assert_eq!(first, std::fs::read(out("a.csv")).unwrap());

    let series = anisoflow::diagnostics::DiagnosticsSeries::from_csv(std::str::from_utf8(&first).unwrap()).unwrap();
    assert!((series.last().unwrap().tau - 0.2).abs() < 1e-12);
    let svg = std::fs::read_to_string(out("a.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("polyline"));
    let state = anisoflow::flow::load_checkpoint(Path::new(&out("a.ckpt"))).unwrap();
    assert_eq!(state.tau, series.last().unwrap().tau);
}

#[test]
fn suites_by_name() {
    let reports = cli::run_suites("symfunc").unwrap();
    assert_eq!(reports.len(), 1);
    assert!(reports[0].passed(), "{}", reports[0]);
    let profiles = cli::run_suites("profiles").unwrap();
    assert!(profiles[0].passed(), "{}", profiles[0]);
    let err = cli::run_suites("bogus").unwrap_err();
    assert_eq!(cli::exit_code(&err), EXIT_CONFIG);
}

#[test]
fn ode_compare_on_a_sphere() {
    let text = "[profile]\nn = 1\nk = 1\nalpha = 1\nbeta = 3\ng.kind = zero\n[grid]\nN = 128\n[initial]\nkind = sphere\nr0 = 2\n[control]\nt_end = 0.6931471805599453\n";
    let c = parse_config(text).unwrap();
    let cmp = cli::ode_compare(&c).unwrap();
    assert!(cmp.closed_form);
    assert!(cmp.max_rel_deviation <= 1e-4, "{cmp:?}");
    assert!((cmp.reference_radius - 4.0 / 3.0).abs() < 1e-9);

    let err = cli::ode_compare(&parse_config(CURVE).unwrap()).unwrap_err();
    assert_eq!(cli::exit_code(&err), EXIT_CONFIG);
}

#[test]
fn binary_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let good = write(dir.path(), "ok.cfg", CURVE);
    let status = bin().arg("run").arg(&good).env("ANISOFLOW_THREADS", "2").output().unwrap();
    assert_eq!(status.status.code(), Some(EXIT_OK));
    assert!(String::from_utf8_lossy(&status.stdout).contains("stop=t_end"));

    let status = bin().arg("run").arg(&good).env("ANISOFLOW_THREADS", "zero").status().unwrap();
    assert_eq!(status.code(), Some(EXIT_CONFIG));

    let broken = write(dir.path(), "broken.cfg", "[profile\nn = 1\n");
    assert_eq!(bin().arg("run").arg(&broken).status().unwrap().code(), Some(EXIT_CONFIG));

    let status = bin().args(["verify", "symfunc"]).output().unwrap();
    assert_eq!(status.status.code(), Some(EXIT_OK));
    assert!(String::from_utf8_lossy(&status.stdout).contains("verify symfunc: pass"));
    assert_eq!(bin().args(["verify", "nope"]).status().unwrap().code(), Some(EXIT_CONFIG));

    let sphere = write(
        dir.path(),
        "sphere.cfg",
        "[profile]\nn = 1\nk = 1\nalpha = 1\nbeta = 3\ng.kind = monomial\ng.l = 4\n[grid]\nN = 64\n[initial]\nkind = sphere\nr0 = 1.5\n[control]\nt_end = 0.3\n",
    );
    let out = bin().arg("ode-compare").arg(&sphere).output().unwrap();
    assert_eq!(out.status.code(), Some(EXIT_OK));
    assert!(String::from_utf8_lossy(&out.stdout).contains("(rk4)"));
    assert_eq!(bin().arg("ode-compare").arg(&good).status().unwrap().code(), Some(EXIT_CONFIG));
}
