//! Run configuration files.
//!
//! ```text
//! # curve shrinking to a circle
//! [profile]
//! n = 1
//! k = 1
//! alpha = 1
//! beta = 2
//! g.kind = zero
//!
//! [grid]
//! N = 512
//!
//! [initial]
//! kind = fourier
//! target = r
//! mean = 1
//! terms = 0.3 cos 2
//!
//! [control]
//! t_end = 40
//!
//! [output]
//! csv_path = run.csv
//! ```
//!
//! Sections may appear in any order; every key except those in `[profile]`
//! and `[grid]` has a default. Unknown sections and keys are errors.
//!
//! Fourier terms are comma separated. On S^1 a term is `amp cos m` or
//! `amp sin m`; on S^2 it is `amp Y l m`, meaning amp P_l^|m|(cos theta)
//! times cos(m phi) for m >= 0 and sin(|m| phi) for m < 0, where P_l^m is the
//! associated Legendre function without the (-1)^m phase.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::flow::StepControl;
use crate::speed::{SpeedProfile, PROFILE_KEYS};
use crate::sphere::io::load_graph;
use crate::sphere::{RadialGraph, SphericalGrid};

/// One basis function of the Fourier initial data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Basis {
    Cos(u32),
    Sin(u32),
    /// P_l^|m|(cos theta) cos(m phi), or sin(|m| phi) for m < 0.
    Y { l: u32, m: i32 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourierTerm {
    pub amp: f64,
    pub basis: Basis,
}

/// Which function the Fourier series describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FourierTarget {
    Radius,
    LogRadius,
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialData {
    Sphere { r0: f64 },
    Fourier { target: FourierTarget, mean: f64, terms: Vec<FourierTerm> },
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct OutputPaths {
    pub csv: Option<PathBuf>,
    pub plot: Option<PathBuf>,
    pub checkpoint: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub profile: SpeedProfile,
    pub grid: SphericalGrid,
    pub initial: InitialData,
    pub control: StepControl,
    pub output: OutputPaths,
}

const SECTIONS: [&str; 5] = ["profile", "grid", "initial", "control", "output"];

/// key -> (value, line) per section.
type Sections = BTreeMap<String, BTreeMap<String, (String, usize)>>;

fn split_sections(text: &str) -> Result<Sections> {
    let mut out: Sections = BTreeMap::new();
    let mut current: Option<String> = None;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let syntax = |msg: String| Error::Syntax { line: line_no, msg };
        if let Some(rest) = line.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| syntax(format!("unterminated section header '{line}'")))?
                .trim();
            if !SECTIONS.contains(&name) {
                return Err(syntax(format!("unknown section [{name}]")));
            }
            if out.contains_key(name) {
                return Err(syntax(format!("duplicate section [{name}]")));
            }
            out.insert(name.to_string(), BTreeMap::new());
            current = Some(name.to_string());
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| syntax(format!("expected 'key = value', found '{line}'")))?;
        let section = current
            .as_ref()
            .ok_or_else(|| syntax("key outside of any section".into()))?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() {
            return Err(syntax("empty key".into()));
        }
        let map = out.get_mut(section).expect("section inserted");
        if map.insert(key.to_string(), (value.to_string(), line_no)).is_some() {
            return Err(syntax(format!("duplicate key '{key}' in [{section}]")));
        }
    }
    Ok(out)
}

/// Error collector with key-qualified messages.
struct Collector<'a> {
    map: &'a BTreeMap<String, (String, usize)>,
    section: &'static str,
    errors: Vec<String>,
}

impl<'a> Collector<'a> {
    fn get(&self, key: &str) -> Option<&'a str> {
        self.map.get(key).map(|(v, _)| v.as_str())
    }

    fn err(&mut self, key: &str, msg: impl std::fmt::Display) {
        let at = self.map.get(key).map(|(_, l)| format!(" (line {l})")).unwrap_or_default();
        self.errors.push(format!("{}.{key}{at}: {msg}", self.section));
    }

    fn parse<T: std::str::FromStr>(&mut self, key: &str) -> Option<T> {
        let v = self.get(key)?;
        match v.parse() {
            Ok(x) => Some(x),
            Err(_) => {
                self.err(key, format!("cannot parse '{v}'"));
                None
            }
        }
    }

    fn unknown(&mut self, allowed: &[&str]) {
        let extra: Vec<String> = self.map.keys().filter(|k| !allowed.contains(&k.as_str())).cloned().collect();
        for k in extra {
            self.err(&k, "unknown key");
        }
    }
}

fn parse_terms(text: &str, dim: usize) -> std::result::Result<Vec<FourierTerm>, String> {
    text.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|term| {
            let parts: Vec<&str> = term.split_whitespace().collect();
            let amp: f64 = parts
                .first()
                .and_then(|a| a.parse().ok())
                .ok_or_else(|| format!("bad amplitude in term '{term}'"))?;
            let basis = match (dim, parts.as_slice()) {
                (1, [_, "cos", m]) => Basis::Cos(m.parse().map_err(|_| format!("bad mode in '{term}'"))?),
                (1, [_, "sin", m]) => {
                    let m: u32 = m.parse().map_err(|_| format!("bad mode in '{term}'"))?;
                    if m == 0 {
                        return Err(format!("'{term}': sin 0 vanishes identically"));
                    }
                    Basis::Sin(m)
                }
                (2, [_, "Y", l, m]) => {
                    let l: u32 = l.parse().map_err(|_| format!("bad degree in '{term}'"))?;
                    let m: i32 = m.parse().map_err(|_| format!("bad order in '{term}'"))?;
                    if m.unsigned_abs() > l {
                        return Err(format!("'{term}': |m| must not exceed l"));
                    }
                    Basis::Y { l, m }
                }
                (1, _) => return Err(format!("term '{term}' must look like 'amp cos m' or 'amp sin m'")),
                _ => return Err(format!("term '{term}' must look like 'amp Y l m'")),
            };
            Ok(FourierTerm { amp, basis })
        })
        .collect()
}

fn format_terms(terms: &[FourierTerm]) -> String {
    terms
        .iter()
        .map(|t| match t.basis {
            Basis::Cos(m) => format!("{} cos {m}", t.amp),
            Basis::Sin(m) => format!("{} sin {m}", t.amp),
            Basis::Y { l, m } => format!("{} Y {l} {m}", t.amp),
        })
        .collect::<Vec<_>>()
        .join(", ")
}

/// Associated Legendre P_l^m(x), m >= 0, without the (-1)^m phase.
pub fn assoc_legendre(l: u32, m: u32, x: f64) -> f64 {
    if m > l {
        return 0.0;
    }
    let s = (1.0 - x * x).max(0.0).sqrt();
    let mut pmm = 1.0;
    for i in 1..=m {
        pmm *= (2 * i - 1) as f64 * s;
    }
    if l == m {
        return pmm;
    }
    let mut pm1 = x * (2 * m + 1) as f64 * pmm;
    if l == m + 1 {
        return pm1;
    }
    let mut pll = 0.0;
    for ll in (m + 2)..=l {
        pll = (x * (2 * ll - 1) as f64 * pm1 - (ll + m - 1) as f64 * pmm) / (ll - m) as f64;
        pmm = pm1;
        pm1 = pll;
    }
    pll
}

impl FourierTerm {
    pub fn eval(&self, theta: f64, phi: f64) -> f64 {
        self.amp
            * match self.basis {
                Basis::Cos(m) => (m as f64 * theta).cos(),
                Basis::Sin(m) => (m as f64 * theta).sin(),
                Basis::Y { l, m } => {
                    let ang = if m >= 0 { (m as f64 * phi).cos() } else { (m.unsigned_abs() as f64 * phi).sin() };
                    assoc_legendre(l, m.unsigned_abs(), theta.cos()) * ang
                }
            }
    }
}

impl InitialData {
    /// Samples the initial hypersurface on `grid`.
    pub fn build(&self, grid: SphericalGrid) -> Result<RadialGraph> {
        match self {
            InitialData::Sphere { r0 } => RadialGraph::sphere(grid, *r0),
            InitialData::Fourier { target, mean, terms } => {
                let series = |t: f64, p: f64| mean + terms.iter().map(|term| term.eval(t, p)).sum::<f64>();
                let phi: Vec<f64> = (0..grid.len())
                    .map(|idx| {
                        let (t, p) = grid.coords(idx);
                        match target {
                            FourierTarget::Radius => series(t, p).ln(),
                            FourierTarget::LogRadius => series(t, p),
                        }
                    })
                    .collect();
                if let Some(i) = phi.iter().position(|v| !v.is_finite()) {
                    let (t, p) = grid.coords(i);
                    return Err(Error::Config(vec![format!(
                        "initial.terms: radius is not positive at theta = {t:.4}, phi = {p:.4}"
                    )]));
                }
                RadialGraph::new(grid, phi)
            }
            InitialData::File(path) => {
                let g = load_graph(path)?;
                if g.grid() != &grid {
                    return Err(Error::Config(vec![format!(
                        "initial.path: file grid '{}' differs from config grid '{}'",
                        g.grid().header(),
                        grid.header()
                    )]));
                }
                Ok(g)
            }
        }
    }
}

const CONTROL_KEYS: [&str; 7] = [
    "cfl",
    "dt_max",
    "t_end",
    "sphericity_stop",
    "max_steps",
    "record_every",
    "pole_filter",
];

/// Parses and validates a configuration. Problems are collected across all
/// sections; syntax errors stop at the first offending line.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let sections = split_sections(text)?;
    let empty = BTreeMap::new();
    let section = |name: &str| sections.get(name).unwrap_or(&empty);
    let mut errors = Vec::new();

    // profile
    let mut c = Collector {
        map: section("profile"),
        section: "profile",
        errors: Vec::new(),
    };
    c.unknown(&PROFILE_KEYS);
    let profile = match SpeedProfile::from_keys(|k| c.get(k)) {
        Ok(p) => match p.check_admissible() {
            Ok(()) => Some(p),
            Err(e) => {
                c.errors.push(format!("profile.g.kind: {e}"));
                None
            }
        },
        Err(es) => {
            c.errors.extend(es.into_iter().map(|e| format!("profile.{e}")));
            None
        }
    };
    errors.append(&mut c.errors);

    // grid
    let mut c = Collector {
        map: section("grid"),
        section: "grid",
        errors: Vec::new(),
    };
    c.unknown(&["n", "N", "N_lat", "N_lon"]);
    let dim = c.parse::<usize>("n").or(profile.as_ref().map(|p| p.n()));
    if let (Some(d), Some(p)) = (dim, &profile) {
        if d != p.n() {
            c.err("n", format!("grid dimension {d} differs from profile n = {}", p.n()));
        }
    }
    let grid = match dim {
        Some(1) => c.parse::<usize>("N").map(SphericalGrid::circle).or_else(|| {
            c.err("N", "required for n = 1");
            None
        }),
        Some(2) => match (c.parse::<usize>("N_lat"), c.parse::<usize>("N_lon")) {
            (Some(a), Some(b)) => Some(SphericalGrid::sphere(a, b)),
            _ => {
                c.err("N_lat", "N_lat and N_lon are required for n = 2");
                None
            }
        },
        _ => None,
    };
    let grid = match grid {
        Some(Ok(g)) => Some(g),
        Some(Err(e)) => {
            c.errors.push(format!("grid: {e}"));
            None
        }
        None => None,
    };
    errors.append(&mut c.errors);

    // initial
    let mut c = Collector {
        map: section("initial"),
        section: "initial",
        errors: Vec::new(),
    };
    let kind = c.get("kind").unwrap_or("sphere");
    let initial = match kind {
        "sphere" => {
            c.unknown(&["kind", "r0"]);
            let r0 = c.parse::<f64>("r0").unwrap_or(1.0);
            if !(r0 > 0.0 && r0.is_finite()) {
                c.err("r0", "must be positive");
            }
            Some(InitialData::Sphere { r0 })
        }
        "fourier" => {
            c.unknown(&["kind", "target", "mean", "terms"]);
            let target = match c.get("target").unwrap_or("r") {
                "r" => FourierTarget::Radius,
                "phi" => FourierTarget::LogRadius,
                other => {
                    c.err("target", format!("'{other}' is not r or phi"));
                    FourierTarget::Radius
                }
            };
            let mean = c.parse::<f64>("mean").unwrap_or(match target {
                FourierTarget::Radius => 1.0,
                FourierTarget::LogRadius => 0.0,
            });
            let terms = match parse_terms(c.get("terms").unwrap_or(""), dim.unwrap_or(1)) {
                Ok(t) => t,
                Err(e) => {
                    c.err("terms", e);
                    Vec::new()
                }
            };
            Some(InitialData::Fourier { target, mean, terms })
        }
        "file" => {
            c.unknown(&["kind", "path"]);
            match c.get("path") {
                Some(p) => Some(InitialData::File(PathBuf::from(p))),
                None => {
                    c.err("path", "required for kind = file");
                    None
                }
            }
        }
        other => {
            c.err("kind", format!("'{other}' is not sphere, fourier or file"));
            None
        }
    };
    if let (Some(init), Some(g)) = (&initial, grid) {
        if let Err(e) = init.build(g) {
            match e {
                Error::Config(es) => c.errors.extend(es),
                other => c.errors.push(format!("initial: {other}")),
            }
        }
    }
    errors.append(&mut c.errors);

    // control
    let mut c = Collector {
        map: section("control"),
        section: "control",
        errors: Vec::new(),
    };
    c.unknown(&CONTROL_KEYS);
    let mut control = StepControl::default();
    if let Some(v) = c.parse("cfl") {
        control.cfl = v;
    }
    if let Some(v) = c.parse("dt_max") {
        control.dt_max = v;
    }
    if let Some(v) = c.parse("t_end") {
        control.t_end = v;
    }
    if let Some(v) = c.parse("sphericity_stop") {
        control.sphericity_stop = v;
    }
    if let Some(v) = c.parse("max_steps") {
        control.max_steps = v;
    }
    if let Some(v) = c.parse("record_every") {
        control.record_every = v;
    }
    if let Some(v) = c.parse("pole_filter") {
        control.pole_filter = v;
    }
    for (key, v) in [("cfl", control.cfl), ("dt_max", control.dt_max), ("t_end", control.t_end)] {
        if !(v > 0.0 && v.is_finite()) {
            c.err(key, "must be positive");
        }
    }
    if !(control.sphericity_stop >= 0.0) {
        c.err("sphericity_stop", "must be non-negative");
    }
    if control.record_every == 0 {
        c.err("record_every", "must be at least 1");
    }
    errors.append(&mut c.errors);

    // output
    let mut c = Collector {
        map: section("output"),
        section: "output",
        errors: Vec::new(),
    };
    c.unknown(&["csv_path", "plot_path", "checkpoint_path"]);
    let path = |k: &str| c.get(k).filter(|s| !s.is_empty()).map(PathBuf::from);
    let output = OutputPaths {
        csv: path("csv_path"),
        plot: path("plot_path"),
        checkpoint: path("checkpoint_path"),
    };
    errors.append(&mut c.errors);

    if !errors.is_empty() {
        return Err(Error::Config(errors));
    }
    Ok(RunConfig {
        profile: profile.expect("no errors"),
        grid: grid.expect("no errors"),
        initial: initial.expect("no errors"),
        control,
        output,
    })
}

impl RunConfig {
    /// Text that [`parse_config`] maps back to an equal config.
    pub fn to_text(&self) -> String {
        let mut s = String::from("[profile]\n");
        for (k, v) in self.profile.to_keys() {
            let _ = writeln!(s, "{k} = {v}");
        }
        let _ = writeln!(s, "\n[grid]\nn = {}", self.grid.dim());
        if self.grid.dim() == 1 {
            let _ = writeln!(s, "N = {}", self.grid.n_lon());
        } else {
            let _ = writeln!(s, "N_lat = {}\nN_lon = {}", self.grid.n_lat(), self.grid.n_lon());
        }
        s.push_str("\n[initial]\n");
        match &self.initial {
            InitialData::Sphere { r0 } => {
                let _ = writeln!(s, "kind = sphere\nr0 = {r0}");
            }
            InitialData::Fourier { target, mean, terms } => {
                let t = match target {
                    FourierTarget::Radius => "r",
                    FourierTarget::LogRadius => "phi",
                };
                let _ = writeln!(s, "kind = fourier\ntarget = {t}\nmean = {mean}\nterms = {}", format_terms(terms));
            }
            InitialData::File(p) => {
                let _ = writeln!(s, "kind = file\npath = {}", p.display());
            }
        }
        let c = &self.control;
        let _ = writeln!(
            s,
            "\n[control]\ncfl = {}\ndt_max = {}\nt_end = {}\nsphericity_stop = {}\nmax_steps = {}\nrecord_every = {}\npole_filter = {}",
            c.cfl, c.dt_max, c.t_end, c.sphericity_stop, c.max_steps, c.record_every, c.pole_filter
        );
        s.push_str("\n[output]\n");
        for (k, v) in [
            ("csv_path", &self.output.csv),
            ("plot_path", &self.output.plot),
            ("checkpoint_path", &self.output.checkpoint),
        ] {
            if let Some(p) = v {
                let _ = writeln!(s, "{k} = {}", p.display());
            }
        }
        s
    }

    pub fn initial_graph(&self) -> Result<RadialGraph> {
        self.initial.build(self.grid)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "[profile]\nn = 1\nk = 1\nalpha = 1\nbeta = 2\ng.kind = zero\n[grid]\nN = 64\n[initial]\nkind = sphere\nr0 = 1.5\n";

    #[test]
    fn minimal_config() {
        let c = parse_config(MINIMAL).unwrap();
        assert_eq!(c.profile.gamma(), 1.0);
        assert_eq!(c.initial, InitialData::Sphere { r0: 1.5 });
        assert_eq!(c.control, StepControl::default());
    }

    #[test]
    fn round_trip() {
        let text = MINIMAL.replace("kind = sphere\nr0 = 1.5", "kind = fourier\nterms = 0.3 cos 2, 0.05 sin 3")
            + "[control]\ncfl = 0.15\n[output]\ncsv_path = out.csv\n";
        let c = parse_config(&text).unwrap();
        assert_eq!(parse_config(&c.to_text()).unwrap(), c);
    }

    #[test]
    fn alpha_rule_for_k2() {
        let text = "[profile]\nn = 2\nk = 2\nalpha = 0.7\nbeta = 3\n[grid]\nN_lat = 16\nN_lon = 32\n";
        let err = parse_config(text).unwrap_err().to_string();
        assert!(err.contains("alpha must be 1/k or >= 1 for k >= 2"), "{err}");
    }

    #[test]
    fn monomial_rejected_in_critical_regime() {
        let text = MINIMAL.replace("g.kind = zero", "g.kind = monomial\ng.l = 3");
        let err = parse_config(&text).unwrap_err().to_string();
        assert!(err.contains("profile.g.kind"), "{err}");
    }

    #[test]
    fn unknown_key_and_line_numbers() {
        let err = parse_config(&(MINIMAL.to_string() + "bogus = 1\n")).unwrap_err().to_string();
        assert!(err.contains("initial.bogus (line 12): unknown key"), "{err}");
        let err = parse_config("[profile]\nn 1\n").unwrap_err();
        assert!(matches!(err, Error::Syntax { line: 2, .. }));
    }

    #[test]
    fn nonpositive_fourier_radius() {
        let text = MINIMAL.replace("kind = sphere\nr0 = 1.5", "kind = fourier\nterms = 1.5 cos 1");
        let err = parse_config(&text).unwrap_err().to_string();
        assert!(err.contains("not positive"), "{err}");
    }

    #[test]
    fn legendre_values() {
        let x = 0.3f64;
        assert!((assoc_legendre(2, 0, x) - 0.5 * (3.0 * x * x - 1.0)).abs() < 1e-15);
        assert!((assoc_legendre(2, 1, x) - 3.0 * x * (1.0 - x * x).sqrt()).abs() < 1e-15);
        assert!((assoc_legendre(3, 0, x) - 0.5 * (5.0 * x.powi(3) - 3.0 * x)).abs() < 1e-15);
    }
}
