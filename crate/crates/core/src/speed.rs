//! The speed factor f(r) = r^beta + g(r) and its rescaled evaluations.

use std::fmt;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::symfunc::binomial;

/// exp(-x) is flushed to zero once x exceeds this.
const EXP_FLUSH: f64 = 745.0;
/// Largest admissible normalization factor for tabulated profiles.
pub const LAMBDA_CAP: f64 = 1e100;
/// Relative slack used by the admissibility validators.
pub const VALIDATION_TOL: f64 = 1e-9;

/// Tabulated g with caller-supplied derivative, interpolated by cubic Hermite
/// segments. The table must start at r = 0; beyond the last sample g is
/// continued linearly with the last slope.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    r: Vec<f64>,
    g: Vec<f64>,
    dg: Vec<f64>,
    source: Option<PathBuf>,
}

impl Table {
    pub fn new(r: Vec<f64>, g: Vec<f64>, dg: Vec<f64>) -> Result<Self> {
        if r.len() < 2 || r.len() != g.len() || r.len() != dg.len() {
            return Err(Error::InvalidProfile(
                "table needs at least two rows with r, g, g' each".into(),
            ));
        }
        if r[0] != 0.0 {
            return Err(Error::InvalidProfile("table must start at r = 0".into()));
        }
        if r.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidProfile("table radii must increase strictly".into()));
        }
        if r.iter().chain(&g).chain(&dg).any(|v| !v.is_finite()) {
            return Err(Error::InvalidProfile("table contains non-finite values".into()));
        }
        Ok(Self { r, g, dg, source: None })
    }

    /// Reads `r,g,dg` rows; `#` lines are comments.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let (mut r, mut g, mut dg) = (Vec::new(), Vec::new(), Vec::new());
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let vals: std::result::Result<Vec<f64>, _> =
                line.split(',').map(|f| f.trim().parse::<f64>()).collect();
            match vals.as_deref() {
                Ok([a, b, c]) => {
                    r.push(*a);
                    g.push(*b);
                    dg.push(*c);
                }
                _ => {
                    return Err(Error::Syntax {
                        line: lineno + 1,
                        msg: "expected 'r,g,dg'".into(),
                    })
                }
            }
        }
        let mut table = Self::new(r, g, dg)?;
        table.source = Some(path.to_path_buf());
        Ok(table)
    }

    /// File the table was loaded from, if any.
    pub fn source(&self) -> Option<&Path> {
        self.source.as_deref()
    }

    fn eval(&self, x: f64) -> (f64, f64) {
        let last = self.r.len() - 1;
        if x >= self.r[last] {
            return (self.g[last] + self.dg[last] * (x - self.r[last]), self.dg[last]);
        }
        let seg = self.r.partition_point(|&ri| ri <= x).saturating_sub(1);
        let (x0, x1) = (self.r[seg], self.r[seg + 1]);
        let h = x1 - x0;
        let t = (x - x0) / h;
        let (t2, t3) = (t * t, t * t * t);
        let (h00, h10, h01, h11) = (2.0 * t3 - 3.0 * t2 + 1.0, t3 - 2.0 * t2 + t, -2.0 * t3 + 3.0 * t2, t3 - t2);
        let (g0, g1, m0, m1) = (self.g[seg], self.g[seg + 1], self.dg[seg], self.dg[seg + 1]);
        let val = h00 * g0 + h10 * h * m0 + h01 * g1 + h11 * h * m1;
        let d = ((6.0 * t2 - 6.0 * t) * g0
            + (3.0 * t2 - 4.0 * t + 1.0) * h * m0
            + (-6.0 * t2 + 6.0 * t) * g1
            + (3.0 * t2 - 2.0 * t) * h * m1)
            / h;
        (val, d)
    }

    /// Extent of the leading run of exact zeros in g.
    fn zero_prefix(&self) -> f64 {
        let mut extent = 0.0;
        for (r, g) in self.r.iter().zip(&self.g) {
            if *g != 0.0 {
                break;
            }
            extent = *r;
        }
        extent
    }

    pub fn rows(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.r.iter().zip(&self.g).zip(&self.dg).map(|((a, b), c)| (*a, *b, *c))
    }
}

/// The non-homogeneous part g of the speed factor.
#[derive(Debug, Clone, PartialEq)]
pub enum GSpec {
    Zero,
    /// r^{1+k alpha} exp(-(r - epsilon)^{-p}) for r > epsilon, zero below.
    Bump { epsilon: f64, p: f64 },
    /// r^{1+k alpha} exp(-r^{-p}).
    ExpFlat { p: f64 },
    /// r^l.
    Monomial { l: u32 },
    Tabulated(Table),
}

impl GSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            GSpec::Zero => "zero",
            GSpec::Bump { .. } => "bump",
            GSpec::ExpFlat { .. } => "expflat",
            GSpec::Monomial { .. } => "monomial",
            GSpec::Tabulated(_) => "table",
        }
    }
}

/// Critical (beta = 1 + k alpha) or supercritical regime.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// beta = 1 + k alpha: exponential normalization.
    Critical,
    /// beta > 1 + k alpha: power-law normalization.
    Supercritical,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Regime::Critical => write!(f, "beta = 1 + k alpha"),
            Regime::Supercritical => write!(f, "beta > 1 + k alpha"),
        }
    }
}

/// f(r) = r^beta + g(r) together with the flow exponents.
#[derive(Debug, Clone, PartialEq)]
pub struct SpeedProfile {
    n: usize,
    k: usize,
    alpha: f64,
    beta: f64,
    gamma: f64,
    g: GSpec,
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * (1.0 + a.abs().max(b.abs()))
}

impl SpeedProfile {
    /// Checks the structural constraints on (n, k, alpha, beta) and the g
    /// parameters. Admissibility of g for the regime is checked separately by
    /// [`SpeedProfile::check_admissible`].
    pub fn new(n: usize, k: usize, alpha: f64, beta: f64, g: GSpec) -> Result<Self> {
        if !(1..=2).contains(&n) {
            return Err(Error::UnsupportedDimension(n));
        }
        if k == 0 || k > n {
            return Err(Error::IndexOutOfRange { k, n });
        }
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidProfile("alpha must be positive".into()));
        }
        if k >= 2 && !(close(alpha, 1.0 / k as f64) || alpha >= 1.0) {
            return Err(Error::InvalidProfile("alpha must be 1/k or >= 1 for k >= 2".into()));
        }
        let ka = k as f64 * alpha;
        if !beta.is_finite() || (beta < 1.0 + ka && !close(beta, 1.0 + ka)) {
            return Err(Error::InvalidProfile(format!(
                "beta = {beta} must be at least 1 + k alpha = {}",
                1.0 + ka
            )));
        }
        match &g {
            GSpec::Bump { epsilon, p } if !(*epsilon > 0.0 && *p > 0.0) => {
                return Err(Error::InvalidProfile("bump needs epsilon > 0 and p > 0".into()))
            }
            GSpec::ExpFlat { p } if !(*p > 0.0) => {
                return Err(Error::InvalidProfile("expflat needs p > 0".into()))
            }
            _ => {}
        }
        Ok(Self {
            n,
            k,
            alpha,
            beta,
            gamma: binomial(n, k).powf(alpha),
            g,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn k(&self) -> usize {
        self.k
    }
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn beta(&self) -> f64 {
        self.beta
    }
    /// gamma = C(n, k)^alpha.
    pub fn gamma(&self) -> f64 {
        self.gamma
    }
    pub fn g(&self) -> &GSpec {
        &self.g
    }

    /// k alpha.
    pub fn k_alpha(&self) -> f64 {
        self.k as f64 * self.alpha
    }

    /// floor(beta), the bracket [beta].
    pub fn beta_floor(&self) -> f64 {
        self.beta.floor()
    }

    pub fn regime(&self) -> Regime {
        if close(self.beta, 1.0 + self.k_alpha()) {
            Regime::Critical
        } else {
            Regime::Supercritical
        }
    }

    /// beta - k alpha - 1 (zero in the critical regime).
    pub fn excess(&self) -> f64 {
        match self.regime() {
            Regime::Critical => 0.0,
            Regime::Supercritical => self.beta - self.k_alpha() - 1.0,
        }
    }

    /// (g(r), g'(r)).
    pub fn eval_g(&self, r: f64) -> (f64, f64) {
        let ka = self.k_alpha();
        match &self.g {
            GSpec::Zero => (0.0, 0.0),
            GSpec::Bump { epsilon, p } => bump(r, *epsilon, *p, ka),
            GSpec::ExpFlat { p } => bump(r, 0.0, *p, ka),
            GSpec::Monomial { l } => {
                let l = *l as i32;
                (r.powi(l), l as f64 * r.powi(l - 1))
            }
            GSpec::Tabulated(t) => t.eval(r),
        }
    }

    /// (f(r), f'(r)).
    pub fn eval_f(&self, r: f64) -> (f64, f64) {
        let (g, dg) = self.eval_g(r);
        (r.powf(self.beta) + g, self.beta * r.powf(self.beta - 1.0) + dg)
    }

    /// Runs the validator matching the profile's regime on the default sample
    /// set and converts a failing report into an error.
    pub fn check_admissible(&self) -> Result<()> {
        let samples = default_samples();
        let report = match self.regime() {
            Regime::Critical => validate_critical(self, &samples),
            Regime::Supercritical => validate_supercritical(self, &samples),
        };
        if report.ok {
            Ok(())
        } else {
            let names: Vec<String> = report
                .failures
                .iter()
                .map(|f| format!("{} (worst {:.3e} at r = {:.3e})", f.condition, f.worst, f.location))
                .collect();
            Err(Error::InvalidProfile(format!(
                "g.kind = {} is not admissible for {}: {}",
                self.g.kind(),
                self.regime(),
                names.join(", ")
            )))
        }
    }
}

/// Keys accepted in a profile section.
pub const PROFILE_KEYS: [&str; 9] = [
    "n", "k", "alpha", "beta", "g.kind", "g.epsilon", "g.p", "g.l", "g.table_path",
];

impl SpeedProfile {
    /// Profile as `key = value` pairs in [`PROFILE_KEYS`] order.
    pub fn to_keys(&self) -> Vec<(&'static str, String)> {
        let mut out = vec![
            ("n", self.n.to_string()),
            ("k", self.k.to_string()),
            ("alpha", self.alpha.to_string()),
            ("beta", self.beta.to_string()),
            ("g.kind", self.g.kind().to_string()),
        ];
        match &self.g {
            GSpec::Zero => {}
            GSpec::Bump { epsilon, p } => {
                out.push(("g.epsilon", epsilon.to_string()));
                out.push(("g.p", p.to_string()));
            }
            GSpec::ExpFlat { p } => out.push(("g.p", p.to_string())),
            GSpec::Monomial { l } => out.push(("g.l", l.to_string())),
            GSpec::Tabulated(t) => {
                let path = t.source().map(|p| p.display().to_string()).unwrap_or_default();
                out.push(("g.table_path", path));
            }
        }
        out
    }

    /// Builds a profile from key lookups, collecting every problem with the
    /// offending key named. Does not check regime admissibility.
    pub fn from_keys<'a>(get: impl Fn(&str) -> Option<&'a str>) -> std::result::Result<Self, Vec<String>> {
        let mut errs = Vec::new();
        fn num<T: std::str::FromStr>(key: &str, v: Option<&str>, errs: &mut Vec<String>) -> Option<T> {
            match v {
                None => {
                    errs.push(format!("{key}: missing"));
                    None
                }
                Some(s) => s.trim().parse().map_err(|_| errs.push(format!("{key}: cannot parse '{s}'"))).ok(),
            }
        }
        let n: Option<usize> = num("n", get("n"), &mut errs);
        let k: Option<usize> = num("k", get("k"), &mut errs);
        let alpha: Option<f64> = num("alpha", get("alpha"), &mut errs);
        let beta: Option<f64> = num("beta", get("beta"), &mut errs);
        let kind = get("g.kind").unwrap_or("zero").trim();
        let allowed: &[&str] = match kind {
            "zero" => &[],
            "bump" => &["g.epsilon", "g.p"],
            "expflat" => &["g.p"],
            "monomial" => &["g.l"],
            "table" => &["g.table_path"],
            other => {
                errs.push(format!("g.kind: unknown kind '{other}' (zero|bump|expflat|monomial|table)"));
                &[]
            }
        };
        for key in ["g.epsilon", "g.p", "g.l", "g.table_path"] {
            if get(key).is_some() && !allowed.contains(&key) {
                errs.push(format!("{key}: does not apply to g.kind = {kind}"));
            }
        }
        let g = match kind {
            "zero" => Some(GSpec::Zero),
            "bump" => {
                let e = num("g.epsilon", get("g.epsilon"), &mut errs);
                let p = num("g.p", get("g.p"), &mut errs);
                e.zip(p).map(|(epsilon, p)| GSpec::Bump { epsilon, p })
            }
            "expflat" => num("g.p", get("g.p"), &mut errs).map(|p| GSpec::ExpFlat { p }),
            "monomial" => num("g.l", get("g.l"), &mut errs).map(|l| GSpec::Monomial { l }),
            "table" => match get("g.table_path") {
                Some(path) => Table::load(Path::new(path.trim()))
                    .map_err(|e| errs.push(format!("g.table_path: {e}")))
                    .ok()
                    .map(GSpec::Tabulated),
                None => {
                    errs.push("g.table_path: missing".into());
                    None
                }
            },
            _ => None,
        };
        if !errs.is_empty() {
            return Err(errs);
        }
        let (n, k, alpha, beta, g) = (n.unwrap(), k.unwrap(), alpha.unwrap(), beta.unwrap(), g.unwrap());
        SpeedProfile::new(n, k, alpha, beta, g).map_err(|e| {
            let msg = e.to_string();
            let key = match &e {
                Error::IndexOutOfRange { .. } => "k",
                Error::UnsupportedDimension(_) => "n",
                Error::InvalidProfile(m) if m.contains("alpha must") => "alpha",
                Error::InvalidProfile(m) if m.contains("beta") => "beta",
                _ => "g.kind",
            };
            vec![format!("{key}: {msg}")]
        })
    }
}

/// r^{1+ka} exp(-(r - eps)^{-p}) and its derivative; zero for r <= eps.
fn bump(r: f64, eps: f64, p: f64, ka: f64) -> (f64, f64) {
    if r <= eps {
        return (0.0, 0.0);
    }
    let x = r - eps;
    let e = x.powf(-p);
    if e > EXP_FLUSH {
        return (0.0, 0.0);
    }
    let w = (-e).exp();
    let g = r.powf(1.0 + ka) * w;
    let dg = r.powf(ka) * w * ((1.0 + ka) + p * r * x.powf(-p - 1.0));
    (g, dg)
}

/// Normalization factor lambda >= 1 paired with a profile.
#[derive(Debug, Clone, Copy)]
pub struct ScaledSpeedContext<'a> {
    profile: &'a SpeedProfile,
    log_lambda: f64,
}

/// The rescaled speed pieces at one radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledSpeed {
    /// lambda^beta g(r / lambda)
    pub g: f64,
    /// lambda^{beta-1} g'(r / lambda)
    pub dg: f64,
    /// lambda^beta f(r / lambda) = r^beta + lambda^beta g(r / lambda)
    pub f: f64,
    /// lambda^{beta-1} f'(r / lambda)
    pub df: f64,
}

impl<'a> ScaledSpeedContext<'a> {
    /// Context from log(lambda) >= 0; avoids forming huge lambda values.
    pub fn from_log_lambda(profile: &'a SpeedProfile, log_lambda: f64) -> Self {
        debug_assert!(log_lambda >= 0.0);
        Self { profile, log_lambda }
    }

    pub fn new(profile: &'a SpeedProfile, lambda: f64) -> Result<Self> {
        if !(lambda >= 1.0) {
            return Err(Error::InvalidProfile(format!("lambda = {lambda} must be >= 1")));
        }
        Ok(Self::from_log_lambda(profile, lambda.ln()))
    }

    pub fn lambda(&self) -> f64 {
        self.log_lambda.exp()
    }

    pub fn log_lambda(&self) -> f64 {
        self.log_lambda
    }

    pub fn profile(&self) -> &SpeedProfile {
        self.profile
    }

    pub fn eval(&self, r: f64) -> Result<ScaledSpeed> {
        let prof = self.profile;
        let beta = prof.beta;
        let ka = prof.k_alpha();
        let ll = self.log_lambda;
        let (g, dg) = match &prof.g {
            GSpec::Zero => (0.0, 0.0),
            GSpec::Monomial { l } => {
                let lf = *l as f64;
                let c = ((beta - lf) * ll).exp();
                (c * r.powi(*l as i32), lf * c * r.powi(*l as i32 - 1))
            }
            GSpec::Bump { epsilon, p } => scaled_bump(r, *epsilon, *p, ka, beta, ll),
            GSpec::ExpFlat { p } => scaled_bump(r, 0.0, *p, ka, beta, ll),
            GSpec::Tabulated(t) => {
                let lambda = ll.exp();
                if lambda > LAMBDA_CAP {
                    return Err(Error::ScaleOverflow { lambda, r });
                }
                let (gv, dgv) = t.eval(r / lambda);
                let (gs, dgs) = (lambda.powf(beta) * gv, lambda.powf(beta - 1.0) * dgv);
                if !(gs.is_finite() && dgs.is_finite()) {
                    return Err(Error::ScaleOverflow { lambda, r });
                }
                (gs, dgs)
            }
        };
        Ok(ScaledSpeed {
            g,
            dg,
            f: r.powf(beta) + g,
            df: beta * r.powf(beta - 1.0) + dg,
        })
    }
}

/// Scaled bump evaluated in log space: lambda^{beta-1-ka} r^{1+ka} exp(-(s-eps)^{-p}).
fn scaled_bump(r: f64, eps: f64, p: f64, ka: f64, beta: f64, ll: f64) -> (f64, f64) {
    let s = r * (-ll).exp();
    if s <= eps {
        return (0.0, 0.0);
    }
    let x = s - eps;
    let e = x.powf(-p);
    if e > EXP_FLUSH {
        return (0.0, 0.0);
    }
    let base = (beta - 1.0 - ka) * ll - e;
    let g = (base + (1.0 + ka) * r.ln()).exp();
    let dg = (base + ka * r.ln()).exp() * ((1.0 + ka) + p * s * x.powf(-p - 1.0));
    (g, dg)
}

/// Admissibility conditions on g.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Condition {
    /// g >= 0.
    Nonnegative,
    /// g vanishes on some interval [0, epsilon].
    VanishesNearZero,
    /// (1 + k alpha) g(r) / r <= g'(r).
    GrowthBound,
    /// g(0) = g'(0) = ... = g^{([beta])}(0) = 0.
    FlatAtZero,
    /// The profile's beta belongs to the other regime.
    WrongRegime,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Condition::Nonnegative => "g >= 0",
            Condition::VanishesNearZero => "g == 0 on [0, epsilon]",
            Condition::GrowthBound => "(1 + k alpha) g / r <= g'",
            Condition::FlatAtZero => "g flat to order [beta] at 0",
            Condition::WrongRegime => "regime mismatch",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionFailure {
    pub condition: Condition,
    /// Largest signed excess over the allowed bound (positive = violated).
    pub worst: f64,
    pub location: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub ok: bool,
    /// Worst signed excess of the growth condition over all samples
    /// (negative means satisfied with room to spare).
    pub worst_violation: f64,
    pub location: f64,
    pub failures: Vec<ConditionFailure>,
}

impl ValidationReport {
    pub fn failed(&self, c: Condition) -> bool {
        self.failures.iter().any(|f| f.condition == c)
    }
}

/// 600 evenly spaced radii on [0.01, 3].
pub fn default_samples() -> Vec<f64> {
    let n = 600;
    (0..n).map(|i| 0.01 + (3.0 - 0.01) * i as f64 / (n - 1) as f64).collect()
}

struct Accum {
    failures: Vec<ConditionFailure>,
}

impl Accum {
    fn check(&mut self, cond: Condition, excess: f64, at: f64) {
        if excess > 0.0 {
            match self.failures.iter_mut().find(|f| f.condition == cond) {
                Some(f) if f.worst < excess => {
                    f.worst = excess;
                    f.location = at;
                }
                Some(_) => {}
                None => self.failures.push(ConditionFailure {
                    condition: cond,
                    worst: excess,
                    location: at,
                }),
            }
        }
    }
}

/// Checks g >= 0 and the growth bound; returns the worst growth excess.
fn common_checks(profile: &SpeedProfile, samples: &[f64], acc: &mut Accum) -> (f64, f64) {
    let c = 1.0 + profile.k_alpha();
    let mut worst = f64::NEG_INFINITY;
    let mut at = f64::NAN;
    for &r in samples.iter().filter(|&&r| r > 0.0) {
        let (g, dg) = profile.eval_g(r);
        acc.check(Condition::Nonnegative, -g, r);
        let excess = c * g / r - dg - VALIDATION_TOL * (1.0 + dg.abs());
        if excess > worst {
            worst = excess;
            at = r;
        }
        acc.check(Condition::GrowthBound, excess, r);
    }
    (worst, at)
}

fn finish(acc: Accum, worst: (f64, f64)) -> ValidationReport {
    ValidationReport {
        ok: acc.failures.is_empty(),
        worst_violation: worst.0,
        location: worst.1,
        failures: acc.failures,
    }
}

/// Hypotheses for the beta = 1 + k alpha regime.
pub fn validate_critical(profile: &SpeedProfile, samples: &[f64]) -> ValidationReport {
    let mut acc = Accum { failures: Vec::new() };
    if profile.regime() != Regime::Critical {
        acc.check(Condition::WrongRegime, profile.beta - 1.0 - profile.k_alpha(), 0.0);
    }
    let worst = common_checks(profile, samples, &mut acc);
    let flat = match &profile.g {
        GSpec::Zero => Some(f64::INFINITY),
        GSpec::Bump { epsilon, .. } => Some(*epsilon),
        GSpec::Tabulated(t) if t.zero_prefix() > 0.0 => Some(t.zero_prefix()),
        _ => None,
    };
    match flat {
        Some(eps) => {
            for &r in samples.iter().filter(|&&r| r <= eps) {
                acc.check(Condition::VanishesNearZero, profile.eval_g(r).0.abs(), r);
            }
            acc.check(Condition::VanishesNearZero, profile.eval_g(0.0).0.abs(), 0.0);
        }
        None => {
            // no zero interval: report g at the smallest positive sample
            let r = samples.iter().copied().filter(|&r| r > 0.0).fold(f64::INFINITY, f64::min);
            let g = profile.eval_g(r).0;
            acc.check(Condition::VanishesNearZero, g.max(f64::MIN_POSITIVE), r);
        }
    }
    finish(acc, worst)
}

/// Upper end of the flatness ratio test.
const FLAT_TOP: f64 = 0.1;

/// Hypotheses for the beta > 1 + k alpha regime.
///
/// Flatness is tested through the ratio q(r) = g(r) / r^{[beta]+1}: its bound
/// K is fitted on the decade just below `FLAT_TOP` and must continue to hold
/// on the two decades below that.
pub fn validate_supercritical(profile: &SpeedProfile, samples: &[f64]) -> ValidationReport {
    let mut acc = Accum { failures: Vec::new() };
    if profile.regime() != Regime::Supercritical {
        acc.check(Condition::WrongRegime, 1.0, 0.0);
    }
    let worst = common_checks(profile, samples, &mut acc);
    acc.check(Condition::FlatAtZero, profile.eval_g(0.0).0.abs(), 0.0);

    let m = profile.beta_floor() as i32 + 1;
    let ratio = |r: f64| profile.eval_g(r).0 / r.powi(m);
    let decade = |top: f64| (0..50).map(move |i| top * 10f64.powf(-(i as f64) / 49.0));
    let fit = decade(FLAT_TOP).map(ratio).fold(0.0, f64::max);
    for top in [FLAT_TOP / 10.0, FLAT_TOP / 100.0] {
        for r in decade(top) {
            let q = ratio(r);
            let allowed = fit * (1.0 + VALIDATION_TOL) + f64::MIN_POSITIVE;
            let excess = if fit > 0.0 { q / fit - 1.0 - VALIDATION_TOL } else { q - allowed };
            acc.check(Condition::FlatAtZero, excess, r);
        }
    }
    finish(acc, worst)
}
