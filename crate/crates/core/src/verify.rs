//! Self-check suites: algebraic identities of sigma_k, agreement of the graph
//! curvature with the embedding oracle, the sphere ODE closed forms and the
//! profile validators.

use std::f64::consts::FRAC_PI_2;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::flow::StepControl;
use crate::ode;
use crate::speed::{default_samples, validate_critical, validate_supercritical, Condition, GSpec, SpeedProfile};
use crate::sphere::{embedding_oracle, weingarten, RadialGraph, SphericalGrid};
use crate::symfunc::{binomial, in_gamma_k_plus, sigma_ext, sigma_k_of_matrix, sigma_k_partials, CurvatureVector, SymmetricMatrix};

pub const SEED: u64 = 0x5eed_a15f;

/// One measured property.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub samples: usize,
    /// Worst observed violation (or error, for comparisons).
    pub worst: f64,
    pub tol: f64,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn below(name: impl Into<String>, samples: usize, worst: f64, tol: f64) -> Self {
        Self {
            name: name.into(),
            samples,
            worst,
            tol,
            passed: worst <= tol,
            detail: String::new(),
        }
    }

    fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<4} {:<34} n={:<6} worst={:<11.3e} tol={:.1e}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.samples,
            self.worst,
            self.tol
        )?;
        if !self.detail.is_empty() {
            write!(f, "  {}", self.detail)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Symfunc,
    Oracle,
    Ode,
    Profiles,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Symfunc, Suite::Oracle, Suite::Ode, Suite::Profiles];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Symfunc => "symfunc",
            Suite::Oracle => "oracle",
            Suite::Ode => "ode",
            Suite::Profiles => "profiles",
        }
    }

    pub fn parse(s: &str) -> Option<Vec<Suite>> {
        if s == "all" {
            return Some(Self::ALL.to_vec());
        }
        Self::ALL.iter().copied().find(|x| x.name() == s).map(|x| vec![x])
    }

    pub fn run(self) -> SuiteReport {
        let checks = match self {
            Suite::Symfunc => symfunc_suite(10_000, SEED),
            Suite::Oracle => oracle_suite(SEED),
            Suite::Ode => ode_suite(),
            Suite::Profiles => profile_suite(),
        };
        SuiteReport { suite: self, checks }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub suite: Suite,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[{}] {}", self.suite.name(), if self.passed() { "pass" } else { "FAIL" })?;
        for c in &self.checks {
            writeln!(f, "  {c}")?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------- symfunc

/// d sigma_k / d kappa_i provider; swapped out by mutation tests.
pub type PartialsFn = fn(&CurvatureVector, usize) -> Result<Vec<f64>>;

/// Rejection sample from Gamma_k^+ in dimension n, entries in [-1, 3).
pub fn sample_cone(rng: &mut impl Rng, n: usize, k: usize) -> CurvatureVector {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..3.0)).collect();
        let kv = CurvatureVector::new(&v).expect("n <= 3");
        if in_gamma_k_plus(&kv, k).inside {
            return kv;
        }
    }
}

/// Relative violation |a - b| / max(scale, tiny).
fn rel(a: f64, b: f64, scale: f64) -> f64 {
    (a - b).abs() / scale.max(1e-300)
}

/// All (n, k) pairs with n <= 3.
fn pairs() -> impl Iterator<Item = (usize, usize)> {
    (1..=3).flat_map(|n| (1..=n).map(move |k| (n, k)))
}

pub fn symfunc_suite(samples: usize, seed: u64) -> Vec<Check> {
    symfunc_suite_with(sigma_k_partials, samples, seed)
}

/// Identity checks using `partials` for d sigma_k / d kappa_i. Each identity
/// sees at least `samples` cone points spread over all (n, k) with n <= 3.
pub fn symfunc_suite_with(partials: PartialsFn, samples: usize, seed: u64) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let per = samples.div_ceil(6);
    let tol = 1e-10;
    let (mut euler, mut quad, mut largest, mut count) = (0.0f64, 0.0f64, 0.0f64, 0);
    let (mut nm_upper, mut nm_lower, mut nm_count) = (f64::NEG_INFINITY, f64::NEG_INFINITY, 0);
    for (n, k) in pairs() {
        for _ in 0..per {
            let kv = sample_cone(&mut rng, n, k);
            let kap = kv.as_slice();
            let p = partials(&kv, k).expect("k <= n");
            let sk = sigma_ext(&kv, k);

            let lhs: f64 = kap.iter().zip(&p).map(|(x, d)| x * d).sum();
            let scale: f64 = kap.iter().zip(&p).map(|(x, d)| (x * d).abs()).sum::<f64>() + k as f64 * sk.abs();
            euler = euler.max(rel(lhs, k as f64 * sk, scale));

            let lhs: f64 = kap.iter().zip(&p).map(|(x, d)| x * x * d).sum();
            let rhs = sigma_ext(&kv, 1) * sk - (k + 1) as f64 * sigma_ext(&kv, k + 1);
            let scale: f64 = kap.iter().zip(&p).map(|(x, d)| (x * x * d).abs()).sum::<f64>()
                + (sigma_ext(&kv, 1) * sk).abs()
                + ((k + 1) as f64 * sigma_ext(&kv, k + 1)).abs();
            quad = quad.max(rel(lhs, rhs, scale));

            let sorted = kv.sorted_desc();
            let ps = partials(&sorted, k).expect("k <= n");
            let k1 = sorted.as_slice()[0];
            let bound = k as f64 / n as f64 * sk;
            largest = largest.max((bound - ps[0] * k1) / (ps[0] * k1).abs().max(bound.abs()).max(1e-300));
            count += 1;

            if k < n {
                let kv = sample_cone(&mut rng, n, k + 1);
                let sk = sigma_ext(&kv, k);
                let norm = (sk / binomial(n, k)).max(0.0);
                let upper = binomial(n, k + 1) * norm.powf((k + 1) as f64 / k as f64);
                let s1 = sigma_ext(&kv, 1);
                let s_next = sigma_ext(&kv, k + 1);
                nm_upper = nm_upper.max((s_next - upper) / upper.abs().max(1e-300));
                let lower = n as f64 * norm.powf(1.0 / k as f64);
                nm_lower = nm_lower.max((lower - s1) / s1.abs().max(1e-300));
                nm_count += 1;
            }
        }
    }
    // each NM inequality draws separately to reach the requested sample count
    while nm_count < samples {
        let (n, k) = [(2, 1), (3, 1), (3, 2)][nm_count % 3];
        let kv = sample_cone(&mut rng, n, k + 1);
        let norm = (sigma_ext(&kv, k) / binomial(n, k)).max(0.0);
        let upper = binomial(n, k + 1) * norm.powf((k + 1) as f64 / k as f64);
        nm_upper = nm_upper.max((sigma_ext(&kv, k + 1) - upper) / upper.abs().max(1e-300));
        let s1 = sigma_ext(&kv, 1);
        nm_lower = nm_lower.max((n as f64 * norm.powf(1.0 / k as f64) - s1) / s1.abs().max(1e-300));
        nm_count += 1;
    }

    let mut matrix = 0.0f64;
    for _ in 0..per {
        let (a, b, c) = (rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let m = SymmetricMatrix::new2([[a, b], [b, c]]).expect("symmetric");
        let (s1, _) = sigma_k_of_matrix(&m, 1).expect("k = 1");
        let (s2, _) = sigma_k_of_matrix(&m, 2).expect("k = 2");
        matrix = matrix.max(rel(s1, a + c, a.abs() + c.abs()));
        matrix = matrix.max(rel(s2, a * c - b * b, (a * c).abs() + b * b));
    }

    vec![
        Check::below("euler identity", count, euler, tol),
        Check::below("quadratic identity", count, quad, tol),
        Check::below("newton-maclaurin upper", nm_count, nm_upper.max(0.0), tol),
        Check::below("newton-maclaurin lower", nm_count, nm_lower.max(0.0), tol),
        Check::below("largest-curvature bound", count, largest.max(0.0), tol),
        Check::below("matrix sigma vs trace/det", per, matrix, tol),
    ]
}

// ---------------------------------------------------------------- oracle

/// Smooth positive radius r = exp(q(x)) with q a random quadratic in the unit
/// direction x; smooth on the whole sphere by construction.
#[derive(Debug, Clone, Copy)]
pub struct RandomStar {
    lin: [f64; 3],
    quad: [[f64; 3]; 3],
}

impl RandomStar {
    pub fn new(rng: &mut impl Rng, amplitude: f64) -> Self {
        let mut s = Self {
            lin: [0.0; 3],
            quad: [[0.0; 3]; 3],
        };
        for v in &mut s.lin {
            *v = rng.gen_range(-amplitude..amplitude);
        }
        for i in 0..3 {
            for j in i..3 {
                let v = rng.gen_range(-amplitude..amplitude);
                s.quad[i][j] = v;
                s.quad[j][i] = v;
            }
        }
        s
    }

    pub fn radius(&self, x: [f64; 3]) -> f64 {
        let mut q = 0.0;
        for i in 0..3 {
            q += self.lin[i] * x[i];
            for j in 0..3 {
                q += self.quad[i][j] * x[i] * x[j];
            }
        }
        q.exp()
    }

    pub fn graph(&self, grid: SphericalGrid) -> Result<RadialGraph> {
        RadialGraph::from_radius(grid, |t, p| self.radius(grid.direction(t, p)))
    }
}

/// Max over nodes of the largest principal curvature discrepancy between the
/// graph formulas and the embedding oracle, restricted to |theta - pi/2| < band.
pub fn oracle_discrepancy(graph: &RadialGraph, band: f64) -> Result<f64> {
    let a = weingarten(graph);
    let b = embedding_oracle(graph)?;
    let grid = graph.grid();
    let mut worst: f64 = 0.0;
    for (idx, (x, y)) in a.nodes.iter().zip(&b.nodes).enumerate() {
        let (t, _) = grid.coords(idx);
        if grid.dim() == 2 && (t - FRAC_PI_2).abs() >= band {
            continue;
        }
        for (p, q) in x.kappa.as_slice().iter().zip(y.kappa.as_slice()) {
            worst = worst.max((p - q).abs());
        }
    }
    Ok(worst)
}

/// Least-squares slope of -log2(error) against log2(resolution).
pub fn refinement_slope(errors: &[f64]) -> f64 {
    let n = errors.len() as f64;
    let xs: Vec<f64> = (0..errors.len()).map(|i| i as f64).collect();
    let ys: Vec<f64> = errors.iter().map(|e| -e.max(1e-300).log2()).collect();
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let num: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    num / den
}

/// Grids for three successive doublings in dimension n.
pub fn doubling_grids(n: usize) -> Vec<SphericalGrid> {
    (0..4)
        .map(|i| {
            let s = 1usize << i;
            match n {
                1 => SphericalGrid::circle(32 * s),
                _ => SphericalGrid::sphere(16 * s, 32 * s),
            }
            .expect("valid grid")
        })
        .collect()
}

/// Latitude band for oracle comparisons on S^2.
pub const ORACLE_BAND: f64 = 1.2;

/// Curvature of the ellipse x = a cos t, y = b sin t at polar angle theta.
pub fn ellipse_curvature(a: f64, b: f64, theta: f64) -> f64 {
    let t = (theta.sin() / b).atan2(theta.cos() / a);
    a * b / (a * a * t.sin().powi(2) + b * b * t.cos().powi(2)).powf(1.5)
}

pub fn ellipse_radius(a: f64, b: f64, theta: f64) -> f64 {
    a * b / ((b * theta.cos()).powi(2) + (a * theta.sin()).powi(2)).sqrt()
}

/// Max curvature error of the graph formulas and of the oracle against the
/// analytic ellipse curvature on an N-node circle grid.
pub fn ellipse_errors(a: f64, b: f64, nodes: usize) -> Result<(f64, f64)> {
    let grid = SphericalGrid::circle(nodes)?;
    let g = RadialGraph::from_radius(grid, |t, _| ellipse_radius(a, b, t))?;
    let w = weingarten(&g);
    let o = embedding_oracle(&g)?;
    let mut err = (0.0f64, 0.0f64);
    for idx in 0..grid.len() {
        let exact = ellipse_curvature(a, b, grid.coords(idx).0);
        err.0 = err.0.max((w.nodes[idx].kappa.as_slice()[0] - exact).abs());
        err.1 = err.1.max((o.nodes[idx].kappa.as_slice()[0] - exact).abs());
    }
    Ok(err)
}

pub fn oracle_suite(seed: u64) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::new();
    for n in [1, 2] {
        let mut worst_slope = f64::INFINITY;
        let mut detail = String::new();
        for _ in 0..5 {
            let star = RandomStar::new(&mut rng, 0.15);
            let errs: Vec<f64> = doubling_grids(n)
                .into_iter()
                .map(|g| star.graph(g).and_then(|gr| oracle_discrepancy(&gr, ORACLE_BAND)))
                .collect::<Result<_>>()
                .unwrap_or_else(|_| vec![f64::NAN; 4]);
            let slope = refinement_slope(&errs);
            if !(slope >= worst_slope) {
                worst_slope = slope;
                detail = format!("errors {:.2e} .. {:.2e}", errs[0], errs[3]);
            }
        }
        // reported as a deficit below the required slope
        let mut c = Check::below(format!("refinement slope n={n}"), 5, 1.8 - worst_slope, 0.0);
        c.passed = worst_slope >= 1.8;
        c.worst = worst_slope;
        c.tol = 1.8;
        checks.push(c.with_detail(format!("min slope {worst_slope:.2} (need >= 1.8), {detail}")));
    }
    match ellipse_errors(2.0, 1.0, 512) {
        Ok((w, o)) => {
            checks.push(Check::below("ellipse a=2 b=1 graph formulas", 512, w, 5e-3));
            checks.push(Check::below("ellipse a=2 b=1 embedding oracle", 512, o, 5e-3));
        }
        Err(e) => checks.push(Check::below("ellipse a=2 b=1", 512, f64::INFINITY, 5e-3).with_detail(e.to_string())),
    }
    checks
}

// ---------------------------------------------------------------- ode

fn prof(beta: f64, g: GSpec) -> SpeedProfile {
    SpeedProfile::new(1, 1, 1.0, beta, g).expect("valid profile")
}

/// r1 against an RK4 integration of its own ODE, at several times.
pub fn r1_vs_rk4(beta: f64, c_bound: f64, r0: f64) -> f64 {
    let p = prof(beta, GSpec::Zero);
    let dt = 1e-4;
    let mut r = r0;
    let mut worst: f64 = 0.0;
    let mut tau = 0.0;
    for step in 1..=20_000 {
        let f = |r: f64, t: f64| ode::r1_ode_rhs(&p, c_bound, r, t);
        let k1 = f(r, tau);
        let k2 = f(r + 0.5 * dt * k1, tau + 0.5 * dt);
        let k3 = f(r + 0.5 * dt * k2, tau + 0.5 * dt);
        let k4 = f(r + dt * k3, tau + dt);
        r += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        tau = step as f64 * dt;
        if step % 2_000 == 0 {
            worst = worst.max((ode::closed_form_r1(&p, r0, c_bound, tau) - r).abs());
        }
    }
    worst
}

/// Sandwich r1 <= r <= r2 along an RK4 sphere trajectory with Monomial g.
pub fn sandwich_excess(beta: f64, r0: f64, tau_end: f64) -> f64 {
    let l = beta.floor() as u32 + 1;
    let p = prof(beta, GSpec::Monomial { l });
    let dt = 1e-3;
    let steps = (tau_end / dt).round() as usize;
    let mut traj = vec![(0.0, r0)];
    let mut phi = r0.ln();
    for i in 0..steps {
        phi = ode::ode_step(&p, phi, i as f64 * dt, dt);
        traj.push(((i + 1) as f64 * dt, phi.exp()));
    }
    let c = ode::c_bound_along(&p, &traj);
    let tol = 1e-9;
    traj.iter()
        .map(|&(t, r)| {
            let lo = ode::closed_form_r1(&p, r0, c, t);
            let hi = ode::closed_form_r2(&p, r0, t);
            (lo - tol - r).max(r - hi - tol)
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

pub fn ode_suite() -> Vec<Check> {
    let mut checks = Vec::new();
    let p3 = prof(3.0, GSpec::Zero);
    let r2 = (ode::closed_form_r2(&p3, 2.0, 2f64.ln()) - 4.0 / 3.0).abs();
    checks.push(Check::below("r2(log 2) = 4/3", 1, r2, 1e-14));

    let mut reduce: f64 = 0.0;
    let mut limit: f64 = 0.0;
    for beta in [3.0, 3.5, 4.25] {
        let p = prof(beta, GSpec::Zero);
        for t in [0.0, 0.4, 1.5, 6.0] {
            let b = ode::closed_form_r2(&p, 1.6, t);
            reduce = reduce.max((ode::closed_form_r1(&p, 1.6, 0.0, t) - b).abs() / b);
        }
        limit = limit.max((ode::closed_form_r1(&p, 1.6, 0.7, 1e3) - 1.0).abs());
        limit = limit.max((ode::closed_form_r2(&p, 1.6, 1e3) - 1.0).abs());
    }
    checks.push(Check::below("r1 with C=0 equals r2", 12, reduce, 1e-13));
    checks.push(Check::below("r1, r2 -> 1 at tau = 1e3", 6, limit, 1e-6));

    let degenerate = r1_vs_rk4(3.0, 1.0, 2.0);
    checks.push(Check::below("r1 secular branch vs RK4", 10, degenerate, 1e-8));
    let generic = r1_vs_rk4(3.5, 1.0, 2.0);
    checks.push(Check::below("r1 generic branch vs RK4", 10, generic, 1e-8));

    let sandwich = sandwich_excess(3.0, 1.5, 3.0).max(sandwich_excess(3.5, 1.5, 3.0));
    checks.push(Check::below("sandwich r1 <= r <= r2", 2, sandwich.max(0.0), 0.0));

    let grid = SphericalGrid::circle(256).expect("grid");
    let control = StepControl::default();
    let p2 = prof(2.0, GSpec::Zero);
    match ode::pde_vs_ode_check(&p2, 1.3, 0.05, grid, &control) {
        Ok(c) => {
            checks.push(Check::below("pde fixed point r0=1.3", c.steps as usize, c.max_rel_deviation, 1e-10));
        }
        Err(e) => checks.push(Check::below("pde fixed point r0=1.3", 0, f64::INFINITY, 1e-10).with_detail(e.to_string())),
    }
    match ode::pde_vs_ode_check(&p3, 2.0, 2f64.ln(), grid, &control) {
        Ok(c) => {
            checks.push(Check::below("pde vs r2 closed form", c.steps as usize, c.max_rel_deviation, 1e-4));
            checks.push(Check::below("pde sphere non-uniformity", c.steps as usize, c.max_nonuniformity, 1e-8));
        }
        Err(e) => checks.push(Check::below("pde vs r2 closed form", 0, f64::INFINITY, 1e-4).with_detail(e.to_string())),
    }
    checks
}

// ---------------------------------------------------------------- profiles

/// A profile with the validator outcome it should produce.
#[derive(Debug, Clone)]
pub struct ProfileCase {
    pub label: &'static str,
    pub profile: SpeedProfile,
    /// None: must pass; Some(c): must fail, with c among the failures.
    pub expect_failure: Option<Condition>,
}

pub fn profile_cases() -> Vec<ProfileCase> {
    let crit = |g| prof(2.0, g);
    let sup = |g| prof(3.0, g);
    let case = |label, profile, expect_failure| ProfileCase {
        label,
        profile,
        expect_failure,
    };
    vec![
        case("zero", crit(GSpec::Zero), None),
        case("bump eps=0.5 p=1", crit(GSpec::Bump { epsilon: 0.5, p: 1.0 }), None),
        case("bump eps=0.5 p=2", crit(GSpec::Bump { epsilon: 0.5, p: 2.0 }), None),
        case("expflat p=1", sup(GSpec::ExpFlat { p: 1.0 }), None),
        case("expflat p=2", sup(GSpec::ExpFlat { p: 2.0 }), None),
        case("monomial l=[beta]+1", sup(GSpec::Monomial { l: 4 }), None),
        case("g=r", crit(GSpec::Monomial { l: 1 }), Some(Condition::VanishesNearZero)),
        case("monomial l=[beta]", sup(GSpec::Monomial { l: 3 }), Some(Condition::FlatAtZero)),
    ]
}

pub fn profile_suite() -> Vec<Check> {
    let samples = default_samples();
    profile_cases()
        .into_iter()
        .map(|case| {
            let report = match case.profile.regime() {
                crate::speed::Regime::Critical => validate_critical(&case.profile, &samples),
                crate::speed::Regime::Supercritical => validate_supercritical(&case.profile, &samples),
            };
            let failed: Vec<String> = report.failures.iter().map(|f| f.condition.to_string()).collect();
            let ok = match case.expect_failure {
                None => report.ok,
                Some(c) => !report.ok && report.failed(c),
            };
            let expected = match case.expect_failure {
                None => "expect pass".to_string(),
                Some(c) => format!("expect fail on {c}"),
            };
            let mut detail = format!("{expected}; growth margin {:.3e} at r={:.3}", report.worst_violation, report.location);
            if !failed.is_empty() {
                detail.push_str(&format!("; failed: {}", failed.join(", ")));
            }
            Check {
                name: format!("profile {}", case.label),
                samples: samples.len(),
                worst: report.worst_violation,
                tol: 0.0,
                passed: ok,
                detail,
            }
        })
        .collect()
}
