//! Normalized flow: time maps, state, explicit integration and checkpoints.

mod checkpoint;
mod engine;
mod filter;

pub use checkpoint::{load_checkpoint, read_checkpoint, save_checkpoint, write_checkpoint};
pub use engine::{rhs, run, step, Integrator, RunOutcome, StopReason};
pub use filter::PoleFilter;

use crate::error::Result;
use crate::speed::{Regime, ScaledSpeedContext, SpeedProfile};
use crate::sphere::RadialGraph;
use crate::symfunc::CONE_EPS;

/// lambda(t) and tau(t) of the normalization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeMaps {
    pub lambda: f64,
    pub tau: f64,
}

/// Normalization factor and normalized time at original time t >= 0.
///
/// Critical regime: lambda = e^{gamma t}, tau = t. Supercritical regime with
/// e = beta - k alpha - 1: lambda = (1 + e gamma t)^{1/e} and
/// tau = log(1 + e gamma t) / (e gamma). Either way lambda = e^{gamma tau}.
pub fn lambda_maps(profile: &SpeedProfile, t: f64) -> TimeMaps {
    let gamma = profile.gamma();
    match profile.regime() {
        Regime::Critical => TimeMaps {
            lambda: (gamma * t).exp(),
            tau: t,
        },
        Regime::Supercritical => {
            let e = profile.excess();
            let log_base = (e * gamma * t).ln_1p();
            TimeMaps {
                lambda: (log_base / e).exp(),
                tau: log_base / (e * gamma),
            }
        }
    }
}

/// Original time t corresponding to normalized time tau.
pub fn time_from_tau(profile: &SpeedProfile, tau: f64) -> f64 {
    let gamma = profile.gamma();
    match profile.regime() {
        Regime::Critical => tau,
        Regime::Supercritical => {
            let e = profile.excess();
            (e * gamma * tau).exp_m1() / (e * gamma)
        }
    }
}

/// Step-size and stopping controls.
#[derive(Debug, Clone, PartialEq)]
pub struct StepControl {
    /// Fraction of the parabolic stability bound h^2 / D_max.
    pub cfl: f64,
    pub dt_max: f64,
    /// Final normalized time.
    pub t_end: f64,
    /// Stop once r_max - r_min drops below this.
    pub sphericity_stop: f64,
    pub max_steps: u64,
    pub record_every: u64,
    /// Nodes whose cone margin is at or below this abort the run.
    pub cone_eps: f64,
    /// Fourier filtering of near-pole rows (S^2 only).
    pub pole_filter: bool,
    /// Refuse to start unless the profile passes its regime validator.
    pub validate_profile: bool,
}

impl Default for StepControl {
    fn default() -> Self {
        Self {
            cfl: 0.2,
            dt_max: 1e-2,
            t_end: 10.0,
            sphericity_stop: 1e-3,
            max_steps: 10_000_000,
            record_every: 10,
            cone_eps: CONE_EPS,
            pole_filter: true,
            validate_profile: true,
        }
    }
}

/// Evolving state of the normalized flow.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowState {
    pub tau: f64,
    pub graph: RadialGraph,
    /// lambda = e^{gamma tau}; may be +inf for very long runs, in which case
    /// evaluation goes through `log_lambda`.
    pub lambda: f64,
    pub step_count: u64,
    pub last_dt: f64,
    pub profile: SpeedProfile,
}

impl FlowState {
    pub fn new(profile: SpeedProfile, graph: RadialGraph) -> Self {
        Self {
            tau: 0.0,
            graph,
            lambda: 1.0,
            step_count: 0,
            last_dt: 0.0,
            profile,
        }
    }

    /// log(lambda) = gamma tau.
    pub fn log_lambda(&self) -> f64 {
        self.profile.gamma() * self.tau
    }

    pub fn speed_context(&self) -> ScaledSpeedContext<'_> {
        ScaledSpeedContext::from_log_lambda(&self.profile, self.log_lambda())
    }

    /// (r_min, r_max) over nodes.
    pub fn radius_range(&self) -> (f64, f64) {
        let (lo, hi) = self
            .graph
            .phi()
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &p| (lo.min(p), hi.max(p)));
        (lo.exp(), hi.exp())
    }

    pub(crate) fn set_tau(&mut self, tau: f64) {
        self.tau = tau;
        self.lambda = self.log_lambda().exp();
    }
}

/// Original time and the unnormalized hypersurface r / lambda.
pub fn unnormalize(state: &FlowState) -> Result<(f64, RadialGraph)> {
    let t = time_from_tau(&state.profile, state.tau);
    let shift = state.log_lambda();
    let phi = state.graph.phi().iter().map(|p| p - shift).collect();
    Ok((t, RadialGraph::new(*state.graph.grid(), phi)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::speed::GSpec;
    use crate::sphere::SphericalGrid;
    use std::f64::consts::E;

    #[test]
    fn time_map_examples() {
        let crit = SpeedProfile::new(1, 1, 1.0, 2.0, GSpec::Zero).unwrap();
        let m = lambda_maps(&crit, 1.0);
        assert!((m.lambda - E).abs() < 1e-15);
        assert_eq!(m.tau, 1.0);

        // beta = k alpha + 2, gamma = 1, t = 2: lambda = 1 + 2 = 3, tau = log 3
        let sup = SpeedProfile::new(1, 1, 1.0, 3.0, GSpec::Zero).unwrap();
        let m = lambda_maps(&sup, 2.0);
        assert!((m.lambda - 3.0).abs() < 1e-14);
        assert!((m.tau - 3f64.ln()).abs() < 1e-15);
        assert!((time_from_tau(&sup, 3f64.ln()) - 2.0).abs() < 1e-14);

        for p in [&crit, &sup] {
            let m = lambda_maps(p, 0.0);
            assert_eq!((m.lambda, m.tau), (1.0, 0.0));
        }
    }

    #[test]
    fn lambda_is_exp_gamma_tau() {
        let p = SpeedProfile::new(2, 1, 1.5, 4.2, GSpec::Zero).unwrap();
        for t in [0.1, 1.0, 13.0] {
            let m = lambda_maps(&p, t);
            assert!((m.lambda - (p.gamma() * m.tau).exp()).abs() < 1e-12 * m.lambda);
            assert!((time_from_tau(&p, m.tau) - t).abs() < 1e-12 * t);
        }
    }

    #[test]
    fn unnormalize_examples() {
        let grid = SphericalGrid::circle(32).unwrap();
        let p = SpeedProfile::new(1, 1, 1.0, 2.0, GSpec::Zero).unwrap();
        let mut s = FlowState::new(p, RadialGraph::sphere(grid, 1.5).unwrap());
        let (t, g) = unnormalize(&s).unwrap();
        assert_eq!(t, 0.0);
        assert_eq!(g, s.graph);
        s.set_tau(2.0);
        let (t, g) = unnormalize(&s).unwrap();
        assert_eq!(t, 2.0);
        assert!((g.radius(0) - 1.5 * (-2.0f64).exp()).abs() < 1e-15);

        let sup = SpeedProfile::new(1, 1, 1.0, 3.0, GSpec::Zero).unwrap();
        let mut s = FlowState::new(sup, RadialGraph::sphere(grid, 1.0).unwrap());
        s.set_tau(3f64.ln());
        assert!((s.lambda - 3.0).abs() < 1e-14);
        assert!((unnormalize(&s).unwrap().0 - 2.0).abs() < 1e-14);
    }
}
