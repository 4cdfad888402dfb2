//! Exact evolution of round spheres under the normalized flow, the explicit
//! comparison radii r1 <= r <= r2, and the PDE-vs-ODE check.
//!
//! All times here are normalized times tau, where lambda = e^{gamma tau}.

use crate::error::{Error, Result};
use crate::flow::{FlowState, Integrator, StepControl};
use crate::speed::{GSpec, Regime, ScaledSpeedContext, SpeedProfile};
use crate::sphere::{RadialGraph, SphericalGrid};

/// dr/dtau = -gamma r^{beta-ka} - gamma lambda^beta g(r/lambda) / r^{ka} + gamma r.
///
/// A scaled g that overflows makes the value -inf.
pub fn sphere_ode_rhs(profile: &SpeedProfile, r: f64, tau: f64) -> f64 {
    let gamma = profile.gamma();
    let ka = profile.k_alpha();
    let ctx = ScaledSpeedContext::from_log_lambda(profile, gamma * tau.max(0.0));
    let g = ctx.eval(r).map(|s| s.g).unwrap_or(f64::INFINITY);
    gamma * (r - r.powf(profile.beta() - ka) - g / r.powf(ka))
}

/// One classical RK4 step of d(log r)/dtau = sphere_ode_rhs / r.
pub fn ode_step(profile: &SpeedProfile, phi: f64, tau: f64, dt: f64) -> f64 {
    let f = |p: f64, t: f64| {
        let r = p.exp();
        sphere_ode_rhs(profile, r, t) / r
    };
    let k1 = f(phi, tau);
    let k2 = f(phi + 0.5 * dt * k1, tau + 0.5 * dt);
    let k3 = f(phi + 0.5 * dt * k2, tau + 0.5 * dt);
    let k4 = f(phi + dt * k3, tau + dt);
    phi + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
}

/// Radius at `tau_end` starting from r0 at `tau0`, with RK4 steps no larger than `max_dt`.
pub fn integrate_sphere_ode(profile: &SpeedProfile, r0: f64, tau0: f64, tau_end: f64, max_dt: f64) -> f64 {
    let span = tau_end - tau0;
    if span <= 0.0 {
        return r0;
    }
    let steps = (span / max_dt).ceil().max(1.0) as usize;
    let dt = span / steps as f64;
    let mut phi = r0.ln();
    for i in 0..steps {
        phi = ode_step(profile, phi, tau0 + i as f64 * dt, dt);
    }
    phi.exp()
}

/// Solution with g = 0:
/// r2 = [1 + (r0^c - 1) e^{c gamma tau}]^{1/c}, c = 1 + ka - beta.
///
/// In the critical regime c = 0 and every sphere is stationary.
pub fn closed_form_r2(profile: &SpeedProfile, r0: f64, tau: f64) -> f64 {
    let c = 1.0 + profile.k_alpha() - profile.beta();
    if profile.regime() == Regime::Critical {
        return r0;
    }
    let w = 1.0 + (r0.powf(c) - 1.0) * (c * profile.gamma() * tau).exp();
    w.powf(1.0 / c)
}

/// Solution of dr/dtau = -(gamma + C lambda^d) r^{beta-ka} + gamma r with
/// d = beta - [beta] - 1, the lower comparison radius when C bounds the g term.
///
/// With w = r^c and c = 1 + ka - beta:
/// * d != c: w = 1 + K e^{d gamma tau} + (w0 - 1 - K) e^{c gamma tau}, K = -c C / ((d - c) gamma);
/// * d == c: w = 1 + (w0 - 1 - c C tau) e^{c gamma tau}.
pub fn closed_form_r1(profile: &SpeedProfile, r0: f64, c_bound: f64, tau: f64) -> f64 {
    if profile.regime() == Regime::Critical {
        return r0;
    }
    let gamma = profile.gamma();
    let c = 1.0 + profile.k_alpha() - profile.beta();
    let d = profile.beta() - profile.beta_floor() - 1.0;
    let w0 = r0.powf(c);
    let decay = (c * gamma * tau).exp();
    let w = if r1_degenerate(profile) {
        1.0 + (w0 - 1.0 - c * c_bound * tau) * decay
    } else {
        let k = -c * c_bound / ((d - c) * gamma);
        1.0 + k * (d * gamma * tau).exp() + (w0 - 1.0 - k) * decay
    };
    w.powf(1.0 / c)
}

/// Whether beta - [beta] - 1 = 1 + ka - beta, selecting the secular branch of r1.
pub fn r1_degenerate(profile: &SpeedProfile) -> bool {
    let c = 1.0 + profile.k_alpha() - profile.beta();
    let d = profile.beta() - profile.beta_floor() - 1.0;
    (d - c).abs() < 1e-12
}

/// Right side of the ODE whose solution is r1.
pub fn r1_ode_rhs(profile: &SpeedProfile, c_bound: f64, r: f64, tau: f64) -> f64 {
    let gamma = profile.gamma();
    let d = profile.beta() - profile.beta_floor() - 1.0;
    let pace = gamma + c_bound * (d * gamma * tau).exp();
    -pace * r.powf(profile.beta() - profile.k_alpha()) + gamma * r
}

/// Smallest C with gamma lambda^beta g(r/lambda) / r^{ka} <= C lambda^d r^{beta-ka}
/// along the sampled (tau, r) trajectory.
pub fn c_bound_along(profile: &SpeedProfile, trajectory: &[(f64, f64)]) -> f64 {
    let gamma = profile.gamma();
    let ka = profile.k_alpha();
    let d = profile.beta() - profile.beta_floor() - 1.0;
    trajectory
        .iter()
        .map(|&(tau, r)| {
            let ctx = ScaledSpeedContext::from_log_lambda(profile, gamma * tau);
            let g = ctx.eval(r).map(|s| s.g).unwrap_or(f64::INFINITY);
            gamma * g / (r.powf(ka) * (d * gamma * tau).exp() * r.powf(profile.beta() - ka))
        })
        .fold(0.0, f64::max)
}

/// Result of [`pde_vs_ode_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct OdeComparison {
    /// max |r_pde - r_ref| / r_ref over all steps, r_pde the node mean.
    pub max_rel_deviation: f64,
    /// max (r_max - r_min) / r_mean over all steps.
    pub max_nonuniformity: f64,
    pub final_tau: f64,
    pub final_radius: f64,
    pub reference_radius: f64,
    pub steps: u64,
    /// Whether the reference was the g = 0 closed form rather than RK4.
    pub closed_form: bool,
}

/// Evolves the sphere of radius r0 with the PDE integrator up to `t_end`
/// (normalized time) and compares the radius with the exact sphere ODE.
///
/// The reference is `closed_form_r2` when g = 0 in the supercritical regime,
/// and otherwise an RK4 integration of [`sphere_ode_rhs`] with 8 substeps per
/// PDE step.
pub fn pde_vs_ode_check(
    profile: &SpeedProfile,
    r0: f64,
    t_end: f64,
    grid: SphericalGrid,
    control: &StepControl,
) -> Result<OdeComparison> {
    if !(r0 > 0.0 && r0.is_finite()) {
        return Err(Error::Config(vec![format!("r0 = {r0} must be positive")]));
    }
    let control = StepControl {
        t_end,
        ..control.clone()
    };
    if control.validate_profile {
        profile.check_admissible()?;
    }
    let closed = matches!(profile.g(), GSpec::Zero) && profile.regime() == Regime::Supercritical;
    let integrator = Integrator::new(&grid, control);
    let mut state = FlowState::new(profile.clone(), RadialGraph::sphere(grid, r0)?);
    let mut reference = r0;
    let mut out = OdeComparison {
        max_rel_deviation: 0.0,
        max_nonuniformity: 0.0,
        final_tau: 0.0,
        final_radius: r0,
        reference_radius: r0,
        steps: 0,
        closed_form: closed,
    };
    while state.tau < t_end && state.step_count < integrator.control().max_steps {
        let next = integrator.step(&state)?;
        reference = if closed {
            closed_form_r2(profile, r0, next.tau)
        } else {
            integrate_sphere_ode(profile, reference, state.tau, next.tau, next.last_dt / 8.0)
        };
        let radii = next.graph.radii();
        let mean = radii.iter().sum::<f64>() / radii.len() as f64;
        let (lo, hi) = next.radius_range();
        out.max_rel_deviation = out.max_rel_deviation.max((mean - reference).abs() / reference);
        out.max_nonuniformity = out.max_nonuniformity.max((hi - lo) / mean);
        out.final_radius = mean;
        state = next;
    }
    out.final_tau = state.tau;
    out.reference_radius = reference;
    out.steps = state.step_count;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prof(beta: f64, g: GSpec) -> SpeedProfile {
        SpeedProfile::new(1, 1, 1.0, beta, g).unwrap()
    }

    #[test]
    fn rhs_examples() {
        let p = prof(2.0, GSpec::Zero);
        for r in [0.3, 1.0, 2.5] {
            assert!(sphere_ode_rhs(&p, r, 0.7).abs() < 1e-15);
        }
        assert!((sphere_ode_rhs(&prof(3.0, GSpec::Zero), 2.0, 0.0) + 2.0).abs() < 1e-15);
        assert_eq!(sphere_ode_rhs(&prof(4.5, GSpec::Zero), 1.0, 3.0), 0.0);
    }

    #[test]
    fn r2_examples() {
        let p = prof(3.0, GSpec::Zero);
        assert_eq!(closed_form_r2(&p, 1.0, 5.0), 1.0);
        assert_eq!(closed_form_r2(&p, 2.0, 0.0), 2.0);
        assert!((closed_form_r2(&p, 2.0, 2f64.ln()) - 4.0 / 3.0).abs() < 1e-15);
        assert!((closed_form_r2(&p, 2.0, 1e3) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn r1_reduces_to_r2_without_bound() {
        for beta in [3.0, 3.5] {
            let p = prof(beta, GSpec::Zero);
            for t in [0.0, 0.3, 2.0] {
                let (a, b) = (closed_form_r1(&p, 1.7, 0.0, t), closed_form_r2(&p, 1.7, t));
                assert!((a - b).abs() < 1e-14 * b, "beta {beta} t {t}");
            }
        }
    }

    #[test]
    fn r1_limits_and_initial_value() {
        for beta in [3.0, 3.5] {
            let p = prof(beta, GSpec::Zero);
            assert!((closed_form_r1(&p, 1.4, 0.8, 0.0) - 1.4).abs() < 1e-14);
            assert!((closed_form_r1(&p, 1.4, 0.8, 1e3) - 1.0).abs() < 1e-6);
        }
        assert!(r1_degenerate(&prof(3.0, GSpec::Zero)));
        assert!(!r1_degenerate(&prof(3.5, GSpec::Zero)));
    }

    #[test]
    fn c_bound_zero_for_zero_g() {
        let p = prof(3.0, GSpec::Zero);
        assert_eq!(c_bound_along(&p, &[(0.0, 2.0), (1.0, 1.2)]), 0.0);
    }

    #[test]
    fn fixed_point_check() {
        let p = prof(2.0, GSpec::Zero);
        let grid = SphericalGrid::circle(64).unwrap();
        let cmp = pde_vs_ode_check(&p, 1.3, 0.2, grid, &StepControl::default()).unwrap();
        assert!(cmp.max_rel_deviation <= 1e-10);
        assert!(cmp.max_nonuniformity <= 1e-10);
        assert!(cmp.steps > 0);
    }
}
