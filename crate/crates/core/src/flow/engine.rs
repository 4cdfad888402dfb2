//! Explicit RK4 integration of the normalized scalar equation for phi = log r:
//!
//!   d phi / d tau = -(e^{(beta-1) phi} rho + (rho / r) lambda^beta g(r / lambda)) sigma_k^alpha + gamma
//!
//! with sigma_k evaluated on the shape operator of the radial graph.

use rayon::prelude::*;

use super::filter::PoleFilter;
use super::{FlowState, StepControl};
use crate::diagnostics::{DiagnosticRecord, DiagnosticsSeries};
use crate::error::{Error, Result};
use crate::speed::{ScaledSpeedContext, SpeedProfile};
use crate::sphere::{shape_at, weingarten, RadialGraph, SphericalGrid};
use crate::symfunc::{cone_margin, CONE_EPS};

use crate::sphere::{local_derivatives, LocalDerivatives};

/// Smallest admissible step.
const MIN_DT: f64 = 1e-14;

enum NodeOut {
    Ok { tendency: f64, stiffness: f64 },
    Cone(f64),
    Scale(Error),
}

fn node_tendency(
    grid: &SphericalGrid,
    phi: &[f64],
    idx: usize,
    ctx: &ScaledSpeedContext<'_>,
    cone_eps: f64,
    resolve_poles: bool,
) -> NodeOut {
    let prof = ctx.profile();
    let (k, alpha) = (prof.k(), prof.alpha());
    let d: LocalDerivatives = local_derivatives(grid, phi, idx);
    let geom = shape_at(phi[idx], &d, grid.dim());
    let margin = cone_margin(&geom.kappa, k);
    if !(margin > cone_eps) {
        return NodeOut::Cone(margin);
    }
    let speed = match ctx.eval(geom.r) {
        Ok(s) => s,
        Err(e) => return NodeOut::Scale(e),
    };
    let sk = geom.sigma(k);
    let fk = sk.powf(alpha);
    let coeff = geom.rho * (speed.f / geom.r);
    let tendency = -coeff * fk + prof.gamma();

    // principal symbol bound: alpha A sigma_k^{alpha-1} max(d sigma_k / d kappa) / (r rho)
    let kap = geom.kappa.as_slice();
    let max_partial = if k == 1 { 1.0 } else { kap[0].max(kap[1]) };
    let symbol = alpha * coeff * sk.powf(alpha - 1.0) * max_partial / (geom.r * geom.rho);
    let h = if grid.dim() == 2 && !resolve_poles {
        grid.h_theta().min(d.sin_theta * grid.h_phi())
    } else {
        grid.spacing()
    };
    NodeOut::Ok {
        tendency,
        stiffness: symbol / (h * h),
    }
}

/// Tendency at every node plus the largest symbol / h^2 ratio.
fn evaluate(
    profile: &SpeedProfile,
    grid: &SphericalGrid,
    phi: &[f64],
    tau: f64,
    cone_eps: f64,
    filter: Option<&PoleFilter>,
) -> Result<(Vec<f64>, f64)> {
    let ctx = ScaledSpeedContext::from_log_lambda(profile, profile.gamma() * tau);
    let outs: Vec<NodeOut> = (0..grid.len())
        .into_par_iter()
        .map(|idx| node_tendency(grid, phi, idx, &ctx, cone_eps, filter.is_some()))
        .collect();
    let mut tendency = Vec::with_capacity(outs.len());
    let mut stiff: f64 = 0.0;
    for (node, out) in outs.into_iter().enumerate() {
        match out {
            NodeOut::Ok { tendency: t, stiffness } => {
                if !t.is_finite() {
                    return Err(Error::NonFiniteRhs { node, tau });
                }
                tendency.push(t);
                stiff = stiff.max(stiffness);
            }
            NodeOut::Cone(margin) => return Err(Error::ConeViolation { node, margin, tau }),
            NodeOut::Scale(e) => return Err(e),
        }
    }
    if let Some(f) = filter {
        f.apply(&mut tendency);
    }
    Ok((tendency, stiff))
}

/// Unfiltered d phi / d tau at every node of the state.
pub fn rhs(state: &FlowState) -> Result<Vec<f64>> {
    evaluate(&state.profile, state.graph.grid(), state.graph.phi(), state.tau, CONE_EPS, None).map(|(t, _)| t)
}

/// Why a run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    TEnd,
    Sphericity,
    MaxSteps,
}

impl std::fmt::Display for StopReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            StopReason::TEnd => "t_end",
            StopReason::Sphericity => "sphericity_stop",
            StopReason::MaxSteps => "max_steps",
        })
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub state: FlowState,
    pub series: DiagnosticsSeries,
    pub reason: StopReason,
}

/// Stepper bound to one grid and control set.
pub struct Integrator {
    control: StepControl,
    filter: Option<PoleFilter>,
}

impl Integrator {
    pub fn new(grid: &SphericalGrid, control: StepControl) -> Self {
        let filter = if control.pole_filter { PoleFilter::new(grid) } else { None };
        Self { control, filter }
    }

    pub fn control(&self) -> &StepControl {
        &self.control
    }

    fn eval(&self, profile: &SpeedProfile, grid: &SphericalGrid, phi: &[f64], tau: f64) -> Result<(Vec<f64>, f64)> {
        evaluate(profile, grid, phi, tau, self.control.cone_eps, self.filter.as_ref())
    }

    /// One classical RK4 step with dt = min(dt_max, cfl / max(D / h^2), t_end - tau).
    pub fn step(&self, state: &FlowState) -> Result<FlowState> {
        let c = &self.control;
        let grid = *state.graph.grid();
        let prof = &state.profile;
        let phi = state.graph.phi();
        let tau = state.tau;

        let (k1, stiff) = self.eval(prof, &grid, phi, tau)?;
        let mut dt = c.dt_max.min(c.cfl / stiff);
        let remaining = c.t_end - tau;
        if remaining > 0.0 && remaining < dt {
            dt = remaining;
        }
        if !(dt >= MIN_DT) {
            return Err(Error::StepTooSmall { dt, tau });
        }
        let stage = |base: &[f64], slope: &[f64], h: f64| -> Vec<f64> {
            base.iter().zip(slope).map(|(b, s)| b + h * s).collect()
        };
        let (k2, _) = self.eval(prof, &grid, &stage(phi, &k1, 0.5 * dt), tau + 0.5 * dt)?;
        let (k3, _) = self.eval(prof, &grid, &stage(phi, &k2, 0.5 * dt), tau + 0.5 * dt)?;
        let (k4, _) = self.eval(prof, &grid, &stage(phi, &k3, dt), tau + dt)?;
        let mut next: Vec<f64> = (0..phi.len())
            .map(|i| phi[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
            .collect();
        // unresolved modes would otherwise stay frozen at their initial content
        if let Some(f) = &self.filter {
            f.apply(&mut next);
        }

        let mut out = FlowState {
            tau,
            graph: RadialGraph::new(grid, next).map_err(|_| Error::NonFiniteRhs { node: 0, tau })?,
            lambda: state.lambda,
            step_count: state.step_count + 1,
            last_dt: dt,
            profile: state.profile.clone(),
        };
        out.set_tau(tau + dt);
        Ok(out)
    }

    fn record(&self, state: &FlowState) -> Result<DiagnosticRecord> {
        let field = weingarten(&state.graph);
        DiagnosticRecord::measure(state.tau, &field, &state.speed_context(), state.last_dt)
    }

    /// Advances until t_end, the sphericity threshold or max_steps.
    pub fn run(&self, initial: FlowState) -> Result<RunOutcome> {
        let c = &self.control;
        if c.validate_profile {
            initial.profile.check_admissible()?;
        }
        let grid = *initial.graph.grid();
        // cone check of the initial data
        self.eval(&initial.profile, &grid, initial.graph.phi(), initial.tau)?;

        let mut series = DiagnosticsSeries::new();
        let mut state = initial;
        series.push(self.record(&state)?);
        let reason = loop {
            let (lo, hi) = state.radius_range();
            if hi - lo < c.sphericity_stop {
                break StopReason::Sphericity;
            }
            if state.tau >= c.t_end {
                break StopReason::TEnd;
            }
            if state.step_count >= c.max_steps {
                break StopReason::MaxSteps;
            }
            state = self.step(&state).map_err(|e| e.at_tau(state.tau))?;
            if state.step_count.is_multiple_of(c.record_every.max(1)) {
                series.push(self.record(&state)?);
            }
        };
        if series.last().is_some_and(|r| r.tau < state.tau) {
            series.push(self.record(&state)?);
        }
        Ok(RunOutcome { state, series, reason })
    }
}

/// One step with a freshly built integrator.
pub fn step(state: &FlowState, control: &StepControl) -> Result<FlowState> {
    Integrator::new(state.graph.grid(), control.clone()).step(state)
}

/// Full run with a freshly built integrator.
pub fn run(initial: FlowState, control: &StepControl) -> Result<RunOutcome> {
    Integrator::new(initial.graph.grid(), control.clone()).run(initial)
}
