//! A convex curve under the normalized flow with beta = 2, k = alpha = 1.
//! The curve rounds off; oscillation decays exponentially until the
//! sphericity stop.

use anisoflow::flow::{run, FlowState, StepControl};
use anisoflow::speed::{GSpec, SpeedProfile};
use anisoflow::sphere::{RadialGraph, SphericalGrid};

fn main() -> anisoflow::Result<()> {
    let profile = SpeedProfile::new(1, 1, 1.0, 2.0, GSpec::Zero)?;
    let grid = SphericalGrid::circle(128)?;
    let initial = RadialGraph::from_radius(grid, |t, _| 1.0 + 0.15 * (2.0 * t).cos() + 0.01 * (3.0 * t).sin())?;
    let control = StepControl {
        t_end: 20.0,
        record_every: 40,
        ..StepControl::default()
    };
    let out = run(FlowState::new(profile, initial), &control)?;
    println!("{:>8} {:>10} {:>10} {:>10} {:>10}", "tau", "r_min", "r_max", "osc", "|grad phi|");
    for r in out.series.records() {
        println!("{:8.4} {:10.6} {:10.6} {:10.3e} {:10.3e}", r.tau, r.r_min, r.r_max, r.osc, r.grad_phi_max);
    }
    let fit = out.series.tail_fit(|r| r.osc)?;
    println!("stopped by {} after {} steps; osc ~ exp({:.3} tau)", out.reason, out.state.step_count, fit.rate);
    Ok(())
}
