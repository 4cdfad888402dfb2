//! A perturbed sphere in R^3 under the Gauss-curvature-type flow k = 2,
//! alpha = 1, beta = 4 with g(r) = r^3 exp(-1/r), which is flat at 0.
//! Coarse grid so it finishes in seconds.

use anisoflow::flow::{run, FlowState, StepControl};
use anisoflow::speed::{GSpec, SpeedProfile};
use anisoflow::sphere::{RadialGraph, SphericalGrid};

fn main() -> anisoflow::Result<()> {
    let profile = SpeedProfile::new(2, 2, 1.0, 4.0, GSpec::ExpFlat { p: 1.0 })?;
    let grid = SphericalGrid::sphere(16, 32)?;
    let initial = RadialGraph::from_radius(grid, |t, p| {
        let c = t.cos();
        1.0 + 0.15 * 0.5 * (3.0 * c * c - 1.0) + 0.02 * t.sin() * p.cos()
    })?;
    let control = StepControl {
        t_end: 4.0,
        sphericity_stop: 0.0,
        record_every: 50,
        ..StepControl::default()
    };
    let out = run(FlowState::new(profile, initial), &control)?;
    for r in out.series.records() {
        println!(
            "tau={:6.3} r in [{:.6}, {:.6}] osc={:.2e} cone margin={:.3} u_min={:.3}",
            r.tau, r.r_min, r.r_max, r.osc, r.cone_margin, r.u_min
        );
    }
    let (lo, hi) = out.state.radius_range();
    println!("final radius {:.5} (lambda = {:.3e})", 0.5 * (lo + hi), out.state.lambda);
    Ok(())
}
