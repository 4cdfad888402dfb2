//! Stops a run, writes a checkpoint, reloads it and continues; the result is
//! bit-identical to an uninterrupted run.

use anisoflow::flow::{load_checkpoint, save_checkpoint, FlowState, Integrator, StepControl};
use anisoflow::speed::{GSpec, SpeedProfile};
use anisoflow::sphere::{RadialGraph, SphericalGrid};

fn main() -> anisoflow::Result<()> {
    let profile = SpeedProfile::new(1, 1, 1.0, 3.0, GSpec::Monomial { l: 4 })?;
    let grid = SphericalGrid::circle(64)?;
    let start = FlowState::new(profile, RadialGraph::from_radius(grid, |t, _| 1.0 + 0.1 * (2.0 * t).cos())?);
    let integ = Integrator::new(&grid, StepControl::default());

    let mut straight = start.clone();
    for _ in 0..200 {
        straight = integ.step(&straight)?;
    }

    let mut half = start;
    for _ in 0..100 {
        half = integ.step(&half)?;
    }
    let path = std::env::temp_dir().join("anisoflow-example.ckpt");
    save_checkpoint(&half, &path)?;
    let mut resumed = load_checkpoint(&path)?;
    for _ in 0..100 {
        resumed = integ.step(&resumed)?;
    }
    println!("checkpoint: {}", path.display());
    println!("tau = {} after {} steps", resumed.tau, resumed.step_count);
    println!("identical to uninterrupted run: {}", resumed == straight);
    Ok(())
}
