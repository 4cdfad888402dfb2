//! Round spheres are stationary for the normalized flow when beta = 1 + k alpha
//! and g = 0. Prints the largest tendency for a few profiles and radii.

use anisoflow::flow::{rhs, FlowState};
use anisoflow::speed::{GSpec, SpeedProfile};
use anisoflow::sphere::{RadialGraph, SphericalGrid};

fn main() -> anisoflow::Result<()> {
    let grids = [SphericalGrid::circle(256)?, SphericalGrid::sphere(32, 64)?];
    for grid in grids {
        let n = grid.dim();
        for k in 1..=n {
            for alpha in [1.0 / k as f64, 2.0] {
                let profile = SpeedProfile::new(n, k, alpha, 1.0 + k as f64 * alpha, GSpec::Zero)?;
                for r0 in [0.5, 1.0, 1.7] {
                    let state = FlowState::new(profile.clone(), RadialGraph::sphere(grid, r0)?);
                    let worst = rhs(&state)?.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                    println!("n={n} k={k} alpha={alpha:.2} r0={r0:.1}  max|rhs| = {worst:.2e}");
                }
            }
        }
    }
    Ok(())
}
