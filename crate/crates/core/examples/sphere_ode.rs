//! Spheres stay round, so their radius obeys a scalar ODE. Compares the
//! closed-form radius for g = 0, the RK4 solution with g != 0, the lower
//! comparison radius r1, and a full PDE run on a circle.

use anisoflow::flow::StepControl;
use anisoflow::ode::{c_bound_along, closed_form_r1, closed_form_r2, integrate_sphere_ode, pde_vs_ode_check};
use anisoflow::speed::{GSpec, SpeedProfile};
use anisoflow::sphere::SphericalGrid;

fn main() -> anisoflow::Result<()> {
    let zero = SpeedProfile::new(1, 1, 1.0, 3.0, GSpec::Zero)?;
    let mono = SpeedProfile::new(1, 1, 1.0, 3.0, GSpec::Monomial { l: 4 })?;
    let r0 = 2.0;

    let taus: Vec<f64> = (0..=10).map(|i| 0.1 * i as f64).collect();
    let traj: Vec<(f64, f64)> = taus.iter().map(|&t| (t, integrate_sphere_ode(&mono, r0, 0.0, t, 1e-3))).collect();
    let c = c_bound_along(&mono, &traj);
    println!("C = {c:.4e}");
    println!("{:>5} {:>12} {:>12} {:>12}", "tau", "r1", "r(g!=0)", "r2(g=0)");
    for &(t, r) in &traj {
        println!("{t:5.2} {:12.8} {r:12.8} {:12.8}", closed_form_r1(&mono, r0, c, t), closed_form_r2(&zero, r0, t));
    }

    let grid = SphericalGrid::circle(256)?;
    let cmp = pde_vs_ode_check(&zero, r0, 2f64.ln(), grid, &StepControl::default())?;
    println!(
        "PDE r = {:.12} vs closed form {:.12}; max rel deviation {:.2e}, non-uniformity {:.2e}, {} steps",
        cmp.final_radius, cmp.reference_radius, cmp.max_rel_deviation, cmp.max_nonuniformity, cmp.steps
    );
    Ok(())
}
