//! Randomized checks of sigma_k identities on the Gamma_k^+ cone, plus a
//! single worked example.

use anisoflow::symfunc::{cone_margin, sigma_k, sigma_k_partials, CurvatureVector};
use anisoflow::verify::symfunc_suite;

fn main() -> anisoflow::Result<()> {
    let kappa = CurvatureVector::new(&[3.0, 1.0, -0.5])?;
    for k in 1..=3 {
        println!(
            "sigma_{k} = {:8.4}  partials = {:?}  cone margin = {:.4}",
            sigma_k(&kappa, k)?,
            sigma_k_partials(&kappa, k)?,
            cone_margin(&kappa, k)
        );
    }
    for check in symfunc_suite(20_000, 1) {
        println!("{check}");
    }
    Ok(())
}
