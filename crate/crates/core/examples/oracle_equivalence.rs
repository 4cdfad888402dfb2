//! Principal curvatures from the graph formulas against an independent
//! computation from the embedding, under grid refinement.

use anisoflow::verify::{doubling_grids, ellipse_errors, oracle_discrepancy, refinement_slope, RandomStar, ORACLE_BAND};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> anisoflow::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for n in [1, 2] {
        let star = RandomStar::new(&mut rng, 0.15);
        let mut errs = Vec::new();
        for grid in doubling_grids(n) {
            let e = oracle_discrepancy(&star.graph(grid)?, ORACLE_BAND)?;
            println!("n={n} {:>4} x {:<4} max |kappa - kappa_oracle| = {e:.3e}", grid.n_lat(), grid.n_lon());
            errs.push(e);
        }
        println!("n={n} refinement slope {:.2}", refinement_slope(&errs));
    }
    for nodes in [64, 128, 256, 512] {
        let (graph, oracle) = ellipse_errors(2.0, 1.0, nodes)?;
        println!("ellipse 2:1, N={nodes:>3}: graph error {graph:.2e}, oracle error {oracle:.2e}");
    }
    Ok(())
}
