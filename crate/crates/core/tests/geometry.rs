use std::f64::consts::PI;

use anisoflow::sphere::io::{read_graph, write_graph};
use anisoflow::sphere::{covariant_derivatives, embedding_oracle, weingarten, RadialGraph, SphericalGrid};
use anisoflow::verify::{
    doubling_grids, ellipse_errors, oracle_discrepancy, refinement_slope, RandomStar, ORACLE_BAND,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn oracle_agreement_converges_on_random_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in [1, 2] {
        for _ in 0..5 {
            let star = RandomStar::new(&mut rng, 0.15);
            let errs: Vec<f64> = doubling_grids(n)
                .into_iter()
                .map(|g| oracle_discrepancy(&star.graph(g).unwrap(), ORACLE_BAND).unwrap())
                .collect();
            let slope = refinement_slope(&errs);
            assert!(slope >= 1.8, "n={n} slope {slope} errors {errs:?}");
        }
    }
}

#[test]
fn ellipse_curvature_at_512_nodes() {
    let (graph, oracle) = ellipse_errors(2.0, 1.0, 512).unwrap();
    assert!(graph <= 5e-3, "graph formulas {graph}");
    assert!(oracle <= 5e-3, "oracle {oracle}");
}

#[test]
fn round_spheres_have_curvature_one_over_r() {
    for (grid, r) in [
        (SphericalGrid::circle(64).unwrap(), 0.7),
        (SphericalGrid::sphere(16, 32).unwrap(), 2.5),
    ] {
        let g = RadialGraph::sphere(grid, r).unwrap();
        // graph formulas are exact for constant phi; the oracle differentiates
        // the trigonometric embedding and carries O(h^4) truncation
        for (field, tol) in [(weingarten(&g), 1e-12), (embedding_oracle(&g).unwrap(), 1e-4)] {
            for node in &field.nodes {
                for k in node.kappa.as_slice() {
                    assert!((k - 1.0 / r).abs() < tol, "{k}");
                }
            }
        }
    }
}

/// Along a curve, d^2 r / ds^2 = 1/r - (u/r) kappa - (dr/ds)^2 / r.
/// The left side is computed analytically for r = exp(0.2 cos 2t + 0.1 sin 3t);
/// kappa and u come from the discrete shape operator.
fn hessian_of_r_error(nodes: usize) -> f64 {
    let grid = SphericalGrid::circle(nodes).unwrap();
    let phi = |t: f64| 0.2 * (2.0 * t).cos() + 0.1 * (3.0 * t).sin();
    let dphi = |t: f64| -0.4 * (2.0 * t).sin() + 0.3 * (3.0 * t).cos();
    let ddphi = |t: f64| -0.8 * (2.0 * t).cos() - 0.9 * (3.0 * t).sin();
    let g = RadialGraph::from_radius(grid, |t, _| phi(t).exp()).unwrap();
    let field = weingarten(&g);
    let mut worst: f64 = 0.0;
    for (idx, node) in field.nodes.iter().enumerate() {
        let t = grid.coords(idx).0;
        let r = phi(t).exp();
        let r1 = r * dphi(t);
        let r2 = r * (dphi(t).powi(2) + ddphi(t));
        let speed = (r * r + r1 * r1).sqrt();
        let drds = r1 / speed;
        let d2rds2 = (r2 * r * r - r * r1 * r1) / speed.powi(4);
        let rhs = 1.0 / r - node.u / r * node.kappa.as_slice()[0] - drds * drds / r;
        worst = worst.max((d2rds2 - rhs).abs());
    }
    worst
}

#[test]
fn hessian_of_r_consistency() {
    let errs: Vec<f64> = [32, 64, 128].iter().map(|&n| hessian_of_r_error(n)).collect();
    assert!(errs[2] < 1e-5, "{errs:?}");
    assert!(refinement_slope(&errs) >= 1.8, "{errs:?}");
}

#[test]
fn gradient_matches_analytic_on_sphere_grid() {
    // phi = 0.3 z = 0.3 cos(theta): |grad phi| = 0.3 sin(theta)
    let grid = SphericalGrid::sphere(32, 64).unwrap();
    let g = RadialGraph::from_radius(grid, |t, _| (0.3 * t.cos()).exp()).unwrap();
    for (idx, d) in covariant_derivatives(&g).iter().enumerate() {
        let t = grid.coords(idx).0;
        assert!((d.grad_norm_sq().sqrt() - 0.3 * t.sin()).abs() < 1e-5);
    }
}

#[test]
fn curvatures_invariant_under_longitude_rotation() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let star = RandomStar::new(&mut rng, 0.2);
    let g = star.graph(SphericalGrid::sphere(16, 32).unwrap()).unwrap();
    let rot = g.rotate_longitude(5);
    let (a, b) = (weingarten(&g), weingarten(&rot));
    let n = g.grid().n_lon();
    for idx in 0..g.grid().len() {
        let (i, j) = (idx / n, idx % n);
        let moved = i * n + (j + 5) % n;
        assert_eq!(a.nodes[idx].kappa, b.nodes[moved].kappa);
    }
}

#[test]
fn graph_serialization_round_trip_is_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let star = RandomStar::new(&mut rng, 0.3);
    for grid in [SphericalGrid::circle(48).unwrap(), SphericalGrid::sphere(12, 24).unwrap()] {
        let g = star.graph(grid).unwrap();
        let text = write_graph(&g);
        let back = read_graph(&text).unwrap();
        assert_eq!(back, g);
        for (a, b) in back.phi().iter().zip(g.phi()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }
}

#[test]
fn corrupted_graph_file_reports_line() {
    let g = RadialGraph::sphere(SphericalGrid::circle(16).unwrap(), 1.0).unwrap();
    let text = write_graph(&g).replacen("0.0000000000000000e0,", "0.0000000000000000e0;", 1);
    let err = read_graph(&text).unwrap_err().to_string();
    assert!(err.contains("line 2"), "{err}");
}

#[test]
fn ellipse_principal_curvature_extremes() {
    // kappa ranges over [b/a^2, a/b^2] for a = 2, b = 1
    let grid = SphericalGrid::circle(512).unwrap();
    let g = RadialGraph::from_radius(grid, |t, _| 2.0 / ((t.cos()).powi(2) + (2.0 * t.sin()).powi(2)).sqrt()).unwrap();
    let k: Vec<f64> = weingarten(&g).nodes.iter().map(|n| n.kappa.as_slice()[0]).collect();
    let max = k.iter().cloned().fold(f64::MIN, f64::max);
    let min = k.iter().cloned().fold(f64::MAX, f64::min);
    assert!((max - 2.0).abs() < 5e-3 && (min - 0.25).abs() < 5e-3, "{min} {max}");
    assert!((grid.coords(128).0 - PI / 2.0).abs() < 1e-15);
}

#[test]
fn tiny_gradients_are_resolved() {
    // |grad phi|^2 ~ 1e-20 is far below the rounding of 1 + |grad phi|^2
    let grid = SphericalGrid::circle(256).unwrap();
    let g = RadialGraph::from_radius(grid, |t, _| (1e-10 * (2.0 * t).cos()).exp()).unwrap();
    let worst = weingarten(&g)
        .nodes
        .iter()
        .enumerate()
        .map(|(idx, n)| (n.grad_phi - 2e-10 * (2.0 * grid.coords(idx).0).sin().abs()).abs())
        .fold(0.0, f64::max);
    assert!(worst < 1e-4 * 2e-10, "{worst:e}");
    let oracle = embedding_oracle(&g).unwrap();
    assert!(oracle.nodes.iter().map(|n| n.grad_phi).fold(0.0, f64::max) > 1e-10);
}
