use anisoflow::flow::{
    lambda_maps, read_checkpoint, rhs, run, time_from_tau, unnormalize, write_checkpoint, FlowState, Integrator,
    StepControl, StopReason,
};
use anisoflow::ode::{self, ode_step};
use anisoflow::speed::{GSpec, SpeedProfile};
use anisoflow::sphere::{RadialGraph, SphericalGrid};
use anisoflow::Error;

fn profile(n: usize, k: usize, alpha: f64, beta: f64, g: GSpec) -> SpeedProfile {
    SpeedProfile::new(n, k, alpha, beta, g).unwrap()
}

fn perturbed_circle(nodes: usize, amp: f64) -> RadialGraph {
    RadialGraph::from_radius(SphericalGrid::circle(nodes).unwrap(), |t, _| 1.0 + amp * (2.0 * t).cos()).unwrap()
}

#[test]
fn single_step_matches_sphere_ode_step() {
    let cases = [
        (profile(1, 1, 1.0, 3.0, GSpec::Monomial { l: 4 }), SphericalGrid::circle(64).unwrap()),
        (profile(2, 2, 1.0, 4.0, GSpec::ExpFlat { p: 1.0 }), SphericalGrid::sphere(16, 32).unwrap()),
        (profile(2, 1, 2.0, 3.0, GSpec::Zero), SphericalGrid::sphere(16, 32).unwrap()),
    ];
    for (p, grid) in cases {
        let state = FlowState::new(p.clone(), RadialGraph::sphere(grid, 1.5).unwrap());
        let control = StepControl::default();
        let next = Integrator::new(&grid, control).step(&state).unwrap();
        let expect = ode_step(&p, 1.5f64.ln(), 0.0, next.last_dt);
        for v in next.graph.phi() {
            assert!((v - expect).abs() < 1e-12, "{v} vs {expect}");
        }
        assert!((next.lambda - (p.gamma() * next.tau).exp()).abs() < 1e-15 * next.lambda);
    }
}

#[test]
fn round_spheres_are_stationary_in_critical_regime() {
    let grid = SphericalGrid::sphere(16, 32).unwrap();
    for r0 in [0.5, 1.0, 1.7] {
        let p = profile(2, 2, 0.5, 2.0, GSpec::Zero);
        let s = FlowState::new(p, RadialGraph::sphere(grid, r0).unwrap());
        assert!(rhs(&s).unwrap().iter().all(|v| v.abs() < 1e-12));
    }
}

/// Error at tau = 0.2 against a dt / 16 reference when dt_max binds.
fn time_error(dt: f64, reference: &RadialGraph) -> f64 {
    let p = profile(1, 1, 1.0, 2.0, GSpec::Zero);
    let control = StepControl {
        dt_max: dt,
        t_end: 0.2,
        sphericity_stop: 0.0,
        ..StepControl::default()
    };
    let out = run(FlowState::new(p, perturbed_circle(32, 0.1)), &control).unwrap();
    out.state
        .graph
        .phi()
        .iter()
        .zip(reference.phi())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

#[test]
fn halving_dt_reduces_error_at_least_quadratically() {
    let p = profile(1, 1, 1.0, 2.0, GSpec::Zero);
    let control = StepControl {
        dt_max: 2.5e-4,
        t_end: 0.2,
        sphericity_stop: 0.0,
        ..StepControl::default()
    };
    let reference = run(FlowState::new(p, perturbed_circle(32, 0.1)), &control).unwrap().state.graph;
    let (e1, e2) = (time_error(8e-3, &reference), time_error(4e-3, &reference));
    assert!(e1 > 0.0 && e1 / e2 >= 4.0, "{e1:e} {e2:e}");
}

#[test]
fn results_do_not_depend_on_worker_count() {
    let p = profile(2, 2, 1.0, 4.0, GSpec::ExpFlat { p: 1.0 });
    let grid = SphericalGrid::sphere(16, 32).unwrap();
    let init = RadialGraph::from_radius(grid, |t, ph| 1.0 + 0.1 * t.cos().powi(2) + 0.03 * t.sin() * ph.cos()).unwrap();
    let control = StepControl {
        t_end: 0.05,
        record_every: 5,
        ..StepControl::default()
    };
    let csv = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| run(FlowState::new(p.clone(), init.clone()), &control).unwrap().series.to_csv())
    };
    let one = csv(1);
    assert_eq!(one, csv(4));
    assert_eq!(one, csv(3));
}

#[test]
fn checkpoint_resume_is_bit_exact() {
    let p = profile(1, 1, 1.0, 3.0, GSpec::Monomial { l: 4 });
    let grid = SphericalGrid::circle(64).unwrap();
    let init = FlowState::new(p, perturbed_circle(64, 0.1));
    let integ = Integrator::new(&grid, StepControl::default());

    let mut straight = init.clone();
    for _ in 0..40 {
        straight = integ.step(&straight).unwrap();
    }
    let mut half = init;
    for _ in 0..20 {
        half = integ.step(&half).unwrap();
    }
    let mut resumed = read_checkpoint(&write_checkpoint(&half)).unwrap();
    assert_eq!(resumed, half);
    for _ in 0..20 {
        resumed = integ.step(&resumed).unwrap();
    }
    assert_eq!(resumed, straight);
    assert_eq!(resumed.tau.to_bits(), straight.tau.to_bits());
}

#[test]
fn checkpoint_with_table_profile_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("g.csv");
    std::fs::write(&table, "0,0,0\n0.5,0,0\n1,0.01,0.2\n2,0.5,1\n").unwrap();
    let p = profile(1, 1, 1.0, 2.0, GSpec::Tabulated(anisoflow::speed::Table::load(&table).unwrap()));
    let s = FlowState::new(p, perturbed_circle(32, 0.05));
    let back = read_checkpoint(&write_checkpoint(&s)).unwrap();
    assert_eq!(back, s);
}

#[test]
fn non_convex_start_aborts_at_tau_zero() {
    let p = profile(1, 1, 1.0, 2.0, GSpec::Zero);
    let err = run(FlowState::new(p, perturbed_circle(128, 0.3)), &StepControl::default()).unwrap_err();
    match err {
        Error::ConeViolation { tau, margin, .. } => {
            assert_eq!(tau, 0.0);
            assert!(margin < 0.0);
        }
        other => panic!("{other}"),
    }
}

#[test]
fn not_two_convex_surface_is_rejected() {
    // a waist around the equator makes the Gauss curvature negative there
    let p = profile(2, 2, 1.0, 3.0, GSpec::Zero);
    let grid = SphericalGrid::sphere(16, 32).unwrap();
    let g = RadialGraph::from_radius(grid, |t, _| 1.0 + 0.6 * (2.0 * t).cos()).unwrap();
    assert!(matches!(rhs(&FlowState::new(p, g)), Err(Error::ConeViolation { .. })));
}

#[test]
fn short_run_keeps_monitors_positive_and_records_in_order() {
    let p = profile(1, 1, 1.0, 2.0, GSpec::Zero);
    let control = StepControl {
        t_end: 0.3,
        ..StepControl::default()
    };
    let out = run(FlowState::new(p, perturbed_circle(128, 0.15)), &control).unwrap();
    assert_eq!(out.reason, StopReason::TEnd);
    let recs = out.series.records();
    assert!(recs.windows(2).all(|w| w[1].tau > w[0].tau));
    assert!(recs.iter().all(|r| r.cone_margin > 0.0 && r.u_min > 0.0 && r.phi_min > 0.0));
    assert!(out.series.max_increase(|r| r.r_max) <= 1e-9);
    assert!(out.series.oscillation_chain_excess() <= 0.0);
    assert!((out.state.tau - 0.3).abs() < 1e-12);
}

#[test]
fn max_steps_stops_the_run() {
    let p = profile(1, 1, 1.0, 2.0, GSpec::Zero);
    let control = StepControl {
        max_steps: 7,
        ..StepControl::default()
    };
    let out = run(FlowState::new(p, perturbed_circle(64, 0.1)), &control).unwrap();
    assert_eq!(out.reason, StopReason::MaxSteps);
    assert_eq!(out.state.step_count, 7);
    assert_eq!(out.series.last().unwrap().tau, out.state.tau);
}

#[test]
fn unnormalized_sphere_follows_the_shrinking_solution() {
    // g = 0, beta = 3, k = alpha = 1, n = 1: the unit circle shrinks as
    // dr/dt = -r^3 / r, so r(t) = 1 / (1 + t), while lambda r stays 1
    let p = profile(1, 1, 1.0, 3.0, GSpec::Zero);
    let grid = SphericalGrid::circle(32).unwrap();
    let control = StepControl {
        t_end: 0.5,
        ..StepControl::default()
    };
    let mut s = FlowState::new(p.clone(), RadialGraph::sphere(grid, 1.0).unwrap());
    let integ = Integrator::new(&grid, control);
    while s.tau < 0.5 {
        s = integ.step(&s).unwrap();
    }
    let (t, g) = unnormalize(&s).unwrap();
    assert!((t - time_from_tau(&p, s.tau)).abs() < 1e-15);
    assert!((lambda_maps(&p, t).tau - s.tau).abs() < 1e-12);
    let expect = 1.0 / (1.0 + t);
    assert!((g.radius(0) - expect).abs() < 1e-10, "{} {expect}", g.radius(0));
}

#[test]
fn pde_vs_closed_form_r2() {
    let p = profile(1, 1, 1.0, 3.0, GSpec::Zero);
    let grid = SphericalGrid::circle(256).unwrap();
    let c = ode::pde_vs_ode_check(&p, 2.0, 2f64.ln(), grid, &StepControl::default()).unwrap();
    assert!(c.closed_form);
    assert!(c.max_rel_deviation <= 1e-4, "{c:?}");
    assert!(c.max_nonuniformity <= 1e-8, "{c:?}");
    assert!((c.final_radius - 4.0 / 3.0).abs() < 1e-4);
}

#[test]
fn pde_vs_rk4_with_monomial_g() {
    let p = profile(1, 1, 1.0, 3.0, GSpec::Monomial { l: 4 });
    let grid = SphericalGrid::circle(256).unwrap();
    let c = ode::pde_vs_ode_check(&p, 1.5, 0.5, grid, &StepControl::default()).unwrap();
    assert!(!c.closed_form);
    assert!(c.max_rel_deviation <= 1e-4, "{c:?}");
}

#[test]
fn non_zonal_perturbation_decays_past_the_pole_filter() {
    let p = profile(2, 2, 1.0, 4.0, GSpec::ExpFlat { p: 1.0 });
    let grid = SphericalGrid::sphere(16, 32).unwrap();
    let init = RadialGraph::from_radius(grid, |t, ph| 1.0 + 0.05 * t.cos().powi(2) + 0.02 * t.sin() * ph.cos()).unwrap();
    let control = StepControl {
        t_end: 4.0,
        sphericity_stop: 0.0,
        record_every: 10,
        ..StepControl::default()
    };
    let out = run(FlowState::new(p, init), &control).unwrap();
    let fit = out.series.tail_fit(|r| r.osc).unwrap();
    assert!(fit.rate < -1.0, "{fit:?}");
    assert!(out.series.last().unwrap().osc < 1e-6);
}
