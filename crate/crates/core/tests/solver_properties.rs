use mzk_core::diagnostics::ConservationLog;
use mzk_core::illposed::{family_field, ApproxFamilyParams};
use mzk_core::inequality::{random_field, RandomFieldSpec};
use mzk_core::spectral::{hs_norm, project_high};
use mzk_core::timestepping::{if_rk4_step, ode_oracle, solve, Integrator};
use mzk_core::{EquationParams, SolverConfig, SpectralField, TorusGrid};

fn final_error(dt: f64) -> f64 {
    // A = 1 on the carrier so the nonlinear phase rotates fast enough for the
    // time error to dominate roundoff
    let p = ApproxFamilyParams::new(2, 0, 4.0, 2.0, 6.0).unwrap();
    let grid = TorusGrid::new(8);
    let u0 = family_field(&p, 0.0, grid).unwrap();
    let cfg = SolverConfig::fixed(8, dt, 1.0, EquationParams::new(6.0).unwrap());
    let traj = solve(&u0, &cfg).unwrap();
    traj.final_state().sub(&family_field(&p, 1.0, grid).unwrap()).unwrap().l2_norm()
}

#[test]
fn fourth_order_convergence_on_exact_solution() {
    let errs: Vec<f64> = [0.05, 0.025, 0.0125].iter().map(|&dt| final_error(dt)).collect();
    for w in errs.windows(2) {
        let slope = (w[0] / w[1]).log2();
        assert!((slope - 4.0).abs() <= 0.2, "slope {slope}, errors {errs:?}");
    }
}

#[test]
fn one_step_local_error_is_fifth_order() {
    let p = ApproxFamilyParams::new(2, 0, 4.0, 2.0, 6.0).unwrap();
    let grid = TorusGrid::new(8);
    let u0 = family_field(&p, 0.0, grid).unwrap();
    let params = EquationParams::new(6.0).unwrap();
    let err = |dt: f64| {
        let u = if_rk4_step(&u0, dt, 8, params).unwrap();
        u.sub(&family_field(&p, dt, grid).unwrap()).unwrap().l2_norm()
    };
    let slope = (err(0.02) / err(0.01)).log2();
    assert!((slope - 5.0).abs() < 0.2, "{slope}");
}

#[test]
fn time_reversal_recovers_initial_data() {
    let u0 = random_field(&RandomFieldSpec::new(4, 6, 1.5, 1), 0).scale_real(0.3);
    let params = EquationParams::default();
    let (dt, t) = (2e-3, 0.2);
    let run = |dt: f64| {
        let mut it = Integrator::new(u0.clone(), 0.0, SolverConfig::fixed(6, dt, t, params)).unwrap();
        it.advance_to(t).unwrap();
        it
    };
    let mut forward = run(dt);
    let one_way = forward.state().sub(run(dt / 2.0).state()).unwrap().l2_norm() * 16.0 / 15.0;
    forward.advance_to(0.0).unwrap();
    let back = forward.state().sub(&u0).unwrap().l2_norm();
    assert!(back <= 10.0 * one_way.max(1e-14), "returned within {back:e}, one-way bound {one_way:e}");
}

#[test]
fn solve_agrees_with_reference_integrator() {
    let u0 = random_field(&RandomFieldSpec::new(21, 4, 1.0, 1), 0).scale_real(0.2);
    let cfg = SolverConfig::adaptive(4, 1e-13, 0.1, EquationParams::default());
    let a = solve(&u0, &cfg).unwrap();
    let b = ode_oracle(&u0, &cfg).unwrap();
    assert!(a.final_state().sub(b.final_state()).unwrap().l2_norm() < 1e-9);
    let l2: Vec<f64> = b.snapshots().iter().map(SpectralField::l2_norm).collect();
    assert!(l2.iter().all(|n| (n - l2[0]).abs() < 1e-11));
}

#[test]
fn tail_evolves_linearly_inside_a_nonlinear_run() {
    let u0 = random_field(&RandomFieldSpec::new(8, 10, 1.0, 1), 0).scale_real(0.5);
    let cfg = SolverConfig::fixed(6, 1e-3, 0.1, EquationParams::default()).with_record_every(10);
    let traj = solve(&u0, &cfg).unwrap();
    let log = ConservationLog::from_trajectory(&traj, 2.0);
    assert!(log.tail_variation() < 1e-12);
    let h0 = hs_norm(2.0, &project_high(6, &u0));
    assert!((log.hs_tail[0] - h0).abs() == 0.0);
}

#[test]
fn adaptive_run_reports_rejections_and_hits_end() {
    let u0 = random_field(&RandomFieldSpec::new(3, 6, 1.0, 1), 0);
    let mut cfg = SolverConfig::adaptive(6, 1e-9, 0.05, EquationParams::default());
    cfg.dt = 0.05;
    let traj = solve(&u0, &cfg).unwrap();
    assert_eq!(traj.last_time(), 0.05);
    assert!(traj.rejected_steps() > 0);
    assert!(traj.times().windows(2).all(|w| w[1] > w[0]));
}
