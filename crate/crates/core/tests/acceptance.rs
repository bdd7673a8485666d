//! Acceptance suite: every criterion runs at its stated tolerance and prints
//! one PASS/FAIL line. The target fails if any criterion fails.
//!
//! Built without the libtest harness so the criterion lines are always
//! shown, including under a plain `cargo test --workspace`.

use std::time::Instant;

use mzk_core::diagnostics::{energy_identity_study, galerkin_convergence, ConservationLog};
use mzk_core::dynamics::nonlinearity;
use mzk_core::illposed::{
    exact_wave_test, family_residual, operator_residual, residual_sup, run_divergence_experiment,
    ApproxFamilyParams, DivergenceSettings, TimeDerivative,
};
use mzk_core::inequality::{
    exponential_profile, kato_ponce_ensemble, kato_ponce_ratio, product_ensemble, random_band_limited,
    random_field, strichartz_ensemble, transference_check, QuadratureSpec, RandomFieldSpec, RatioReport,
};
use mzk_core::report::Payload;
use mzk_core::spectral::{cubic_convolution_oracle, sup_norm};
use mzk_core::timestepping::{ode_oracle, solve};
use mzk_core::{EquationParams, SolverConfig, SpectralField, TorusGrid};

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn exact_solution() -> Outcome {
    let start = Instant::now();
    let p = ApproxFamilyParams::new(4, 0, 1.0, 2.0, 1.0).unwrap();
    let cfg = SolverConfig::adaptive(20, 1e-10, 1.0, EquationParams::new(1.0).unwrap());
    let r = exact_wave_test(&p, 20, &cfg).map_err(|e| e.to_string())?;
    let secs = start.elapsed().as_secs_f64();
    check(
        r.final_relative_error <= 1e-8 && secs <= 5.0,
        format!("relative L2 error {:.3e} at t = 1 in {secs:.2} s", r.final_relative_error),
    )
}

fn conservation() -> Outcome {
    let u0 = exponential_profile(TorusGrid::new(16), 1.0, 1.0, 2);
    let cfg = SolverConfig::adaptive(12, 1e-10, 0.5, EquationParams::new(6.0).unwrap());
    let traj = solve(&u0, &cfg).map_err(|e| e.to_string())?;
    let log = ConservationLog::from_trajectory(&traj, 2.0);
    let (drift, tail) = (log.l2_drift_rate(), log.tail_variation());
    check(
        drift <= 1e-9 && tail <= 1e-12,
        format!("L2 drift {drift:.3e} per unit time, tail H^s variation {tail:.3e}"),
    )
}

fn energy_identity() -> Outcome {
    // amplitudes in [0.05, 0.1]: keeps the third time derivative of the
    // energy small enough for a 1e-7 centered difference at δ = 1e-5
    let spec = RandomFieldSpec::new(2026, 3, 0.0, 20);
    let fields: Vec<SpectralField> = random_band_limited(&spec)
        .unwrap()
        .into_iter()
        .map(|f| f.scale_real(0.1))
        .collect();
    let r = energy_identity_study(&fields, 3, 2.0, EquationParams::new(6.0).unwrap(), 1e-5)
        .map_err(|e| e.to_string())?;
    check(
        r.max_discrepancy <= 1e-7 && (r.halving_slope - 2.0).abs() <= 0.2,
        format!(
            "max discrepancy {:.3e} at δ = 1e-5, halving slope {:.4}",
            r.max_discrepancy, r.halving_slope
        ),
    )
}

fn oracle_equivalence() -> Outcome {
    let spec = RandomFieldSpec::new(77, 4, 1.0, 50);
    let params = EquationParams::new(6.0).unwrap();
    let mut worst = 0.0f64;
    for u in random_band_limited(&spec).unwrap() {
        let fast = nonlinearity(&u, params).unwrap();
        let slow = cubic_convolution_oracle(&u, params.lambda).unwrap();
        worst = worst.max(fast.max_diff(&slow).unwrap());
    }
    let u0 = random_field(&RandomFieldSpec::new(78, 4, 1.0, 1), 0).scale_real(0.2);
    let cfg = SolverConfig::adaptive(4, 1e-13, 0.1, params);
    let a = solve(&u0, &cfg).map_err(|e| e.to_string())?;
    let b = ode_oracle(&u0, &cfg).map_err(|e| e.to_string())?;
    let gap = a.final_state().sub(b.final_state()).unwrap().l2_norm();
    check(
        worst <= 1e-12 && gap <= 1e-9,
        format!("nonlinearity vs convolution {worst:.3e}, solve vs reference integrator {gap:.3e}"),
    )
}

fn galerkin() -> Outcome {
    let u0 = exponential_profile(TorusGrid::new(32), 1.0, 1.0, 7);
    let cfg = SolverConfig::fixed(32, 1e-3, 0.5, EquationParams::new(1.0).unwrap());
    let r = galerkin_convergence(&u0, &[8, 12, 16, 24, 32], 2.0, &cfg, 16).map_err(|e| e.to_string())?;
    let exponent = r.fit.map(|f| f.exponent).unwrap_or(f64::NAN);
    check(
        r.strictly_decreasing && exponent <= -2.0,
        format!("sup errors {:?}, fitted exponent {exponent:.2}", r
            .sup_errors
            .iter()
            .map(|(n, e)| format!("N={n}:{e:.2e}"))
            .collect::<Vec<_>>()),
    )
}

fn divergence_settings() -> DivergenceSettings {
    DivergenceSettings {
        m_list: vec![4, 8, 16, 32],
        r: 1.0,
        s: 2.0,
        lambda: 1.0,
        t_end: 1.0,
        ..Default::default()
    }
}

fn divergence(payloads: &mut Vec<String>) -> Outcome {
    let start = Instant::now();
    let report = run_divergence_experiment(&divergence_settings()).map_err(|e| e.to_string())?;
    let secs = start.elapsed().as_secs_f64();
    payloads.push(report.payload_json());
    let Payload::Divergence(d) = &report.payload else {
        return Err("unexpected payload".into());
    };
    let mut problems = Vec::new();
    for run in &d.runs {
        let m = run.m as f64;
        let gap = (run.initial_distance - m.powf(-0.5)).abs();
        if gap > 1e-12 {
            problems.push(format!("m={}: initial distance off by {gap:.2e}", run.m));
        }
        for t in [0.25, 0.5, 1.0] {
            let i = run.times.iter().position(|&x| x == t).expect("sample time on the grid");
            let bound = 0.5 * t.sin().abs() - m.powf(-0.5) - 5.0 * m.powf(-7.0 / 16.0);
            if run.distance[i] < bound {
                problems.push(format!("m={} t={t}: D = {:.4} < {bound:.4}", run.m, run.distance[i]));
            }
        }
    }
    let exponent = d.error1_l2_fit.map(|f| f.exponent).unwrap_or(f64::NAN);
    if !(exponent <= -3.2) {
        problems.push(format!("error exponent {exponent:.3} above -3.2"));
    }
    if secs > 180.0 {
        problems.push(format!("took {secs:.0} s"));
    }
    let detail = format!(
        "D_m(0) = m^-1/2, lower bounds hold, error exponent {exponent:.3} at t = {}, {secs:.1} s",
        d.fit_time
    );
    if problems.is_empty() {
        Ok(detail)
    } else {
        Err(format!("{detail}; {}", problems.join("; ")))
    }
}

fn residual_law() -> Outcome {
    let (r, s) = (1.0, 2.0);
    let mut worst = 0.0f64;
    for lambda in [1.0, 6.0] {
        for m in 4..=64usize {
            let p = ApproxFamilyParams::new(m, 1, r, s, lambda).unwrap();
            let sup = residual_sup(&p, 0.3).map_err(|e| e.to_string())?;
            let normalized = sup * (m as f64).powf(2.0 * s - 0.5) / (2.0 * lambda * r * r);
            worst = worst.max((normalized - 1.0).abs());
        }
    }
    let mut fd_gap = 0.0f64;
    for m in [4usize, 8, 16] {
        let p = ApproxFamilyParams::new(m, 1, r, s, 1.0).unwrap();
        let grid = TorusGrid::new(2 * m + 2);
        let closed = family_residual(&p, 0.2, grid).unwrap();
        let fd = operator_residual(&p, 0.2, grid, TimeDerivative::FiniteDifference { h: 3e-3 / p.phase_speed() })
            .map_err(|e| e.to_string())?;
        fd_gap = fd_gap.max(sup_norm(&fd.sub(&closed).unwrap(), 2).unwrap());
    }
    check(
        worst <= 1e-10 && fd_gap <= 1e-9,
        format!("normalized sup within {worst:.2e} of 1, finite-difference residual gap {fd_gap:.2e}"),
    )
}

fn strichartz_reports() -> Vec<RatioReport> {
    (2..=6u32)
        .map(|j| strichartz_ensemble(j, &RandomFieldSpec::new(11, 80, 0.0, 100)).unwrap())
        .collect()
}

fn strichartz(payloads: &mut Vec<String>) -> Outcome {
    let reports = strichartz_reports();
    payloads.push(serde_json::to_string(&reports).unwrap());
    let maxima: Vec<f64> = reports.iter().map(|r| r.max_ratio()).collect();
    let growth = maxima[4] / maxima[0];
    check(
        maxima.iter().all(|m| m.is_finite()) && growth <= 2.0,
        format!("per-shell maxima {maxima:.3?}, j=6 over j=2 = {growth:.3}"),
    )
}

fn bilinear_reports() -> Vec<RatioReport> {
    let mut out = Vec::new();
    for band in [8usize, 16, 32] {
        let spec = RandomFieldSpec::new(5, band, 0.0, 200);
        out.push(kato_ponce_ensemble(&spec, 2.0).unwrap());
        out.push(product_ensemble(&spec, 2.0).unwrap());
    }
    out
}

fn bilinear(payloads: &mut Vec<String>) -> Outcome {
    let reports = bilinear_reports();
    payloads.push(serde_json::to_string(&reports).unwrap());
    let kp: Vec<f64> = reports.iter().step_by(2).map(|r| r.max_ratio()).collect();
    let prod: Vec<f64> = reports.iter().skip(1).step_by(2).map(|r| r.max_ratio()).collect();
    let g = random_field(&RandomFieldSpec::new(9, 16, 0.0, 1), 0);
    let f = SpectralField::from_modes(g.grid(), &[([0, 0], num_complex::Complex64::new(1.7, 0.3))]).unwrap();
    let constant = kato_ponce_ratio(&f, &g, 2.0).unwrap().ratio;
    let finite = kp.iter().chain(&prod).all(|m| m.is_finite());
    check(
        finite && kp[2] < 2.0 * kp[0] && prod[2] < 2.0 * prod[0] && constant == 0.0,
        format!("commutator maxima {kp:.3?}, product maxima {prod:.4?}, constant f ratio {constant}"),
    )
}

fn transference() -> Outcome {
    let q2 = QuadratureSpec::auto(2.0, 1.0, 6, 1e-8);
    let r2 = transference_check(2.0, 1.0, 6, &q2, 64).map_err(|e| e.to_string())?;
    let q0 = QuadratureSpec::auto(0.0, 1.0, 6, 1e-10);
    let r0 = transference_check(0.0, 1.0, 6, &q0, 64).map_err(|e| e.to_string())?;
    check(
        r2.max_discrepancy <= 1e-6 && r0.max_discrepancy <= 1e-8,
        format!(
            "s = 2 discrepancy {:.2e}, s = 0 discrepancy {:.2e}",
            r2.max_discrepancy, r0.max_discrepancy
        ),
    )
}

fn determinism(first: &[String]) -> Outcome {
    let mut again = Vec::new();
    let rerun = run_divergence_experiment(&divergence_settings()).map_err(|e| e.to_string())?;
    again.push(rerun.payload_json());
    again.push(serde_json::to_string(&strichartz_reports()).unwrap());
    again.push(serde_json::to_string(&bilinear_reports()).unwrap());
    let same: Vec<bool> = first.iter().zip(&again).map(|(a, b)| a == b).collect();
    check(
        first.len() == 3 && same.iter().all(|&x| x),
        format!("divergence, Strichartz and bilinear payloads identical: {same:?}"),
    )
}

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.iter().any(|a| a == "--list") {
        println!("acceptance_criteria: test");
        return;
    }
    // honour name filters the way libtest would
    let filters: Vec<&String> = args.iter().filter(|a| !a.starts_with('-')).collect();
    if !filters.is_empty() && !filters.iter().any(|f| "acceptance_criteria".contains(f.as_str())) {
        println!("acceptance_criteria: filtered out");
        return;
    }
    acceptance_criteria();
}

fn acceptance_criteria() {
    let mut payloads = Vec::new();
    let mut results: Vec<(&str, Outcome)> = vec![
        ("exact solution reproduction", exact_solution()),
        ("conservation", conservation()),
        ("energy identity", energy_identity()),
        ("oracle equivalence", oracle_equivalence()),
        ("Galerkin convergence", galerkin()),
    ];
    results.push(("failure of uniform continuity", divergence(&mut payloads)));
    results.push(("residual law", residual_law()));
    results.push(("Strichartz harness", strichartz(&mut payloads)));
    results.push(("Kato-Ponce and product harnesses", bilinear(&mut payloads)));
    results.push(("transference", transference()));
    if payloads.len() == 3 {
        results.push(("determinism", determinism(&payloads)));
    } else {
        results.push(("determinism", Err("an earlier run did not produce its payload".into())));
    }

    let mut failed = 0;
    for (i, (name, outcome)) in results.iter().enumerate() {
        match outcome {
            Ok(detail) => println!("criterion {:>2} {name}: PASS ({detail})", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} {name}: FAIL ({detail})", i + 1);
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all {} acceptance criteria passed", results.len());
}
