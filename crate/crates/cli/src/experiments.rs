//! Maps each subcommand onto the corresponding library operation and derives
//! the named metrics that assertions refer to.

use std::collections::BTreeMap;
use std::time::Instant;

use anyhow::{Context, Result};
use mzk_core::diagnostics::{energy_identity_study, galerkin_convergence, SimulationSummary};
use mzk_core::illposed::{divergence_experiment, exact_wave_test, ApproxFamilyParams, DivergenceSettings};
use mzk_core::inequality::{
    exponential_profile, kato_ponce_ensemble, product_ensemble, random_field, strichartz_ensemble,
    transference_check, QuadratureSpec, RandomFieldSpec, RatioReport,
};
use mzk_core::report::{Payload, RunStatus};
use mzk_core::spectral::hs_norm;
use mzk_core::timestepping::{solve, Adaptivity};
use mzk_core::{EquationParams, ExperimentReport, SpectralField, TorusGrid};

use crate::assertions::{self, Failure};
use crate::config::{Experiment, Policy, Profile, RunConfig};
use crate::plot::num;

/// Everything a run produces, held in memory until the single writer
/// flushes it to the run directory.
#[derive(Debug)]
pub struct RunOutput {
    pub report: ExperimentReport,
    pub failures: Vec<Failure>,
    /// `series/<name>` contents.
    pub series: Vec<(String, String)>,
    /// `snapshots/<name>` contents.
    pub snapshots: Vec<(String, Vec<u8>)>,
}

/// Metric names an `[assert]` block may refer to.
pub fn metric_names(experiment: Experiment, cfg: &RunConfig) -> Vec<String> {
    let fixed: &[&str] = match experiment {
        Experiment::Simulate => &[
            "l2_drift_rate",
            "tail_variation",
            "hs_variation",
            "final_time",
            "steps",
            "rejected_steps",
        ],
        Experiment::ExactWaveTest => &["final_error", "max_error", "steps"],
        Experiment::Illposed => &[
            "initial_distance_error",
            "error_fit_exponent",
            "predicted_exponent",
            "max_approx_error_l2",
            "min_envelope_margin",
        ],
        Experiment::GalerkinConvergence => &["fit_exponent", "strictly_decreasing", "max_sup_error", "min_sup_error"],
        Experiment::EnergyIdentity => &["max_discrepancy", "halving_slope"],
        Experiment::IneqKatoPonce | Experiment::IneqProduct => &["max_ratio", "degenerate"],
        Experiment::IneqStrichartz => &["max_ratio", "degenerate", "max_shell_increase"],
        Experiment::IneqTransference => &["max_discrepancy", "error_estimate", "periodization_l2_ratio"],
    };
    let mut names: Vec<String> = fixed.iter().map(|s| s.to_string()).collect();
    match experiment {
        Experiment::IneqKatoPonce | Experiment::IneqProduct => {
            if let Some(bands) = &cfg.ensemble.bands {
                names.extend(bands.iter().map(|b| format!("max_ratio_k{b}")));
            }
        }
        Experiment::IneqStrichartz => names.extend(cfg.shells().map(|j| format!("max_ratio_j{j}"))),
        _ => {}
    }
    names
}

/// Runs `experiment` and checks the configured assertions.
pub fn run(experiment: Experiment, cfg: &RunConfig) -> Result<RunOutput> {
    let start = Instant::now();
    let (payload, metrics, series, snapshots) = match experiment {
        Experiment::Simulate => simulate(cfg)?,
        Experiment::ExactWaveTest => exact_wave(cfg)?,
        Experiment::Illposed => illposed(cfg)?,
        Experiment::GalerkinConvergence => convergence(cfg)?,
        Experiment::EnergyIdentity => energy(cfg)?,
        Experiment::IneqKatoPonce | Experiment::IneqProduct | Experiment::IneqStrichartz => ratios(experiment, cfg)?,
        Experiment::IneqTransference => transference(cfg)?,
    };
    let config = serde_json::to_value(cfg).context("serializing the config echo")?;
    let mut report = ExperimentReport::new(experiment.name(), config, payload, start.elapsed().as_secs_f64());
    report.metrics = metrics;
    let failures = assertions::check(&cfg.assertions, &report.metrics);
    if !failures.is_empty() {
        report.status = RunStatus::AssertionsFailed { failures: failures.iter().map(Failure::describe).collect() };
    }
    Ok(RunOutput { report, failures, series, snapshots })
}

type Parts = (Payload, BTreeMap<String, f64>, Vec<(String, String)>, Vec<(String, Vec<u8>)>);

fn metrics<const N: usize>(pairs: [(&str, f64); N]) -> BTreeMap<String, f64> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

fn csv_row(values: &[f64]) -> String {
    let mut row: String = values.iter().map(|&v| num(v)).collect::<Vec<_>>().join(",");
    row.push('\n');
    row
}

fn initial_field(cfg: &RunConfig, grid: TorusGrid) -> SpectralField {
    let i = &cfg.initial;
    match i.profile {
        Profile::Exponential => exponential_profile(grid, i.amplitude, i.rate, cfg.seed),
        Profile::Random => {
            random_field(&RandomFieldSpec::new(cfg.seed, grid.bandwidth(), i.beta, 1), 0).scale_real(i.amplitude)
        }
    }
}

fn simulate(cfg: &RunConfig) -> Result<Parts> {
    let u0 = initial_field(cfg, TorusGrid::new(cfg.bandwidth()));
    let traj = solve(&u0, &cfg.solver_config(cfg.cutoff()))?;
    let summary = SimulationSummary::from_trajectory(&traj, cfg.s())?;

    let h0 = hs_norm(cfg.s(), &u0);
    let hs_variation = traj
        .steps()
        .iter()
        .map(|r| if h0 > 0.0 { (r.hs_norm - h0).abs() / h0 } else { r.hs_norm })
        .fold(0.0f64, f64::max);
    let m = metrics([
        ("l2_drift_rate", summary.l2_drift_rate),
        ("tail_variation", summary.tail_variation),
        ("hs_variation", hs_variation),
        ("final_time", traj.last_time()),
        ("steps", summary.steps as f64),
        ("rejected_steps", summary.rejected_steps as f64),
    ]);

    let mut csv = Vec::new();
    traj.write_csv(&mut csv)?;
    let log = &summary.conservation;
    let mut cons = String::from("t,l2_norm,hs_low,hs_tail,l2_relative_drift\n");
    for i in 0..log.times.len() {
        let row = [log.times[i], log.l2[i], log.hs_low[i], log.hs_tail[i], log.l2_relative_drift[i]];
        cons += &csv_row(&row);
    }
    let series = vec![
        ("trajectory.csv".to_string(), String::from_utf8(csv)?),
        ("conservation.csv".to_string(), cons),
    ];
    let snapshots = if cfg.solver.snapshots {
        (0..traj.len()).map(|i| (format!("state_{i:05}.mzk1"), traj.snapshot(i).to_bytes())).collect()
    } else {
        Vec::new()
    };
    Ok((Payload::Simulation(summary), m, series, snapshots))
}

fn exact_wave(cfg: &RunConfig) -> Result<Parts> {
    let p = ApproxFamilyParams::new(cfg.exact_wave.m, 0, cfg.exact_wave.r, cfg.s(), cfg.lambda())?;
    let rep = exact_wave_test(&p, cfg.bandwidth(), &cfg.solver_config(cfg.cutoff()))?;
    let m = metrics([
        ("final_error", rep.final_relative_error),
        ("max_error", rep.max_relative_error),
        ("steps", rep.steps as f64),
    ]);
    let mut csv = String::from("t,relative_error\n");
    for (t, e) in rep.times.iter().zip(&rep.relative_errors) {
        csv += &csv_row(&[*t, *e]);
    }
    Ok((Payload::ExactWave(rep), m, vec![("exact_wave.csv".into(), csv)], Vec::new()))
}

fn illposed(cfg: &RunConfig) -> Result<Parts> {
    let il = &cfg.illposed;
    let settings = DivergenceSettings {
        m_list: il.m_list.clone(),
        r: il.r,
        s: cfg.s(),
        lambda: cfg.lambda(),
        t_end: cfg.t_end(),
        dt: cfg.solver.dt.expect("resolved"),
        adaptivity: match cfg.solver.policy.expect("resolved") {
            Policy::Fixed => Adaptivity::Fixed,
            Policy::Adaptive => Adaptivity::StepDoubling { tolerance: cfg.solver.tolerance },
        },
        samples: il.samples,
        bandwidth_factor: il.bandwidth_factor,
        bandwidth_margin: il.bandwidth_margin,
        fit_time: il.fit_time,
    };
    let rep = divergence_experiment(&settings)?;

    let mut initial_distance_error = 0.0f64;
    let mut max_err = 0.0f64;
    let mut margin = f64::INFINITY;
    let mut series = Vec::new();
    for run in &rep.runs {
        let expect = (run.m as f64).powf(-0.5);
        initial_distance_error = initial_distance_error.max((run.distance[0] - expect).abs() / expect);
        for i in 0..run.times.len() {
            max_err = max_err.max(run.error0_l2[i]).max(run.error1_l2[i]);
            margin = margin.min(run.distance[i] - run.envelope[i]);
        }
        let mut csv = String::from("t,distance,envelope,error0_l2,error0_hs,error1_l2,error1_hs\n");
        for i in 0..run.times.len() {
            csv += &csv_row(&[
                run.times[i],
                run.distance[i],
                run.envelope[i],
                run.error0_l2[i],
                run.error0_hs[i],
                run.error1_l2[i],
                run.error1_hs[i],
            ]);
        }
        series.push((format!("divergence_m{}.csv", run.m), csv));
    }
    let mut m = metrics([
        ("initial_distance_error", initial_distance_error),
        ("predicted_exponent", rep.predicted_exponent),
        ("max_approx_error_l2", max_err),
        ("min_envelope_margin", margin),
    ]);
    if let Some(fit) = &rep.error1_l2_fit {
        m.insert("error_fit_exponent".into(), fit.exponent);
    }
    Ok((Payload::Divergence(rep), m, series, Vec::new()))
}

fn convergence(cfg: &RunConfig) -> Result<Parts> {
    let u0 = initial_field(cfg, TorusGrid::new(cfg.bandwidth()));
    let rep = galerkin_convergence(
        &u0,
        &cfg.convergence.cutoffs,
        cfg.s(),
        &cfg.solver_config(cfg.bandwidth()),
        cfg.convergence.samples,
    )?;
    let errs: Vec<f64> = rep.sup_errors.iter().map(|e| e.1).collect();
    let mut m = metrics([("strictly_decreasing", if rep.strictly_decreasing { 1.0 } else { 0.0 })]);
    if !errs.is_empty() {
        m.insert("max_sup_error".into(), errs.iter().copied().fold(f64::MIN, f64::max));
        m.insert("min_sup_error".into(), errs.iter().copied().fold(f64::MAX, f64::min));
    }
    if let Some(fit) = &rep.fit {
        m.insert("fit_exponent".into(), fit.exponent);
    }
    let mut csv = String::from("cutoff,sup_error\n");
    for (n, e) in &rep.sup_errors {
        csv += &format!("{n},{}\n", num(*e));
    }
    Ok((Payload::Convergence(rep), m, vec![("convergence.csv".into(), csv)], Vec::new()))
}

fn energy(cfg: &RunConfig) -> Result<Parts> {
    let en = &cfg.energy;
    let spec = RandomFieldSpec::new(cfg.seed, cfg.bandwidth(), en.beta, en.count);
    let fields: Vec<SpectralField> = (0..en.count).map(|i| random_field(&spec, i).scale_real(en.amplitude)).collect();
    let rep = energy_identity_study(&fields, cfg.cutoff(), cfg.s(), EquationParams { lambda: cfg.lambda() }, en.delta)?;
    let m = metrics([("max_discrepancy", rep.max_discrepancy), ("halving_slope", rep.halving_slope)]);
    let mut csv = String::from("index,lhs,rhs,discrepancy,discrepancy_half_delta\n");
    for (i, (a, b)) in rep.at_delta.iter().zip(&rep.at_half_delta).enumerate() {
        csv += &format!("{i},{}", csv_row(&[a.lhs, a.rhs, a.discrepancy, b.discrepancy]));
    }
    Ok((Payload::EnergyIdentity(rep), m, vec![("energy_identity.csv".into(), csv)], Vec::new()))
}

fn ratios(experiment: Experiment, cfg: &RunConfig) -> Result<Parts> {
    let beta = cfg.ensemble.beta.expect("resolved");
    let count = cfg.ensemble.count;
    let mut reports: Vec<(String, RatioReport)> = Vec::new();
    if experiment == Experiment::IneqStrichartz {
        let spec = RandomFieldSpec::new(cfg.seed, cfg.bandwidth(), beta, count);
        for j in cfg.shells() {
            reports.push((format!("j{j}"), strichartz_ensemble(j, &spec)?));
        }
    } else {
        for &band in cfg.bands() {
            let spec = RandomFieldSpec::new(cfg.seed, band, beta, count);
            let rep = if experiment == Experiment::IneqKatoPonce {
                kato_ponce_ensemble(&spec, cfg.s())?
            } else {
                product_ensemble(&spec, cfg.s())?
            };
            reports.push((format!("k{band}"), rep));
        }
    }
    let mut m = BTreeMap::new();
    let maxima: Vec<f64> = reports.iter().map(|(_, r)| r.max_ratio()).collect();
    m.insert("max_ratio".into(), maxima.iter().copied().fold(0.0f64, f64::max));
    m.insert("degenerate".into(), reports.iter().map(|(_, r)| r.degenerate as f64).sum());
    if experiment == Experiment::IneqStrichartz {
        let inc = maxima.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
        m.insert("max_shell_increase".into(), inc);
    }
    let mut series = Vec::new();
    for (label, r) in &reports {
        m.insert(format!("max_ratio_{label}"), r.max_ratio());
        let mut csv = Vec::new();
        r.write_csv(&mut csv)?;
        series.push((format!("{}_{label}.csv", r.inequality), String::from_utf8(csv)?));
    }
    Ok((Payload::Ratios(reports.into_iter().map(|x| x.1).collect()), m, series, Vec::new()))
}

fn transference(cfg: &RunConfig) -> Result<Parts> {
    let t = &cfg.transference;
    let quad = QuadratureSpec::auto(cfg.s(), t.alpha, t.lattice_radius, t.tolerance);
    let rep = transference_check(cfg.s(), t.alpha, t.lattice_radius, &quad, t.sample_points)?;
    let m = metrics([
        ("max_discrepancy", rep.max_discrepancy),
        ("error_estimate", rep.error_estimate),
        ("periodization_l2_ratio", rep.periodization_l2_ratio),
    ]);
    let csv = "s,alpha,lattice_radius,max_discrepancy,error_estimate,torus_max_abs,periodization_l2_ratio\n".to_string()
        + &csv_row(&[
            rep.s,
            rep.alpha,
            rep.lattice_radius as f64,
            rep.max_discrepancy,
            rep.error_estimate,
            rep.torus_max_abs,
            rep.periodization_l2_ratio,
        ]);
    Ok((Payload::Transference(rep), m, vec![("transference.csv".into(), csv)], Vec::new()))
}
