//! Trajectory-level checks: conservation, the energy-derivative identity,
//! the `L¹_t L^∞_x` gradient functional, the a priori doubling bound and
//! Galerkin self-convergence.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{check_cutoff, EquationParams};
use crate::error::{Error, Result};
use crate::spectral::{
    bracket_pow, grad_sup_norm, hs_norm, in_low_band, project_high, project_low, SpectralField,
};
use crate::stats::{compensated_sum, exponent_regression, ExponentFit};
use crate::timestepping::{rk4_increment, Integrator, SolverConfig, Trajectory, ORACLE_MAX_CUTOFF};

/// Norm histories of a trajectory split at the Galerkin cutoff.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConservationLog {
    pub cutoff: usize,
    pub s: f64,
    pub times: Vec<f64>,
    pub l2: Vec<f64>,
    /// `‖J^s Π_N u(t)‖`.
    pub hs_low: Vec<f64>,
    /// `‖J^s Π_{>N} u(t)‖`.
    pub hs_tail: Vec<f64>,
    /// `‖u(t)‖/‖u(0)‖ - 1`.
    pub l2_relative_drift: Vec<f64>,
}

impl ConservationLog {
    pub fn from_trajectory(traj: &Trajectory, s: f64) -> Self {
        let cutoff = traj.config().cutoff;
        let mut log = Self {
            cutoff,
            s,
            times: traj.times().to_vec(),
            l2: Vec::new(),
            hs_low: Vec::new(),
            hs_tail: Vec::new(),
            l2_relative_drift: Vec::new(),
        };
        for u in traj.snapshots() {
            log.l2.push(u.l2_norm());
            log.hs_low.push(hs_norm(s, &project_low(cutoff, u)));
            log.hs_tail.push(hs_norm(s, &project_high(cutoff, u)));
        }
        let l0 = log.l2.first().copied().unwrap_or(0.0);
        log.l2_relative_drift = log
            .l2
            .iter()
            .map(|l| if l0 > 0.0 { l / l0 - 1.0 } else { 0.0 })
            .collect();
        log
    }

    /// `max_t |drift(t)|` divided by the elapsed time.
    pub fn l2_drift_rate(&self) -> f64 {
        let span = match (self.times.first(), self.times.last()) {
            (Some(a), Some(b)) if b > a => b - a,
            _ => return 0.0,
        };
        self.l2_relative_drift.iter().fold(0.0f64, |m, d| m.max(d.abs())) / span
    }

    /// `max_t |‖J^sΠ_{>N}u(t)‖ - ‖J^sΠ_{>N}u(0)‖|`.
    pub fn tail_variation(&self) -> f64 {
        let first = self.hs_tail.first().copied().unwrap_or(0.0);
        self.hs_tail.iter().fold(0.0f64, |m, h| m.max((h - first).abs()))
    }
}

/// `d/dt ‖J^sΠ_N u‖²` by finite differences and by the closed sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyIdentity {
    pub lhs: f64,
    pub rhs: f64,
    pub discrepancy: f64,
}

fn check_identity_cutoff(n: usize, u: &SpectralField) -> Result<()> {
    if n > ORACLE_MAX_CUTOFF {
        return Err(Error::Refused(format!(
            "energy identity sum is O(N^6); cutoff {n} exceeds {ORACLE_MAX_CUTOFF}"
        )));
    }
    check_cutoff(n, u.grid())
}

/// `2λ Re(i Σ_{|ℓ|≤N} ⟨ℓ⟩^{2s} Σ_{ℓ=k1-k2+k3} k3_1 u_{k1} ū_{k2} u_{k3} ū_ℓ)`,
/// all wavenumbers restricted to `|k| ≤ N`.
pub fn energy_identity_rhs(u: &SpectralField, n: usize, s: f64, params: EquationParams) -> Result<f64> {
    check_identity_cutoff(n, u)?;
    let support: Vec<([i64; 2], Complex64)> = u
        .grid()
        .modes()
        .filter(|&(i, k)| in_low_band(k, n) && u.coeffs()[i] != Complex64::default())
        .map(|(i, k)| (k, u.coeffs()[i]))
        .collect();
    let mut terms = Vec::new();
    for &(k1, a) in &support {
        for &(k2, b) in &support {
            let ab = a * b.conj();
            for &(k3, c) in &support {
                if k3[0] == 0 {
                    continue;
                }
                let l = [k1[0] - k2[0] + k3[0], k1[1] - k2[1] + k3[1]];
                if !in_low_band(l, n) {
                    continue;
                }
                let ul = u.mode(l);
                let z = Complex64::new(0.0, 1.0) * ab * c * k3[0] as f64 * ul.conj();
                terms.push(bracket_pow(l, 2.0 * s) * z.re);
            }
        }
    }
    Ok(2.0 * params.lambda * compensated_sum(terms))
}

/// Centered difference of `E(t) = ‖J^sΠ_N u(t)‖²` over one reference RK4
/// step forward and one backward, each of size `δ`, against
/// [`energy_identity_rhs`].
pub fn energy_identity_check(
    u: &SpectralField,
    n: usize,
    s: f64,
    params: EquationParams,
    delta: f64,
) -> Result<EnergyIdentity> {
    check_identity_cutoff(n, u)?;
    if !(delta > 0.0) {
        return Err(Error::Config(format!("finite-difference step must be positive, got {delta}")));
    }
    let low = project_low(n, u);
    let plus = rk4_increment(n, &low, delta, params);
    let minus = rk4_increment(n, &low, -delta, params);
    // E(+) - E(-) = Σ w Re((Δ₊ - Δ₋) conj(2u + Δ₊ + Δ₋)), free of the
    // cancellation in subtracting two nearly equal energies
    let grid = low.grid();
    let diff = compensated_sum(grid.modes().map(|(i, k)| {
        let (u0, p, m) = (low.coeffs()[i], plus.coeffs()[i], minus.coeffs()[i]);
        bracket_pow(k, 2.0 * s) * ((p - m) * (2.0 * u0 + p + m).conj()).re
    }));
    let lhs = diff / (2.0 * delta);
    let rhs = energy_identity_rhs(&low, n, s, params)?;
    Ok(EnergyIdentity { lhs, rhs, discrepancy: (lhs - rhs).abs() })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyIdentityReport {
    pub cutoff: usize,
    pub s: f64,
    pub lambda: f64,
    pub delta: f64,
    pub at_delta: Vec<EnergyIdentity>,
    pub at_half_delta: Vec<EnergyIdentity>,
    pub max_discrepancy: f64,
    /// `log2(Σ disc(δ) / Σ disc(δ/2))` over the ensemble.
    pub halving_slope: f64,
}

/// Runs [`energy_identity_check`] at `δ` and `δ/2` on every field.
pub fn energy_identity_study(
    fields: &[SpectralField],
    n: usize,
    s: f64,
    params: EquationParams,
    delta: f64,
) -> Result<EnergyIdentityReport> {
    let at = |d: f64| -> Result<Vec<EnergyIdentity>> {
        fields.iter().map(|u| energy_identity_check(u, n, s, params, d)).collect()
    };
    let (full, half) = (at(delta)?, at(0.5 * delta)?);
    let sum = |v: &[EnergyIdentity]| compensated_sum(v.iter().map(|e| e.discrepancy));
    Ok(EnergyIdentityReport {
        cutoff: n,
        s,
        lambda: params.lambda,
        delta,
        max_discrepancy: full.iter().fold(0.0f64, |m, e| m.max(e.discrepancy)),
        halving_slope: (sum(&full) / sum(&half)).log2(),
        at_delta: full,
        at_half_delta: half,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GradDiagnostic {
    /// `∫ ‖∇Π_N u(t)‖_{L^∞} dt` by the trapezoid rule over snapshots.
    pub integral: f64,
    /// `T^{1/2}(sup‖J^sΠ_N u‖ + T sup‖J^sΠ_N u‖³)`.
    pub functional: f64,
    /// `integral / functional`; absent when the functional vanishes.
    pub ratio: Option<f64>,
}

pub fn grad_l1linf_diagnostic(traj: &Trajectory, s: f64) -> Result<GradDiagnostic> {
    if traj.len() < 2 {
        return Err(Error::Data(format!(
            "gradient diagnostic needs at least 2 snapshots, got {}",
            traj.len()
        )));
    }
    let n = traj.config().cutoff;
    let times = traj.times();
    let mut grads = Vec::with_capacity(traj.len());
    let mut sup_hs = 0.0f64;
    for u in traj.snapshots() {
        let low = project_low(n, u);
        grads.push(grad_sup_norm(&low, 4)?);
        sup_hs = sup_hs.max(hs_norm(s, &low));
    }
    let integral = compensated_sum(
        times
            .windows(2)
            .zip(grads.windows(2))
            .map(|(t, g)| 0.5 * (t[1] - t[0]) * (g[0] + g[1])),
    );
    let span = times[times.len() - 1] - times[0];
    let functional = span.sqrt() * (sup_hs + span * sup_hs.powi(3));
    Ok(GradDiagnostic {
        integral,
        functional,
        ratio: (functional > 0.0).then(|| integral / functional),
    })
}

/// First snapshot time at which `‖J^sΠ_N u(t)‖` exceeds
/// `budget_factor · ‖J^sΠ_N u(0)‖`.
pub fn apriori_monitor(traj: &Trajectory, s: f64, budget_factor: f64) -> Option<f64> {
    let n = traj.config().cutoff;
    let hs: Vec<f64> = traj
        .snapshots()
        .iter()
        .map(|u| hs_norm(s, &project_low(n, u)))
        .collect();
    let budget = budget_factor * hs.first().copied().unwrap_or(0.0);
    traj.times()
        .iter()
        .zip(&hs)
        .find(|(_, h)| **h > budget)
        .map(|(t, _)| *t)
}

/// Output of a plain `simulate` run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationSummary {
    pub conservation: ConservationLog,
    pub l2_drift_rate: f64,
    pub tail_variation: f64,
    pub steps: usize,
    pub rejected_steps: usize,
    pub apriori_violation: Option<f64>,
    pub gradient: Option<GradDiagnostic>,
}

impl SimulationSummary {
    pub fn from_trajectory(traj: &Trajectory, s: f64) -> Result<Self> {
        let conservation = ConservationLog::from_trajectory(traj, s);
        Ok(Self {
            l2_drift_rate: conservation.l2_drift_rate(),
            tail_variation: conservation.tail_variation(),
            conservation,
            steps: traj.steps().len(),
            rejected_steps: traj.rejected_steps(),
            apriori_violation: apriori_monitor(traj, s, 2.0),
            gradient: if traj.len() >= 2 { Some(grad_l1linf_diagnostic(traj, s)?) } else { None },
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub s: f64,
    pub reference_cutoff: usize,
    pub sample_times: Vec<f64>,
    /// `(N, sup_t ‖u_N(t) - u_ref(t)‖_{L²})` for every non-reference `N`.
    pub sup_errors: Vec<(usize, f64)>,
    pub fit: Option<ExponentFit>,
    pub strictly_decreasing: bool,
    /// Set when fewer than two cutoffs were given.
    pub insufficient_data: bool,
}

fn sampled_run(u0: &SpectralField, cfg: &SolverConfig, times: &[f64]) -> Result<Vec<SpectralField>> {
    let mut integ = Integrator::new(u0.clone(), 0.0, cfg.clone())?;
    let mut out = vec![u0.clone()];
    for &t in &times[1..] {
        integ.advance_to(t)?;
        out.push(integ.state().clone());
    }
    Ok(out)
}

/// Solves with each cutoff in `cutoffs` (all other settings from `cfg`) and
/// measures the distance to the run with the largest cutoff at `samples + 1`
/// equally spaced times.
pub fn galerkin_convergence(
    u0: &SpectralField,
    cutoffs: &[usize],
    s: f64,
    cfg: &SolverConfig,
    samples: usize,
) -> Result<ConvergenceReport> {
    let mut sorted = cutoffs.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let sample_times: Vec<f64> = (0..=samples.max(1))
        .map(|i| cfg.t_end * i as f64 / samples.max(1) as f64)
        .collect();
    let Some(&reference_cutoff) = sorted.last() else {
        return Err(Error::Config("cutoff list is empty".into()));
    };
    for &n in &sorted {
        check_cutoff(n, u0.grid())?;
    }
    if sorted.len() < 2 {
        return Ok(ConvergenceReport {
            s,
            reference_cutoff,
            sample_times,
            sup_errors: Vec::new(),
            fit: None,
            strictly_decreasing: false,
            insufficient_data: true,
        });
    }
    let runs: Vec<Vec<SpectralField>> = sorted
        .par_iter()
        .map(|&n| sampled_run(u0, &SolverConfig { cutoff: n, ..cfg.clone() }, &sample_times))
        .collect::<Result<_>>()?;
    let reference = runs.last().unwrap();
    let mut sup_errors = Vec::new();
    for (n, run) in sorted.iter().zip(&runs).take(sorted.len() - 1) {
        let mut worst = 0.0f64;
        for (a, b) in run.iter().zip(reference) {
            worst = worst.max(a.sub(b)?.l2_norm());
        }
        sup_errors.push((*n, worst));
    }
    let strictly_decreasing = sup_errors.windows(2).all(|w| w[1].1 < w[0].1);
    let series: Vec<(f64, f64)> = sup_errors.iter().map(|&(n, e)| (n as f64, e)).collect();
    Ok(ConvergenceReport {
        s,
        reference_cutoff,
        sample_times,
        fit: exponent_regression(&series).ok(),
        strictly_decreasing,
        sup_errors,
        insufficient_data: false,
    })
}
