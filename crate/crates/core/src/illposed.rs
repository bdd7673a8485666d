//! Explicit two-mode families `u_{m,j} = A e^{iΦ} + c_{m,j}` and the
//! experiment showing that the flow map is not uniformly continuous in `H^s`.
//!
//! With carrier mode `κ = (m, -1)`, `A = r m^{-s}`, `c_{m,0} = 0`,
//! `c_{m,1} = m^{-1/2}` and phase `Φ = m x1 - x2 + θt`, the phase speed
//! `θ = m(m² + 1 + λ(A² + c²))` makes `j = 0` an exact solution for every
//! `λ`. For `j = 1` the residual is `R = -2iλmA²c cos(Φ) e^{iΦ}`, i.e.
//! `-iλmA²c` on both modes `(2m, -2)` and `(0, 0)`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{full_rhs, EquationParams};
use crate::error::{Error, Result};
use crate::spectral::{hs_norm, SpectralField, TorusGrid};
use crate::stats::{exponent_regression, ExponentFit};
use crate::timestepping::{Adaptivity, Integrator, SolverConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ApproxFamilyParams {
    /// Carrier frequency.
    pub m: usize,
    /// Branch: 0 (exact solution) or 1 (shifted by the constant `m^{-1/2}`).
    pub j: u8,
    pub r: f64,
    pub s: f64,
    pub lambda: f64,
}

impl ApproxFamilyParams {
    pub fn new(m: usize, j: u8, r: f64, s: f64, lambda: f64) -> Result<Self> {
        if m == 0 {
            return Err(Error::Config("carrier frequency m must be positive".into()));
        }
        if j > 1 {
            return Err(Error::Config(format!("family index j must be 0 or 1, got {j}")));
        }
        if !(r > 0.0) {
            return Err(Error::Config(format!("amplitude scale r must be positive, got {r}")));
        }
        Ok(Self { m, j, r, s, lambda })
    }

    pub fn carrier(&self) -> [i64; 2] {
        [self.m as i64, -1]
    }

    /// `A = r m^{-s}`.
    pub fn amplitude(&self) -> f64 {
        self.r * (self.m as f64).powf(-self.s)
    }

    /// `c_{m,j}`.
    pub fn offset(&self) -> f64 {
        if self.j == 1 {
            (self.m as f64).powf(-0.5)
        } else {
            0.0
        }
    }

    /// `θ = m(m² + 1 + λ(A² + c²))`.
    pub fn phase_speed(&self) -> f64 {
        let m = self.m as f64;
        let (a, c) = (self.amplitude(), self.offset());
        m * (m * m + 1.0 + self.lambda * (a * a + c * c))
    }

    fn check_grid(&self, grid: TorusGrid, need: usize) -> Result<()> {
        if need > grid.bandwidth() || grid.bandwidth() == 0 {
            return Err(Error::Config(format!(
                "bandwidth {} cannot represent the modes of the m = {} family (needs {need})",
                grid.bandwidth(),
                self.m
            )));
        }
        Ok(())
    }
}

/// `u_{m,j}(t)`: `û(m,-1) = A e^{iθt}`, `û(0,0) = c_{m,j}`.
pub fn family_field(p: &ApproxFamilyParams, t: f64, grid: TorusGrid) -> Result<SpectralField> {
    p.check_grid(grid, p.m)?;
    let carrier = Complex64::from_polar(p.amplitude(), p.phase_speed() * t);
    SpectralField::from_modes(
        grid,
        &[(p.carrier(), carrier), ([0, 0], Complex64::new(p.offset(), 0.0))],
    )
}

/// Analytic `∂_t u_{m,j}(t)`.
pub fn family_time_derivative(p: &ApproxFamilyParams, t: f64, grid: TorusGrid) -> Result<SpectralField> {
    p.check_grid(grid, p.m)?;
    let theta = p.phase_speed();
    let d = Complex64::new(0.0, theta) * Complex64::from_polar(p.amplitude(), theta * t);
    SpectralField::from_modes(grid, &[(p.carrier(), d)])
}

/// Closed-form residual `R_{m,j} = (∂_t + ∂_{x1}Δ)u - λ|u|²∂_{x1}u`.
///
/// Zero for `j = 0`; for `j = 1` it lives on `(2m, -2)` and `(0, 0)`, so the
/// grid must have bandwidth at least `2m`.
pub fn family_residual(p: &ApproxFamilyParams, t: f64, grid: TorusGrid) -> Result<SpectralField> {
    if p.j == 0 {
        p.check_grid(grid, p.m)?;
        return Ok(SpectralField::zeros(grid));
    }
    p.check_grid(grid, 2 * p.m)?;
    let (a, c) = (p.amplitude(), p.offset());
    let w = -p.lambda * p.m as f64 * a * a * c;
    let theta = p.phase_speed();
    SpectralField::from_modes(
        grid,
        &[
            ([2 * p.m as i64, -2], Complex64::new(0.0, w) * Complex64::from_polar(1.0, 2.0 * theta * t)),
            ([0, 0], Complex64::new(0.0, w)),
        ],
    )
}

/// How `∂_t u` is obtained in [`operator_residual`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeDerivative {
    Analytic,
    /// Fourth-order central difference with step `h`.
    FiniteDifference { h: f64 },
}

/// Residual computed from the operator: `∂_t u - full_rhs(u)`, with the
/// nonlinearity evaluated pseudospectrally on the given grid.
pub fn operator_residual(
    p: &ApproxFamilyParams,
    t: f64,
    grid: TorusGrid,
    dt: TimeDerivative,
) -> Result<SpectralField> {
    let params = EquationParams::new(p.lambda)?;
    let u = family_field(p, t, grid)?;
    let du = match dt {
        TimeDerivative::Analytic => family_time_derivative(p, t, grid)?,
        TimeDerivative::FiniteDifference { h } => {
            let at = |tau: f64| family_field(p, tau, grid);
            let (p2, p1, m1, m2) = (at(t + 2.0 * h)?, at(t + h)?, at(t - h)?, at(t - 2.0 * h)?);
            let c = |x: f64| Complex64::new(x, 0.0);
            m2.axpy(c(-8.0), &m1)?
                .axpy(c(8.0), &p1)?
                .axpy(c(-1.0), &p2)?
                .scale_real(1.0 / (12.0 * h))
        }
    };
    du.sub(&full_rhs(&u, params)?)
}

/// `max_x |R_{m,j}|` at time `t`, measured numerically (oversampled grid
/// maximum refined by Newton steps).
pub fn residual_sup(p: &ApproxFamilyParams, t: f64) -> Result<f64> {
    let grid = TorusGrid::new(2 * p.m + 1);
    crate::spectral::sup_norm_refined(&family_residual(p, t, grid)?, 4)
}

/// Result of integrating the exact `j = 0` family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactWaveReport {
    pub m: usize,
    pub r: f64,
    pub s: f64,
    pub lambda: f64,
    pub bandwidth: usize,
    pub t_end: f64,
    pub final_relative_error: f64,
    pub max_relative_error: f64,
    pub steps: usize,
    pub rejected_steps: usize,
    pub times: Vec<f64>,
    pub relative_errors: Vec<f64>,
}

/// Solves from `u_{m,0}(0)` and compares with the closed form.
pub fn exact_wave_test(
    p: &ApproxFamilyParams,
    bandwidth: usize,
    cfg: &SolverConfig,
) -> Result<ExactWaveReport> {
    let grid = TorusGrid::new(bandwidth);
    let p = ApproxFamilyParams { j: 0, ..*p };
    let u0 = family_field(&p, 0.0, grid)?;
    let traj = crate::timestepping::solve(&u0, cfg)?;
    let mut errors = Vec::with_capacity(traj.len());
    for (t, u) in traj.times().iter().zip(traj.snapshots()) {
        let exact = family_field(&p, *t, grid)?;
        errors.push(u.sub(&exact)?.l2_norm() / exact.l2_norm());
    }
    Ok(ExactWaveReport {
        m: p.m,
        r: p.r,
        s: p.s,
        lambda: p.lambda,
        bandwidth,
        t_end: cfg.t_end,
        final_relative_error: *errors.last().unwrap(),
        max_relative_error: errors.iter().copied().fold(0.0, f64::max),
        steps: traj.steps().len(),
        rejected_steps: traj.rejected_steps(),
        times: traj.times().to_vec(),
        relative_errors: errors,
    })
}

/// Settings of the divergence experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivergenceSettings {
    pub m_list: Vec<usize>,
    pub r: f64,
    pub s: f64,
    pub lambda: f64,
    pub t_end: f64,
    /// Base step of the integrator.
    pub dt: f64,
    pub adaptivity: Adaptivity,
    /// Number of equal sampling intervals on `[0, t_end]`.
    pub samples: usize,
    /// Grid bandwidth is `bandwidth_factor · m + bandwidth_margin`.
    pub bandwidth_factor: usize,
    pub bandwidth_margin: usize,
    /// Time at which the approximation error is fitted against `m`.
    pub fit_time: f64,
}

impl Default for DivergenceSettings {
    fn default() -> Self {
        Self {
            m_list: vec![4, 8, 16, 32],
            r: 1.0,
            s: 2.0,
            lambda: 1.0,
            t_end: 1.0,
            dt: 1.0 / 512.0,
            adaptivity: Adaptivity::Fixed,
            samples: 64,
            bandwidth_factor: 3,
            bandwidth_margin: 8,
            fit_time: 0.5,
        }
    }
}

impl DivergenceSettings {
    pub fn bandwidth_for(&self, m: usize) -> usize {
        self.bandwidth_factor * m + self.bandwidth_margin
    }

    pub fn sample_times(&self) -> Vec<f64> {
        (0..=self.samples)
            .map(|i| self.t_end * i as f64 / self.samples as f64)
            .collect()
    }

    fn fit_index(&self) -> usize {
        let times = self.sample_times();
        times
            .iter()
            .enumerate()
            .min_by(|a, b| {
                (a.1 - self.fit_time)
                    .abs()
                    .total_cmp(&(b.1 - self.fit_time).abs())
            })
            .map(|(i, _)| i)
            .unwrap_or(0)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m_list.is_empty() {
            return Err(Error::Config("m_list is empty".into()));
        }
        if self.samples == 0 {
            return Err(Error::Config("samples must be >= 1".into()));
        }
        for &m in &self.m_list {
            ApproxFamilyParams::new(m, 0, self.r, self.s, self.lambda)?;
            if self.bandwidth_for(m) < 3 * m {
                return Err(Error::Config(format!(
                    "bandwidth {} for m = {m} is below 3m; cubic interactions would be truncated",
                    self.bandwidth_for(m)
                )));
            }
        }
        EquationParams::new(self.lambda)?;
        Ok(())
    }
}

/// Time series for one carrier frequency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivergenceRun {
    pub m: usize,
    pub bandwidth: usize,
    pub amplitude: f64,
    pub offset: f64,
    /// `‖u_{m,1}(0) - u_{m,0}(0)‖_{H^s}`.
    pub initial_distance: f64,
    pub times: Vec<f64>,
    /// `D_m(t) = ‖u¹_m(t) - u⁰_m(t)‖_{H^s}` between the computed solutions.
    pub distance: Vec<f64>,
    /// `(r/2)|sin t|`.
    pub envelope: Vec<f64>,
    /// `‖u^j_m(t) - u_{m,j}(t)‖` in `L²` and `H^s`, computed vs. approximate.
    pub error0_l2: Vec<f64>,
    pub error0_hs: Vec<f64>,
    pub error1_l2: Vec<f64>,
    pub error1_hs: Vec<f64>,
    pub steps: [usize; 2],
    pub rejected_steps: [usize; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivergenceReport {
    pub settings: DivergenceSettings,
    pub runs: Vec<DivergenceRun>,
    /// Fit of `‖u¹_m - u_{m,1}‖_{L²}` against `m` at `fit_time`.
    pub error1_l2_fit: Option<ExponentFit>,
    /// Predicted exponent `1/2 - 2s`.
    pub predicted_exponent: f64,
    pub fit_time: f64,
    /// `max_{m,t} (‖v₀‖_{H^s} + ‖v₁‖_{H^s}) m^{7/16}`.
    pub empirical_error_constant: f64,
}

struct BranchSeries {
    states: Vec<SpectralField>,
    steps: usize,
    rejected: usize,
}

fn run_branch(p: &ApproxFamilyParams, grid: TorusGrid, settings: &DivergenceSettings) -> Result<BranchSeries> {
    let u0 = family_field(p, 0.0, grid)?;
    let cfg = SolverConfig {
        adaptivity: settings.adaptivity,
        ..SolverConfig::fixed(grid.bandwidth(), settings.dt, settings.t_end, EquationParams::new(p.lambda)?)
    }
    .with_sobolev(p.s);
    let mut integ = Integrator::new(u0.clone(), 0.0, cfg)?;
    let mut states = vec![u0];
    for &t in &settings.sample_times()[1..] {
        integ.advance_to(t).map_err(|e| match e {
            Error::BlowUp { time } => Error::BlowUp { time },
            other => Error::Config(format!("m = {}, j = {}: {other}", p.m, p.j)),
        })?;
        states.push(integ.state().clone());
    }
    let log = integ.log();
    Ok(BranchSeries {
        states,
        steps: log.len(),
        rejected: log.iter().map(|r| r.rejected).sum(),
    })
}

fn divergence_run(m: usize, settings: &DivergenceSettings) -> Result<DivergenceRun> {
    let grid = TorusGrid::new(settings.bandwidth_for(m));
    let fam = |j| ApproxFamilyParams::new(m, j, settings.r, settings.s, settings.lambda);
    let (p0, p1) = (fam(0)?, fam(1)?);
    let (b0, b1) = rayon::join(
        || run_branch(&p0, grid, settings),
        || run_branch(&p1, grid, settings),
    );
    let (b0, b1) = (b0?, b1?);
    let times = settings.sample_times();
    let s = settings.s;
    let mut run = DivergenceRun {
        m,
        bandwidth: grid.bandwidth(),
        amplitude: p0.amplitude(),
        offset: p1.offset(),
        initial_distance: hs_norm(s, &family_field(&p1, 0.0, grid)?.sub(&family_field(&p0, 0.0, grid)?)?),
        times: times.clone(),
        distance: Vec::new(),
        envelope: Vec::new(),
        error0_l2: Vec::new(),
        error0_hs: Vec::new(),
        error1_l2: Vec::new(),
        error1_hs: Vec::new(),
        steps: [b0.steps, b1.steps],
        rejected_steps: [b0.rejected, b1.rejected],
    };
    for (i, &t) in times.iter().enumerate() {
        let (u0, u1) = (&b0.states[i], &b1.states[i]);
        run.distance.push(hs_norm(s, &u1.sub(u0)?));
        run.envelope.push(0.5 * settings.r * t.sin().abs());
        let v0 = u0.sub(&family_field(&p0, t, grid)?)?;
        let v1 = u1.sub(&family_field(&p1, t, grid)?)?;
        run.error0_l2.push(v0.l2_norm());
        run.error0_hs.push(hs_norm(s, &v0));
        run.error1_l2.push(v1.l2_norm());
        run.error1_hs.push(hs_norm(s, &v1));
    }
    Ok(run)
}

/// Solves the equation from `u_{m,0}(0)` and `u_{m,1}(0)` for each `m` and
/// records how far the solutions separate and how well the families track them.
pub fn divergence_experiment(settings: &DivergenceSettings) -> Result<DivergenceReport> {
    settings.validate()?;
    let runs: Vec<DivergenceRun> = settings
        .m_list
        .par_iter()
        .map(|&m| divergence_run(m, settings))
        .collect::<Result<_>>()?;
    let fit_index = settings.fit_index();
    let series: Vec<(f64, f64)> = runs
        .iter()
        .map(|r| (r.m as f64, r.error1_l2[fit_index]))
        .collect();
    let error1_l2_fit = if series.len() >= 3 {
        exponent_regression(&series).ok()
    } else {
        None
    };
    let empirical_error_constant = runs
        .iter()
        .flat_map(|r| {
            let w = (r.m as f64).powf(7.0 / 16.0);
            r.error0_hs
                .iter()
                .zip(&r.error1_hs)
                .map(move |(a, b)| (a + b) * w)
        })
        .fold(0.0, f64::max);
    Ok(DivergenceReport {
        predicted_exponent: 0.5 - 2.0 * settings.s,
        fit_time: settings.sample_times()[fit_index],
        settings: settings.clone(),
        runs,
        error1_l2_fit,
        empirical_error_constant,
    })
}

/// [`divergence_experiment`] wrapped as an [`ExperimentReport`](crate::ExperimentReport).
pub fn run_divergence_experiment(settings: &DivergenceSettings) -> Result<crate::ExperimentReport> {
    let start = std::time::Instant::now();
    let report = divergence_experiment(settings)?;
    Ok(crate::ExperimentReport::new(
        "illposed",
        serde_json::to_value(settings).unwrap_or_default(),
        crate::report::Payload::Divergence(report),
        start.elapsed().as_secs_f64(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::sup_norm;

    #[test]
    fn derived_quantities() {
        let p = ApproxFamilyParams::new(4, 1, 1.0, 2.0, 1.0).unwrap();
        assert_eq!(p.amplitude(), 1.0 / 16.0);
        assert_eq!(p.offset(), 0.5);
        let expected_theta = 4.0 * (16.0 + 1.0 + 1.0 / 256.0 + 0.25);
        assert!((p.phase_speed() - expected_theta).abs() < 1e-12);
        assert_eq!(ApproxFamilyParams::new(4, 0, 1.0, 2.0, 1.0).unwrap().offset(), 0.0);
        assert!(ApproxFamilyParams::new(4, 2, 1.0, 2.0, 1.0).is_err());
        assert!(ApproxFamilyParams::new(0, 0, 1.0, 2.0, 1.0).is_err());
    }

    #[test]
    fn family_norms() {
        let g = TorusGrid::new(20);
        for m in [2usize, 4, 9] {
            for (r, s) in [(1.0, 2.0), (0.5, 1.8)] {
                let f0 = family_field(&ApproxFamilyParams::new(m, 0, r, s, 1.0).unwrap(), 0.0, g).unwrap();
                let f1 = family_field(&ApproxFamilyParams::new(m, 1, r, s, 1.0).unwrap(), 0.0, g).unwrap();
                let mf = m as f64;
                let expect = r * r * mf.powf(-2.0 * s) + 1.0 / mf;
                assert!((f1.l2_norm().powi(2) - expect).abs() < 1e-15);
                let d = hs_norm(s, &f0.sub(&f1).unwrap());
                assert!((d - mf.powf(-0.5)).abs() < 1e-15);
                let later = family_field(&ApproxFamilyParams::new(m, 1, r, s, 1.0).unwrap(), 0.7, g).unwrap();
                assert!((hs_norm(s, &later) - hs_norm(s, &f1)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn family_requires_bandwidth() {
        let p = ApproxFamilyParams::new(5, 1, 1.0, 2.0, 1.0).unwrap();
        assert!(matches!(family_field(&p, 0.0, TorusGrid::new(4)), Err(Error::Config(_))));
        assert!(matches!(family_residual(&p, 0.0, TorusGrid::new(9)), Err(Error::Config(_))));
    }

    #[test]
    fn residual_zero_for_exact_branch() {
        let p = ApproxFamilyParams::new(3, 0, 1.0, 2.0, 1.0).unwrap();
        let g = TorusGrid::new(17);
        assert_eq!(family_residual(&p, 0.3, g).unwrap().l2_norm(), 0.0);
        let op = operator_residual(&p, 0.3, g, TimeDerivative::Analytic).unwrap();
        assert!(sup_norm(&op, 2).unwrap() < 1e-11);
    }

    #[test]
    fn residual_matches_operator() {
        for (m, lambda) in [(3usize, 1.0), (5, 6.0)] {
            let p = ApproxFamilyParams::new(m, 1, 1.0, 2.0, lambda).unwrap();
            let g = TorusGrid::new(3 * m + 2);
            for t in [0.0, 0.41] {
                let closed = family_residual(&p, t, g).unwrap();
                let op = operator_residual(&p, t, g, TimeDerivative::Analytic).unwrap();
                assert!(sup_norm(&op.sub(&closed).unwrap(), 2).unwrap() < 1e-11);
            }
        }
    }

    #[test]
    fn residual_sup_law() {
        for m in [4usize, 7, 16] {
            for lambda in [1.0, 6.0] {
                let p = ApproxFamilyParams::new(m, 1, 1.3, 2.0, lambda).unwrap();
                let sup = residual_sup(&p, 0.37).unwrap();
                let law = 2.0 * lambda * 1.3 * 1.3 * (m as f64).powf(0.5 - 4.0);
                assert!((sup / law - 1.0).abs() < 1e-10);
            }
        }
    }
}
