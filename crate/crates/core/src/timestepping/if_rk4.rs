use num_complex::Complex64;

use super::config::{Adaptivity, SolverConfig, MAX_GROWTH, MAX_SHRINK, SAFETY};
use super::trajectory::{StepRecord, Trajectory};
use crate::dynamics::{galerkin_nonlinear, linear_phases, EquationParams};
use crate::error::{Error, Result};
use crate::spectral::{hs_norm, SpectralField, TorusGrid};

/// Phase factors `e^{iωh/2}`, `e^{iωh}` for one step size.
struct Phases {
    dt: f64,
    half: Vec<Complex64>,
    full: Vec<Complex64>,
}

impl Phases {
    fn new(grid: TorusGrid, dt: f64) -> Self {
        Self {
            dt,
            half: linear_phases(grid, 0.5 * dt),
            full: linear_phases(grid, dt),
        }
    }
}

/// One Lawson (integrating-factor) RK4 step.
///
/// The substitution `v = W(-t)u` removes the linear part; classical RK4 is
/// applied to `v` and the result mapped back, so the dispersion is
/// integrated exactly and `λ = 0` reduces to `W(dt)`.
fn lawson_step(
    u: &SpectralField,
    phases: &Phases,
    nl: &mut impl FnMut(&SpectralField) -> Result<SpectralField>,
) -> Result<SpectralField> {
    let dt = phases.dt;
    let grid = u.grid();
    let (eh, ef) = (&phases.half, &phases.full);
    let uc = u.coeffs();
    let h2 = 0.5 * dt;

    let k1 = nl(u)?;
    let a: Vec<Complex64> = (0..uc.len()).map(|i| eh[i] * (uc[i] + k1.coeffs()[i] * h2)).collect();
    let k2 = nl(&SpectralField::from_raw(grid, a))?;
    let b: Vec<Complex64> = (0..uc.len()).map(|i| eh[i] * uc[i] + k2.coeffs()[i] * h2).collect();
    let k3 = nl(&SpectralField::from_raw(grid, b))?;
    let c: Vec<Complex64> = (0..uc.len())
        .map(|i| ef[i] * uc[i] + eh[i] * k3.coeffs()[i] * dt)
        .collect();
    let k4 = nl(&SpectralField::from_raw(grid, c))?;

    let w = dt / 6.0;
    let out = (0..uc.len())
        .map(|i| {
            let incr = ef[i] * k1.coeffs()[i]
                + eh[i] * (k2.coeffs()[i] + k3.coeffs()[i]) * 2.0
                + k4.coeffs()[i];
            ef[i] * uc[i] + incr * w
        })
        .collect();
    Ok(SpectralField::from_raw(grid, out))
}

/// One integrating-factor RK4 step of the Galerkin system with cutoff `n`.
///
/// A non-finite result is reported as [`Error::BlowUp`] with the time
/// measured from the start of the step.
pub fn if_rk4_step(
    state: &SpectralField,
    dt: f64,
    n: usize,
    params: EquationParams,
) -> Result<SpectralField> {
    crate::dynamics::check_cutoff(n, state.grid())?;
    if dt == 0.0 {
        return Ok(state.clone());
    }
    let phases = Phases::new(state.grid(), dt);
    let out = lawson_step(state, &phases, &mut |f| galerkin_nonlinear(n, f, params))?;
    if !out.is_finite() {
        return Err(Error::BlowUp { time: dt });
    }
    Ok(out)
}

/// Stateful driver that advances one Galerkin trajectory.
pub struct Integrator {
    cfg: SolverConfig,
    t: f64,
    u: SpectralField,
    dt_next: f64,
    cache: Vec<Phases>,
    log: Vec<StepRecord>,
}

impl Integrator {
    pub fn new(u0: SpectralField, t0: f64, cfg: SolverConfig) -> Result<Self> {
        cfg.validate(u0.grid())?;
        Ok(Self {
            dt_next: cfg.dt,
            cfg,
            t: t0,
            u: u0,
            cache: Vec::new(),
            log: Vec::new(),
        })
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn state(&self) -> &SpectralField {
        &self.u
    }

    pub fn log(&self) -> &[StepRecord] {
        &self.log
    }

    pub fn into_log(self) -> Vec<StepRecord> {
        self.log
    }

    fn phases(&mut self, dt: f64) -> usize {
        if let Some(i) = self.cache.iter().position(|p| p.dt == dt) {
            return i;
        }
        // Fixed stepping needs at most a couple of entries; adaptive steps
        // rarely repeat exactly.
        if self.cache.len() >= 4 {
            self.cache.remove(0);
        }
        self.cache.push(Phases::new(self.u.grid(), dt));
        self.cache.len() - 1
    }

    fn step_from(&mut self, u: &SpectralField, dt: f64) -> Result<SpectralField> {
        let idx = self.phases(dt);
        let (n, params) = (self.cfg.cutoff, self.cfg.params);
        let out = lawson_step(u, &self.cache[idx], &mut |f| galerkin_nonlinear(n, f, params))?;
        if !out.is_finite() {
            return Err(Error::BlowUp { time: self.t + dt });
        }
        Ok(out)
    }

    fn record(&mut self, dt: f64, rejected: usize) {
        self.log.push(StepRecord {
            t: self.t,
            dt,
            l2_norm: self.u.l2_norm(),
            hs_norm: hs_norm(self.cfg.sobolev_s, &self.u),
            rejected,
        });
    }

    /// Takes one accepted step towards `t_target` (never past it) and
    /// returns `true` once the target is reached.
    pub fn step_towards(&mut self, t_target: f64) -> Result<bool> {
        let remaining = t_target - self.t;
        let scale = t_target.abs().max(self.t.abs()).max(1.0);
        if remaining.abs() <= 4.0 * f64::EPSILON * scale {
            self.t = t_target;
            return Ok(true);
        }
        let dir = remaining.signum();
        match self.cfg.adaptivity {
            Adaptivity::Fixed => {
                let mut h = self.cfg.dt;
                let clipped = h >= remaining.abs() * (1.0 - 1e-12);
                if clipped {
                    h = remaining.abs();
                }
                let u = self.step_from(&self.u.clone(), dir * h)?;
                self.u = u;
                self.t = if clipped { t_target } else { self.t + dir * h };
                self.record(dir * h, 0);
                Ok(clipped)
            }
            Adaptivity::StepDoubling { tolerance } => {
                let mut rejected = 0;
                loop {
                    let mut h = self.dt_next;
                    let clipped = h >= remaining.abs() * (1.0 - 1e-12);
                    if clipped {
                        h = remaining.abs();
                    }
                    let u0 = self.u.clone();
                    let trial = self.step_from(&u0, dir * h).and_then(|big| {
                        let mid = self.step_from(&u0, dir * 0.5 * h)?;
                        Ok((big, self.step_from(&mid, dir * 0.5 * h)?))
                    });
                    let (big, small) = match trial {
                        Ok(pair) => pair,
                        // an overflowing trial step is just a very bad error estimate
                        Err(Error::BlowUp { time }) => {
                            rejected += 1;
                            self.dt_next = h * MAX_SHRINK;
                            if self.dt_next < self.cfg.dt_min {
                                return Err(Error::BlowUp { time });
                            }
                            continue;
                        }
                        Err(e) => return Err(e),
                    };
                    let err = small.sub(&big)?.l2_norm() / 15.0;
                    let factor = if err == 0.0 {
                        MAX_GROWTH
                    } else {
                        (SAFETY * (tolerance / err).powf(0.2)).clamp(MAX_SHRINK, MAX_GROWTH)
                    };
                    if err <= tolerance {
                        self.u = small;
                        self.t = if clipped { t_target } else { self.t + dir * h };
                        let proposal = h * factor;
                        self.dt_next = if clipped {
                            self.dt_next.max(proposal)
                        } else {
                            proposal
                        };
                        self.record(dir * h, rejected);
                        return Ok(clipped);
                    }
                    rejected += 1;
                    self.dt_next = h * factor;
                    if self.dt_next < self.cfg.dt_min {
                        return Err(Error::Stiffness {
                            time: self.t,
                            dt: self.dt_next,
                        });
                    }
                }
            }
        }
    }

    /// Advances to `t_target`, which may lie before the current time
    /// (the same scheme run with negative steps).
    pub fn advance_to(&mut self, t_target: f64) -> Result<()> {
        while !self.step_towards(t_target)? {}
        Ok(())
    }
}

/// Integrates the Galerkin system from `u0` on `[0, t_end]`.
pub fn solve(u0: &SpectralField, cfg: &SolverConfig) -> Result<Trajectory> {
    let mut integ = Integrator::new(u0.clone(), 0.0, cfg.clone())?;
    let mut traj = Trajectory::new(cfg.clone(), u0.clone());
    let mut since = 0;
    loop {
        let done = integ.step_towards(cfg.t_end)?;
        since += 1;
        if done || since == cfg.record_every {
            if integ.time() > traj.last_time() {
                traj.push_snapshot(integ.time(), integ.state().clone());
            }
            since = 0;
        }
        if done {
            break;
        }
    }
    traj.set_steps(integ.into_log());
    Ok(traj)
}
