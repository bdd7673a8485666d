use serde::{Deserialize, Serialize};

use crate::dynamics::{check_cutoff, EquationParams};
use crate::error::{Error, Result};
use crate::spectral::{sup_norm, SpectralField, TorusGrid};

/// Step-size policy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Adaptivity {
    /// Constant step `dt`; the last step is shortened to land on `t_end`.
    Fixed,
    /// Step doubling: one step of size `h` against two of size `h/2`; the
    /// estimated local error `‖u_h - u_{h/2}‖_{L²}/15` must stay below
    /// `tolerance`.
    StepDoubling { tolerance: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Galerkin cutoff `N`: modes with `|k| ≤ N` feel the nonlinearity.
    pub cutoff: usize,
    /// Base (or initial, when adaptive) step.
    pub dt: f64,
    pub adaptivity: Adaptivity,
    pub t_end: f64,
    pub params: EquationParams,
    /// Store a snapshot every this many accepted steps (the initial and
    /// final states are always stored).
    pub record_every: usize,
    /// Regularity used for the per-step `H^s` diagnostic.
    pub sobolev_s: f64,
    /// Adaptive steps below this raise [`Error::Stiffness`].
    pub dt_min: f64,
}

pub const SAFETY: f64 = 0.9;
pub const MAX_GROWTH: f64 = 2.0;
pub const MAX_SHRINK: f64 = 0.2;
pub const DEFAULT_DT_MIN: f64 = 1e-12;

impl SolverConfig {
    pub fn fixed(cutoff: usize, dt: f64, t_end: f64, params: EquationParams) -> Self {
        Self {
            cutoff,
            dt,
            adaptivity: Adaptivity::Fixed,
            t_end,
            params,
            record_every: 1,
            sobolev_s: 2.0,
            dt_min: DEFAULT_DT_MIN,
        }
    }

    pub fn adaptive(cutoff: usize, tolerance: f64, t_end: f64, params: EquationParams) -> Self {
        Self {
            adaptivity: Adaptivity::StepDoubling { tolerance },
            dt: 1e-2,
            ..Self::fixed(cutoff, 1e-2, t_end, params)
        }
    }

    pub fn with_record_every(mut self, every: usize) -> Self {
        self.record_every = every;
        self
    }

    pub fn with_sobolev(mut self, s: f64) -> Self {
        self.sobolev_s = s;
        self
    }

    pub fn validate(&self, grid: TorusGrid) -> Result<()> {
        check_cutoff(self.cutoff, grid)?;
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Config(format!("dt must be positive, got {}", self.dt)));
        }
        if let Adaptivity::StepDoubling { tolerance } = self.adaptivity {
            if !(tolerance > 0.0) {
                return Err(Error::Config(format!(
                    "step tolerance must be positive, got {tolerance}"
                )));
            }
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::Config(format!("t_end must be >= 0, got {}", self.t_end)));
        }
        if self.record_every == 0 {
            return Err(Error::Config("record_every must be >= 1".into()));
        }
        if !(self.dt_min > 0.0) {
            return Err(Error::Config("dt_min must be positive".into()));
        }
        Ok(())
    }
}

/// Fixed-step heuristic `min(dt_user, 0.5 / (1 + |λ| max|u|² N))`.
///
/// The linear part is integrated exactly, so only the nonlinear frequency
/// scale `λ‖u‖²_∞ N` limits the step.
pub fn heuristic_dt(u0: &SpectralField, cutoff: usize, params: EquationParams, dt_user: f64) -> Result<f64> {
    let sup = sup_norm(u0, 2)?;
    Ok(dt_user.min(0.5 / (1.0 + params.lambda.abs() * sup * sup * cutoff as f64)))
}
