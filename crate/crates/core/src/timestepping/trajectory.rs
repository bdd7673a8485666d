use std::io::Write;

use serde::{Deserialize, Serialize};

use super::config::SolverConfig;
use crate::error::Result;
use crate::spectral::{Snapshot, SpectralField};

/// Diagnostics of one accepted step, taken at the end of the step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub t: f64,
    pub dt: f64,
    pub l2_norm: f64,
    pub hs_norm: f64,
    /// Rejected attempts before this step was accepted.
    pub rejected: usize,
}

/// Recorded states `u_N(t)` of one Galerkin run, first entry the datum.
#[derive(Debug, Clone)]
pub struct Trajectory {
    config: SolverConfig,
    times: Vec<f64>,
    snapshots: Vec<SpectralField>,
    steps: Vec<StepRecord>,
}

impl Trajectory {
    pub fn new(config: SolverConfig, u0: SpectralField) -> Self {
        Self {
            config,
            times: vec![0.0],
            snapshots: vec![u0],
            steps: Vec::new(),
        }
    }

    pub(crate) fn push_snapshot(&mut self, t: f64, u: SpectralField) {
        debug_assert!(t > self.last_time());
        self.times.push(t);
        self.snapshots.push(u);
    }

    pub(crate) fn set_steps(&mut self, steps: Vec<StepRecord>) {
        self.steps = steps;
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn snapshots(&self) -> &[SpectralField] {
        &self.snapshots
    }

    pub fn steps(&self) -> &[StepRecord] {
        &self.steps
    }

    pub fn last_time(&self) -> f64 {
        *self.times.last().expect("trajectory is never empty")
    }

    pub fn final_state(&self) -> &SpectralField {
        self.snapshots.last().expect("trajectory is never empty")
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn rejected_steps(&self) -> usize {
        self.steps.iter().map(|s| s.rejected).sum()
    }

    /// Snapshot `i` in the binary exchange format.
    pub fn snapshot(&self, i: usize) -> Snapshot {
        Snapshot {
            time: self.times[i],
            lambda: self.config.params.lambda,
            s: self.config.sobolev_s,
            field: self.snapshots[i].clone(),
        }
    }

    /// Per-step series as CSV: `t,l2_norm,hs_norm,dt,rejected_steps`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "t,l2_norm,hs_norm,dt,rejected_steps")?;
        if let Some(u0) = self.snapshots.first() {
            writeln!(
                w,
                "{},{},{},{},{}",
                0.0,
                u0.l2_norm(),
                crate::spectral::hs_norm(self.config.sobolev_s, u0),
                0.0,
                0
            )?;
        }
        for s in &self.steps {
            writeln!(w, "{},{},{},{},{}", s.t, s.l2_norm, s.hs_norm, s.dt, s.rejected)?;
        }
        Ok(())
    }
}
