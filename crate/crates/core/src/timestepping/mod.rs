//! Time integration of the Galerkin system.

mod config;
mod if_rk4;
mod oracle;
mod trajectory;

pub use config::{heuristic_dt, Adaptivity, SolverConfig, DEFAULT_DT_MIN, MAX_GROWTH, MAX_SHRINK, SAFETY};
pub use if_rk4::{if_rk4_step, solve, Integrator};
pub use oracle::{ode_oracle, ORACLE_MAX_CUTOFF, ORACLE_TOLERANCE};
pub(crate) use oracle::rk4_increment;
pub use trajectory::{StepRecord, Trajectory};
