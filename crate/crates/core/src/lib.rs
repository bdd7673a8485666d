//! Pseudospectral Galerkin solver and numerical verification laboratory for
//! the complex modified Zakharov–Kuznetsov equation
//!
//! ```text
//! ∂_t u + ∂_{x1}Δu = λ|u|²∂_{x1}u,   x ∈ T² = R²/(2πZ)²
//! ```
//!
//! Modules:
//! - [`spectral`]: grids, fields, transforms, Sobolev multipliers, projections.
//! - [`dynamics`]: dispersion, linear propagator, dealiased nonlinearity.
//! - [`timestepping`]: integrating-factor RK4 and a reference ODE integrator.
//! - [`illposed`]: explicit two-mode families and the divergence experiment.
//! - [`inequality`]: randomized checks of Strichartz, product, commutator and
//!   transference estimates.
//! - [`diagnostics`]: conservation, energy identity, a priori bounds and
//!   Galerkin convergence.

pub mod diagnostics;
pub mod dynamics;
pub mod error;
pub mod illposed;
pub mod inequality;
pub mod report;
pub mod spectral;
pub mod stats;
pub mod timestepping;

pub use dynamics::EquationParams;
pub use error::{Error, Result};
pub use report::ExperimentReport;
pub use spectral::{SobolevIndex, SpectralField, TorusGrid};
pub use timestepping::{Adaptivity, SolverConfig, Trajectory};
