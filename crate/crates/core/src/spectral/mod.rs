//! Grids, spectral fields, transforms and Fourier multipliers on the torus.

mod convolution;
mod field;
mod grid;
mod multiplier;
mod snapshot;
mod transform;

pub use convolution::{cubic_convolution_oracle, ORACLE_MAX_BANDWIDTH};
pub(crate) use convolution::cubic_convolution;
pub(crate) use transform::{analyze_transposed, synthesize_transposed};
pub use field::SpectralField;
pub use grid::{mode_norm_sq, TorusGrid};
pub use multiplier::{
    apply_sobolev_weight, bracket_pow, dyadic_shell, hs_norm, hs_norm_sq, in_low_band, in_shell,
    project_high, project_low, shell_size, SobolevIndex,
};
pub use snapshot::Snapshot;
pub use transform::{
    analyze, analyze_truncated, derivative, grad_sup_norm, oversampled_points, smooth_size,
    sup_norm, sup_norm_refined, synthesize, synthesize_padded, Samples, MAX_PADDED_POINTS,
};
