//! Workloads shared by the criterion benchmarks in `benches/`.

use mzk_core::inequality::{exponential_profile, random_field, RandomFieldSpec};
use mzk_core::{SpectralField, TorusGrid};

/// Smooth data on a bandwidth-`k` grid, fully populated.
pub fn smooth_field(k: usize) -> SpectralField {
    exponential_profile(TorusGrid::new(k), 1.0, 0.3, 1)
}

/// Flat-spectrum random data, the inequality harness input.
pub fn rough_field(k: usize, index: usize) -> SpectralField {
    random_field(&RandomFieldSpec::new(3, k, 0.0, index + 1), index)
}
