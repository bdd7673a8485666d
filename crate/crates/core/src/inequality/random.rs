use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{bracket_pow, SpectralField, TorusGrid};

/// Random band-limited data: `û(k) = ⟨k⟩^{-β} a_k e^{iφ_k}` for `|k_i| ≤ band`,
/// with `a_k ~ U[1/2, 1]` and `φ_k ~ U[0, 2π)`.
///
/// Sample `i` is drawn from its own ChaCha8 stream, so the first `n` draws do
/// not depend on `count`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RandomFieldSpec {
    pub seed: u64,
    pub band: usize,
    pub beta: f64,
    pub count: usize,
}

impl RandomFieldSpec {
    pub fn new(seed: u64, band: usize, beta: f64, count: usize) -> Self {
        Self { seed, band, beta, count }
    }

    pub fn grid(&self) -> TorusGrid {
        TorusGrid::new(self.band)
    }
}

fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// The `index`-th draw of `spec`.
pub fn random_field(spec: &RandomFieldSpec, index: usize) -> SpectralField {
    let mut rng = stream(spec.seed, index as u64);
    SpectralField::from_fn(spec.grid(), |k| {
        let a: f64 = rng.gen_range(0.5..=1.0);
        let phi: f64 = rng.gen_range(0.0..2.0 * PI);
        Complex64::from_polar(a * bracket_pow(k, -spec.beta), phi)
    })
}

/// `spec.count` draws of `spec`.
pub fn random_band_limited(spec: &RandomFieldSpec) -> Result<Vec<SpectralField>> {
    if !spec.beta.is_finite() {
        return Err(Error::Config(format!("beta must be finite, got {}", spec.beta)));
    }
    Ok((0..spec.count).map(|i| random_field(spec, i)).collect())
}

/// `|û(k)| = amplitude · e^{-rate |k|}` with independent uniform phases.
pub fn exponential_profile(grid: TorusGrid, amplitude: f64, rate: f64, seed: u64) -> SpectralField {
    let mut rng = stream(seed, 0);
    SpectralField::from_fn(grid, |k| {
        let phi: f64 = rng.gen_range(0.0..2.0 * PI);
        let r = ((k[0] * k[0] + k[1] * k[1]) as f64).sqrt();
        Complex64::from_polar(amplitude * (-rate * r).exp(), phi)
    })
}
