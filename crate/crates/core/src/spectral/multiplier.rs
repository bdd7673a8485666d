//! Fourier multipliers: Bessel potentials `J^s`, sharp projections `Π_N`,
//! and dyadic Littlewood–Paley shells `Q^j`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::field::SpectralField;
use super::grid::mode_norm_sq;

/// Regularity exponent of a Sobolev space `H^s`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SobolevIndex(pub f64);

impl SobolevIndex {
    /// Lower bound of the well-posedness theory for the flow.
    pub const WELL_POSED_THRESHOLD: f64 = 5.0 / 3.0;

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_well_posed_regime(self) -> bool {
        self.0 > Self::WELL_POSED_THRESHOLD
    }
}

/// `⟨k⟩^s = (1 + |k|²)^{s/2}`.
pub fn bracket_pow(k: [i64; 2], s: f64) -> f64 {
    let q = 1.0 + mode_norm_sq(k) as f64;
    if s == 0.0 {
        1.0
    } else if s == 2.0 {
        q
    } else {
        q.powf(0.5 * s)
    }
}

/// `J^s`: multiplies `û(k)` by `⟨k⟩^s`.
pub fn apply_sobolev_weight(s: f64, field: &SpectralField) -> SpectralField {
    if s == 0.0 {
        return field.clone();
    }
    field.map_modes(|k, c| c * bracket_pow(k, s))
}

/// `‖u‖_{H^s} = (Σ_k ⟨k⟩^{2s} |û(k)|²)^{1/2}`.
pub fn hs_norm(s: f64, field: &SpectralField) -> f64 {
    hs_norm_sq(s, field).sqrt()
}

pub fn hs_norm_sq(s: f64, field: &SpectralField) -> f64 {
    let g = field.grid();
    field
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, c)| bracket_pow(g.mode_at(i), 2.0 * s) * c.norm_sqr())
        .sum()
}

/// Whether `|k| ≤ n` (Euclidean ball).
pub fn in_low_band(k: [i64; 2], n: usize) -> bool {
    mode_norm_sq(k) <= (n * n) as i64
}

/// `Π_N`: keeps modes with `|k| ≤ N`.
pub fn project_low(n: usize, field: &SpectralField) -> SpectralField {
    field.map_modes(|k, c| if in_low_band(k, n) { c } else { Complex64::default() })
}

/// `Π_{>N} = I - Π_N`.
pub fn project_high(n: usize, field: &SpectralField) -> SpectralField {
    field.map_modes(|k, c| if in_low_band(k, n) { Complex64::default() } else { c })
}

/// Whether `|k|` lies in the dyadic shell `j`: `[0, 1)` for `j = 0`,
/// `[2^{j-1}, 2^j)` otherwise.
pub fn in_shell(k: [i64; 2], j: u32) -> bool {
    let q = mode_norm_sq(k);
    if j == 0 {
        q == 0
    } else {
        let lo = 1i64 << (2 * (j - 1));
        let hi = 1i64 << (2 * j);
        q >= lo && q < hi
    }
}

/// `Q^j`: keeps modes in dyadic shell `j`.
pub fn dyadic_shell(j: u32, field: &SpectralField) -> SpectralField {
    field.map_modes(|k, c| if in_shell(k, j) { c } else { Complex64::default() })
}

/// Number of grid modes in shell `j`.
pub fn shell_size(j: u32, field: &SpectralField) -> usize {
    field.grid().modes().filter(|&(_, k)| in_shell(k, j)).count()
}
