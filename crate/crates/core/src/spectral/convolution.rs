use num_complex::Complex64;

use super::field::SpectralField;
use crate::error::{Error, Result};

/// Largest bandwidth accepted by [`cubic_convolution_oracle`].
pub const ORACLE_MAX_BANDWIDTH: usize = 8;

/// Exact spectral form of `λ |u|² ∂_{x1} u` by direct triple summation:
///
/// `out(ℓ) = λ i Σ_{ℓ = k1 - k2 + k3} k3_1 û(k1) conj(û(k2)) û(k3)`
///
/// over representable triples, keeping outputs `ℓ` on the input grid.
/// Cost is `O(K⁶)`, so bandwidths above [`ORACLE_MAX_BANDWIDTH`] are refused.
pub fn cubic_convolution_oracle(field: &SpectralField, lambda: f64) -> Result<SpectralField> {
    let k = field.grid().bandwidth();
    if k > ORACLE_MAX_BANDWIDTH {
        return Err(Error::Refused(format!(
            "convolution oracle is O(K^6); bandwidth {k} exceeds limit {ORACLE_MAX_BANDWIDTH}"
        )));
    }
    Ok(cubic_convolution(field, lambda))
}

/// Unguarded triple sum over the nonzero support of `field`.
pub(crate) fn cubic_convolution(field: &SpectralField, lambda: f64) -> SpectralField {
    let grid = field.grid();
    let support: Vec<([i64; 2], Complex64)> = grid
        .modes()
        .map(|(i, k)| (k, field.coeffs()[i]))
        .filter(|(_, c)| *c != Complex64::default())
        .collect();
    let mut out = vec![Complex64::default(); grid.len()];
    for &(k1, a) in &support {
        for &(k2, b) in &support {
            let ab = a * b.conj();
            for &(k3, c) in &support {
                if k3[0] == 0 {
                    continue;
                }
                let l = [k1[0] - k2[0] + k3[0], k1[1] - k2[1] + k3[1]];
                if let Some(idx) = grid.index_of(l) {
                    out[idx] += ab * c * k3[0] as f64;
                }
            }
        }
    }
    let factor = Complex64::new(0.0, lambda);
    out.iter_mut().for_each(|v| *v *= factor);
    SpectralField::from_raw(grid, out)
}
