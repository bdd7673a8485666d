use num_complex::Complex64;

use super::grid::TorusGrid;
use crate::error::{Error, Result};

/// Fourier coefficients of a function on the torus.
///
/// Convention: `u(x) = Σ_k û(k) e^{ik·x}` with the normalized measure
/// `(2π)^{-2} dx`, so `‖u‖²_{L²} = Σ_k |û(k)|²`. Values are immutable once
/// built; every operation returns a new field.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: TorusGrid,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(grid: TorusGrid) -> Self {
        Self {
            grid,
            coeffs: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    /// Builds a field from coefficients in storage order.
    pub fn from_coeffs(grid: TorusGrid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::Config(format!(
                "expected {} coefficients for bandwidth {}, got {}",
                grid.len(),
                grid.bandwidth(),
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::Config("non-finite coefficient".into()));
        }
        Ok(Self { grid, coeffs })
    }

    /// Internal constructor for values known to be well formed.
    pub(crate) fn from_raw(grid: TorusGrid, coeffs: Vec<Complex64>) -> Self {
        debug_assert_eq!(coeffs.len(), grid.len());
        Self { grid, coeffs }
    }

    /// Field with the listed modes set and all others zero.
    pub fn from_modes(grid: TorusGrid, modes: &[([i64; 2], Complex64)]) -> Result<Self> {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); grid.len()];
        for &(k, c) in modes {
            let idx = grid.index_of(k).ok_or_else(|| {
                Error::Config(format!(
                    "mode ({}, {}) not representable at bandwidth {}",
                    k[0],
                    k[1],
                    grid.bandwidth()
                ))
            })?;
            coeffs[idx] += c;
        }
        Self::from_coeffs(grid, coeffs)
    }

    /// Field with coefficient `f(k)` at every representable mode.
    pub fn from_fn(grid: TorusGrid, mut f: impl FnMut([i64; 2]) -> Complex64) -> Self {
        let coeffs = grid.modes().map(|(_, k)| f(k)).collect();
        Self { grid, coeffs }
    }

    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Coefficient at mode `k`; zero outside the grid.
    pub fn mode(&self, k: [i64; 2]) -> Complex64 {
        self.grid
            .index_of(k)
            .map(|i| self.coeffs[i])
            .unwrap_or_default()
    }

    /// Applies `f(k, û(k))` mode by mode.
    pub fn map_modes(&self, mut f: impl FnMut([i64; 2], Complex64) -> Complex64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| f(self.grid.mode_at(i), c))
            .collect();
        Self::from_raw(self.grid, coeffs)
    }

    /// Re-expresses the field on another grid: modes outside the target
    /// band are dropped, missing modes are zero.
    pub fn resampled(&self, grid: TorusGrid) -> Self {
        if grid == self.grid {
            return self.clone();
        }
        let mut out = Self::zeros(grid);
        for (i, k) in self.grid.modes() {
            if let Some(j) = grid.index_of(k) {
                out.coeffs[j] = self.coeffs[i];
            }
        }
        out
    }

    pub fn scale(&self, a: Complex64) -> Self {
        Self::from_raw(self.grid, self.coeffs.iter().map(|&c| a * c).collect())
    }

    pub fn scale_real(&self, a: f64) -> Self {
        Self::from_raw(self.grid, self.coeffs.iter().map(|&c| c * a).collect())
    }

    pub fn conj(&self) -> Self {
        Self::from_raw(self.grid, self.coeffs.iter().map(|c| c.conj()).collect())
    }

    /// Coefficients of the pointwise complex conjugate `x ↦ conj(u(x))`,
    /// i.e. `k ↦ conj(û(-k))`.
    pub fn conj_function(&self) -> Self {
        let m = self.grid.points();
        let mut coeffs = vec![Complex64::new(0.0, 0.0); self.grid.len()];
        for a in 0..m {
            for b in 0..m {
                let na = (m - a) % m;
                let nb = (m - b) % m;
                coeffs[a * m + b] = self.coeffs[na * m + nb].conj();
            }
        }
        Self::from_raw(self.grid, coeffs)
    }

    /// `self + a * other`.
    pub fn axpy(&self, a: Complex64, other: &Self) -> Result<Self> {
        self.check_same_grid(other)?;
        Ok(Self::from_raw(
            self.grid,
            self.coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(&x, &y)| x + a * y)
                .collect(),
        ))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.axpy(Complex64::new(1.0, 0.0), other)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.axpy(Complex64::new(-1.0, 0.0), other)
    }

    /// Spectral inner product `Σ_k û(k) conj(v̂(k))` (= L² inner product).
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        self.check_same_grid(other)?;
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&x, &y)| x * y.conj())
            .sum())
    }

    pub fn l2_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs
            .iter()
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Largest coefficient difference, `max_k |û(k) - v̂(k)|`.
    pub fn max_diff(&self, other: &Self) -> Result<f64> {
        self.check_same_grid(other)?;
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max))
    }

    pub(crate) fn check_same_grid(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::Config(format!(
                "grid mismatch: bandwidth {} vs {}",
                self.grid.bandwidth(),
                other.grid.bandwidth()
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_wrong_length_and_nan() {
        let g = TorusGrid::new(1);
        assert!(SpectralField::from_coeffs(g, vec![Complex64::default(); 8]).is_err());
        let mut c = vec![Complex64::default(); 9];
        c[3] = Complex64::new(f64::NAN, 0.0);
        assert!(SpectralField::from_coeffs(g, c).is_err());
    }

    #[test]
    fn from_modes_rejects_outside_band() {
        let g = TorusGrid::new(2);
        let r = SpectralField::from_modes(g, &[([3, 0], Complex64::new(1.0, 0.0))]);
        assert!(matches!(r, Err(Error::Config(_))));
    }

    #[test]
    fn resample_round_trip() {
        let g = TorusGrid::new(2);
        let f = SpectralField::from_fn(g, |k| Complex64::new(k[0] as f64, k[1] as f64));
        let big = f.resampled(TorusGrid::new(5));
        assert_eq!(big.resampled(g), f);
        assert_eq!(big.mode([2, -2]), Complex64::new(2.0, -2.0));
        assert_eq!(big.mode([4, 0]), Complex64::default());
    }

    #[test]
    fn conj_function_flips_modes() {
        let g = TorusGrid::new(2);
        let f = SpectralField::from_modes(g, &[([1, -2], Complex64::new(0.5, 0.25))]).unwrap();
        let c = f.conj_function();
        assert_eq!(c.mode([-1, 2]), Complex64::new(0.5, -0.25));
        assert_eq!(c.mode([1, -2]), Complex64::default());
    }
}
