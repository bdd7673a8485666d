//! The mZK vector field `∂_t u = -∂_{x1}Δu + λ|u|²∂_{x1}u` in spectral form.
//!
//! With `u = Σ û(k) e^{ik·x}`, the linear part acts as `iω(k)û(k)` with the
//! dispersion relation `ω(k) = k1³ + k1 k2²`; the nonlinear part is evaluated
//! pseudospectrally on a zero-padded grid large enough that the cubic
//! product is alias-free on the retained band.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{
    analyze_transposed, derivative, in_low_band, project_low, smooth_size, synthesize_transposed,
    SpectralField, TorusGrid,
};

/// Coefficient of the cubic term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquationParams {
    pub lambda: f64,
}

impl EquationParams {
    pub fn new(lambda: f64) -> Result<Self> {
        if !lambda.is_finite() {
            return Err(Error::Config(format!("lambda must be finite, got {lambda}")));
        }
        Ok(Self { lambda })
    }

    pub fn linear() -> Self {
        Self { lambda: 0.0 }
    }
}

impl Default for EquationParams {
    /// `λ = 6`, the coefficient of the equation as usually written.
    fn default() -> Self {
        Self { lambda: 6.0 }
    }
}

/// `ω(k) = k1³ + k1 k2²`.
pub fn dispersion(k: [i64; 2]) -> f64 {
    (k[0] * k[0] * k[0] + k[0] * k[1] * k[1]) as f64
}

/// Per-mode factors `e^{iω(k)t}` in grid storage order.
pub fn linear_phases(grid: TorusGrid, t: f64) -> Vec<Complex64> {
    grid.modes()
        .map(|(_, k)| Complex64::from_polar(1.0, dispersion(k) * t))
        .collect()
}

/// `W(t)`: exact solution operator of `∂_t u + ∂_{x1}Δu = 0`.
pub fn propagate_linear(t: f64, field: &SpectralField) -> SpectralField {
    if t == 0.0 {
        return field.clone();
    }
    field.map_modes(|k, c| c * Complex64::from_polar(1.0, dispersion(k) * t))
}

/// Padded grid size that makes a cubic product of bandwidth-`k` data
/// alias-free on the retained band (`≥ 4K + 1`).
pub fn dealiased_points(bandwidth: usize) -> usize {
    smooth_size(4 * bandwidth + 1)
}

/// `λ|u|²∂_{x1}u`, band-limited to the input grid, with zero aliasing error.
pub fn nonlinearity(field: &SpectralField, params: EquationParams) -> Result<SpectralField> {
    let grid = field.grid();
    if params.lambda == 0.0 {
        return Ok(SpectralField::zeros(grid));
    }
    let p = dealiased_points(grid.bandwidth());
    let u = synthesize_transposed(field, p)?;
    let mut ux = synthesize_transposed(&derivative(field, 0), p)?;
    let lambda = params.lambda;
    for (d, v) in ux.iter_mut().zip(&u) {
        *d *= lambda * v.norm_sqr();
    }
    if ux.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        // overflow: hand the integrator a non-finite field so it reports blow-up
        return Ok(SpectralField::from_raw(grid, vec![Complex64::new(f64::NAN, f64::NAN); grid.len()]));
    }
    analyze_transposed(ux, p, grid)
}

/// Nonlinear part of the Galerkin vector field, `λΠ_N(|Π_N u|²∂_{x1}Π_N u)`.
///
/// The product is evaluated on the smallest grid holding the ball `|k| ≤ N`.
pub fn galerkin_nonlinear(
    n: usize,
    field: &SpectralField,
    params: EquationParams,
) -> Result<SpectralField> {
    let grid = field.grid();
    check_cutoff(n, grid)?;
    if params.lambda == 0.0 {
        return Ok(SpectralField::zeros(grid));
    }
    let inner = TorusGrid::new(n.min(grid.bandwidth()));
    let low = project_low(n, &field.resampled(inner));
    let nl = project_low(n, &nonlinearity(&low, params)?);
    Ok(nl.resampled(grid))
}

/// Galerkin right-hand side: `iω(k)û(k)` everywhere plus the projected
/// nonlinearity inside `|k| ≤ N`. Modes outside the ball evolve linearly.
pub fn galerkin_rhs(n: usize, field: &SpectralField, params: EquationParams) -> Result<SpectralField> {
    let nl = galerkin_nonlinear(n, field, params)?;
    Ok(nl.map_modes(|k, c| {
        let i = field.grid().index_of(k).expect("same grid");
        c + Complex64::new(0.0, dispersion(k)) * field.coeffs()[i]
    }))
}

/// Untruncated vector field on the grid's band, `galerkin_rhs(K, ·)`.
pub fn full_rhs(field: &SpectralField, params: EquationParams) -> Result<SpectralField> {
    galerkin_rhs(field.grid().bandwidth(), field, params)
}

pub(crate) fn check_cutoff(n: usize, grid: TorusGrid) -> Result<()> {
    if n > grid.bandwidth() {
        return Err(Error::Config(format!(
            "Galerkin cutoff N = {n} exceeds grid bandwidth K = {}",
            grid.bandwidth()
        )));
    }
    Ok(())
}

/// Whether mode `k` feels the nonlinearity under cutoff `n`.
pub fn is_active(k: [i64; 2], n: usize) -> bool {
    in_low_band(k, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{cubic_convolution_oracle, hs_norm, project_high};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn test_field(k: usize, seed: u64) -> SpectralField {
        let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let mut next = move || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((state >> 11) as f64) / ((1u64 << 53) as f64) - 0.5
        };
        SpectralField::from_fn(TorusGrid::new(k), |_| c(next(), next()))
    }

    #[test]
    fn dispersion_values() {
        assert_eq!(dispersion([0, 5]), 0.0);
        assert_eq!(dispersion([1, 0]), 1.0);
        assert_eq!(dispersion([2, 3]), 26.0);
        assert_eq!(dispersion([-2, 3]), -26.0);
    }

    #[test]
    fn propagator_identity_isometry_group() {
        let f = test_field(5, 1);
        assert_eq!(propagate_linear(0.0, &f), f);
        let w = propagate_linear(0.37, &f);
        for s in [0.0, 1.0, 2.5] {
            let (a, b) = (hs_norm(s, &w), hs_norm(s, &f));
            assert!((a - b).abs() <= 1e-13 * b);
        }
        let two = propagate_linear(0.2, &propagate_linear(0.17, &f));
        assert!(two.max_diff(&w).unwrap() < 1e-13);
    }

    #[test]
    fn nonlinearity_matches_oracle() {
        for seed in 0..5 {
            let f = test_field(4, seed);
            let fast = nonlinearity(&f, EquationParams::default()).unwrap();
            let slow = cubic_convolution_oracle(&f, 6.0).unwrap();
            assert!(fast.max_diff(&slow).unwrap() < 1e-12);
        }
    }

    #[test]
    fn nonlinearity_constant_and_single_mode() {
        let g = TorusGrid::new(6);
        let cst = SpectralField::from_modes(g, &[([0, 0], c(2.0, 1.0))]).unwrap();
        assert!(nonlinearity(&cst, EquationParams::default()).unwrap().l2_norm() < 1e-14);

        let a = c(0.2, 0.7);
        let m = 5i64;
        let lambda = 1.5;
        let f = SpectralField::from_modes(g, &[([m, -1], a)]).unwrap();
        let out = nonlinearity(&f, EquationParams { lambda }).unwrap();
        let expect = c(0.0, lambda * m as f64) * a.norm_sqr() * a;
        assert!((out.mode([m, -1]) - expect).norm() < 1e-14);
        assert!((out.l2_norm() - expect.norm()).abs() < 1e-14);
    }

    #[test]
    fn galerkin_rhs_linear_cases() {
        let f = test_field(5, 7);
        let lin = galerkin_rhs(3, &f, EquationParams::linear()).unwrap();
        let expect = f.map_modes(|k, v| c(0.0, dispersion(k)) * v);
        assert_eq!(lin, expect);

        let tail = project_high(3, &f);
        let r = galerkin_rhs(3, &tail, EquationParams::default()).unwrap();
        let expect = tail.map_modes(|k, v| c(0.0, dispersion(k)) * v);
        assert_eq!(r, expect);
    }

    #[test]
    fn galerkin_rhs_conserves_l2() {
        for seed in 0..5 {
            let f = test_field(6, seed);
            for n in [2, 4, 6] {
                let r = galerkin_rhs(n, &f, EquationParams::default()).unwrap();
                let re = r.inner(&f).unwrap().re;
                assert!(re.abs() <= 1e-12 * f.l2_norm().powi(3), "seed {seed} n {n}: {re}");
            }
        }
    }

    #[test]
    fn full_rhs_is_galerkin_at_k() {
        let f = test_field(4, 3);
        let p = EquationParams { lambda: 2.0 };
        assert_eq!(full_rhs(&f, p).unwrap(), galerkin_rhs(4, &f, p).unwrap());
    }

    #[test]
    fn cutoff_above_band_rejected() {
        let f = test_field(3, 0);
        assert!(matches!(
            galerkin_rhs(4, &f, EquationParams::default()),
            Err(Error::Config(_))
        ));
    }
}
