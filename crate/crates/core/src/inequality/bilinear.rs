use serde::{Deserialize, Serialize};

use super::random::{random_field, RandomFieldSpec};
use super::RatioReport;
use crate::error::{Error, Result};
use crate::spectral::{
    analyze_transposed, apply_sobolev_weight, grad_sup_norm, hs_norm, smooth_size, sup_norm,
    synthesize_transposed, SpectralField, TorusGrid,
};

/// One evaluation of `lhs ≤ C · rhs`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioSample {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

impl RatioSample {
    pub(crate) fn new(lhs: f64, rhs: f64) -> Result<Self> {
        if rhs == 0.0 {
            return Err(Error::Degenerate);
        }
        Ok(Self { lhs, rhs, ratio: lhs / rhs })
    }
}

/// Pointwise product `fg`, exact: both factors are lifted to bandwidth
/// `K_f + K_g` and multiplied on a grid fine enough to avoid aliasing.
pub fn exact_product(f: &SpectralField, g: &SpectralField) -> Result<SpectralField> {
    let band = f.grid().bandwidth() + g.grid().bandwidth();
    let out = TorusGrid::new(band);
    let p = smooth_size(2 * band + 1);
    let mut prod = synthesize_transposed(f, p)?;
    let sg = synthesize_transposed(g, p)?;
    prod.iter_mut().zip(&sg).for_each(|(a, b)| *a *= b);
    analyze_transposed(prod, p, out)
}

const SUP_OVERSAMPLING: usize = 4;

/// `‖J^s(fg) - f J^s g‖_{L²}` against
/// `‖J^s f‖_{L²}‖g‖_{L^∞} + (‖f‖_{L^∞} + ‖∇f‖_{L^∞})‖J^{s-1}g‖_{L²}`.
///
/// The commutator is unchanged by adding a constant to `f`, so the mean of
/// `f` is removed first; a constant `f` then gives exactly zero.
pub fn kato_ponce_ratio(f: &SpectralField, g: &SpectralField, s: f64) -> Result<RatioSample> {
    f.check_same_grid(g)?;
    let mean = f.mode([0, 0]);
    let fc = f.map_modes(|k, c| if k == [0, 0] { c - mean } else { c });
    let lhs = if fc.max_abs_coeff() == 0.0 {
        0.0
    } else {
        let jg = apply_sobolev_weight(s, g);
        let a = apply_sobolev_weight(s, &exact_product(&fc, g)?);
        let b = exact_product(&fc, &jg)?;
        a.sub(&b)?.l2_norm()
    };
    let rhs = hs_norm(s, f) * sup_norm(g, SUP_OVERSAMPLING)?
        + (sup_norm(f, SUP_OVERSAMPLING)? + grad_sup_norm(f, SUP_OVERSAMPLING)?) * hs_norm(s - 1.0, g);
    RatioSample::new(lhs, rhs)
}

/// `‖fg‖_{H^s}` against `‖f‖_{H^s}‖g‖_{H^s}`.
pub fn product_ratio(f: &SpectralField, g: &SpectralField, s: f64) -> Result<RatioSample> {
    let lhs = hs_norm(s, &exact_product(f, g)?);
    RatioSample::new(lhs, hs_norm(s, f) * hs_norm(s, g))
}

fn pair(spec: &RandomFieldSpec, i: usize) -> (SpectralField, SpectralField) {
    (random_field(spec, 2 * i), random_field(spec, 2 * i + 1))
}

fn params(spec: &RandomFieldSpec, s: f64) -> serde_json::Value {
    serde_json::json!({ "s": s, "seed": spec.seed, "band": spec.band, "beta": spec.beta, "count": spec.count })
}

/// Kato–Ponce ratios over `spec.count` independent pairs `(f, g)`.
pub fn kato_ponce_ensemble(spec: &RandomFieldSpec, s: f64) -> Result<RatioReport> {
    let results = (0..spec.count)
        .map(|i| {
            let (f, g) = pair(spec, i);
            kato_ponce_ratio(&f, &g, s)
        })
        .collect();
    RatioReport::collect("kato_ponce", params(spec, s), results)
}

/// Algebra-property ratios over `spec.count` independent pairs.
pub fn product_ensemble(spec: &RandomFieldSpec, s: f64) -> Result<RatioReport> {
    let results = (0..spec.count)
        .map(|i| {
            let (f, g) = pair(spec, i);
            product_ratio(&f, &g, s)
        })
        .collect();
    RatioReport::collect("product", params(spec, s), results)
}
