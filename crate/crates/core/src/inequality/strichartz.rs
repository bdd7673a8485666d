use rayon::prelude::*;

use super::bilinear::RatioSample;
use super::random::{random_field, RandomFieldSpec};
use super::RatioReport;
use crate::dynamics::propagate_linear;
use crate::error::{Error, Result};
use crate::spectral::{dyadic_shell, shell_size, sup_norm, SpectralField, TorusGrid};

/// Simpson nodes on the time interval `[0, 2^{-2j}]`.
pub const STRICHARTZ_NODES: usize = 65;

fn simpson(values: &[f64], h: f64) -> f64 {
    let n = values.len() - 1;
    let inner: f64 = (1..n)
        .map(|i| if i % 2 == 1 { 4.0 * values[i] } else { 2.0 * values[i] })
        .sum();
    h / 3.0 * (values[0] + inner + values[n])
}

/// `‖W(t)Q^j u‖_{L²_I L^∞}` on `I = [0, 2^{-2j}]` against `2^{-j/3}‖Q^j u‖_{L²}`.
///
/// The shell is moved to the smallest grid holding it (bandwidth `2^j - 1`)
/// and the supremum is taken on a 4x oversampled grid.
pub fn strichartz_sample(j: u32, u: &SpectralField) -> Result<RatioSample> {
    if j > 12 {
        return Err(Error::Config(format!("shell index {j} is too large")));
    }
    if shell_size(j, u) == 0 {
        return Err(Error::Config(format!(
            "shell {j} has no modes on a grid of bandwidth {}",
            u.grid().bandwidth()
        )));
    }
    let shell_band = ((1usize << j) - 1).min(u.grid().bandwidth());
    let q = dyadic_shell(j, u).resampled(TorusGrid::new(shell_band));
    let norm = q.l2_norm();
    if norm == 0.0 {
        return Err(Error::Degenerate);
    }
    let len = (-2.0 * j as f64).exp2();
    let h = len / (STRICHARTZ_NODES - 1) as f64;
    let sup_sq = (0..STRICHARTZ_NODES)
        .map(|i| {
            let w = propagate_linear(h * i as f64, &q);
            Ok(sup_norm(&w, 4)?.powi(2))
        })
        .collect::<Result<Vec<f64>>>()?;
    let lhs = simpson(&sup_sq, h).sqrt();
    RatioSample::new(lhs, (-(j as f64) / 3.0).exp2() * norm)
}

/// Strichartz ratios for shell `j` over `spec.count` random fields.
pub fn strichartz_ensemble(j: u32, spec: &RandomFieldSpec) -> Result<RatioReport> {
    if (1usize << j) / 2 > spec.band {
        return Err(Error::Config(format!(
            "shell {j} lies outside the sampling band {}",
            spec.band
        )));
    }
    let results: Vec<Result<RatioSample>> = (0..spec.count)
        .into_par_iter()
        .map(|i| strichartz_sample(j, &random_field(spec, i)))
        .collect();
    RatioReport::collect(
        "strichartz",
        serde_json::json!({
            "j": j, "seed": spec.seed, "band": spec.band, "beta": spec.beta,
            "count": spec.count, "nodes": STRICHARTZ_NODES,
        }),
        results,
    )
}
