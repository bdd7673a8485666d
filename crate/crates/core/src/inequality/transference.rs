//! Multiplier transference for the Gaussian `φ(x) = e^{-α|x|²}`.
//!
//! Torus side: `J^s(p_Σφ)(z) = Σ_k ⟨k⟩^s φ̂(k) e^{ik·z}` with the closed-form
//! transform `φ̂(ξ) = e^{-|ξ|²/4α}/(4πα)`.
//! Line side: `ψ = J^s φ` is obtained by trapezoidal quadrature of
//! `∫ ⟨ξ⟩^s φ̂(ξ) e^{iξ·x} dξ` and then summed over the shifts `z + 2πn`,
//! `|n| ≤ R`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Truncated square `[-half_width, half_width]²` in frequency, sampled with
/// step `step`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub half_width: f64,
    pub step: f64,
    /// Largest acceptable estimate of the truncation plus aliasing error.
    pub tolerance: f64,
}

impl QuadratureSpec {
    /// Chooses the domain so that the neglected tail is far below
    /// `tolerance` and the step so that the trapezoid rule's aliased copies
    /// of `ψ` land outside the evaluation region.
    pub fn auto(s: f64, alpha: f64, lattice_radius: usize, tolerance: f64) -> Self {
        let mut half_width = 1.0;
        while frequency_tail(s, alpha, half_width) > tolerance * 1e-6 && half_width < 1e4 {
            half_width += 0.5;
        }
        let reach = 2.0 * PI * (lattice_radius as f64 + 2f64.sqrt());
        Self {
            half_width,
            step: 2.0 * PI / (reach + decay_margin(s, alpha)),
            tolerance,
        }
    }
}

/// Distance beyond which `|J^s φ|` is negligible. For even integer `s` it is
/// a polynomial times the Gaussian; otherwise the symbol's branch points at
/// `|ξ| = ±i` limit the decay to roughly `e^{-|x|}`.
fn decay_margin(s: f64, alpha: f64) -> f64 {
    let even = s >= 0.0 && s.fract() == 0.0 && (s as u64) % 2 == 0;
    if even {
        9.0 / alpha.sqrt() + s
    } else {
        45.0 + 9.0 / alpha.sqrt()
    }
}

fn symbol(s: f64, alpha: f64, r2: f64) -> f64 {
    (1.0 + r2).powf(s / 2.0) * (-r2 / (4.0 * alpha)).exp() / (4.0 * PI * alpha)
}

/// `∫_{|ξ| > L} ⟨ξ⟩^s φ̂(ξ) dξ`, by a radial trapezoid rule.
fn frequency_tail(s: f64, alpha: f64, l: f64) -> f64 {
    let upper = l + 40.0 * alpha.sqrt() + 10.0;
    let n = 4000;
    let h = (upper - l) / n as f64;
    let f = |rho: f64| 2.0 * PI * rho * symbol(s, alpha, rho * rho);
    let inner: f64 = (1..n).map(|i| f(l + h * i as f64)).sum();
    h * (0.5 * (f(l) + f(upper)) + inner)
}

/// Closed form of `(1 - Δ)e^{-α|x|²}` at radius² `r2`.
pub fn line_multiplier_closed_form_s2(alpha: f64, r2: f64) -> f64 {
    (1.0 + 4.0 * alpha - 4.0 * alpha * alpha * r2) * (-alpha * r2).exp()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferenceReport {
    pub s: f64,
    pub alpha: f64,
    pub lattice_radius: usize,
    pub sample_points: usize,
    pub quadrature: QuadratureSpec,
    /// Estimated truncation error of the frequency quadrature.
    pub error_estimate: f64,
    pub max_discrepancy: f64,
    pub torus_max_abs: f64,
    /// `‖p_Σφ‖_{L²(T²)} / ‖φ‖_{L²(R²)}` with the unnormalized measure on `T²`.
    pub periodization_l2_ratio: f64,
}

/// Rows `w_a cos(ξ_a x)` for the nonnegative nodes of a symmetric rule;
/// the weight of a node `ξ_a > 0` is doubled to account for `-ξ_a`.
fn cosine_matrix(xs: &[f64], nodes: &[f64], weights: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(xs.len() * nodes.len());
    for &x in xs {
        for (xi, w) in nodes.iter().zip(weights) {
            out.push(w * (xi * x).cos());
        }
    }
    out
}

/// `C · S · Cᵀ` for `C` of shape `n × q` and symmetric `S` of shape `q × q`.
fn congruence(c: &[f64], s: &[f64], n: usize, q: usize) -> Vec<f64> {
    let mut cs = vec![0.0; n * q];
    for i in 0..n {
        let row = &c[i * q..(i + 1) * q];
        let out = &mut cs[i * q..(i + 1) * q];
        for (a, &ca) in row.iter().enumerate() {
            if ca == 0.0 {
                continue;
            }
            let srow = &s[a * q..(a + 1) * q];
            out.iter_mut().zip(srow).for_each(|(o, v)| *o += ca * v);
        }
    }
    let mut res = vec![0.0; n * n];
    for i in 0..n {
        let ri = &cs[i * q..(i + 1) * q];
        for j in 0..n {
            let cj = &c[j * q..(j + 1) * q];
            res[i * n + j] = ri.iter().zip(cj).map(|(x, y)| x * y).sum();
        }
    }
    res
}

/// Compares both sides of the transference identity at the nodes of a
/// `sample_points × sample_points` grid on `[0, 2π)²`.
pub fn transference_check(
    s: f64,
    alpha: f64,
    lattice_radius: usize,
    quad: &QuadratureSpec,
    sample_points: usize,
) -> Result<TransferenceReport> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::Config(format!("Gaussian width must be positive, got {alpha}")));
    }
    if !(quad.step > 0.0 && quad.half_width > 0.0) || sample_points == 0 {
        return Err(Error::Config("quadrature step, domain and sample count must be positive".into()));
    }
    let reach = 2.0 * PI * (lattice_radius as f64 + 2f64.sqrt());
    let alias_gap = 2.0 * PI / quad.step - reach;
    let mut error_estimate = frequency_tail(s, alpha, quad.half_width);
    if alias_gap < decay_margin(s, alpha) {
        error_estimate = f64::INFINITY;
    }
    // dropped lattice shifts sit at least this far from every sample point
    let nearest_dropped = 2.0 * PI * ((lattice_radius as f64 + 1.0) - 2f64.sqrt()).max(0.0);
    if s.fract() == 0.0 && s >= 0.0 && (s as u64) % 2 == 0 {
        error_estimate += 200.0 * (1.0 + nearest_dropped).powf(s) * (-alpha * nearest_dropped.powi(2)).exp();
    }
    if error_estimate > quad.tolerance {
        return Err(Error::Accuracy {
            achieved: error_estimate,
            tolerance: quad.tolerance,
        });
    }

    // line side: ψ on the grid of shifted points, separable in x1 and x2
    let q = (quad.half_width / quad.step).floor() as usize + 1;
    let nodes: Vec<f64> = (0..q).map(|a| a as f64 * quad.step).collect();
    let weights: Vec<f64> = (0..q)
        .map(|a| if a == 0 { quad.step } else { 2.0 * quad.step })
        .collect();
    let r = lattice_radius as i64;
    let zs: Vec<f64> = (0..sample_points)
        .map(|a| 2.0 * PI * a as f64 / sample_points as f64)
        .collect();
    let xs: Vec<f64> = (-r..=r)
        .flat_map(|n| zs.iter().map(move |z| z + 2.0 * PI * n as f64))
        .collect();
    let c = cosine_matrix(&xs, &nodes, &weights);
    let sym: Vec<f64> = (0..q * q)
        .map(|i| symbol(s, alpha, nodes[i / q].powi(2) + nodes[i % q].powi(2)))
        .collect();
    let nx = xs.len();
    let psi = congruence(&c, &sym, nx, q);

    // torus side: Σ_k ⟨k⟩^s φ̂(k) cos(k1 z1) cos(k2 z2)
    let kmax = quad.half_width.floor() as usize;
    let knodes: Vec<f64> = (0..=kmax).map(|k| k as f64).collect();
    let kweights: Vec<f64> = (0..=kmax).map(|k| if k == 0 { 1.0 } else { 2.0 }).collect();
    let ksym: Vec<f64> = (0..(kmax + 1).pow(2))
        .map(|i| symbol(s, alpha, knodes[i / (kmax + 1)].powi(2) + knodes[i % (kmax + 1)].powi(2)))
        .collect();
    let ct = cosine_matrix(&zs, &knodes, &kweights);
    let torus = congruence(&ct, &ksym, sample_points, kmax + 1);

    let p = sample_points;
    let mut max_discrepancy = 0.0f64;
    for a in 0..p {
        for b in 0..p {
            let mut line = 0.0;
            for n1 in -r..=r {
                for n2 in -r..=r {
                    if n1 * n1 + n2 * n2 > r * r {
                        continue;
                    }
                    let i = (n1 + r) as usize * p + a;
                    let j = (n2 + r) as usize * p + b;
                    line += psi[i * nx + j];
                }
            }
            max_discrepancy = max_discrepancy.max((line - torus[a * p + b]).abs());
        }
    }
    Ok(TransferenceReport {
        s,
        alpha,
        lattice_radius,
        sample_points,
        quadrature: *quad,
        error_estimate,
        max_discrepancy,
        torus_max_abs: torus.iter().fold(0.0f64, |m, v| m.max(v.abs())),
        periodization_l2_ratio: periodization_l2_ratio(alpha, kmax),
    })
}

/// `‖p_Σφ‖_{L²(T², dx)} / ‖φ‖_{L²(R²)}` for `φ = e^{-α|x|²}`, from
/// Parseval on both sides: `(2π)² Σ_k |φ̂(k)|²` against `π/(2α)`.
pub fn periodization_l2_ratio(alpha: f64, kmax: usize) -> f64 {
    let k = kmax as i64;
    let mut one_d = 0.0;
    for n in (-k..=k).rev() {
        one_d += (-(n * n) as f64 / (2.0 * alpha)).exp();
    }
    let torus = 4.0 * PI * PI * one_d * one_d / (16.0 * PI * PI * alpha * alpha);
    (torus / (PI / (2.0 * alpha))).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadrature_reproduces_closed_form() {
        let alpha = 1.0;
        let quad = QuadratureSpec::auto(2.0, alpha, 1, 1e-8);
        let q = (quad.half_width / quad.step).floor() as usize + 1;
        let nodes: Vec<f64> = (0..q).map(|a| a as f64 * quad.step).collect();
        let weights: Vec<f64> = (0..q).map(|a| if a == 0 { quad.step } else { 2.0 * quad.step }).collect();
        let xs = [0.0, 0.3, 1.1, 2.5];
        let c = cosine_matrix(&xs, &nodes, &weights);
        let sym: Vec<f64> = (0..q * q)
            .map(|i| symbol(2.0, alpha, nodes[i / q].powi(2) + nodes[i % q].powi(2)))
            .collect();
        let psi = congruence(&c, &sym, xs.len(), q);
        for (i, x1) in xs.iter().enumerate() {
            for (j, x2) in xs.iter().enumerate() {
                let exact = line_multiplier_closed_form_s2(alpha, x1 * x1 + x2 * x2);
                assert!((psi[i * xs.len() + j] - exact).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn identity_multiplier() {
        let quad = QuadratureSpec::auto(0.0, 1.0, 3, 1e-10);
        let rep = transference_check(0.0, 1.0, 3, &quad, 16).unwrap();
        assert!(rep.max_discrepancy < 1e-12, "{}", rep.max_discrepancy);
    }

    #[test]
    fn coarse_quadrature_is_refused() {
        let quad = QuadratureSpec { half_width: 3.0, step: 0.1, tolerance: 1e-8 };
        assert!(matches!(
            transference_check(2.0, 1.0, 6, &quad, 8),
            Err(Error::Accuracy { .. })
        ));
        let quad = QuadratureSpec { step: 0.5, ..QuadratureSpec::auto(2.0, 1.0, 6, 1e-8) };
        assert!(matches!(
            transference_check(2.0, 1.0, 6, &quad, 8),
            Err(Error::Accuracy { .. })
        ));
    }

    #[test]
    fn periodization_constant() {
        let r = periodization_l2_ratio(1.0, 20);
        assert!(r >= 1.0 && r < 1.0 + 1e-6);
        // wide Gaussians overlap their own translates
        assert!(periodization_l2_ratio(0.01, 60) > 1.5);
    }
}
