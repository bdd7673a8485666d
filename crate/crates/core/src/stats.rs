//! Small statistics helpers: log-log regression and compensated sums.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Least-squares fit of `log(value) = exponent · log(x) + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub exponent: f64,
    /// Standard error of the fitted exponent.
    pub std_error: f64,
    pub intercept: f64,
    pub points: usize,
}

/// Ordinary least squares slope of `log value` against `log x`.
///
/// Requires at least three points and strictly positive abscissae and values.
pub fn exponent_regression(series: &[(f64, f64)]) -> Result<ExponentFit> {
    if series.len() < 3 {
        return Err(Error::Data(format!(
            "exponent fit needs at least 3 points, got {}",
            series.len()
        )));
    }
    if let Some((x, v)) = series.iter().find(|(x, v)| !(*x > 0.0) || !(*v > 0.0)) {
        return Err(Error::Data(format!(
            "exponent fit needs positive data, got ({x}, {v})"
        )));
    }
    let pts: Vec<(f64, f64)> = series.iter().map(|(x, v)| (x.ln(), v.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Data("exponent fit needs distinct abscissae".into()));
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = pts
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    let std_error = (ssr / (n - 2.0) / sxx).sqrt();
    Ok(ExponentFit {
        exponent: slope,
        std_error,
        intercept,
        points: pts.len(),
    })
}

/// Neumaier-compensated sum.
pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Max, mean and (population) standard deviation of a sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub max: f64,
    pub mean: f64,
    pub std: f64,
    pub count: usize,
}

pub fn summarize(values: &[f64]) -> Summary {
    if values.is_empty() {
        return Summary { max: f64::NAN, mean: f64::NAN, std: f64::NAN, count: 0 };
    }
    let n = values.len() as f64;
    let mean = compensated_sum(values.iter().copied()) / n;
    let var = compensated_sum(values.iter().map(|v| (v - mean).powi(2))) / n;
    Summary {
        max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        mean,
        std: var.sqrt(),
        count: values.len(),
    }
}
