//! Discrete Fourier transforms between spectral coefficients and physical
//! samples on uniform grids of the torus.

use std::cell::RefCell;

use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

use super::field::SpectralField;
use super::grid::{axis_index, axis_wavenumber, TorusGrid};
use crate::error::{Error, Result};

/// Largest padded grid (points per axis) the transforms will allocate.
pub const MAX_PADDED_POINTS: usize = 4096;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Physical samples on an `n × n` uniform grid, node `(a, b)` at
/// `x = (2πa/n, 2πb/n)`, stored at `a * n + b`.
#[derive(Debug, Clone, PartialEq)]
pub struct Samples {
    pub points: usize,
    pub values: Vec<Complex64>,
}

impl Samples {
    pub fn new(points: usize, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != points * points {
            return Err(Error::Config(format!(
                "sample array has {} entries, expected {}",
                values.len(),
                points * points
            )));
        }
        Ok(Self { points, values })
    }

    /// Samples of `f` at the grid nodes.
    pub fn from_fn(points: usize, mut f: impl FnMut(f64, f64) -> Complex64) -> Self {
        let h = 2.0 * std::f64::consts::PI / points as f64;
        let mut values = Vec::with_capacity(points * points);
        for a in 0..points {
            for b in 0..points {
                values.push(f(h * a as f64, h * b as f64));
            }
        }
        Self { points, values }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).fold(0.0, f64::max).sqrt()
    }

    pub fn mean_square(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() / self.values.len() as f64
    }
}

/// In-place 2-D FFT of an `n × n` row-major buffer (unnormalized).
pub(crate) fn fft2(buf: &mut [Complex64], n: usize, direction: FftDirection) {
    debug_assert_eq!(buf.len(), n * n);
    if n <= 1 {
        return;
    }
    let fft = PLANNER.with(|p| p.borrow_mut().plan_fft(n, direction));
    let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
    fft.process_with_scratch(buf, &mut scratch);
    let mut t = vec![Complex64::default(); n * n];
    transpose(buf, &mut t, n);
    fft.process_with_scratch(&mut t, &mut scratch);
    transpose(&t, buf, n);
}

const BLOCK: usize = 32;

fn transpose(src: &[Complex64], dst: &mut [Complex64], n: usize) {
    for ib in (0..n).step_by(BLOCK) {
        for jb in (0..n).step_by(BLOCK) {
            for i in ib..(ib + BLOCK).min(n) {
                for j in jb..(jb + BLOCK).min(n) {
                    dst[j * n + i] = src[i * n + j];
                }
            }
        }
    }
}

/// Smallest integer `≥ n` whose prime factors are all in {2, 3, 5, 7}.
pub fn smooth_size(n: usize) -> usize {
    let mut m = n.max(1);
    loop {
        let mut r = m;
        for p in [2, 3, 5, 7] {
            while r % p == 0 {
                r /= p;
            }
        }
        if r == 1 {
            return m;
        }
        m += 1;
    }
}

/// Evaluates `Σ_k û(k) e^{ik·x}` at the `M × M` nodes of the field's grid.
pub fn synthesize(field: &SpectralField) -> Samples {
    let n = field.grid().points();
    let mut values = field.coeffs().to_vec();
    fft2(&mut values, n, FftDirection::Inverse);
    Samples { points: n, values }
}

/// Inverse of [`synthesize`]: coefficients of band-limited samples.
pub fn analyze(samples: &Samples, grid: TorusGrid) -> Result<SpectralField> {
    if samples.points != grid.points() || samples.values.len() != grid.len() {
        return Err(Error::Config(format!(
            "sample grid {}x{} does not match bandwidth {} ({} points)",
            samples.points,
            samples.points,
            grid.bandwidth(),
            grid.points()
        )));
    }
    let n = grid.points();
    let mut values = samples.values.clone();
    fft2(&mut values, n, FftDirection::Forward);
    let norm = 1.0 / (n * n) as f64;
    values.iter_mut().for_each(|v| *v *= norm);
    SpectralField::from_coeffs(grid, values)
}

fn check_padded(points: usize, grid: TorusGrid) -> Result<()> {
    if points > MAX_PADDED_POINTS {
        return Err(Error::Resource(format!(
            "padded grid of {points} points per axis exceeds the limit {MAX_PADDED_POINTS}"
        )));
    }
    if points < grid.points() {
        return Err(Error::Config(format!(
            "padded grid of {points} points cannot hold bandwidth {}",
            grid.bandwidth()
        )));
    }
    Ok(())
}

/// Rows of the padded grid that hold the modes of `grid`.
fn padded_rows(grid: TorusGrid, points: usize) -> Vec<usize> {
    let m = grid.points();
    (0..m).map(|a| axis_index(axis_wavenumber(a, m), points)).collect()
}

/// Padded synthesis returning the samples transposed: node `(a, b)` is
/// stored at `b * points + a`.
///
/// Only the `M` nonzero rows are transformed in the first pass and the
/// transpose is fused into the scatter, so no full-size transpose is needed.
pub(crate) fn synthesize_transposed(field: &SpectralField, points: usize) -> Result<Vec<Complex64>> {
    let grid = field.grid();
    check_padded(points, grid)?;
    let m = grid.points();
    let rows = padded_rows(grid, points);
    let fft = PLANNER.with(|p| p.borrow_mut().plan_fft(points, FftDirection::Inverse));
    let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
    let c = field.coeffs();
    let mut compact = vec![Complex64::default(); m * points];
    for a in 0..m {
        let row = &mut compact[a * points..(a + 1) * points];
        for b in 0..m {
            row[rows[b]] = c[a * m + b];
        }
    }
    fft.process_with_scratch(&mut compact, &mut scratch);
    let mut t = vec![Complex64::default(); points * points];
    for yb in (0..points).step_by(BLOCK) {
        for (a, &pa) in rows.iter().enumerate() {
            for y in yb..(yb + BLOCK).min(points) {
                t[y * points + pa] = compact[a * points + y];
            }
        }
    }
    fft.process_with_scratch(&mut t, &mut scratch);
    Ok(t)
}

/// Inverse of [`synthesize_transposed`] restricted to the modes of `grid`.
pub(crate) fn analyze_transposed(mut t: Vec<Complex64>, points: usize, grid: TorusGrid) -> Result<SpectralField> {
    check_padded(points, grid)?;
    if t.len() != points * points {
        return Err(Error::Config(format!(
            "sample array has {} entries, expected {}",
            t.len(),
            points * points
        )));
    }
    let m = grid.points();
    let rows = padded_rows(grid, points);
    let fft = PLANNER.with(|p| p.borrow_mut().plan_fft(points, FftDirection::Forward));
    let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
    fft.process_with_scratch(&mut t, &mut scratch);
    let mut compact = vec![Complex64::default(); m * points];
    for yb in (0..points).step_by(BLOCK) {
        for (a, &pa) in rows.iter().enumerate() {
            for y in yb..(yb + BLOCK).min(points) {
                compact[a * points + y] = t[y * points + pa];
            }
        }
    }
    fft.process_with_scratch(&mut compact, &mut scratch);
    let norm = 1.0 / (points * points) as f64;
    let mut coeffs = vec![Complex64::default(); grid.len()];
    for a in 0..m {
        for b in 0..m {
            coeffs[a * m + b] = compact[a * points + rows[b]] * norm;
        }
    }
    SpectralField::from_coeffs(grid, coeffs)
}

/// Evaluates the field on a finer `points × points` grid (zero padding).
pub fn synthesize_padded(field: &SpectralField, points: usize) -> Result<Samples> {
    let t = synthesize_transposed(field, points)?;
    let mut values = vec![Complex64::default(); points * points];
    transpose(&t, &mut values, points);
    Ok(Samples { points, values })
}

/// Forward transform of fine-grid samples, keeping only the modes
/// representable on `grid`.
pub fn analyze_truncated(samples: &Samples, grid: TorusGrid) -> Result<SpectralField> {
    let points = samples.points;
    check_padded(points, grid)?;
    let mut t = vec![Complex64::default(); points * points];
    transpose(&samples.values, &mut t, points);
    analyze_transposed(t, points, grid)
}

/// Points per axis of the `factor`-times oversampled grid for `grid`.
pub fn oversampled_points(grid: TorusGrid, factor: usize) -> usize {
    smooth_size(factor * grid.points())
}

/// `max_x |u(x)|` approximated on a `factor`-times oversampled grid.
pub fn sup_norm(field: &SpectralField, factor: usize) -> Result<f64> {
    let p = oversampled_points(field.grid(), factor);
    let t = synthesize_transposed(field, p)?;
    Ok(t.iter().map(|v| v.norm_sqr()).fold(0.0, f64::max).sqrt())
}

/// `max_x |u(x)|` to near machine precision: the maximum over a
/// `factor`-times oversampled grid is polished by Newton steps on `|u|²`
/// taken along its gradient (one-dimensional, so a rank-deficient Hessian
/// at a ridge does not matter).
pub fn sup_norm_refined(field: &SpectralField, factor: usize) -> Result<f64> {
    let p = oversampled_points(field.grid(), factor);
    let t = synthesize_transposed(field, p)?;
    let (idx, best_sq) = t
        .iter()
        .map(|v| v.norm_sqr())
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
    if best_sq <= 0.0 {
        return Ok(0.0);
    }
    let support: Vec<([f64; 2], Complex64)> = field
        .grid()
        .modes()
        .filter(|&(i, _)| field.coeffs()[i] != Complex64::default())
        .map(|(i, k)| ([k[0] as f64, k[1] as f64], field.coeffs()[i]))
        .collect();
    // value, gradient and Hessian of |u|² at x
    let eval = |x: [f64; 2]| {
        let mut u = Complex64::default();
        let mut du = [Complex64::default(); 2];
        let mut d2u = [[Complex64::default(); 2]; 2];
        for &(k, c) in &support {
            let e = c * Complex64::from_polar(1.0, k[0] * x[0] + k[1] * x[1]);
            u += e;
            for i in 0..2 {
                du[i] += Complex64::new(0.0, k[i]) * e;
                for j in 0..2 {
                    d2u[i][j] -= e * (k[i] * k[j]);
                }
            }
        }
        let g = [2.0 * (u.conj() * du[0]).re, 2.0 * (u.conj() * du[1]).re];
        let mut h = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                h[i][j] = 2.0 * (du[i].conj() * du[j] + u.conj() * d2u[i][j]).re;
            }
        }
        (u.norm_sqr(), g, h)
    };
    let spacing = 2.0 * std::f64::consts::PI / p as f64;
    let mut x = [spacing * (idx % p) as f64, spacing * (idx / p) as f64];
    let mut best = eval(x).0.max(best_sq);
    for _ in 0..60 {
        let (f, g, h) = eval(x);
        best = best.max(f);
        let gg = g[0] * g[0] + g[1] * g[1];
        let ghg = g[0] * (h[0][0] * g[0] + h[0][1] * g[1]) + g[1] * (h[1][0] * g[0] + h[1][1] * g[1]);
        if gg == 0.0 || ghg >= 0.0 {
            break;
        }
        let step = -gg / ghg;
        let len = step * gg.sqrt();
        if len > spacing || len < 1e-15 {
            break;
        }
        x = [x[0] + step * g[0], x[1] + step * g[1]];
    }
    Ok(best.max(eval(x).0).sqrt())
}

/// `max_x |∇u(x)|` (Euclidean norm of the complex gradient) on a
/// `factor`-times oversampled grid.
pub fn grad_sup_norm(field: &SpectralField, factor: usize) -> Result<f64> {
    let p = oversampled_points(field.grid(), factor);
    let dx = synthesize_padded(&derivative(field, 0), p)?;
    let dy = synthesize_padded(&derivative(field, 1), p)?;
    Ok(dx
        .values
        .iter()
        .zip(&dy.values)
        .map(|(a, b)| (a.norm_sqr() + b.norm_sqr()).sqrt())
        .fold(0.0, f64::max))
}

/// Spectral partial derivative `∂_{x_{axis+1}}`, multiplier `i k_axis`.
pub fn derivative(field: &SpectralField, axis: usize) -> SpectralField {
    field.map_modes(|k, c| c * Complex64::new(0.0, k[axis] as f64))
}
