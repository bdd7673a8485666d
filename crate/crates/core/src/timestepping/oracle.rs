//! Reference integrator for small Galerkin systems.
//!
//! Integrates the untransformed system `du/dt = iω(k)u + λΠ_N(|Π_N u|²∂_{x1}Π_N u)`
//! with adaptive Dormand–Prince 5(4), evaluating the nonlinearity by direct
//! convolution. Shares neither the integrating factor nor the FFT path with
//! [`solve`](super::solve).

use num_complex::Complex64;

use super::config::SolverConfig;
use super::trajectory::{StepRecord, Trajectory};
use crate::dynamics::{check_cutoff, dispersion, EquationParams};
use crate::error::{Error, Result};
use crate::spectral::{cubic_convolution, hs_norm, project_low, SpectralField, TorusGrid};

/// Largest cutoff accepted by [`ode_oracle`].
pub const ORACLE_MAX_CUTOFF: usize = 6;
/// Relative and absolute tolerance of the reference integration.
pub const ORACLE_TOLERANCE: f64 = 1e-12;

// Autonomous system: the stage nodes c_i are not needed.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Galerkin right-hand side via direct convolution (no FFT).
pub(crate) fn convolution_rhs(n: usize, u: &SpectralField, params: EquationParams) -> SpectralField {
    let grid = u.grid();
    let linear = u.map_modes(|k, c| Complex64::new(0.0, dispersion(k)) * c);
    if params.lambda == 0.0 {
        return linear;
    }
    let inner = TorusGrid::new(n.min(grid.bandwidth()));
    let low = project_low(n, &u.resampled(inner));
    let nl = project_low(n, &cubic_convolution(&low, params.lambda)).resampled(grid);
    linear.add(&nl).expect("same grid")
}

/// One explicit RK4 step of the raw system, returning the increment
/// `u(t + dt) - u(t)` rather than the new state so that differences of
/// nearby states keep full relative precision.
pub(crate) fn rk4_increment(
    n: usize,
    u: &SpectralField,
    dt: f64,
    params: EquationParams,
) -> SpectralField {
    let f = |x: &SpectralField| convolution_rhs(n, x, params);
    let c = |a: f64| Complex64::new(a, 0.0);
    let k1 = f(u);
    let k2 = f(&u.axpy(c(0.5 * dt), &k1).unwrap());
    let k3 = f(&u.axpy(c(0.5 * dt), &k2).unwrap());
    let k4 = f(&u.axpy(c(dt), &k3).unwrap());
    let sum = k1
        .add(&k4)
        .unwrap()
        .axpy(c(2.0), &k2)
        .unwrap()
        .axpy(c(2.0), &k3)
        .unwrap();
    sum.scale_real(dt / 6.0)
}

fn weighted_error(err: &[Complex64], y0: &[Complex64], y1: &[Complex64]) -> f64 {
    let sum: f64 = err
        .iter()
        .zip(y0.iter().zip(y1))
        .map(|(e, (a, b))| {
            let scale = ORACLE_TOLERANCE + ORACLE_TOLERANCE * a.norm().max(b.norm());
            (e.norm() / scale).powi(2)
        })
        .sum();
    (sum / err.len() as f64).sqrt()
}

/// High-accuracy reference trajectory on `[0, cfg.t_end]`.
///
/// Uses `cfg.cutoff`, `cfg.params`, `cfg.t_end`, `cfg.record_every` and
/// `cfg.dt` (initial step); the tolerance is fixed at [`ORACLE_TOLERANCE`].
pub fn ode_oracle(u0: &SpectralField, cfg: &SolverConfig) -> Result<Trajectory> {
    cfg.validate(u0.grid())?;
    check_cutoff(cfg.cutoff, u0.grid())?;
    if cfg.cutoff > ORACLE_MAX_CUTOFF {
        return Err(Error::Refused(format!(
            "reference integrator limited to N <= {ORACLE_MAX_CUTOFF}, got {}",
            cfg.cutoff
        )));
    }
    let grid = u0.grid();
    let n = cfg.cutoff;
    let params = cfg.params;
    let mut traj = Trajectory::new(cfg.clone(), u0.clone());
    let mut log = Vec::new();
    let mut t = 0.0;
    let mut u = u0.clone();
    let mut h = cfg.dt.min(cfg.t_end.max(f64::MIN_POSITIVE));
    let mut since = 0;
    let mut rejected = 0;
    while t < cfg.t_end {
        let remaining = cfg.t_end - t;
        let clipped = h >= remaining;
        let step = if clipped { remaining } else { h };
        let mut ks: Vec<SpectralField> = Vec::with_capacity(7);
        for stage in 0..7 {
            let mut y = u.clone();
            for (j, kj) in ks.iter().enumerate() {
                let a = A[stage][j];
                if a != 0.0 {
                    y = y.axpy(Complex64::new(step * a, 0.0), kj)?;
                }
            }
            ks.push(convolution_rhs(n, &y, params));
        }
        let mut y1 = u.clone();
        let mut err = vec![Complex64::default(); grid.len()];
        for (j, kj) in ks.iter().enumerate() {
            if B[j] != 0.0 {
                y1 = y1.axpy(Complex64::new(step * B[j], 0.0), kj)?;
            }
            for (e, k) in err.iter_mut().zip(kj.coeffs()) {
                *e += k * (step * E[j]);
            }
        }
        let en = weighted_error(&err, u.coeffs(), y1.coeffs());
        let factor = if en == 0.0 { 5.0 } else { (0.9 * en.powf(-0.2)).clamp(0.2, 5.0) };
        if en <= 1.0 {
            if !y1.is_finite() {
                return Err(Error::BlowUp { time: t + step });
            }
            u = y1;
            t = if clipped { cfg.t_end } else { t + step };
            log.push(StepRecord {
                t,
                dt: step,
                l2_norm: u.l2_norm(),
                hs_norm: hs_norm(cfg.sobolev_s, &u),
                rejected,
            });
            rejected = 0;
            since += 1;
            if clipped || since == cfg.record_every {
                traj.push_snapshot(t, u.clone());
                since = 0;
            }
            if !clipped {
                h = step * factor;
            }
        } else {
            rejected += 1;
            h = step * factor;
            if h < cfg.dt_min {
                return Err(Error::Stiffness { time: t, dt: h });
            }
        }
    }
    traj.set_steps(log);
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::propagate_linear;

    fn field() -> SpectralField {
        SpectralField::from_fn(TorusGrid::new(3), |m| {
            let t = (2 * m[0] + 7 * m[1]) as f64;
            Complex64::new(t.sin(), t.cos()) * 0.3 / (1.0 + (m[0] * m[0] + m[1] * m[1]) as f64)
        })
    }

    #[test]
    fn linear_matches_propagator() {
        let f = field();
        let cfg = SolverConfig::fixed(3, 1e-3, 0.1, EquationParams::linear());
        let traj = ode_oracle(&f, &cfg).unwrap();
        let exact = propagate_linear(0.1, &f);
        assert!(traj.final_state().max_diff(&exact).unwrap() < 1e-10);
    }

    #[test]
    fn conserves_l2() {
        let f = field();
        let cfg = SolverConfig::fixed(3, 1e-3, 0.1, EquationParams::default());
        let traj = ode_oracle(&f, &cfg).unwrap();
        let n0 = f.l2_norm();
        for s in traj.snapshots() {
            assert!((s.l2_norm() - n0).abs() <= 1e-11 * n0);
        }
    }

    #[test]
    fn refuses_large_cutoff() {
        let f = SpectralField::zeros(TorusGrid::new(8));
        let cfg = SolverConfig::fixed(7, 1e-3, 0.1, EquationParams::default());
        assert!(matches!(ode_oracle(&f, &cfg), Err(Error::Refused(_))));
    }
}
