//! Steady states of the covariance flow `S' = A(t) S + S A(t)^T + D`, static or
//! time-periodic, and Floquet stability of the homogeneous part.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::gaussian::{Covariance, Frame};
use crate::exact::lyapunov::{solve_continuous_lyapunov, to_dyn};
use crate::exact::model::LinearModel;
use crate::exact::ode::Dopri5;
use crate::exact::Mat6;

const PACKED: usize = 21;

fn pack(m: &Mat6, out: &mut [f64]) {
    let mut k = 0;
    for j in 0..6 {
        for i in 0..=j {
            out[k] = m[(i, j)];
            k += 1;
        }
    }
}

fn unpack(v: &[f64]) -> Mat6 {
    let mut m = Mat6::zeros();
    let mut k = 0;
    for j in 0..6 {
        for i in 0..=j {
            m[(i, j)] = v[k];
            m[(j, i)] = v[k];
            k += 1;
        }
    }
    m
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeriodicOptions {
    /// Relative tolerance of the Runge-Kutta integration.
    pub rtol: f64,
    /// Periodicity tolerance, `|S(t+T) - S(t)|_F < tol |S|_F`.
    pub tol: f64,
    pub max_periods: u64,
    /// Phases sampled per period (at least 64).
    pub phase_samples: usize,
}

impl Default for PeriodicOptions {
    fn default() -> Self {
        PeriodicOptions { rtol: 1e-9, tol: 1e-8, max_periods: 1 << 36, phase_samples: 64 }
    }
}

/// Covariance sampled at equally spaced phases of one drive period.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicCovariance {
    /// `None` for a time-independent model, which carries a single sample.
    pub period: Option<f64>,
    pub samples: Vec<Covariance>,
    /// Number of periods elapsed from the initial state until convergence.
    pub periods: u64,
    /// `|S(T) - S(0)|_F / |S(0)|_F` measured by the sampling pass.
    pub closure: f64,
}

impl PeriodicCovariance {
    pub fn time_average(&self) -> Mat6 {
        let sum = self.samples.iter().fold(Mat6::zeros(), |acc, c| acc + c.sigma);
        sum / self.samples.len() as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FloquetReport {
    pub stable: bool,
    pub multipliers: Vec<Complex64>,
    pub spectral_radius: f64,
}

fn step_cap(model: &LinearModel) -> f64 {
    // Fastest intrinsic rate of the drift, or the drive, whichever is shorter.
    let a = model.a0.abs() + model.a_cos.abs() + model.a_sin.abs();
    let rate = a.row_iter().map(|r| r.sum()).fold(0.0, f64::max);
    let mut h = 1.0 / rate.max(f64::MIN_POSITIVE);
    if let Some(t) = model.period() {
        h = h.min(t / 64.0);
    }
    h / 50.0
}

/// One-period map: `S(T) = Phi S(0) Phi^T + Q`.
pub fn period_map(model: &LinearModel, rtol: f64) -> Result<(Mat6, Mat6)> {
    let t = model.period().ok_or_else(|| Error::invalid("drive_freq", "period map needs a periodic model"))?;
    let d = model.diffusion();
    let mut y = vec![0.0; 36 + PACKED];
    y[..36].copy_from_slice(Mat6::identity().as_slice());
    let scale = 1.0f64.max(d.norm() * t);
    let ode = Dopri5::new(rtol, 1e-15 * scale, step_cap(model));
    ode.integrate(
        |s, y, dy| {
            let a = model.drift(s);
            let phi = Mat6::from_column_slice(&y[..36]);
            dy[..36].copy_from_slice((a * phi).as_slice());
            let q = unpack(&y[36..]);
            let aq = a * q;
            pack(&(aq + aq.transpose() + d), &mut dy[36..]);
        },
        0.0,
        t,
        &mut y,
    )?;
    Ok((Mat6::from_column_slice(&y[..36]), unpack(&y[36..])))
}

fn report(multipliers: Vec<Complex64>) -> FloquetReport {
    let spectral_radius = multipliers.iter().map(|m| m.norm()).fold(0.0, f64::max);
    FloquetReport { stable: spectral_radius < 1.0 - 1e-12, multipliers, spectral_radius }
}

/// Monodromy multipliers over one drive period. Static models use `e^{lambda T}`
/// with `T = 1 s`, which is the Hurwitz test in disguise.
pub fn floquet_stability(model: &LinearModel, rtol: f64) -> Result<FloquetReport> {
    match model.period() {
        None => {
            let ev = to_dyn(&model.a0).complex_eigenvalues();
            Ok(report(ev.iter().map(|l| l.exp()).collect()))
        }
        Some(_) => {
            let (phi, _) = period_map(model, rtol)?;
            Ok(report(to_dyn(&phi).complex_eigenvalues().iter().copied().collect()))
        }
    }
}

/// Steady state of a time-independent model.
pub fn lyapunov_steady(a: &Mat6, d: &Mat6) -> Result<Covariance> {
    Ok(Covariance { sigma: solve_continuous_lyapunov(a, d)?, frame: Frame::Laser, time: None })
}

/// Periodic steady state, reached from the vacuum/thermal initial covariance.
///
/// The one-period map is computed once by Runge-Kutta; whole periods are then
/// composed by repeated squaring, so reaching `2^k` periods costs `k` matrix
/// products. Convergence requires both the one-period change and the remaining
/// transient to fall below `tol`. A final integration over one period samples the
/// phases and re-measures periodicity.
pub fn periodic_lyapunov_steady(model: &LinearModel, opts: &PeriodicOptions) -> Result<PeriodicCovariance> {
    let Some(period) = model.period() else {
        let c = lyapunov_steady(&model.a0, &model.diffusion())?;
        return Ok(PeriodicCovariance { period: None, samples: vec![c], periods: 0, closure: 0.0 });
    };
    if opts.phase_samples < 64 {
        return Err(Error::invalid("phase_samples", format!("need at least 64, got {}", opts.phase_samples)));
    }

    let (phi, q) = period_map(model, opts.rtol)?;
    let floquet = report(to_dyn(&phi).complex_eigenvalues().iter().copied().collect());
    if !floquet.stable {
        return Err(Error::Unstable { detail: format!("Floquet spectral radius {:.15}", floquet.spectral_radius) });
    }

    let s0 = model.initial_covariance();
    let (mut phi_p, mut q_p) = (phi, q);
    let mut periods: u64 = 1;
    let start = loop {
        let s_p = phi_p * s0 * phi_p.transpose() + q_p;
        let s_next = phi * s_p * phi.transpose() + q;
        let scale = s_p.norm();
        let step = (s_next - s_p).norm();
        let transient = phi_p.norm().powi(2) * (s0.norm() + scale);
        if step <= opts.tol * scale && transient <= opts.tol * scale {
            break s_p;
        }
        if periods >= opts.max_periods {
            return Err(Error::NoConvergence { what: "periodic covariance", iterations: periods as usize });
        }
        q_p = phi_p * q_p * phi_p.transpose() + q_p;
        phi_p *= phi_p;
        periods = periods.saturating_mul(2);
    };

    let d = model.diffusion();
    let n = opts.phase_samples;
    let dt = period / n as f64;
    let ode = Dopri5::new(opts.rtol, 1e-15 * start.norm(), step_cap(model));
    let rhs = |s: f64, y: &[f64], dy: &mut [f64]| {
        let a = model.drift(s);
        let as_ = a * unpack(y);
        pack(&(as_ + as_.transpose() + d), dy);
    };
    let mut y = vec![0.0; PACKED];
    pack(&start, &mut y);
    let mut samples = Vec::with_capacity(n);
    for k in 0..n {
        samples.push(Covariance { sigma: unpack(&y), frame: Frame::Laser, time: Some(k as f64 * dt) });
        ode.integrate(rhs, k as f64 * dt, (k + 1) as f64 * dt, &mut y)?;
    }
    let closure = (unpack(&y) - start).norm() / start.norm();
    if !(closure < opts.tol) {
        return Err(Error::NoConvergence { what: "periodic covariance closure", iterations: periods as usize });
    }
    Ok(PeriodicCovariance { period: Some(period), samples, periods, closure })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use nalgebra::Matrix4;

    fn toy(drive_freq: f64, pump: f64) -> LinearModel {
        let mut a0 = Mat6::zeros();
        for k in 0..3 {
            let (g, w) = (0.3 + 0.2 * k as f64, 1.0 + k as f64);
            a0[(2 * k, 2 * k)] = -g;
            a0[(2 * k + 1, 2 * k + 1)] = -g;
            a0[(2 * k, 2 * k + 1)] = w;
            a0[(2 * k + 1, 2 * k)] = -w;
        }
        a0[(2, 0)] = 0.4;
        a0[(3, 4)] = 0.1;
        a0[(5, 2)] = 0.1;
        let mut a_cos = Mat6::zeros();
        let mut a_sin = Mat6::zeros();
        a_cos[(0, 0)] = pump;
        a_cos[(1, 1)] = -pump;
        a_sin[(0, 1)] = pump;
        a_sin[(1, 0)] = pump;
        let mut b = crate::exact::model::InputMatrix::zeros();
        b[(0, 0)] = 0.5;
        b[(1, 1)] = 0.5;
        b[(2, 0)] = 0.7;
        b[(3, 1)] = 0.7;
        b[(4, 2)] = 0.9;
        b[(5, 3)] = 0.9;
        let s = Matrix4::from_diagonal(&nalgebra::Vector4::new(0.5, 0.5, 3.0, 3.0));
        LinearModel { a0, a_cos, a_sin, drive_freq, b, s }
    }

    #[test]
    fn pack_roundtrip() {
        let m = Mat6::from_fn(|i, j| (i + j) as f64 + 0.5 * (i * j) as f64);
        let mut v = [0.0; PACKED];
        pack(&m, &mut v);
        assert_eq!(unpack(&v), m);
    }

    #[test]
    fn zero_periodic_blocks_reproduce_algebraic_solution() {
        let m = toy(3.0, 0.0);
        let alg = lyapunov_steady(&m.a0, &m.diffusion()).unwrap().sigma;
        let per = periodic_lyapunov_steady(&m, &PeriodicOptions::default()).unwrap();
        for c in &per.samples {
            assert!((c.sigma - alg).norm() < 1e-8 * alg.norm());
        }
    }

    #[test]
    fn static_floquet_is_exp_of_eigenvalues() {
        let mut m = toy(0.0, 0.0);
        m.a0 = -Mat6::identity();
        let r = floquet_stability(&m, 1e-9).unwrap();
        assert!(r.stable);
        assert_relative_eq!(r.spectral_radius, (-1.0f64).exp(), max_relative = 1e-12);
    }

    #[test]
    fn periodic_multipliers_match_exp_when_blocks_vanish() {
        let m = toy(2.0, 0.0);
        let r = floquet_stability(&m, 1e-10).unwrap();
        let t = m.period().unwrap();
        let mut expect: Vec<f64> = to_dyn(&m.a0).complex_eigenvalues().iter().map(|l| (l.re * t).exp()).collect();
        let mut got: Vec<f64> = r.multipliers.iter().map(|z| z.norm()).collect();
        expect.sort_by(f64::total_cmp);
        got.sort_by(f64::total_cmp);
        for (a, b) in got.iter().zip(&expect) {
            assert_relative_eq!(a, b, max_relative = 1e-8);
        }
    }

    #[test]
    fn parametric_pump_beyond_damping_is_unstable() {
        let m = toy(-2.0, 0.5);
        assert!(!floquet_stability(&m, 1e-10).unwrap().stable);
        assert!(matches!(periodic_lyapunov_steady(&m, &PeriodicOptions::default()), Err(Error::Unstable { .. })));
    }

    #[test]
    fn sampled_states_are_periodic_and_physical() {
        let m = toy(-2.0, 0.2);
        let per = periodic_lyapunov_steady(&m, &PeriodicOptions::default()).unwrap();
        assert_eq!(per.samples.len(), 64);
        assert!(per.closure < 1e-8);
        for c in &per.samples {
            assert!(c.sigma.symmetric_eigenvalues().min() > 0.0);
        }
        // The pump makes the OPO block breathe over a period.
        let v: Vec<f64> = per.samples.iter().map(|c| c.sigma[(0, 0)]).collect();
        let spread = v.iter().cloned().fold(f64::MIN, f64::max) - v.iter().cloned().fold(f64::MAX, f64::min);
        assert!(spread > 1e-3);
    }
}
