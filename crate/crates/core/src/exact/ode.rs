//! Dormand-Prince 5(4) with a step-size cap, for the covariance and monodromy flows.

use crate::error::{Error, Result};

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// Fifth-order weights (the last row of `A`, FSAL).
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
/// Difference between fifth- and fourth-order weights.
const E: [f64; 7] =
    [71.0 / 57600.0, 0.0, -71.0 / 16695.0, 71.0 / 1920.0, -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0];

#[derive(Debug, Clone, Copy)]
pub struct Dopri5 {
    pub rtol: f64,
    pub atol: f64,
    pub h_max: f64,
    pub max_steps: usize,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
}

impl Dopri5 {
    pub fn new(rtol: f64, atol: f64, h_max: f64) -> Self {
        Dopri5 { rtol, atol, h_max, max_steps: 50_000_000 }
    }

    /// Advance `y` from `t0` to `t1` in place.
    pub fn integrate<F>(&self, mut f: F, t0: f64, t1: f64, y: &mut [f64]) -> Result<StepStats>
    where
        F: FnMut(f64, &[f64], &mut [f64]),
    {
        let n = y.len();
        let mut k: Vec<Vec<f64>> = vec![vec![0.0; n]; 7];
        let mut tmp = vec![0.0; n];
        let mut y5 = vec![0.0; n];
        let mut stats = StepStats::default();
        let span = t1 - t0;
        if span == 0.0 {
            return Ok(stats);
        }
        let dir = span.signum();
        let mut t = t0;
        let mut h = self.h_max.min(span.abs());
        f(t, y, &mut k[0]);
        while (t1 - t) * dir > 0.0 {
            if stats.accepted + stats.rejected >= self.max_steps {
                return Err(Error::NoConvergence { what: "ODE integration", iterations: self.max_steps });
            }
            let remaining = (t1 - t).abs();
            let last = h >= remaining * (1.0 - 1e-12);
            let hs = if last { remaining } else { h } * dir;
            for s in 1..7 {
                for i in 0..n {
                    let mut acc = 0.0;
                    for j in 0..s {
                        acc += A[s][j] * k[j][i];
                    }
                    tmp[i] = y[i] + hs * acc;
                }
                let (head, tail) = k.split_at_mut(s);
                let _ = head;
                f(t + C[s] * hs, &tmp, &mut tail[0]);
            }
            let mut err = 0.0;
            for i in 0..n {
                let mut acc = 0.0;
                let mut e = 0.0;
                for s in 0..7 {
                    acc += B5[s] * k[s][i];
                    e += E[s] * k[s][i];
                }
                y5[i] = y[i] + hs * acc;
                let sc = self.atol + self.rtol * y[i].abs().max(y5[i].abs());
                let r = hs * e / sc;
                err += r * r;
            }
            let err = (err / n as f64).sqrt();
            if err <= 1.0 {
                t = if last { t1 } else { t + hs };
                y.copy_from_slice(&y5);
                k.swap(0, 6);
                stats.accepted += 1;
            } else {
                stats.rejected += 1;
            }
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h = (hs.abs() * factor).min(self.h_max);
        }
        Ok(stats)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exponential_decay() {
        let mut y = [1.0, 2.0];
        Dopri5::new(1e-10, 1e-14, 0.1)
            .integrate(
                |_, y, dy| {
                    dy[0] = -y[0];
                    dy[1] = -3.0 * y[1];
                },
                0.0,
                2.0,
                &mut y,
            )
            .unwrap();
        assert_relative_eq!(y[0], (-2.0f64).exp(), max_relative = 1e-9);
        assert_relative_eq!(y[1], 2.0 * (-6.0f64).exp(), max_relative = 1e-9);
    }

    #[test]
    fn harmonic_oscillator_period() {
        let mut y = [1.0, 0.0];
        let w = 7.0;
        let t = 2.0 * std::f64::consts::PI / w;
        Dopri5::new(1e-11, 1e-14, t / 64.0)
            .integrate(
                |_, y, dy| {
                    dy[0] = w * y[1];
                    dy[1] = -w * y[0];
                },
                0.0,
                5.0 * t,
                &mut y,
            )
            .unwrap();
        assert!((y[0] - 1.0).abs() < 1e-9 && y[1].abs() < 1e-9);
    }

    #[test]
    fn time_dependent_rhs() {
        // y' = cos t, y(0) = 0 -> sin t
        let mut y = [0.0];
        Dopri5::new(1e-11, 1e-14, 0.05).integrate(|t, _, dy| dy[0] = t.cos(), 0.0, 3.0, &mut y).unwrap();
        assert_relative_eq!(y[0], 3f64.sin(), epsilon = 1e-10);
    }
}
