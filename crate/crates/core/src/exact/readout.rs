//! Membrane quadrature statistics in the frame co-rotating with the resonance.

use nalgebra::{Matrix2, Vector2};

use crate::analytics::QuadratureStats;
use crate::error::Result;
use crate::exact::periodic::PeriodicCovariance;

#[derive(Debug, Clone, PartialEq)]
pub struct MechanicalReadout {
    /// Statistics of the time-averaged interaction-frame block.
    pub stats: QuadratureStats,
    /// Peak-to-peak of `V_t(phi*)` across the sampled phases.
    pub micromotion_pp: f64,
    pub averaged_block: Matrix2<f64>,
}

/// `b_I = b e^{i theta}` acting on (x, p).
pub fn frame_rotation(theta: f64) -> Matrix2<f64> {
    let (s, c) = theta.sin_cos();
    Matrix2::new(c, -s, s, c)
}

/// Variance of `X_phi = cos(phi) x - sin(phi) p`.
pub fn quadrature_variance(block: &Matrix2<f64>, phi: f64) -> f64 {
    let u = Vector2::new(phi.cos(), -phi.sin());
    (u.transpose() * block * u)[(0, 0)]
}

/// Statistics of an interaction-frame 2x2 block.
pub fn block_stats(block: &Matrix2<f64>) -> Result<QuadratureStats> {
    let (xx, xp, pp) = (block[(0, 0)], 0.5 * (block[(0, 1)] + block[(1, 0)]), block[(1, 1)]);
    QuadratureStats::from_harmonic(0.5 * (xx + pp), 0.5 * (xx - pp), -xp)
}

/// Rotate each sampled membrane block into the frame turning at `omega` (rad/s)
/// and average over the period. Time-independent covariances are read as they
/// stand.
pub fn mech_quadrature_stats(cov: &PeriodicCovariance, omega: f64) -> Result<MechanicalReadout> {
    let blocks: Vec<Matrix2<f64>> = cov
        .samples
        .iter()
        .map(|c| {
            let r = frame_rotation(omega * c.time.unwrap_or(0.0));
            r * c.mechanical_block() * r.transpose()
        })
        .collect();
    let avg = blocks.iter().fold(Matrix2::zeros(), |a, b| a + b) / blocks.len() as f64;
    let stats = block_stats(&avg)?;
    let vs = blocks.iter().map(|b| quadrature_variance(b, stats.phi_star));
    let (lo, hi) = vs.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    Ok(MechanicalReadout { stats, micromotion_pp: hi - lo, averaged_block: avg })
}
