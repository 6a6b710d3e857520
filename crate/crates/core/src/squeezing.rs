//! Squeezed-vacuum input: parametrization by (N, M, b_x, b_y), the below-threshold
//! OPO that produces it, two-time correlators and dB bookkeeping.
//!
//! Quadratures follow `x = (c + c^dag)/sqrt 2`, so vacuum has variance 1/2.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Below-threshold degenerate OPO: cavity damping `gamma` (rad/s) and complex
/// susceptibility `epsilon` (rad/s).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OpoParams {
    pub gamma: f64,
    pub epsilon: Complex64,
}

impl OpoParams {
    pub fn check_threshold(&self) -> Result<()> {
        if !(self.gamma.is_finite() && self.gamma > 0.0) {
            return Err(Error::invalid("gamma_o", format!("must be > 0, got {:e}", self.gamma)));
        }
        let half = 0.5 * self.gamma;
        if !(self.epsilon.norm() < half) {
            return Err(Error::OpoThreshold { epsilon_abs: self.epsilon.norm(), half_gamma: half });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezingSpec {
    /// Mean squeezed-photon number N.
    pub n: f64,
    /// Anomalous correlation M.
    pub m: Complex64,
    /// Narrow bandwidth (rad/s).
    pub b_x: f64,
    /// Broad bandwidth (rad/s).
    pub b_y: f64,
    pub opo: Option<OpoParams>,
}

const PURITY_RTOL: f64 = 1e-10;

impl SqueezingSpec {
    /// Validated spec from explicit parameters.
    pub fn new(n: f64, m: Complex64, b_x: f64, b_y: f64) -> Result<Self> {
        let spec = SqueezingSpec { n, m, b_x, b_y, opo: None };
        spec.validate()?;
        Ok(spec)
    }

    /// Unsqueezed vacuum, carried by a passive OPO cavity of damping `2 b`.
    pub fn vacuum(b: f64) -> Self {
        SqueezingSpec {
            n: 0.0,
            m: Complex64::new(0.0, 0.0),
            b_x: b,
            b_y: b,
            opo: Some(OpoParams { gamma: 2.0 * b, epsilon: Complex64::new(0.0, 0.0) }),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.n.is_finite() && self.n >= 0.0) {
            return Err(Error::invalid("N", format!("must be >= 0, got {:e}", self.n)));
        }
        if !(self.b_x.is_finite() && self.b_x > 0.0) {
            return Err(Error::invalid("b_x", format!("must be > 0, got {:e}", self.b_x)));
        }
        if !(self.b_y.is_finite() && self.b_y >= self.b_x) {
            return Err(Error::invalid("b_y", format!("must be >= b_x, got {:e} < {:e}", self.b_y, self.b_x)));
        }
        let bound = self.n * (self.n + 1.0);
        if self.m.norm_sqr() > bound * (1.0 + PURITY_RTOL) + 1e-300 {
            return Err(Error::invalid("M", format!("|M|^2 = {:e} exceeds N(N+1) = {:e}", self.m.norm_sqr(), bound)));
        }
        if let Some(opo) = self.opo {
            opo.check_threshold()?;
            let eps = opo.epsilon.norm();
            let bx = 0.5 * opo.gamma - eps;
            let by = 0.5 * opo.gamma + eps;
            if (bx - self.b_x).abs() > 1e-9 * self.b_x || (by - self.b_y).abs() > 1e-9 * self.b_y {
                return Err(Error::invalid("b_x", "bandwidths are inconsistent with the OPO parameters"));
            }
        }
        Ok(())
    }

    /// `|M|^2 = N(N+1)` to relative tolerance `rtol`.
    pub fn is_pure(&self, rtol: f64) -> bool {
        let bound = self.n * (self.n + 1.0);
        (self.m.norm_sqr() - bound).abs() <= rtol * bound.max(f64::MIN_POSITIVE)
    }

    /// Minimum white-noise quadrature variance `N + 1/2 - |M|` of the source.
    pub fn min_input_variance(&self) -> f64 {
        self.n + 0.5 - self.m.norm()
    }

    /// Input squeezing in dB below shot noise, from the white-noise minimum variance.
    pub fn input_db(&self) -> f64 {
        to_db(self.min_input_variance()).unwrap_or(f64::INFINITY)
    }

    /// Same squeezing with every bandwidth (and the OPO) scaled by `factor`.
    pub fn with_bandwidth_scaled(&self, factor: f64) -> Self {
        SqueezingSpec {
            b_x: self.b_x * factor,
            b_y: self.b_y * factor,
            opo: self.opo.map(|o| OpoParams { gamma: o.gamma * factor, epsilon: o.epsilon * factor }),
            ..*self
        }
    }
}

/// Squeezing parameters generated by a below-threshold OPO.
pub fn opo_to_nm(gamma: f64, epsilon: Complex64) -> Result<SqueezingSpec> {
    let opo = OpoParams { gamma, epsilon };
    opo.check_threshold()?;
    let e = epsilon.norm();
    let half = 0.5 * gamma;
    let b_x = half - e;
    let b_y = half + e;
    let (ix, iy) = (1.0 / (b_x * b_x), 1.0 / (b_y * b_y));
    let m = epsilon * half * (ix + iy);
    // 1/b_x^2 - 1/b_y^2 = (b_y - b_x)(b_y + b_x) / (b_x b_y)^2 = 2 e gamma / (b_x b_y)^2
    let n = e * half * (2.0 * e * gamma) / (b_x * b_y).powi(2);
    Ok(SqueezingSpec { n, m, b_x, b_y, opo: Some(opo) })
}

/// Pure OPO squeezing whose white-noise minimum quadrature variance is
/// `(1/2) 10^(-db/10)`, with narrow bandwidth `b_x`.
pub fn nm_to_opo(squeeze_db: f64, b_x: f64) -> Result<SqueezingSpec> {
    if !(squeeze_db.is_finite() && squeeze_db >= 0.0) {
        return Err(Error::invalid("db", format!("must be finite and >= 0, got {squeeze_db}")));
    }
    if !(b_x.is_finite() && b_x > 0.0) {
        return Err(Error::invalid("bandwidth_bx", format!("must be > 0, got {b_x:e}")));
    }
    // V_min = V_vac (b_x/b_y)^2 for the OPO output.
    let b_y = b_x * 10f64.powf(squeeze_db / 20.0);
    opo_to_nm(b_x + b_y, Complex64::new(0.5 * (b_y - b_x), 0.0))
}

/// `sinh(x)/x`, accurate near zero.
fn sinhc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 + x * x / 6.0
    } else {
        x.sinh() / x
    }
}

/// Source correlators `<c(t+tau) c(t)>` and `<c^dag(t+tau) c(t)>` in the frame of the
/// squeezing carrier.
pub fn input_correlators(spec: &SqueezingSpec, tau: f64) -> (Complex64, f64) {
    let (bx, by) = (spec.b_x, spec.b_y);
    let t = tau.abs();
    let c_mm = spec.m * 0.5 * bx * by / (bx * bx + by * by) * (by * (-bx * t).exp() + bx * (-by * t).exp());
    // (b_y e^{-b_x t} - b_x e^{-b_y t}) / (b_y - b_x) rewritten around the midpoint so
    // that b_x = b_y is regular.
    let mid = 0.5 * (bx + by);
    let half = 0.5 * (by - bx);
    let ratio = (-mid * t).exp() * (mid * t * sinhc(half * t) + (half * t).cosh());
    let c_nm = 0.5 * spec.n * bx * by / (bx + by) * ratio;
    (c_mm, c_nm)
}

/// White-noise quadrature variance `N + 1/2 + Re{M e^{2 i phi}}` of the input light.
pub fn input_quadrature_variance_white(spec: &SqueezingSpec, phi: f64) -> f64 {
    spec.n + 0.5 + (spec.m * Complex64::from_polar(1.0, 2.0 * phi)).re
}

/// Variance to dB below the vacuum level 1/2 (positive = squeezed).
pub fn to_db(variance: f64) -> Result<f64> {
    if !(variance > 0.0) {
        return Err(Error::NonPositiveVariance(variance));
    }
    Ok(-10.0 * (2.0 * variance).log10())
}

pub fn from_db(db: f64) -> f64 {
    0.5 * 10f64.powf(-db / 10.0)
}

/// Intracavity photons contributed by the squeezed input for cavity decay `kappa`.
///
/// Written as `N b_x b_y (b_x + b_y + kappa) / ((b_x + b_y)(b_x + kappa)(b_y + kappa))`,
/// which equals the bracketed difference form and has no singularity at `b_x = b_y`.
pub fn intracavity_squeezed_photons(spec: &SqueezingSpec, kappa: f64) -> f64 {
    let (bx, by) = (spec.b_x, spec.b_y);
    spec.n * bx * by * (bx + by + kappa) / ((bx + by) * (bx + kappa) * (by + kappa))
}
