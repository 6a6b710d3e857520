//! Linear drift/diffusion model of the cascaded OPO -> cavity -> membrane chain.
//!
//! State order is (OPO x, p, cavity x, p, membrane x, p). Optical modes live in the
//! frame of the cooling laser; the membrane is not rotated. The only explicit time
//! dependence is the OPO pump, which rotates at twice the squeezing-carrier detuning.

use std::f64::consts::PI;

use nalgebra::{Matrix2, Matrix4, SMatrix};
use serde::{Deserialize, Serialize};

use crate::analytics::CoolingRates;
use crate::error::{Error, Result};
use crate::exact::Mat6;
use crate::params::DerivedParams;
use crate::squeezing::{OpoParams, SqueezingSpec};

pub type InputMatrix = SMatrix<f64, 6, 4>;

#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    pub a0: Mat6,
    pub a_cos: Mat6,
    pub a_sin: Mat6,
    /// Angular frequency of the periodic drift (rad/s); zero for static models.
    pub drive_freq: f64,
    /// Inputs: OPO vacuum (x, p), then membrane thermal bath (x, p).
    pub b: InputMatrix,
    pub s: Matrix4<f64>,
}

impl LinearModel {
    pub const DIM: usize = 6;

    pub fn diffusion(&self) -> Mat6 {
        self.b * self.s * self.b.transpose()
    }

    pub fn drift(&self, t: f64) -> Mat6 {
        if self.drive_freq == 0.0 {
            return self.a0;
        }
        let (s, c) = (self.drive_freq * t).sin_cos();
        self.a0 + self.a_cos * c + self.a_sin * s
    }

    /// Whether the drift actually depends on time.
    pub fn is_periodic(&self) -> bool {
        self.drive_freq != 0.0 && (self.a_cos.norm() > 0.0 || self.a_sin.norm() > 0.0)
    }

    /// Period of the drive, or `None` for a time-independent model.
    pub fn period(&self) -> Option<f64> {
        (self.drive_freq != 0.0).then(|| 2.0 * PI / self.drive_freq.abs())
    }

    /// Vacuum optics and a thermal membrane, read off the input spectral matrix.
    pub fn initial_covariance(&self) -> Mat6 {
        let n_mech = self.s[(2, 2)];
        Mat6::from_diagonal(&nalgebra::Vector6::new(0.5, 0.5, 0.5, 0.5, n_mech, n_mech))
    }
}

/// Which frequency the squeezing resonance `delta = 0` refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ResonanceReference {
    /// Oscillation frequency of the weakly damped normal mode of the linearized
    /// cavity + membrane drift.
    #[default]
    Dressed,
    /// The closed-form shifted frequency `w_m0 - Omega` of [`CoolingRates`].
    SpringFormula,
}

/// A cascade model plus the frequencies it was built around.
#[derive(Debug, Clone, PartialEq)]
pub struct Cascade {
    pub model: LinearModel,
    /// Mechanical frequency taken as resonance (rad/s).
    pub resonance: f64,
    /// Effective cavity detuning used in the drift (rad/s).
    pub cavity_detuning: f64,
    /// `Delta_s = delta - resonance` (rad/s); the squeezing carrier sits at `-Delta_s`
    /// from the cooling laser.
    pub delta_s: f64,
    /// Rotation frequency of the membrane readout frame (rad/s).
    pub readout_frequency: f64,
}

fn rotation_block(d: f64) -> Matrix2<f64> {
    // quadrature form of a' = -i d a
    Matrix2::new(0.0, d, -d, 0.0)
}

fn cavity_membrane_drift(g: f64, kappa: f64, detuning: f64, omega_m0: f64, gamma_m: f64) -> Matrix4<f64> {
    let mut a = Matrix4::zeros();
    a.fixed_view_mut::<2, 2>(0, 0).copy_from(&(Matrix2::identity() * -kappa + rotation_block(detuning)));
    a.fixed_view_mut::<2, 2>(2, 2).copy_from(&(Matrix2::identity() * -gamma_m + rotation_block(omega_m0)));
    a[(1, 2)] += g;
    a[(3, 0)] += g;
    a
}

/// Oscillation frequency and decay rate of the membrane-like normal mode of the
/// linearized cavity + membrane system at cavity detuning `detuning`.
pub fn dressed_mechanics(derived: &DerivedParams, detuning: f64) -> (f64, f64) {
    let a = cavity_membrane_drift(derived.coupling, derived.kappa, detuning, derived.omega_m0, derived.gamma_m);
    let ev = a.complex_eigenvalues();
    let l = ev.iter().min_by(|x, y| x.re.abs().total_cmp(&y.re.abs())).copied().unwrap_or_default();
    (l.im.abs(), -l.re)
}

/// Resonance frequency and cavity detuning for the given reference convention. For a
/// sideband-locked drive the detuning is iterated onto the dressed frequency.
pub fn resonance_frequency(
    derived: &DerivedParams,
    rates: &CoolingRates,
    reference: ResonanceReference,
) -> Result<(f64, f64)> {
    match reference {
        ResonanceReference::SpringFormula => {
            let det = if derived.sideband_locked { rates.omega_m } else { derived.detuning };
            Ok((rates.omega_m, det))
        }
        ResonanceReference::Dressed if !derived.sideband_locked => {
            Ok((dressed_mechanics(derived, derived.detuning).0, derived.detuning))
        }
        ResonanceReference::Dressed => {
            const MAX_ITER: usize = 200;
            let mut w = derived.omega_m0;
            for _ in 0..MAX_ITER {
                let next = dressed_mechanics(derived, w).0;
                if (next - w).abs() <= 1e-13 * derived.omega_m0 {
                    return Ok((next, next));
                }
                w = next;
            }
            Err(Error::NoConvergence { what: "dressed mechanical frequency", iterations: MAX_ITER })
        }
    }
}

/// Drift block of the OPO alone in the frame of its own carrier:
/// `a' = -(gamma/2) a + epsilon a^dag`.
pub fn opo_drift(opo: &OpoParams) -> Matrix2<f64> {
    let (er, ei) = (opo.epsilon.re, opo.epsilon.im);
    Matrix2::new(-0.5 * opo.gamma + er, ei, ei, -0.5 * opo.gamma - er)
}

/// Assemble the cascaded model with squeezing-carrier mismatch `delta` from the
/// chosen mechanical resonance.
pub fn build_cascade(
    derived: &DerivedParams,
    rates: &CoolingRates,
    spec: &SqueezingSpec,
    delta: f64,
    reference: ResonanceReference,
) -> Result<Cascade> {
    let opo = spec.opo.ok_or(Error::MissingOpo)?;
    opo.check_threshold()?;
    if !delta.is_finite() {
        return Err(Error::invalid("delta", "must be finite"));
    }
    let (resonance, detuning) = resonance_frequency(derived, rates, reference)?;
    // Delta_s = delta - w_ref; the carrier sits at w_s - w_l = -Delta_s.
    let delta_s = delta - resonance;
    let readout_frequency = -delta_s;
    if !(readout_frequency > 0.0) {
        return Err(Error::invalid(
            "delta",
            "the squeezing carrier must stay red of the cooling laser (delta < resonance)",
        ));
    }

    let (kappa, gamma_o, gamma_m, g) = (derived.kappa, opo.gamma, derived.gamma_m, derived.coupling);
    let mut a0 = Mat6::zeros();
    a0.fixed_view_mut::<2, 2>(0, 0).copy_from(&(Matrix2::identity() * (-0.5 * gamma_o) + rotation_block(-delta_s)));
    a0.fixed_view_mut::<4, 4>(2, 2).copy_from(&cavity_membrane_drift(g, kappa, detuning, derived.omega_m0, gamma_m));
    // Cascade: the cavity is driven by the OPO output sqrt(gamma_o) a + a_in.
    a0.fixed_view_mut::<2, 2>(2, 0).copy_from(&(Matrix2::identity() * (2.0 * kappa * gamma_o).sqrt()));

    let (er, ei) = (opo.epsilon.re, opo.epsilon.im);
    let mut a_cos = Mat6::zeros();
    let mut a_sin = Mat6::zeros();
    a_cos.fixed_view_mut::<2, 2>(0, 0).copy_from(&Matrix2::new(er, ei, ei, -er));
    a_sin.fixed_view_mut::<2, 2>(0, 0).copy_from(&Matrix2::new(-ei, er, er, ei));
    let drive_freq = 2.0 * delta_s;

    let mut b = InputMatrix::zeros();
    b.fixed_view_mut::<2, 2>(0, 0).copy_from(&(Matrix2::identity() * -gamma_o.sqrt()));
    b.fixed_view_mut::<2, 2>(2, 0).copy_from(&(Matrix2::identity() * (2.0 * kappa).sqrt()));
    b.fixed_view_mut::<2, 2>(4, 2).copy_from(&(Matrix2::identity() * (2.0 * gamma_m).sqrt()));
    let nth = derived.n_th + 0.5;
    let s = Matrix4::from_diagonal(&nalgebra::Vector4::new(0.5, 0.5, nth, nth));

    Ok(Cascade {
        model: LinearModel { a0, a_cos, a_sin, drive_freq, b, s },
        resonance,
        cavity_detuning: detuning,
        delta_s,
        readout_frequency,
    })
}
