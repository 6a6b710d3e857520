//! Physical parameters of the opto-mechanical system and the quantities derived
//! from them.
//!
//! Everything internal is SI with angular frequencies in rad/s. The config layer
//! speaks ordinary Hz and converts with [`hz`].
//!
//! Mechanical damping: when a quality factor is given, the amplitude decay rate
//! entering `db/dt = -(i w_m0 + gamma_m) b + ...` is `gamma_m = w_m0 / Q`. A direct
//! `gamma_m` bypasses the convention entirely.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reduced Planck constant (J s).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant (J/K).
pub const K_B: f64 = 1.380_649e-23;

/// Ordinary frequency in Hz to angular frequency in rad/s.
#[inline]
pub fn hz(f: f64) -> f64 {
    2.0 * PI * f
}

/// Angular frequency in rad/s to ordinary Hz.
#[inline]
pub fn to_hz(omega: f64) -> f64 {
    omega / (2.0 * PI)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MechanicalDamping {
    QualityFactor(f64),
    /// Amplitude decay rate in rad/s.
    Rate(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Drive {
    /// Effective opto-mechanical coupling G (rad/s) given directly.
    Coupling(f64),
    /// Laser power (W), effective cavity length (m) and membrane reflectivity.
    Power { power: f64, cavity_length: f64, reflectivity: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetuningPolicy {
    /// Lock the effective detuning to the mechanical resonance.
    SidebandCooling,
    /// Effective detuning (rad/s), already including the radiation-pressure shift.
    Effective(f64),
    /// Bare laser detuning `w_c - w_l` (rad/s). The effective detuning is then found
    /// self-consistently; only meaningful for a power drive.
    Laser(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Optical angular frequency (rad/s); required for a power drive.
    pub omega_c: Option<f64>,
    pub omega_m0: f64,
    /// Effective mass (kg).
    pub mass: f64,
    pub damping: MechanicalDamping,
    /// Cavity amplitude decay rate (rad/s).
    pub kappa: f64,
    /// Bath temperature (K).
    pub temperature: f64,
    pub drive: Drive,
    pub detuning: DetuningPolicy,
    /// Mismatch `delta = Delta_s + w_m` of the squeezing carrier (rad/s).
    pub squeeze_detuning: f64,
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("must be finite and > 0, got {v:e}")))
    }
}

impl SystemParams {
    /// Parameters of the transfer-efficiency figure: `Q=1e7, m=1 ng, w_m0=2pi 1 MHz,
    /// kappa=2pi 380 kHz, G=2pi 110 kHz, T=100 mK`, resonant squeezing.
    pub fn transfer_reference() -> Self {
        SystemParams {
            omega_c: None,
            omega_m0: hz(1.0e6),
            mass: 1.0e-12,
            damping: MechanicalDamping::QualityFactor(1.0e7),
            kappa: hz(380.0e3),
            temperature: 0.1,
            drive: Drive::Coupling(hz(110.0e3)),
            detuning: DetuningPolicy::SidebandCooling,
            squeeze_detuning: 0.0,
        }
    }

    /// Parameter set for mechanical squashing with present-day cooling performance.
    pub fn squashing_reference() -> Self {
        SystemParams {
            omega_c: None,
            omega_m0: hz(1.0e6),
            mass: 1.0e-11,
            damping: MechanicalDamping::QualityFactor(1.0e7),
            kappa: hz(125.0e3),
            temperature: 4.0,
            drive: Drive::Coupling(hz(21.0e3)),
            detuning: DetuningPolicy::SidebandCooling,
            squeeze_detuning: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        positive("omega_m0", self.omega_m0)?;
        positive("mass", self.mass)?;
        positive("kappa", self.kappa)?;
        positive("temperature", self.temperature)?;
        if let Some(wc) = self.omega_c {
            positive("omega_c", wc)?;
        }
        match self.damping {
            MechanicalDamping::QualityFactor(q) => positive("quality_factor", q)?,
            MechanicalDamping::Rate(g) => positive("gamma_m", g)?,
        }
        match self.drive {
            Drive::Coupling(g) => {
                if !(g.is_finite() && g >= 0.0) {
                    return Err(Error::invalid("G", format!("must be finite and >= 0, got {g:e}")));
                }
                if matches!(self.detuning, DetuningPolicy::Laser(_)) {
                    return Err(Error::invalid(
                        "laser_detuning",
                        "the radiation-pressure shift is unknown when G is given directly; use an effective detuning",
                    ));
                }
            }
            Drive::Power { power, cavity_length, reflectivity } => {
                positive("power", power)?;
                positive("cavity_length", cavity_length)?;
                if !(0.0..=1.0).contains(&reflectivity) {
                    return Err(Error::invalid("reflectivity", format!("must lie in [0, 1], got {reflectivity}")));
                }
                if self.omega_c.is_none() {
                    return Err(Error::invalid("omega_c", "required for a power drive"));
                }
            }
        }
        match self.detuning {
            DetuningPolicy::Effective(d) if !(d.is_finite() && d > 0.0) => {
                Err(Error::invalid("detuning", format!("must be red (> 0), got {d:e}")))
            }
            DetuningPolicy::Laser(d) if !d.is_finite() => Err(Error::invalid("laser_detuning", "must be finite")),
            _ if !self.squeeze_detuning.is_finite() => Err(Error::invalid("delta", "must be finite")),
            _ => Ok(()),
        }
    }

    pub fn gamma_m(&self) -> f64 {
        match self.damping {
            MechanicalDamping::QualityFactor(q) => self.omega_m0 / q,
            MechanicalDamping::Rate(g) => g,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivedParams {
    pub omega_m0: f64,
    pub kappa: f64,
    pub gamma_m: f64,
    /// Zero-point motion (m).
    pub xbar_m: f64,
    /// Single-photon coupling (rad/s); `None` when G was supplied directly.
    pub g0: Option<f64>,
    /// Drive amplitude |E| (1/s); `None` when G was supplied directly.
    pub drive_amplitude: Option<f64>,
    pub c_ss: Option<Complex64>,
    pub b_ss: Option<Complex64>,
    /// Effective coupling G (rad/s).
    pub coupling: f64,
    /// Effective detuning used for the intracavity amplitude (rad/s).
    pub detuning: f64,
    /// True when the detuning tracks the mechanical resonance; the value in
    /// `detuning` is then the bare frequency and the solvers refine it.
    pub sideband_locked: bool,
    /// Bare laser detuning `w_c - w_l` (rad/s), when known.
    pub laser_detuning: Option<f64>,
    pub n_th: f64,
    /// Sideband parameter kappa / w_m0.
    pub eta: f64,
    pub squeeze_detuning: f64,
}

impl DerivedParams {
    pub fn g0(&self) -> Result<f64> {
        self.g0.ok_or(Error::NotDerived("g"))
    }

    pub fn c_ss(&self) -> Result<Complex64> {
        self.c_ss.ok_or(Error::NotDerived("c_ss"))
    }

    pub fn b_ss(&self) -> Result<Complex64> {
        self.b_ss.ok_or(Error::NotDerived("b_ss"))
    }

    pub fn drive_amplitude(&self) -> Result<f64> {
        self.drive_amplitude.ok_or(Error::NotDerived("E"))
    }
}

/// Bose-Einstein occupation of a mode at angular frequency `omega` and temperature `t`.
pub fn bose_occupation(omega: f64, t: f64) -> f64 {
    let x = HBAR * omega / (K_B * t);
    1.0 / x.exp_m1()
}

/// Zero-point motion sqrt(hbar / 2 m w).
pub fn zero_point_motion(mass: f64, omega_m0: f64) -> f64 {
    (HBAR / (2.0 * mass * omega_m0)).sqrt()
}

/// Steady-state cavity and mechanical amplitudes around which the dynamics is
/// linearized. The laser phase is chosen so that `c_ss` is real and non-negative.
pub fn steady_state_amplitudes(
    drive: Complex64,
    kappa: f64,
    detuning: f64,
    g0: f64,
    gamma_m: f64,
    omega_m0: f64,
) -> (Complex64, Complex64) {
    let c = drive / Complex64::new(kappa, detuning);
    let c_ss = Complex64::new(c.norm(), 0.0);
    let photons = c_ss.norm_sqr();
    let b_ss = Complex64::new(g0, 0.0) / Complex64::new(omega_m0, -gamma_m) * photons;
    (c_ss, b_ss)
}

/// Number of distinct real roots of the monic cubic `x^3 + a x^2 + b x + c`.
fn cubic_real_roots(a: f64, b: f64, c: f64) -> usize {
    let p = b - a * a / 3.0;
    let q = 2.0 * a.powi(3) / 27.0 - a * b / 3.0 + c;
    let disc = -(4.0 * p.powi(3) + 27.0 * q * q);
    let scale = (4.0 * p.abs().powi(3)).max(27.0 * q * q).max(f64::MIN_POSITIVE);
    if disc > 1e-12 * scale {
        3
    } else {
        1
    }
}

/// Solve `D = D_l - K E^2 / (kappa^2 + D^2)` for the effective detuning.
fn self_consistent_detuning(laser_detuning: f64, shift_per_photon: f64, e2: f64, kappa: f64) -> Result<f64> {
    let k2 = kappa * kappa;
    let load = shift_per_photon * e2;
    // (D - D_l)(k^2 + D^2) + K E^2 = 0
    let roots = cubic_real_roots(-laser_detuning, k2, load - laser_detuning * k2);
    if roots != 1 {
        return Err(Error::Bistable { real_roots: roots });
    }
    let f = |d: f64| d - laser_detuning + load / (k2 + d * d);
    let (mut lo, mut hi) = (laser_detuning - load / k2, laser_detuning);
    if f(lo) > 0.0 || f(hi) < 0.0 {
        return Err(Error::NoConvergence { what: "detuning fixed point", iterations: 0 });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-15 * hi.abs().max(kappa) {
            return Ok(0.5 * (lo + hi));
        }
    }
    Ok(0.5 * (lo + hi))
}

pub fn derive_params(params: &SystemParams) -> Result<DerivedParams> {
    params.validate()?;
    let omega_m0 = params.omega_m0;
    let kappa = params.kappa;
    let gamma_m = params.gamma_m();
    let xbar_m = zero_point_motion(params.mass, omega_m0);
    let n_th = bose_occupation(omega_m0, params.temperature);

    let (sideband_locked, nominal_detuning) = match params.detuning {
        DetuningPolicy::SidebandCooling => (true, omega_m0),
        DetuningPolicy::Effective(d) => (false, d),
        DetuningPolicy::Laser(d) => (false, d),
    };

    let mut derived = DerivedParams {
        omega_m0,
        kappa,
        gamma_m,
        xbar_m,
        g0: None,
        drive_amplitude: None,
        c_ss: None,
        b_ss: None,
        coupling: 0.0,
        detuning: nominal_detuning,
        sideband_locked,
        laser_detuning: None,
        n_th,
        eta: kappa / omega_m0,
        squeeze_detuning: params.squeeze_detuning,
    };

    match params.drive {
        Drive::Coupling(g) => derived.coupling = g,
        Drive::Power { power, cavity_length, reflectivity } => {
            let omega_c = params.omega_c.ok_or_else(|| Error::invalid("omega_c", "required for a power drive"))?;
            let g0 = 2.0 * reflectivity * (xbar_m / cavity_length) * omega_c;
            let e = (2.0 * power * kappa / (HBAR * omega_c)).sqrt();
            let shift_per_photon = 2.0 * g0 * g0 * omega_m0 / (omega_m0 * omega_m0 + gamma_m * gamma_m);
            let detuning = match params.detuning {
                DetuningPolicy::Laser(dl) => self_consistent_detuning(dl, shift_per_photon, e * e, kappa)?,
                _ => nominal_detuning,
            };
            let (c_ss, b_ss) = steady_state_amplitudes(Complex64::new(e, 0.0), kappa, detuning, g0, gamma_m, omega_m0);
            derived.g0 = Some(g0);
            derived.drive_amplitude = Some(e);
            derived.c_ss = Some(c_ss);
            derived.b_ss = Some(b_ss);
            derived.coupling = 2.0 * g0 * c_ss.re;
            derived.detuning = detuning;
            derived.laser_detuning = Some(detuning + shift_per_photon * c_ss.norm_sqr());
        }
    }
    Ok(derived)
}
