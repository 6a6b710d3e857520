//! Closed-form steady-state results for the laser-cooled membrane driven by
//! squeezed light, obtained after adiabatic elimination of the cavity.
//!
//! All variances refer to the generalized mechanical quadrature
//! `X_phi = (e^{i phi} b_I + e^{-i phi} b_I^dag)/sqrt 2` in the frame rotating at the
//! shifted mechanical frequency. Signs of `Re{M e^{2 i phi}}` are kept exactly as in
//! the published expressions; only `V_min`/`V_max` are frame-independent.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::squeezing::{to_db, SqueezingSpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoolingRates {
    /// Optical damping Gamma (rad/s).
    pub gamma_opt: f64,
    /// Intrinsic mechanical damping (rad/s).
    pub gamma_m: f64,
    /// Total damping gamma_m + Gamma (rad/s).
    pub gamma_eff: f64,
    /// Optical-spring shift Omega (rad/s).
    pub omega_shift: f64,
    /// Shifted mechanical frequency w_m0 - Omega (rad/s).
    pub omega_m: f64,
}

impl CoolingRates {
    /// Thermal contribution `(gamma_m / gamma_eff)(n_th + 1/2)`.
    pub fn thermal_variance(&self, n_th: f64) -> f64 {
        self.gamma_m / self.gamma_eff * (n_th + 0.5)
    }
}

fn optical_damping(g: f64, kappa: f64, omega: f64) -> f64 {
    let w2 = 4.0 * omega * omega;
    g * g / (4.0 * kappa) * w2 / (kappa * kappa + w2)
}

/// Optical damping and spring shift, evaluated at the self-consistently shifted
/// mechanical frequency `w_m = w_m0 - Omega(w_m)`.
pub fn cooling_rates(g: f64, kappa: f64, omega_m0: f64, gamma_m: f64) -> Result<CoolingRates> {
    if !(g.is_finite() && g >= 0.0) {
        return Err(Error::invalid("G", format!("must be >= 0, got {g:e}")));
    }
    for (name, v) in [("kappa", kappa), ("omega_m0", omega_m0), ("gamma_m", gamma_m)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::invalid(name, format!("must be > 0, got {v:e}")));
        }
    }
    const MAX_ITER: usize = 100;
    let mut omega = omega_m0;
    for _ in 0..MAX_ITER {
        let gamma_opt = optical_damping(g, kappa, omega);
        let shift = gamma_opt * 2.0 * kappa / omega;
        let next = omega_m0 - shift;
        if !(next > 0.0) {
            return Err(Error::NoConvergence { what: "optical-spring fixed point", iterations: 0 });
        }
        if (next - omega).abs() <= 1e-14 * omega_m0 {
            let gamma_opt = optical_damping(g, kappa, next);
            return Ok(CoolingRates {
                gamma_opt,
                gamma_m,
                gamma_eff: gamma_m + gamma_opt,
                omega_shift: gamma_opt * 2.0 * kappa / next,
                omega_m: next,
            });
        }
        omega = next;
    }
    Err(Error::NoConvergence { what: "optical-spring fixed point", iterations: MAX_ITER })
}

/// `V(phi) = offset - scale * Re{M e^{2 i phi}}`, the shape shared by every
/// closed-form quadrature variance here.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarmonicForm {
    pub offset: f64,
    pub scale: f64,
    pub m: Complex64,
}

impl HarmonicForm {
    pub fn at(&self, phi: f64) -> f64 {
        self.offset - self.scale * (self.m * Complex64::from_polar(1.0, 2.0 * phi)).re
    }
}

pub fn variance_white_rsl_form(spec: &SqueezingSpec, rates: &CoolingRates, n_th: f64) -> HarmonicForm {
    HarmonicForm { offset: spec.n + 0.5 + rates.thermal_variance(n_th), scale: 1.0, m: spec.m }
}

/// White squeezing, resolved-sideband limit.
pub fn variance_white_rsl(spec: &SqueezingSpec, phi: f64, rates: &CoolingRates, n_th: f64) -> f64 {
    variance_white_rsl_form(spec, rates, n_th).at(phi)
}

fn prefactor(g: f64, kappa: f64, rates: &CoolingRates) -> f64 {
    g * g / (4.0 * rates.gamma_eff * kappa)
}

fn lorentz_ratio(kappa: f64, omega_m: f64) -> f64 {
    kappa * kappa / (kappa * kappa + 4.0 * omega_m * omega_m)
}

pub fn variance_white_general_form(
    spec: &SqueezingSpec,
    g: f64,
    kappa: f64,
    rates: &CoolingRates,
    n_th: f64,
) -> HarmonicForm {
    let p = prefactor(g, kappa, rates);
    let r = lorentz_ratio(kappa, rates.omega_m);
    HarmonicForm { offset: p * (spec.n + 0.5) * (1.0 + r) + rates.thermal_variance(n_th), scale: p, m: spec.m }
}

/// White squeezing at arbitrary sideband parameter.
pub fn variance_white_general(
    spec: &SqueezingSpec,
    phi: f64,
    g: f64,
    kappa: f64,
    rates: &CoolingRates,
    n_th: f64,
) -> f64 {
    variance_white_general_form(spec, g, kappa, rates, n_th).at(phi)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandwidthCoeffs {
    pub f_minus: f64,
    pub f_plus: f64,
    pub h: f64,
}

/// Bandwidth coefficients `f_-`, `f_+` and `h` of the finite-bandwidth variance.
///
/// `f_-` is evaluated in the cancelled form `b_x b_y (b_x+b_y+g)/((b_x+b_y)(b_x+g)(b_y+g))`
/// and `h` through a divided difference, so `b_x = b_y` needs no special casing beyond
/// switching the divided difference to a derivative.
pub fn bandwidth_coeffs(b_x: f64, b_y: f64, gamma_eff: f64, kappa: f64, omega_m: f64) -> BandwidthCoeffs {
    let (bx, by, g) = (b_x, b_y, gamma_eff);
    let f_plus = bx * by / (by * by + bx * bx) * (by / (bx + g) + bx / (by + g));
    let f_minus = bx * by * (bx + by + g) / ((bx + by) * (bx + g) * (by + g));

    let w2 = 4.0 * omega_m * omega_m;
    let q = g / kappa * (kappa * kappa + w2);
    let u = |b: f64| (b * b + b * kappa + q) / ((b + kappa) * (b * b + 2.0 * b * g + w2));
    let du = |b: f64| {
        let p = b * b + b * kappa + q;
        let dp = 2.0 * b + kappa;
        let r = b * b + 2.0 * b * g + w2;
        let den = (b + kappa) * r;
        let dden = r + (b + kappa) * (2.0 * b + 2.0 * g);
        (dp * den - p * dden) / (den * den)
    };
    let divided = if (by - bx).abs() < 1e-6 * (bx + by) { du(0.5 * (bx + by)) } else { (u(by) - u(bx)) / (by - bx) };
    let h = bx * by / (bx + by) * (u(bx) - bx * divided);
    BandwidthCoeffs { f_minus, f_plus, h }
}

pub fn variance_finite_bandwidth_form(
    spec: &SqueezingSpec,
    g: f64,
    kappa: f64,
    rates: &CoolingRates,
    n_th: f64,
) -> HarmonicForm {
    let p = prefactor(g, kappa, rates);
    let r = lorentz_ratio(kappa, rates.omega_m);
    let c = bandwidth_coeffs(spec.b_x, spec.b_y, rates.gamma_eff, kappa, rates.omega_m);
    HarmonicForm {
        offset: p * (spec.n * c.f_minus + 0.5 + r * (spec.n * c.h + 0.5)) + rates.thermal_variance(n_th),
        scale: p * c.f_plus,
        m: spec.m,
    }
}

/// Finite-bandwidth squeezing at arbitrary sideband parameter.
pub fn variance_finite_bandwidth(
    spec: &SqueezingSpec,
    phi: f64,
    g: f64,
    kappa: f64,
    rates: &CoolingRates,
    n_th: f64,
) -> f64 {
    variance_finite_bandwidth_form(spec, g, kappa, rates, n_th).at(phi)
}

/// Effective photon number replacing N when the sideband parameter is finite.
pub fn effective_impurity(n: f64, eta: f64) -> f64 {
    n * (1.0 + eta / (eta + 4.0)) + eta / (2.0 * (eta + 4.0))
}

/// `|M|^2 < N'(N'+1)`: the mechanical state is mixed.
pub fn is_mixed(m_abs: f64, n_prime: f64) -> bool {
    m_abs * m_abs < n_prime * (n_prime + 1.0)
}

/// Resolved-sideband variance with N replaced by the impurity-corrected N'.
pub fn variance_rsl_impure_form(spec: &SqueezingSpec, eta: f64, rates: &CoolingRates, n_th: f64) -> HarmonicForm {
    HarmonicForm { offset: effective_impurity(spec.n, eta) + 0.5 + rates.thermal_variance(n_th), scale: 1.0, m: spec.m }
}

/// `V(phi)` on `[0, pi)`: either harmonic `mean + c cos 2phi + s sin 2phi` or sampled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadratureProfile {
    Harmonic { mean: f64, cos2: f64, sin2: f64 },
    Table { phi: Vec<f64>, variance: Vec<f64> },
}

impl QuadratureProfile {
    pub fn variance(&self, phi: f64) -> f64 {
        match self {
            QuadratureProfile::Harmonic { mean, cos2, sin2 } => {
                mean + cos2 * (2.0 * phi).cos() + sin2 * (2.0 * phi).sin()
            }
            QuadratureProfile::Table { phi: xs, variance: ys } => {
                let p = phi.rem_euclid(PI);
                let n = xs.len();
                let i = xs.partition_point(|&x| x <= p);
                let (x0, y0, x1, y1) = match i {
                    0 => (xs[n - 1] - PI, ys[n - 1], xs[0], ys[0]),
                    i if i == n => (xs[n - 1], ys[n - 1], xs[0] + PI, ys[0]),
                    i => (xs[i - 1], ys[i - 1], xs[i], ys[i]),
                };
                if x1 == x0 {
                    return y0;
                }
                y0 + (y1 - y0) * (p - x0) / (x1 - x0)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureStats {
    pub v_min: f64,
    pub v_max: f64,
    /// Quadrature angle of minimum variance, in `[0, pi)`.
    pub phi_star: f64,
    /// dB below the vacuum variance 1/2 (positive = squeezed).
    pub squeeze_db: f64,
    /// `(V_min + V_max)/2 - 1/2`.
    pub occupancy: f64,
    pub profile: QuadratureProfile,
}

impl QuadratureStats {
    /// `(V_max - V_min) / V_mean`.
    pub fn imbalance(&self) -> f64 {
        (self.v_max - self.v_min) / (0.5 * (self.v_max + self.v_min))
    }

    pub fn from_harmonic(mean: f64, cos2: f64, sin2: f64) -> Result<Self> {
        let amp = cos2.hypot(sin2);
        let v_min = mean - amp;
        let v_max = mean + amp;
        let phi_star = if amp == 0.0 { 0.0 } else { (0.5 * (sin2.atan2(cos2) + PI)).rem_euclid(PI) };
        Ok(QuadratureStats {
            v_min,
            v_max,
            phi_star,
            squeeze_db: to_db(v_min)?,
            occupancy: 0.5 * (v_min + v_max) - 0.5,
            profile: QuadratureProfile::Harmonic { mean, cos2, sin2 },
        })
    }
}

/// What [`quadrature_extrema`] can extremize.
#[derive(Debug, Clone, PartialEq)]
pub enum VarianceForm {
    Harmonic(HarmonicForm),
    /// `(phi, V(phi))` samples covering one period `[0, pi)`.
    Table(Vec<(f64, f64)>),
}

impl From<HarmonicForm> for VarianceForm {
    fn from(f: HarmonicForm) -> Self {
        VarianceForm::Harmonic(f)
    }
}

/// Vertex of the parabola through three points, clamped to the bracket.
fn parabolic_vertex(x: [f64; 3], y: [f64; 3]) -> (f64, f64) {
    let d1 = (y[1] - y[0]) / (x[1] - x[0]);
    let d2 = (y[2] - y[1]) / (x[2] - x[1]);
    let a = (d2 - d1) / (x[2] - x[0]);
    if a == 0.0 {
        return (x[1], y[1]);
    }
    // Newton form y0 + d1 (x - x0) + a (x - x0)(x - x1)
    let b = d1 - a * (x[0] + x[1]);
    let xv = (-b / (2.0 * a)).clamp(x[0], x[2]);
    (xv, y[0] + d1 * (xv - x[0]) + a * (xv - x[0]) * (xv - x[1]))
}

/// Extremes of a quadrature variance over the angle `phi`.
pub fn quadrature_extrema(form: &VarianceForm) -> Result<QuadratureStats> {
    match form {
        VarianceForm::Harmonic(f) => {
            // offset - scale (Mr cos 2phi - Mi sin 2phi)
            QuadratureStats::from_harmonic(f.offset, -f.scale * f.m.re, f.scale * f.m.im)
        }
        VarianceForm::Table(samples) => {
            if samples.len() < 8 {
                return Err(Error::TooFewSamples(samples.len()));
            }
            let mut pts: Vec<(f64, f64)> = samples.iter().map(|&(p, v)| (p.rem_euclid(PI), v)).collect();
            pts.sort_by(|a, b| a.0.total_cmp(&b.0));
            let n = pts.len();
            let around = |i: usize| {
                let (l, r) = ((i + n - 1) % n, (i + 1) % n);
                let xl = if l < i { pts[l].0 } else { pts[l].0 - PI };
                let xr = if r > i { pts[r].0 } else { pts[r].0 + PI };
                ([xl, pts[i].0, xr], [pts[l].1, pts[i].1, pts[r].1])
            };
            let imin = (0..n).min_by(|&a, &b| pts[a].1.total_cmp(&pts[b].1)).unwrap_or(0);
            let imax = (0..n).max_by(|&a, &b| pts[a].1.total_cmp(&pts[b].1)).unwrap_or(0);
            let (x, y) = around(imin);
            let (phi_star, v_min) = parabolic_vertex(x, y);
            let (x, y) = around(imax);
            let (_, v_max) = parabolic_vertex(x, y);
            let v_min = v_min.min(pts[imin].1);
            let v_max = v_max.max(pts[imax].1);
            Ok(QuadratureStats {
                v_min,
                v_max,
                phi_star: phi_star.rem_euclid(PI),
                squeeze_db: to_db(v_min)?,
                occupancy: 0.5 * (v_min + v_max) - 0.5,
                profile: QuadratureProfile::Table {
                    phi: pts.iter().map(|p| p.0).collect(),
                    variance: pts.iter().map(|p| p.1).collect(),
                },
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{bose_occupation, hz};
    use crate::squeezing::{nm_to_opo, SqueezingSpec};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn reference_rates() -> CoolingRates {
        cooling_rates(hz(110e3), hz(380e3), hz(1e6), hz(1e6) / 2e7).unwrap()
    }

    #[test]
    fn reference_cooling_rates() {
        // Oracle: the same fixed point iterated naively 500 times.
        let (g, k, w0) = (hz(110e3), hz(380e3), hz(1e6));
        let mut w = w0;
        for _ in 0..500 {
            w = w0 - optical_damping(g, k, w) * 2.0 * k / w;
        }
        let r = reference_rates();
        assert_relative_eq!(r.omega_m, w, max_relative = 1e-13);
        assert!((r.gamma_opt / hz(1.0) - 7680.0).abs() < 1.0, "Gamma/2pi = {}", r.gamma_opt / hz(1.0));
        assert!((r.omega_shift / hz(1.0) - 5871.0).abs() < 1.0, "Omega/2pi = {}", r.omega_shift / hz(1.0));
        assert_relative_eq!(r.gamma_eff, r.gamma_m + r.gamma_opt);
        let resid = (r.omega_m - (w0 - optical_damping(g, k, r.omega_m) * 2.0 * k / r.omega_m)).abs();
        assert!(resid < 1e-9 * r.omega_m);
    }

    #[test]
    fn no_coupling_no_optical_damping() {
        let r = cooling_rates(0.0, 1.0, 10.0, 0.01).unwrap();
        assert_eq!(r.gamma_opt, 0.0);
        assert_eq!(r.omega_shift, 0.0);
        assert_eq!(r.gamma_eff, 0.01);
    }

    #[test]
    fn resolved_sideband_damping() {
        let (g, w0) = (1.0, 1000.0);
        for eta in [1e-2, 1e-3] {
            let k = eta * w0;
            let r = cooling_rates(g, k, w0, 1e-6).unwrap();
            let rel = (r.gamma_opt - g * g / (4.0 * k)).abs() / (g * g / (4.0 * k));
            assert!(rel < eta * eta, "eta {eta}: rel {rel}");
        }
    }

    #[test]
    fn spring_shift_beyond_frequency_fails() {
        assert!(cooling_rates(1e3, 1.0, 1.0, 1e-3).is_err());
    }

    #[test]
    fn ground_state_without_squeezing() {
        let rates = CoolingRates { gamma_opt: 1.0, gamma_m: 0.0, gamma_eff: 1.0, omega_shift: 0.0, omega_m: 1.0 };
        let v = SqueezingSpec::vacuum(1.0);
        assert_eq!(variance_white_rsl(&v, 0.3, &rates, 100.0), 0.5);
    }

    #[test]
    fn six_db_resolved_sideband() {
        let rates = reference_rates();
        let n_th = bose_occupation(hz(1e6), 0.1);
        let s = nm_to_opo(6.0, 1.0).unwrap();
        let th = rates.gamma_m / rates.gamma_eff * (n_th + 0.5);
        assert!((th - 0.01356).abs() < 1e-5, "thermal term {th}");
        let stats = quadrature_extrema(&variance_white_rsl_form(&s, &rates, n_th).into()).unwrap();
        assert_relative_eq!(stats.v_min, 0.12559 + 0.01356, epsilon = 2e-5);
        assert!((stats.squeeze_db - 5.55).abs() < 0.01);
    }

    #[test]
    fn white_general_at_reference() {
        let rates = reference_rates();
        let n_th = bose_occupation(hz(1e6), 0.1);
        let s = nm_to_opo(6.0, 1.0).unwrap();
        let f = variance_white_general_form(&s, hz(110e3), hz(380e3), &rates, n_th);
        let stats = quadrature_extrema(&f.into()).unwrap();
        assert!((stats.v_min - 0.1824).abs() < 1e-4, "V_min {}", stats.v_min);
        assert!((stats.squeeze_db - 4.38).abs() < 0.01);

        let base = quadrature_extrema(
            &variance_white_general_form(&SqueezingSpec::vacuum(1.0), hz(110e3), hz(380e3), &rates, n_th).into(),
        )
        .unwrap();
        assert!((base.occupancy - 0.0501).abs() < 1e-3, "n_f {}", base.occupancy);
        let floor = 0.38f64.powi(2) / 4.0;
        assert!((floor - 0.0361).abs() < 1e-3);
    }

    #[test]
    fn quarter_turn_sum_rule() {
        let rates = reference_rates();
        let s = nm_to_opo(4.0, 1.0).unwrap();
        for phi in [0.0, 0.2, 1.1] {
            let sum = variance_white_rsl(&s, phi, &rates, 50.0) + variance_white_rsl(&s, phi + PI / 2.0, &rates, 50.0);
            assert_relative_eq!(sum, 2.0 * s.n + 1.0 + 2.0 * rates.thermal_variance(50.0), max_relative = 1e-14);
        }
    }

    #[test]
    fn bandwidth_coefficient_limits() {
        let c = bandwidth_coeffs(1e12, 2e12, 3.0, 5.0, 100.0);
        assert_relative_eq!(c.f_minus, 1.0, epsilon = 1e-9);
        assert_relative_eq!(c.f_plus, 1.0, epsilon = 1e-9);
        assert_relative_eq!(c.h, 1.0, epsilon = 1e-9);

        let (b, g) = (2.5, 0.7);
        let c = bandwidth_coeffs(b, b, g, 5.0, 100.0);
        assert_relative_eq!(c.f_plus, b / (b + g), max_relative = 1e-14);
        assert_relative_eq!(c.f_minus, b * (2.0 * b + g) / (2.0 * (b + g).powi(2)), max_relative = 1e-14);
        let c = bandwidth_coeffs(b, b, 0.0, 5.0, 100.0);
        assert_relative_eq!(c.f_minus, 1.0, max_relative = 1e-14);
    }

    #[test]
    fn h_is_continuous_across_degenerate_switch() {
        let (g, k, w) = (0.3, 2.0, 5.0);
        let a = bandwidth_coeffs(1.0, 1.0 + 1e-7, g, k, w).h;
        let b = bandwidth_coeffs(1.0, 1.0 + 1e-5, g, k, w).h;
        let c = bandwidth_coeffs(1.0, 1.0, g, k, w).h;
        // Inside the switch band the derivative is taken at the midpoint.
        assert_relative_eq!(a, c, max_relative = 1e-6);
        assert_relative_eq!(b, c, max_relative = 1e-4);
        // Difference form straight from the definition, well away from degeneracy.
        let (bx, by) = (0.8, 3.1);
        let q = g / k * (k * k + 4.0 * w * w);
        let term = |b1: f64, b2: f64| b2 * (b1 * b1 + b1 * k + q) / ((b1 + k) * (b1 * b1 + 2.0 * b1 * g + 4.0 * w * w));
        let direct = bx * by / (by * by - bx * bx) * (term(bx, by) - term(by, bx));
        assert_relative_eq!(bandwidth_coeffs(bx, by, g, k, w).h, direct, max_relative = 1e-13);
    }

    #[test]
    fn impurity() {
        assert_eq!(effective_impurity(0.7, 0.0), 0.7);
        assert_relative_eq!(effective_impurity(0.0, 0.38), 0.38 / (2.0 * 4.38));
        assert!((effective_impurity(0.0, 0.38) - 0.0434).abs() < 1e-4);
        let s = nm_to_opo(6.0, 1.0).unwrap();
        assert!(is_mixed(s.m.norm(), effective_impurity(s.n, 0.38)));
        assert!(!is_mixed(s.m.norm() * 1.0001, s.n));
    }

    #[test]
    fn extrema_angles() {
        let f = HarmonicForm { offset: 2.0, scale: 1.0, m: Complex64::new(0.5, 0.0) };
        let st = quadrature_extrema(&f.into()).unwrap();
        assert!(st.phi_star.abs() < 1e-15 || (st.phi_star - PI).abs() < 1e-15);
        assert_relative_eq!(st.v_min, 1.5);
        assert_relative_eq!(st.v_max, 2.5);

        let theta = 0.9;
        let f = HarmonicForm { offset: 2.0, scale: 1.0, m: Complex64::from_polar(0.5, theta) };
        let st = quadrature_extrema(&f.into()).unwrap();
        assert_relative_eq!(st.phi_star, (-theta / 2.0).rem_euclid(PI), max_relative = 1e-12);
        assert_relative_eq!(f.at(st.phi_star), st.v_min, max_relative = 1e-14);
    }

    #[test]
    fn pure_input_resolved_sideband_is_minimum_uncertainty() {
        let rates = CoolingRates { gamma_opt: 1.0, gamma_m: 0.0, gamma_eff: 1.0, omega_shift: 0.0, omega_m: 1.0 };
        let s = nm_to_opo(6.0, 1.0).unwrap();
        let st = quadrature_extrema(&variance_white_rsl_form(&s, &rates, 0.0).into()).unwrap();
        assert_relative_eq!(st.v_min * st.v_max, 0.25, max_relative = 1e-12);
    }

    #[test]
    fn table_extrema() {
        let f = HarmonicForm { offset: 1.0, scale: 0.4, m: Complex64::from_polar(1.0, 1.3) };
        let table: Vec<(f64, f64)> = (0..64).map(|k| k as f64 * PI / 64.0).map(|p| (p, f.at(p))).collect();
        let st = quadrature_extrema(&VarianceForm::Table(table)).unwrap();
        assert_relative_eq!(st.v_min, 0.6, max_relative = 1e-3);
        assert_relative_eq!(st.v_max, 1.4, max_relative = 1e-3);
        let exact = (-1.3f64 / 2.0).rem_euclid(PI);
        assert!((st.phi_star - exact).abs() < 1e-2);
        assert_relative_eq!(st.profile.variance(0.31), f.at(0.31), max_relative = 1e-2);
        assert!(matches!(quadrature_extrema(&VarianceForm::Table(vec![(0.0, 1.0); 7])), Err(Error::TooFewSamples(7))));
    }

    #[test]
    fn h_exceeds_one_when_gamma_eff_dominates_kappa() {
        // Counterexample to h <= 1, outside the regime gamma_eff << kappa where the
        // cavity can be eliminated adiabatically.
        let c = bandwidth_coeffs(18.5, 18.5, 2.75, 1.0, 165.8);
        assert!(c.h > 1.0, "{c:?}");
        assert!(c.f_minus <= 1.0 && c.f_plus <= 1.0);
    }

    proptest! {
        #[test]
        fn f_and_h_in_unit_interval(
            lbx in -3.0f64..6.0, ratio in 1.0f64..30.0, lg in -4.0f64..2.0, lk in -2.0f64..3.0, lw in 0.0f64..3.0
        ) {
            let (bx, g, k, w) = (10f64.powf(lbx), 10f64.powf(lg), 10f64.powf(lk), 10f64.powf(lw));
            let c = bandwidth_coeffs(bx, bx * ratio, g, k, w);
            let unit = |v: f64| v > 0.0 && v <= 1.0 + 1e-12;
            prop_assert!(unit(c.f_minus) && unit(c.f_plus), "{c:?}");
            // h leaves the unit interval once gamma_eff exceeds kappa; see below.
            if g <= k {
                prop_assert!(unit(c.h), "{c:?}");
            }
        }

        #[test]
        fn rsl_is_monotone_in_thermal_load(n1 in 0.0f64..1e4, dn in 0.0f64..1e3, db in 0.0f64..12.0) {
            let rates = CoolingRates { gamma_opt: 1.0, gamma_m: 1e-4, gamma_eff: 1.0 + 1e-4, omega_shift: 0.0, omega_m: 1.0 };
            let s = nm_to_opo(db, 1.0).unwrap();
            let a = quadrature_extrema(&variance_white_rsl_form(&s, &rates, n1).into()).unwrap();
            let b = quadrature_extrema(&variance_white_rsl_form(&s, &rates, n1 + dn).into()).unwrap();
            prop_assert!(b.v_min >= a.v_min);
        }

        #[test]
        fn phi_periodicity(db in 0.0f64..12.0, theta in 0.0f64..std::f64::consts::TAU, phi in -4.0f64..4.0) {
            let rates = reference_rates();
            let mut s = nm_to_opo(db, hz(3e6)).unwrap();
            s.m *= Complex64::from_polar(1.0, theta);
            let (g, k) = (hz(110e3), hz(380e3));
            for f in [
                variance_white_rsl_form(&s, &rates, 10.0),
                variance_white_general_form(&s, g, k, &rates, 10.0),
                variance_finite_bandwidth_form(&s, g, k, &rates, 10.0),
            ] {
                prop_assert!((f.at(phi) - f.at(phi + PI)).abs() <= 1e-12 * f.at(phi).abs());
            }
        }
    }
}
