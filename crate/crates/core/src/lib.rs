//! Steady-state squeezing of a laser-cooled membrane driven by squeezed light.
//!
//! Two routes to the same numbers: closed-form variances after adiabatic
//! elimination of the cavity ([`analytics`]), and the exact linear-Gaussian steady
//! state of an OPO -> cavity -> membrane cascade ([`exact`]). [`experiments`] drives
//! both over parameter sweeps and writes CSV/JSON.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytics;
pub mod error;
pub mod exact;
pub mod experiments;
pub mod params;
pub mod squeezing;

pub use analytics::{
    bandwidth_coeffs, cooling_rates, quadrature_extrema, variance_finite_bandwidth, variance_white_general,
    variance_white_rsl, BandwidthCoeffs, CoolingRates, QuadratureProfile, QuadratureStats, VarianceForm,
};
pub use error::{Error, Result};
pub use exact::{
    build_cascade, lyapunov_steady, mech_quadrature_stats, periodic_lyapunov_steady, solve_cascade, Cascade,
    Covariance, LinearModel, PeriodicOptions, ResonanceReference,
};
pub use params::{derive_params, hz, to_hz, DerivedParams, DetuningPolicy, Drive, MechanicalDamping, SystemParams};
pub use squeezing::{from_db, nm_to_opo, opo_to_nm, to_db, OpoParams, SqueezingSpec};
