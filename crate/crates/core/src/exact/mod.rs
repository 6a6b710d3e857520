//! Exact steady state of the linearized dynamics with the squeezed light generated
//! by an explicit OPO feeding the cavity.

pub mod correlator;
pub mod gaussian;
pub mod lyapunov;
pub mod model;
pub mod ode;
pub mod periodic;
pub mod readout;

pub use correlator::{opo_output_correlators, opo_steady_state, two_time_correlator, OutputCorrelators};
pub use gaussian::{is_physical, symplectic_eigenvalues, Covariance, Frame};
pub use lyapunov::{solve_continuous_lyapunov, solve_discrete_lyapunov, spectral_abscissa};
pub use model::{build_cascade, dressed_mechanics, resonance_frequency, Cascade, LinearModel, ResonanceReference};
pub use periodic::{
    floquet_stability, lyapunov_steady, period_map, periodic_lyapunov_steady, FloquetReport, PeriodicCovariance,
    PeriodicOptions,
};
pub use readout::{mech_quadrature_stats, MechanicalReadout};

use crate::error::{Error, Result};

pub type Mat6 = nalgebra::Matrix6<f64>;

/// Solved cascade: the sampled steady state plus the membrane readout.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactSolution {
    pub covariance: PeriodicCovariance,
    pub readout: MechanicalReadout,
}

/// Periodic steady state of a cascade and its membrane statistics, after checking
/// that every sampled covariance is a physical Gaussian state.
pub fn solve_cascade(cascade: &Cascade, opts: &PeriodicOptions) -> Result<ExactSolution> {
    let covariance = periodic_lyapunov_steady(&cascade.model, opts)?;
    if let Some(bad) = covariance.samples.iter().find(|c| !c.is_physical(1e-9)) {
        let nu = bad.symplectic_eigenvalues().and_then(|v| v.first().copied()).unwrap_or(f64::NAN);
        return Err(Error::Unstable { detail: format!("unphysical covariance, smallest symplectic eigenvalue {nu}") });
    }
    let readout = mech_quadrature_stats(&covariance, cascade.readout_frequency)?;
    Ok(ExactSolution { covariance, readout })
}
