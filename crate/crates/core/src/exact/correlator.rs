//! Stationary two-time correlators by the quantum regression theorem.

use nalgebra::{Matrix2, SMatrix};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exact::lyapunov::{from_dyn, solve_continuous_lyapunov, to_dyn};
use crate::exact::model::opo_drift;
use crate::squeezing::OpoParams;

/// `<y(t + tau) y(t)^T> = e^{A tau} Sigma` for `tau >= 0`.
pub fn two_time_correlator<const N: usize>(
    a: &SMatrix<f64, N, N>,
    sigma: &SMatrix<f64, N, N>,
    tau: f64,
) -> Result<SMatrix<f64, N, N>> {
    if !(tau >= 0.0) {
        return Err(Error::NegativeDelay(tau));
    }
    let propagator: SMatrix<f64, N, N> = from_dyn(&(to_dyn(a) * tau).exp());
    Ok(propagator * sigma)
}

/// Output correlators of a below-threshold OPO for `tau > 0`:
/// `mm = <c(t + tau) c(t)>` and `nm = <c^dag(t + tau) c(t)>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutputCorrelators {
    pub mm: Complex64,
    pub nm: Complex64,
}

/// Stationary OPO state and its drift, in the frame of the squeezing carrier.
pub fn opo_steady_state(opo: &OpoParams) -> Result<(Matrix2<f64>, Matrix2<f64>)> {
    opo.check_threshold()?;
    let a = opo_drift(opo);
    let d = Matrix2::identity() * (0.5 * opo.gamma);
    Ok((a, solve_continuous_lyapunov(&a, &d)?))
}

/// Output field `c = sqrt(gamma) a + a_in`. For `tau > 0` the input at time `t`
/// is correlated only with the later intracavity field, which contributes the
/// `-(gamma/2) e^{A tau}` term.
pub fn opo_output_correlators(opo: &OpoParams, tau: f64) -> Result<OutputCorrelators> {
    let (a, sigma) = opo_steady_state(opo)?;
    let g = opo.gamma;
    let c = two_time_correlator(&a, &(sigma * g - Matrix2::identity() * (0.5 * g)), tau)?;
    let (xx, xp, px, pp) = (c[(0, 0)], c[(0, 1)], c[(1, 0)], c[(1, 1)]);
    Ok(OutputCorrelators {
        mm: Complex64::new(0.5 * (xx - pp), 0.5 * (xp + px)),
        nm: Complex64::new(0.5 * (xx + pp), 0.5 * (xp - px)),
    })
}
