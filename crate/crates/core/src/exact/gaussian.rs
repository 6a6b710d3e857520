//! Gaussian-state bookkeeping for symmetrized quadrature covariances.

use nalgebra::{DMatrix, SMatrix};
use serde::{Deserialize, Serialize};

use crate::exact::lyapunov::to_dyn;
use crate::exact::Mat6;

/// Rotating frame in which a covariance is expressed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Frame {
    /// Optical modes rotate at the laser frequency; the membrane is not rotated.
    Laser,
    /// Source-only models, in the frame of the squeezing carrier.
    SqueezingCarrier,
}

/// Symmetrized covariance of the quadrature vector (OPO x, p, cavity x, p, membrane x, p).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Covariance {
    pub sigma: Mat6,
    pub frame: Frame,
    /// Time within the drive period, for periodic steady states.
    pub time: Option<f64>,
}

impl Covariance {
    pub fn mechanical_block(&self) -> nalgebra::Matrix2<f64> {
        self.sigma.fixed_view::<2, 2>(4, 4).into_owned()
    }

    pub fn opo_block(&self) -> nalgebra::Matrix2<f64> {
        self.sigma.fixed_view::<2, 2>(0, 0).into_owned()
    }

    pub fn symplectic_eigenvalues(&self) -> Option<Vec<f64>> {
        symplectic_eigenvalues(&self.sigma)
    }

    pub fn is_physical(&self, tol: f64) -> bool {
        is_physical(&self.sigma, tol)
    }
}

fn symplectic_form(n: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        j[(2 * k, 2 * k + 1)] = 1.0;
        j[(2 * k + 1, 2 * k)] = -1.0;
    }
    j
}

/// Symplectic eigenvalues of a covariance over `N/2` modes, ascending.
/// `None` when `sigma` is not positive definite.
pub fn symplectic_eigenvalues<const N: usize>(sigma: &SMatrix<f64, N, N>) -> Option<Vec<f64>> {
    let s = to_dyn(sigma);
    let s = (&s + s.transpose()) * 0.5;
    let eig = s.clone().symmetric_eigen();
    if eig.eigenvalues.iter().any(|&l| !(l > 0.0)) {
        return None;
    }
    let sqrt =
        &eig.eigenvectors * DMatrix::from_diagonal(&eig.eigenvalues.map(f64::sqrt)) * eig.eigenvectors.transpose();
    // S^{1/2} J S^{1/2} is antisymmetric with eigenvalues +-i nu; its square is -nu^2.
    let k = &sqrt * symplectic_form(N / 2) * &sqrt;
    let m = -(&k * &k);
    let m = (&m + m.transpose()) * 0.5;
    let mut nu: Vec<f64> = m.symmetric_eigenvalues().iter().map(|&v| v.max(0.0).sqrt()).collect();
    nu.sort_by(f64::total_cmp);
    Some(nu.chunks(2).map(|p| 0.5 * (p[0] + p[1])).collect())
}

/// Symmetric to `1e-12` relative and every symplectic eigenvalue `>= 1/2 - tol`.
pub fn is_physical<const N: usize>(sigma: &SMatrix<f64, N, N>, tol: f64) -> bool {
    let asym = (sigma - sigma.transpose()).norm();
    if asym > 1e-12 * sigma.norm() {
        return false;
    }
    match symplectic_eigenvalues(sigma) {
        Some(nu) => nu.iter().all(|&v| v >= 0.5 - tol),
        None => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use nalgebra::{Matrix2, Matrix4};

    #[test]
    fn vacuum_and_thermal() {
        let nu = symplectic_eigenvalues(&(Matrix4::<f64>::identity() * 0.5)).unwrap();
        for v in nu {
            assert_relative_eq!(v, 0.5, max_relative = 1e-14);
        }
        let nu = symplectic_eigenvalues(&Matrix2::new(3.0, 0.0, 0.0, 3.0)).unwrap();
        assert_relative_eq!(nu[0], 3.0, max_relative = 1e-14);
    }

    #[test]
    fn squeezed_single_mode() {
        let r: f64 = 0.8;
        let s = Matrix2::new(0.5 * (-2.0 * r).exp(), 0.0, 0.0, 0.5 * (2.0 * r).exp());
        let nu = symplectic_eigenvalues(&s).unwrap();
        assert_relative_eq!(nu[0], 0.5, max_relative = 1e-12);
        assert!(is_physical(&s, 1e-9));
        assert!(!is_physical(&(s * 0.9), 1e-9));
    }

    #[test]
    fn two_mode_squeezed_vacuum_is_pure() {
        let r: f64 = 0.6;
        let (c, sh) = (0.5 * (2.0 * r).cosh(), 0.5 * (2.0 * r).sinh());
        let s = Matrix4::new(c, 0.0, sh, 0.0, 0.0, c, 0.0, -sh, sh, 0.0, c, 0.0, 0.0, -sh, 0.0, c);
        let nu = symplectic_eigenvalues(&s).unwrap();
        assert_relative_eq!(nu[0], 0.5, max_relative = 1e-10);
        assert_relative_eq!(nu[1], 0.5, max_relative = 1e-10);
        // Its local states are thermal but the pair is not classical.
        assert!(is_physical(&s, 1e-9));
        let mut bad = s;
        bad[(0, 2)] *= 1.2;
        bad[(2, 0)] *= 1.2;
        assert!(!is_physical(&bad, 1e-9));
    }
}
