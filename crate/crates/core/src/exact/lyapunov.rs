//! Algebraic Lyapunov equations by Kronecker vectorization.
//!
//! The systems here are at most 6x6, so the 36x36 dense LU is both the simplest and
//! a perfectly adequate solver.

use nalgebra::{DMatrix, DVector, SMatrix};

use crate::error::{Error, Result};

pub(crate) fn to_dyn<const N: usize>(m: &SMatrix<f64, N, N>) -> DMatrix<f64> {
    DMatrix::from_column_slice(N, N, m.as_slice())
}

pub(crate) fn from_dyn<const N: usize>(m: &DMatrix<f64>) -> SMatrix<f64, N, N> {
    SMatrix::<f64, N, N>::from_column_slice(m.as_slice())
}

/// Largest real part of the spectrum of `a`.
pub fn spectral_abscissa<const N: usize>(a: &SMatrix<f64, N, N>) -> f64 {
    to_dyn(a).complex_eigenvalues().iter().map(|l| l.re).fold(f64::NEG_INFINITY, f64::max)
}

fn solve_vectorized(k: DMatrix<f64>, rhs: DVector<f64>) -> Result<DVector<f64>> {
    let lu = k.clone().lu();
    let mut x = lu.solve(&rhs).ok_or(Error::Singular("Lyapunov operator"))?;
    // One step of iterative refinement.
    let r = &rhs - &k * &x;
    if let Some(dx) = lu.solve(&r) {
        x += dx;
    }
    Ok(x)
}

/// Solve `A X + X A^T + D = 0` for Hurwitz `A`.
pub fn solve_continuous_lyapunov<const N: usize>(
    a: &SMatrix<f64, N, N>,
    d: &SMatrix<f64, N, N>,
) -> Result<SMatrix<f64, N, N>> {
    let abscissa = spectral_abscissa(a);
    if !(abscissa < 0.0) {
        return Err(Error::Unstable { detail: format!("drift has an eigenvalue with real part {abscissa:e} >= 0") });
    }
    let ad = to_dyn(a);
    let eye = DMatrix::<f64>::identity(N, N);
    // vec(A X) = (I (x) A) vec X, vec(X A^T) = (A (x) I) vec X for column-major vec.
    let k = eye.kronecker(&ad) + ad.kronecker(&eye);
    let rhs = -DVector::from_column_slice(d.as_slice());
    let x = solve_vectorized(k, rhs)?;
    let x = SMatrix::<f64, N, N>::from_column_slice(x.as_slice());
    let x = (x + x.transpose()) * 0.5;

    let resid = (a * x + x * a.transpose() + d).norm();
    let scale = a.norm() * x.norm() + d.norm();
    if resid > 1e-10 * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::Singular("Lyapunov residual above tolerance"));
    }
    Ok(x)
}

/// Solve `X = P X P^T + Q` for a Schur-stable map `P`.
pub fn solve_discrete_lyapunov<const N: usize>(
    p: &SMatrix<f64, N, N>,
    q: &SMatrix<f64, N, N>,
) -> Result<SMatrix<f64, N, N>> {
    let pd = to_dyn(p);
    let k = DMatrix::<f64>::identity(N * N, N * N) - pd.kronecker(&pd);
    let x = solve_vectorized(k, DVector::from_column_slice(q.as_slice()))?;
    let x = SMatrix::<f64, N, N>::from_column_slice(x.as_slice());
    Ok((x + x.transpose()) * 0.5)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use nalgebra::{Matrix2, Matrix6};

    #[test]
    fn minus_identity() {
        let a = -Matrix6::<f64>::identity();
        let d = Matrix6::<f64>::identity() * 2.0;
        let x = solve_continuous_lyapunov(&a, &d).unwrap();
        assert_relative_eq!(x, Matrix6::identity(), epsilon = 1e-14);
    }

    #[test]
    fn resonant_opo_block() {
        // gamma = 2, eps = 1/2: x decays at b_x = 1/2, p at b_y = 3/2; D = gamma/2 I.
        let a = Matrix2::new(-0.5, 0.0, 0.0, -1.5);
        let d = Matrix2::identity() * 1.0;
        let x = solve_continuous_lyapunov(&a, &d).unwrap();
        assert_relative_eq!(x[(0, 0)], 1.0, max_relative = 1e-14);
        assert_relative_eq!(x[(1, 1)], 1.0 / 3.0, max_relative = 1e-14);
    }

    #[test]
    fn unstable_drift_is_rejected() {
        let a = Matrix2::new(0.1, 1.0, -1.0, 0.1);
        assert!(matches!(solve_continuous_lyapunov(&a, &Matrix2::identity()), Err(Error::Unstable { .. })));
    }

    #[test]
    fn discrete_matches_series() {
        let p = Matrix2::new(0.5, 0.2, -0.1, 0.3);
        let q = Matrix2::new(1.0, 0.2, 0.2, 0.5);
        let x = solve_discrete_lyapunov(&p, &q).unwrap();
        let mut acc = Matrix2::<f64>::zeros();
        let mut pk = Matrix2::<f64>::identity();
        for _ in 0..200 {
            acc += pk * q * pk.transpose();
            pk *= p;
        }
        assert_relative_eq!(x, acc, epsilon = 1e-13);
    }
}
