//! Draws from `N(A^{-1} Phi^T alpha, A^{-1})` with `A = Phi^T Phi + diag(D)^{-1}`.
//!
//! Two routes produce the same distribution:
//!
//! * [`gaussian_posterior_fast`] works in the n-dimensional observation space
//!   (Bhattacharya, Chakraborty and Mallick): with `w ~ N(0, diag(D))` and
//!   `delta ~ N(0, I_n)`, solve `(Phi diag(D) Phi^T + I_n) m = alpha - Phi w - delta`
//!   and return `w + diag(D) Phi^T m`. Cost O(n^2 p).
//! * [`gaussian_posterior_dense`] factors the p x p precision directly.
//!   Cost O(p^3).
//!
//! [`fast_gaussian_posterior`] picks the fast route when `p > n`.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use super::multivariate::standard_normal_vector;
use super::stream::RandomStream;
use crate::error::{Error, Result};
use crate::linalg::cholesky_jittered;
use crate::scalar::Real;

pub fn fast_gaussian_posterior<T: Real>(
    phi: &DMatrix<T>,
    alpha: &DVector<T>,
    d: &DVector<T>,
    s: &mut RandomStream,
) -> Result<DVector<T>> {
    if phi.ncols() > phi.nrows() {
        gaussian_posterior_fast(phi, alpha, d, s)
    } else {
        gaussian_posterior_dense(phi, alpha, d, s)
    }
}

/// Observation-space route; valid for any `n`, `p`.
pub fn gaussian_posterior_fast<T: Real>(
    phi: &DMatrix<T>,
    alpha: &DVector<T>,
    d: &DVector<T>,
    s: &mut RandomStream,
) -> Result<DVector<T>> {
    check_inputs(phi, alpha, d)?;
    let prior_normals = standard_normal_vector(phi.ncols(), s);
    let noise = standard_normal_vector(phi.nrows(), s);
    let mut gram = phi * DMatrix::from_diagonal(d) * phi.transpose();
    for i in 0..gram.nrows() {
        gram[(i, i)] += T::one();
    }
    let chol = cholesky_jittered(gram)?;
    Ok(fast_draw_with_factor(phi, alpha, d, &chol, &prior_normals, &noise))
}

/// Core of the fast route given the factor of `Phi diag(D) Phi^T + I`, the
/// standard normals behind `w` (length p) and `delta` (length n).
pub(crate) fn fast_draw_with_factor<T: Real>(
    phi: &DMatrix<T>,
    alpha: &DVector<T>,
    d: &DVector<T>,
    chol: &Cholesky<T, Dyn>,
    prior_normals: &DVector<T>,
    noise: &DVector<T>,
) -> DVector<T> {
    let w = prior_normals.zip_map(d, |z, dj| z * dj.sqrt());
    let v = phi * &w + noise;
    let m = chol.solve(&(alpha - v));
    let back = phi.tr_mul(&m);
    w + back.component_mul(d)
}

/// Precision-space route.
pub fn gaussian_posterior_dense<T: Real>(
    phi: &DMatrix<T>,
    alpha: &DVector<T>,
    d: &DVector<T>,
    s: &mut RandomStream,
) -> Result<DVector<T>> {
    check_inputs(phi, alpha, d)?;
    let mut precision = phi.tr_mul(phi);
    for j in 0..d.len() {
        precision[(j, j)] += T::one() / d[j];
    }
    let chol = cholesky_jittered(precision)?;
    let rhs = phi.tr_mul(alpha);
    let z = standard_normal_vector(d.len(), s);
    Ok(dense_draw_with_factor(&chol, &rhs, &z))
}

/// `A^{-1} rhs + L^{-T} z` where `A = L L^T`.
pub(crate) fn dense_draw_with_factor<T: Real>(
    chol: &Cholesky<T, Dyn>,
    rhs: &DVector<T>,
    z: &DVector<T>,
) -> DVector<T> {
    let mean = chol.solve(rhs);
    let noise = chol
        .l_dirty()
        .tr_solve_lower_triangular(z)
        .expect("Cholesky factor has a positive diagonal");
    mean + noise
}

fn check_inputs<T: Real>(phi: &DMatrix<T>, alpha: &DVector<T>, d: &DVector<T>) -> Result<()> {
    if alpha.len() != phi.nrows() || d.len() != phi.ncols() {
        return Err(Error::contract(format!(
            "design is {}x{} but target has length {} and prior variances length {}",
            phi.nrows(),
            phi.ncols(),
            alpha.len(),
            d.len()
        )));
    }
    if d.iter().any(|&v| !(v > T::zero()) || !v.is_finite()) {
        return Err(Error::parameter("prior variances must be positive and finite"));
    }
    Ok(())
}
