use nalgebra::{DMatrix, DVector};

use super::stream::RandomStream;
use super::univariate::gamma_f64;
use crate::error::{Error, Result};
use crate::linalg::{cholesky_jittered, symmetrize};
use crate::scalar::{lit, wide, Real};

/// Draws from `N(mean, cov)`.
pub fn sample_mvn<T: Real>(mean: &DVector<T>, cov: &DMatrix<T>, s: &mut RandomStream) -> Result<DVector<T>> {
    if cov.nrows() != mean.len() || cov.ncols() != mean.len() {
        return Err(Error::contract(format!(
            "covariance is {}x{} but mean has length {}",
            cov.nrows(),
            cov.ncols(),
            mean.len()
        )));
    }
    let chol = cholesky_jittered(cov.clone())?;
    let z = standard_normal_vector(mean.len(), s);
    Ok(mean + chol.l() * z)
}

/// Inverse-Wishart draw with `df` degrees of freedom and scale matrix `scale`
/// (mean `scale / (df - q - 1)` when `df > q + 1`).
///
/// With `scale = C C^T` and a Bartlett factor `A` of a standard Wishart,
/// `Sigma = (C A^{-T}) (C A^{-T})^T`.
pub fn sample_inverse_wishart<T: Real>(df: T, scale: &DMatrix<T>, s: &mut RandomStream) -> Result<DMatrix<T>> {
    let q = scale.nrows();
    if !scale.is_square() || q == 0 {
        return Err(Error::contract("inverse-Wishart scale must be a non-empty square matrix"));
    }
    let dfw = wide(df);
    if !(dfw > q as f64 - 1.0) || !dfw.is_finite() {
        return Err(Error::parameter(format!("inverse-Wishart needs df > q - 1 = {}, got {dfw}", q - 1)));
    }
    let c = cholesky_jittered(scale.clone())?.unpack();
    let mut a = DMatrix::<T>::zeros(q, q);
    for i in 0..q {
        // chi-square with df - i degrees of freedom
        a[(i, i)] = lit::<T>((2.0 * gamma_f64(0.5 * (dfw - i as f64), 1.0, s)).sqrt());
        for j in 0..i {
            a[(i, j)] = lit(s.standard_normal());
        }
    }
    let a_inv = a
        .solve_lower_triangular(&DMatrix::identity(q, q))
        .ok_or_else(|| Error::numerical("singular Bartlett factor", 0.0))?;
    let r = c * a_inv.transpose();
    let mut sigma = &r * r.transpose();
    symmetrize(&mut sigma);
    Ok(sigma)
}

pub(crate) fn standard_normal_vector<T: Real>(n: usize, s: &mut RandomStream) -> DVector<T> {
    DVector::from_fn(n, |_, _| lit(s.standard_normal()))
}
