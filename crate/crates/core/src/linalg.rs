//! Dense SPD helpers shared by the samplers.

use nalgebra::{Cholesky, DMatrix, Dyn, SymmetricEigen};

use crate::error::{Error, Result};
use crate::scalar::{lit, wide, Real};

/// Smallest and largest relative jitter tried before giving up.
pub const JITTER_START: f64 = 1e-10;
pub const JITTER_MAX: f64 = 1e-6;

/// Replaces `m` with `(m + m^T) / 2`.
pub fn symmetrize<T: Real>(m: &mut DMatrix<T>) {
    let n = m.nrows();
    let half = lit::<T>(0.5);
    for j in 0..n {
        for i in (j + 1)..n {
            let v = (m[(i, j)] + m[(j, i)]) * half;
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
}

/// Cholesky factor of a symmetric matrix, adding `eps * (trace / q) * I`
/// for `eps` in 1e-10, 1e-9, ..., 1e-6 when the plain factorization fails.
pub fn cholesky_jittered<T: Real>(mut m: DMatrix<T>) -> Result<Cholesky<T, Dyn>> {
    if !m.is_square() {
        return Err(Error::contract(format!("expected a square matrix, got {}x{}", m.nrows(), m.ncols())));
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::numerical("matrix has non-finite entries", f64::NAN));
    }
    symmetrize(&mut m);
    if let Some(c) = Cholesky::new(m.clone()) {
        return Ok(c);
    }
    let q = m.nrows().max(1);
    let trace = wide(m.trace()) / q as f64;
    let scale = if trace.is_finite() && trace > 0.0 { trace } else { 1.0 };
    let mut eps = JITTER_START;
    while eps <= JITTER_MAX * 1.000_001 {
        let mut jittered = m.clone();
        let add = lit::<T>(eps * scale);
        for i in 0..m.nrows() {
            jittered[(i, i)] += add;
        }
        if let Some(c) = Cholesky::new(jittered) {
            return Ok(c);
        }
        eps *= 10.0;
    }
    Err(Error::numerical(
        format!("Cholesky failed on {q}x{q} matrix after maximum jitter"),
        min_eigenvalue(&m),
    ))
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_eigenvalue<T: Real>(m: &DMatrix<T>) -> f64 {
    if m.iter().any(|v| !v.is_finite()) {
        return f64::NAN;
    }
    let eig = SymmetricEigen::new(m.clone());
    eig.eigenvalues.iter().map(|&v| wide(v)).fold(f64::INFINITY, f64::min)
}
