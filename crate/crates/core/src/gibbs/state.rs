use nalgebra::{DMatrix, DVector};

use super::Hyperparameters;
use crate::error::Result;
use crate::model::{f_values, latent_z, Dataset};
use crate::scalar::{lit, Real};

/// All mutable quantities of one chain.
///
/// `w` holds the Pólya-Gamma weights; Gaussian columns keep weight one. The
/// working response `Z` is never stored: [`working_response`] derives it
/// from `(Y, W, r)` so that `z * omega = kappa` holds exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainState<T: Real> {
    /// p x q regression coefficients.
    pub b: DMatrix<T>,
    /// n x q random effects.
    pub u: DMatrix<T>,
    /// n x q latent weights.
    pub w: DMatrix<T>,
    pub nu: DVector<T>,
    pub eta: DVector<T>,
    /// q x q random-effect covariance.
    pub sigma: DMatrix<T>,
    /// Dispersion per response column; `Some` exactly on negative-binomial columns.
    pub r: Vec<Option<T>>,
}

/// Starting point: `B = 0`, `U = 0`, `nu = eta = 1`, `Sigma = I`, each
/// dispersion at its schema's `r_init`, and each discrete weight at the
/// Pólya-Gamma mean `f2 / 4` for `theta = 0`. Unit weights would put large
/// counts on a working-response scale the first `B` draw cannot recover from.
pub fn initialize_state<T: Real>(d: &Dataset<T>, _h: &Hyperparameters) -> Result<ChainState<T>> {
    let (n, p, q) = (d.n(), d.p(), d.q());
    let r: Vec<Option<T>> = d
        .schema()
        .kinds()
        .iter()
        .map(|k| match k {
            crate::model::ResponseKind::NegBinomial { r_init, .. } => Some(lit(*r_init)),
            _ => None,
        })
        .collect();
    let mut w = DMatrix::from_element(n, q, T::one());
    for k in 0..q {
        let kind = d.schema().kind(k);
        if kind.is_gaussian() {
            continue;
        }
        let rk = r[k].unwrap_or_else(T::zero);
        for i in 0..n {
            let (_, f2) = f_values(kind, i, d.y()[(i, k)], rk)?;
            w[(i, k)] = f2 * lit(0.25);
        }
    }
    Ok(ChainState {
        b: DMatrix::zeros(p, q),
        u: DMatrix::zeros(n, q),
        w,
        nu: DVector::from_element(p, T::one()),
        eta: DVector::from_element(p, T::one()),
        sigma: DMatrix::identity(q, q),
        r,
    })
}

/// The n x q working response implied by the current weights and dispersions.
pub fn working_response<T: Real>(state: &ChainState<T>, d: &Dataset<T>) -> Result<DMatrix<T>> {
    let (n, q) = (d.n(), d.q());
    let mut z = DMatrix::zeros(n, q);
    for k in 0..q {
        let kind = d.schema().kind(k);
        if kind.is_gaussian() {
            z.set_column(k, &d.y().column(k));
            continue;
        }
        let r = state.r[k].unwrap_or_else(T::zero);
        for i in 0..n {
            let y = d.y()[(i, k)];
            let (f1, f2) = f_values(kind, i, y, r)?;
            z[(i, k)] = latent_z(kind, y, state.w[(i, k)], f1, f2)?;
        }
    }
    Ok(z)
}

impl<T: Real> ChainState<T> {
    /// Describes the first broken invariant, if any.
    pub fn check_invariants(&self, d: &Dataset<T>) -> std::result::Result<(), String> {
        let (n, p, q) = (d.n(), d.p(), d.q());
        if self.b.shape() != (p, q) || self.u.shape() != (n, q) || self.w.shape() != (n, q) {
            return Err("state dimensions do not match the dataset".into());
        }
        if self.nu.len() != p || self.eta.len() != p || self.sigma.shape() != (q, q) || self.r.len() != q {
            return Err("state dimensions do not match the dataset".into());
        }
        for k in 0..q {
            let kind = d.schema().kind(k);
            for i in 0..n {
                let w = self.w[(i, k)];
                if kind.is_gaussian() && w != T::one() {
                    return Err(format!("Gaussian cell ({i}, {k}) has weight {w}"));
                }
                if !(w >= T::zero()) || !w.is_finite() {
                    return Err(format!("cell ({i}, {k}) has invalid weight {w}"));
                }
            }
            match (kind.is_negbinomial(), self.r[k]) {
                (true, Some(r)) if r > T::zero() && r.is_finite() => {}
                (false, None) => {}
                (_, r) => return Err(format!("column {k} has dispersion {r:?}")),
            }
        }
        if let Some(j) = (0..p).find(|&j| !(self.nu[j] > T::zero()) || !(self.eta[j] > T::zero())) {
            return Err(format!("row {j}: nu = {}, eta = {}", self.nu[j], self.eta[j]));
        }
        if self.b.iter().chain(self.u.iter()).any(|v| !v.is_finite()) {
            return Err("non-finite entry in B or U".into());
        }
        if self.sigma != self.sigma.transpose() || self.sigma.clone().cholesky().is_none() {
            return Err("Sigma is not symmetric positive definite".into());
        }
        Ok(())
    }
}
