//! Full-conditional updates. Each takes the iteration's stream for that block
//! and derives per-index children, so the draws for row `i` or predictor `j`
//! do not depend on how many draws other rows consumed.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use super::state::{working_response, ChainState};
use super::{EtaShape, Hyperparameters};
use crate::distributions::{
    crt_f64, dense_draw_with_factor, fast_draw_with_factor, gamma_f64, gig_f64, sample_inverse_wishart,
    standard_normal_vector, PolyaGamma, RandomStream,
};
use crate::error::{Error, Result};
use crate::linalg::cholesky_jittered;
use crate::model::{f_values, Dataset};
use crate::scalar::{lit, wide, Real};

/// Floor on `||b_j||^2` for the `nu_j` draw when the GIG index is not positive.
pub const CHI_FLOOR: f64 = 1e-30;

/// Success probabilities enter `ln(1 - psi)` clamped to `[PSI_CLAMP, 1 - PSI_CLAMP]`.
pub const PSI_CLAMP: f64 = 1e-12;

/// Draws every column of `B` given `(Z, W, U, nu)`.
///
/// Column `k` has design `Phi = diag(sqrt w_k) X`, target
/// `alpha = diag(sqrt w_k)(z_k - u_k)` and prior variances `nu`. When
/// `p > n` all columns share `G = X diag(nu) X^T` and only the n x n
/// system `diag(sqrt w) G diag(sqrt w) + I` is factored per column;
/// Gaussian columns (unit weights) reuse one factor.
pub fn update_b<T: Real>(state: &mut ChainState<T>, d: &Dataset<T>, _h: &Hyperparameters, s: &RandomStream) -> Result<()> {
    let (n, p, q) = (d.n(), d.p(), d.q());
    let x = d.x();
    let z = working_response(state, d)?;
    if state.nu.iter().any(|&v| !(v > T::zero()) || !v.is_finite()) {
        return Err(Error::numerical("local scales must be positive and finite", f64::NAN));
    }
    if p > n {
        let prior_parent = s.child(0);
        let noise_parent = s.child(1);
        let mut prior = DMatrix::<T>::zeros(p, q);
        for j in 0..p {
            let mut sj = prior_parent.child(j as u64);
            for k in 0..q {
                prior[(j, k)] = lit(sj.standard_normal());
            }
        }
        let mut xs = x.clone();
        for j in 0..p {
            let sd = state.nu[j].sqrt();
            xs.column_mut(j).scale_mut(sd);
        }
        let gram = &xs * xs.transpose();
        let mut unit_factor: Option<Cholesky<T, Dyn>> = None;
        for k in 0..q {
            let sw = state.w.column(k).map(|v| v.sqrt());
            let unit = sw.iter().all(|&v| v == T::one());
            let chol = if unit && unit_factor.is_some() {
                unit_factor.clone().expect("checked")
            } else {
                let mut m = gram.clone();
                for c in 0..n {
                    for r in 0..n {
                        m[(r, c)] *= sw[r] * sw[c];
                    }
                    m[(c, c)] += T::one();
                }
                let f = cholesky_jittered(m)?;
                if unit {
                    unit_factor = Some(f.clone());
                }
                f
            };
            let mut phi = x.clone();
            for i in 0..n {
                phi.row_mut(i).scale_mut(sw[i]);
            }
            let alpha = DVector::from_fn(n, |i, _| sw[i] * (z[(i, k)] - state.u[(i, k)]));
            let noise = standard_normal_vector(n, &mut noise_parent.child(k as u64));
            let prior_k = prior.column(k).into_owned();
            let beta = fast_draw_with_factor(&phi, &alpha, &state.nu, &chol, &prior_k, &noise);
            state.b.set_column(k, &beta);
        }
    } else {
        let parent = s.child(2);
        let inv_nu = state.nu.map(|v| T::one() / v);
        let mut unit_factor: Option<Cholesky<T, Dyn>> = None;
        for k in 0..q {
            let wk = state.w.column(k).into_owned();
            let unit = wk.iter().all(|&v| v == T::one());
            let chol = if unit && unit_factor.is_some() {
                unit_factor.clone().expect("checked")
            } else {
                let mut xw = x.clone();
                for i in 0..n {
                    xw.row_mut(i).scale_mut(wk[i]);
                }
                let mut a = x.tr_mul(&xw);
                for j in 0..p {
                    a[(j, j)] += inv_nu[j];
                }
                let f = cholesky_jittered(a)?;
                if unit {
                    unit_factor = Some(f.clone());
                }
                f
            };
            let target = DVector::from_fn(n, |i, _| wk[i] * (z[(i, k)] - state.u[(i, k)]));
            let rhs = x.tr_mul(&target);
            let normals = standard_normal_vector(p, &mut parent.child(k as u64));
            state.b.set_column(k, &dense_draw_with_factor(&chol, &rhs, &normals));
        }
    }
    Ok(())
}

/// Draws each row `u_i ~ N(Psi_i^{-1} Omega_i (z_i - B^T x_i), Psi_i^{-1})`
/// with `Psi_i = Omega_i + Sigma^{-1}`.
pub fn update_u<T: Real>(state: &mut ChainState<T>, d: &Dataset<T>, _h: &Hyperparameters, s: &RandomStream) -> Result<()> {
    let (n, q) = (d.n(), d.q());
    let z = working_response(state, d)?;
    let xb = d.x() * &state.b;
    let sigma_inv = cholesky_jittered(state.sigma.clone())?.inverse();
    for i in 0..n {
        let mut psi = sigma_inv.clone();
        for k in 0..q {
            psi[(k, k)] += state.w[(i, k)];
        }
        let rhs = DVector::from_fn(q, |k, _| state.w[(i, k)] * (z[(i, k)] - xb[(i, k)]));
        let chol = cholesky_jittered(psi)?;
        let normals = standard_normal_vector(q, &mut s.child(i as u64));
        let draw = dense_draw_with_factor(&chol, &rhs, &normals);
        state.u.set_row(i, &draw.transpose());
    }
    Ok(())
}

/// Draws `omega_ik ~ PG(f2_ik, x_i^T b_k + u_ik)` for every discrete cell.
/// Cells with `f2 = 0` get weight zero.
pub fn update_w<T: Real>(state: &mut ChainState<T>, d: &Dataset<T>, h: &Hyperparameters, s: &RandomStream) -> Result<()> {
    let (n, q) = (d.n(), d.q());
    let pg = PolyaGamma::new(h.pg_threshold)?;
    let xb = d.x() * &state.b;
    let discrete: Vec<usize> = (0..q).filter(|&k| !d.schema().kind(k).is_gaussian()).collect();
    if discrete.is_empty() {
        return Ok(());
    }
    for i in 0..n {
        let mut si = s.child(i as u64);
        for &k in &discrete {
            let kind = d.schema().kind(k);
            let r = state.r[k].unwrap_or_else(T::zero);
            let (_, f2) = f_values(kind, i, d.y()[(i, k)], r)?;
            state.w[(i, k)] = if f2 == T::zero() {
                T::zero()
            } else {
                pg.sample(f2, xb[(i, k)] + state.u[(i, k)], &mut si)?
            };
        }
    }
    Ok(())
}

/// Draws `nu_j ~ GIG(chi = ||b_j||^2, psi = 2 eta_j, lambda = u - q/2)`.
pub fn update_nu<T: Real>(state: &mut ChainState<T>, d: &Dataset<T>, h: &Hyperparameters, s: &RandomStream) -> Result<()> {
    let lam = h.u - d.q() as f64 / 2.0;
    for j in 0..d.p() {
        let mut chi = wide(state.b.row(j).norm_squared());
        if lam <= 0.0 && chi < CHI_FLOOR {
            chi = CHI_FLOOR;
        }
        let psi = 2.0 * wide(state.eta[j]);
        let v = gig_f64(chi, psi, lam, &mut s.child(j as u64));
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::numerical(format!("local scale {j} drew {v}"), f64::NAN));
        }
        state.nu[j] = lit(v);
    }
    Ok(())
}

/// Draws `eta_j ~ Gamma(a + u, tau + nu_j)` (shape-rate).
pub fn update_eta<T: Real>(state: &mut ChainState<T>, d: &Dataset<T>, h: &Hyperparameters, s: &RandomStream) -> Result<()> {
    let shape = match h.eta_shape {
        EtaShape::APlusU => h.a + h.u,
        EtaShape::AOnly => h.a,
    };
    for j in 0..d.p() {
        let rate = h.tau + wide(state.nu[j]);
        let v = gamma_f64(shape, rate, &mut s.child(j as u64));
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::numerical(format!("rate {j} drew {v}"), f64::NAN));
        }
        state.eta[j] = lit(v);
    }
    Ok(())
}

/// Draws `Sigma ~ IW(n + d1, U^T U + d2 I)`.
pub fn update_sigma<T: Real>(state: &mut ChainState<T>, d: &Dataset<T>, h: &Hyperparameters, s: &RandomStream) -> Result<()> {
    let q = d.q();
    let mut scale = state.u.tr_mul(&state.u);
    for k in 0..q {
        scale[(k, k)] += lit::<T>(h.d2);
    }
    let df = lit::<T>(d.n() as f64 + h.d1);
    state.sigma = sample_inverse_wishart(df, &scale, &mut s.child(0))?;
    Ok(())
}

/// Draws each negative-binomial dispersion by CRT augmentation:
/// `l_i ~ CRT(y_ik, r_k)`, then
/// `r_k ~ Gamma(c1 + sum l_i, c2 - sum ln(1 - psi_ik))` with
/// `psi_ik = logistic(x_i^T b_k + u_ik)`.
pub fn update_r<T: Real>(state: &mut ChainState<T>, d: &Dataset<T>, _h: &Hyperparameters, s: &RandomStream) -> Result<()> {
    let columns = d.schema().negbinomial_columns();
    if columns.is_empty() {
        return Ok(());
    }
    let xb = d.x() * &state.b;
    for k in columns {
        let (c1, c2) = match d.schema().kind(k) {
            crate::model::ResponseKind::NegBinomial { c1, c2, .. } => (*c1, *c2),
            _ => unreachable!("negbinomial_columns returned a non-count column"),
        };
        let r = wide(state.r[k].ok_or_else(|| Error::contract(format!("column {k} has no dispersion")))?);
        let mut sk = s.child(k as u64);
        let mut total = 0u64;
        let mut log_fail = 0.0;
        for i in 0..d.n() {
            let y = wide(d.y()[(i, k)]);
            total += crt_f64(y as u64, r, &mut sk);
            let theta = wide(xb[(i, k)] + state.u[(i, k)]);
            let psi = (1.0 / (1.0 + (-theta).exp())).clamp(PSI_CLAMP, 1.0 - PSI_CLAMP);
            log_fail += (1.0 - psi).ln();
        }
        let v = gamma_f64(c1 + total as f64, c2 - log_fail, &mut sk);
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::numerical(format!("dispersion of column {k} drew {v}"), f64::NAN));
        }
        state.r[k] = Some(lit(v));
    }
    Ok(())
}
