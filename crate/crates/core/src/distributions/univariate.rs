//! Gamma, generalized inverse Gaussian and Chinese-restaurant-table draws.
//!
//! Gamma is shape-rate throughout: `Gamma(shape, rate)` has mean
//! `shape / rate`.

use rand::Rng;

use super::stream::RandomStream;
use crate::error::{Error, Result};
use crate::scalar::{lit, wide, Real};

/// Gamma(shape, rate).
pub fn sample_gamma<T: Real>(shape: T, rate: T, s: &mut RandomStream) -> Result<T> {
    let (shape, rate) = (wide(shape), wide(rate));
    if !(shape > 0.0 && shape.is_finite()) || !(rate > 0.0 && rate.is_finite()) {
        return Err(Error::parameter(format!(
            "gamma needs positive finite shape and rate, got ({shape}, {rate})"
        )));
    }
    Ok(lit(gamma_f64(shape, rate, s)))
}

pub(crate) fn gamma_f64(shape: f64, rate: f64, s: &mut RandomStream) -> f64 {
    let g = rand_distr::Gamma::new(shape, 1.0).expect("checked by caller");
    s.sample(g) / rate
}

/// Generalized inverse Gaussian with density proportional to
/// `x^(lam - 1) exp(-(chi / x + psi * x) / 2)`.
///
/// `chi = 0` reduces to Gamma(lam, psi / 2) and `psi = 0` to the reciprocal
/// of Gamma(-lam, chi / 2). Otherwise the Hörmann-Leydold ratio-of-uniforms
/// family is used: with mode shift for `lam > 2` or `omega > 3`, without
/// shift in the T-concave region, and the dominating-density method for
/// small `omega` and `lam < 1`.
pub fn sample_gig<T: Real>(chi: T, psi: T, lam: T, s: &mut RandomStream) -> Result<T> {
    let (chi, psi, lam) = (wide(chi), wide(psi), wide(lam));
    if !(chi.is_finite() && psi.is_finite() && lam.is_finite()) || chi < 0.0 || psi < 0.0 {
        return Err(Error::parameter(format!(
            "GIG parameters must be finite with chi, psi >= 0, got ({chi}, {psi}, {lam})"
        )));
    }
    if chi == 0.0 && psi == 0.0 {
        return Err(Error::parameter("GIG needs chi > 0 or psi > 0"));
    }
    if chi == 0.0 && lam <= 0.0 {
        return Err(Error::parameter(format!("GIG with chi = 0 needs lam > 0, got {lam}")));
    }
    if psi == 0.0 && lam >= 0.0 {
        return Err(Error::parameter(format!("GIG with psi = 0 needs lam < 0, got {lam}")));
    }
    Ok(lit(gig_f64(chi, psi, lam, s)))
}

const GIG_ZERO_TOL: f64 = 10.0 * f64::EPSILON;

pub(crate) fn gig_f64(chi: f64, psi: f64, lam: f64, s: &mut RandomStream) -> f64 {
    if chi < GIG_ZERO_TOL && lam > 0.0 {
        return gamma_f64(lam, 0.5 * psi, s);
    }
    if psi < GIG_ZERO_TOL && lam < 0.0 {
        return 1.0 / gamma_f64(-lam, 0.5 * chi, s);
    }
    let alpha = (chi / psi).sqrt();
    let omega = (chi * psi).sqrt();
    let l = lam.abs();
    let x = if l > 2.0 || omega > 3.0 {
        rou_shifted(l, omega, s)
    } else if l >= 1.0 - 2.25 * omega * omega || omega > 0.2 {
        rou_unshifted(l, omega, s)
    } else {
        dominating(l, omega, s)
    };
    // X ~ GIG(l, omega, omega); 1/X carries the negative-lambda case
    if lam < 0.0 { alpha / x } else { alpha * x }
}

fn gig_mode(lam: f64, omega: f64) -> f64 {
    if lam >= 1.0 {
        (((lam - 1.0) * (lam - 1.0) + omega * omega).sqrt() + (lam - 1.0)) / omega
    } else {
        omega / (((1.0 - lam) * (1.0 - lam) + omega * omega).sqrt() + (1.0 - lam))
    }
}

fn rou_unshifted(lam: f64, omega: f64, s: &mut RandomStream) -> f64 {
    let t = 0.5 * (lam - 1.0);
    let sc = 0.25 * omega;
    let xm = gig_mode(lam, omega);
    let nc = t * xm.ln() - sc * (xm + 1.0 / xm);
    let ym = ((lam + 1.0) + ((lam + 1.0) * (lam + 1.0) + omega * omega).sqrt()) / omega;
    let um = (0.5 * (lam + 1.0) * ym.ln() - sc * (ym + 1.0 / ym) - nc).exp();
    loop {
        let u = um * s.uniform();
        let v = s.uniform();
        let x = u / v;
        if v.ln() <= t * x.ln() - sc * (x + 1.0 / x) - nc {
            return x;
        }
    }
}

fn rou_shifted(lam: f64, omega: f64, s: &mut RandomStream) -> f64 {
    let t = 0.5 * (lam - 1.0);
    let sc = 0.25 * omega;
    let xm = gig_mode(lam, omega);
    let nc = t * xm.ln() - sc * (xm + 1.0 / xm);
    // roots of the cubic bounding the shifted region
    let a = -(2.0 * (lam + 1.0) / omega + xm);
    let b = 2.0 * (lam - 1.0) * xm / omega - 1.0;
    let c = xm;
    let p = b - a * a / 3.0;
    let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    let fi = (-q / (2.0 * (-(p * p * p) / 27.0).sqrt())).acos();
    let fak = 2.0 * (-p / 3.0).sqrt();
    let y1 = fak * (fi / 3.0).cos() - a / 3.0;
    let y2 = fak * (fi / 3.0 + 4.0 / 3.0 * std::f64::consts::PI).cos() - a / 3.0;
    let uplus = (y1 - xm) * (t * y1.ln() - sc * (y1 + 1.0 / y1) - nc).exp();
    let uminus = (y2 - xm) * (t * y2.ln() - sc * (y2 + 1.0 / y2) - nc).exp();
    loop {
        let u = uminus + s.uniform() * (uplus - uminus);
        let v = s.uniform();
        let x = u / v + xm;
        if x > 0.0 && v.ln() <= t * x.ln() - sc * (x + 1.0 / x) - nc {
            return x;
        }
    }
}

fn dominating(lam: f64, omega: f64, s: &mut RandomStream) -> f64 {
    let xm = gig_mode(lam, omega);
    let x0 = omega / (1.0 - lam);
    let k0 = ((lam - 1.0) * xm.ln() - 0.5 * omega * (xm + 1.0 / xm)).exp();
    let a1 = k0 * x0;
    let (k1, a2, k2, a3);
    if x0 >= 2.0 / omega {
        k1 = 0.0;
        a2 = 0.0;
        k2 = x0.powf(lam - 1.0);
        a3 = k2 * 2.0 * (-omega * x0 / 2.0).exp() / omega;
    } else {
        k1 = (-omega).exp();
        a2 = if lam == 0.0 {
            k1 * (2.0 / (omega * omega)).ln()
        } else {
            k1 / lam * ((2.0 / omega).powf(lam) - x0.powf(lam))
        };
        k2 = (2.0 / omega).powf(lam - 1.0);
        a3 = k2 * 2.0 * (-1.0f64).exp() / omega;
    }
    let total = a1 + a2 + a3;
    loop {
        let mut v = total * s.uniform();
        let (x, hx);
        if v <= a1 {
            x = x0 * v / a1;
            hx = k0;
        } else {
            v -= a1;
            if v <= a2 {
                if lam == 0.0 {
                    x = omega * (omega.exp() * v).exp();
                    hx = k1 / x;
                } else {
                    x = (x0.powf(lam) + lam / k1 * v).powf(1.0 / lam);
                    hx = k1 * x.powf(lam - 1.0);
                }
            } else {
                v -= a2;
                let a = x0.max(2.0 / omega);
                x = -2.0 / omega * ((-omega / 2.0 * a).exp() - omega / (2.0 * k2) * v).ln();
                hx = k2 * (-omega / 2.0 * x).exp();
            }
        }
        let u = s.uniform() * hx;
        if u.ln() <= (lam - 1.0) * x.ln() - omega / 2.0 * (x + 1.0 / x) {
            return x;
        }
    }
}

/// Chinese restaurant table count: the number of occupied tables after `y`
/// customers with concentration `r`, i.e. `sum_{j=1..y} Bernoulli(r / (r + j - 1))`.
pub fn sample_crt<T: Real>(y: u64, r: T, s: &mut RandomStream) -> Result<u64> {
    let r = wide(r);
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::parameter(format!("CRT concentration must be positive, got {r}")));
    }
    Ok(crt_f64(y, r, s))
}

pub(crate) fn crt_f64(y: u64, r: f64, s: &mut RandomStream) -> u64 {
    if y == 0 {
        return 0;
    }
    // the first customer always opens a table
    let mut tables = 1;
    for j in 1..y {
        if s.bernoulli(r / (r + j as f64)) {
            tables += 1;
        }
    }
    tables
}
