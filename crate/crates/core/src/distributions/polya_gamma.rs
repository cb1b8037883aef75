//! Pólya-Gamma variates PG(b, c).
//!
//! * `b = 1`: exact alternating-series rejection sampler (Devroye's method
//!   as adapted by Polson, Scott and Windle).
//! * integer `b` below the Gaussian threshold: sum of `b` exact unit draws.
//! * `b` at or above the threshold: Gaussian with the exact PG mean and
//!   variance, floored to stay positive.
//! * fractional remainder of a non-integer `b`: the defining gamma series
//!   truncated at [`SERIES_TERMS`] with its tail replaced by the exact tail
//!   mean.

use std::f64::consts::{FRAC_2_PI, PI};

use statrs::function::erf::erfc;

use super::stream::RandomStream;
use crate::error::{Error, Result};
use crate::scalar::{lit, wide, Real};

/// Default shape at and above which PG(b, c) is drawn from its Gaussian
/// moment match.
pub const DEFAULT_GAUSSIAN_THRESHOLD: u32 = 30;

/// Terms kept from the gamma series when drawing a fractional shape.
pub const SERIES_TERMS: usize = 200;

const TRUNC: f64 = 0.64;
const PI2: f64 = PI * PI;

/// PG sampler with a configurable exact/Gaussian switch point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolyaGamma {
    pub gaussian_threshold: u32,
}

impl Default for PolyaGamma {
    fn default() -> Self {
        Self { gaussian_threshold: DEFAULT_GAUSSIAN_THRESHOLD }
    }
}

impl PolyaGamma {
    pub fn new(gaussian_threshold: u32) -> Result<Self> {
        if gaussian_threshold == 0 {
            return Err(Error::parameter("PG gaussian threshold must be positive"));
        }
        Ok(Self { gaussian_threshold })
    }

    pub fn sample<T: Real>(&self, b: T, c: T, s: &mut RandomStream) -> Result<T> {
        let (b, c) = (wide(b), wide(c));
        if !(b > 0.0) || !b.is_finite() {
            return Err(Error::parameter(format!("PG shape must be positive and finite, got {b}")));
        }
        if !c.is_finite() {
            return Err(Error::parameter(format!("PG tilt must be finite, got {c}")));
        }
        Ok(lit(self.sample_f64(b, c, s)))
    }

    fn sample_f64(&self, b: f64, c: f64, s: &mut RandomStream) -> f64 {
        if b >= self.gaussian_threshold as f64 {
            return sample_gaussian_approx(b, c, s);
        }
        let whole = b.floor();
        let frac = b - whole;
        let mut total = 0.0;
        for _ in 0..whole as u64 {
            total += sample_pg1(c, s);
        }
        if frac > 0.0 {
            total += sample_series(frac, c, s);
        }
        total
    }
}

/// Draws PG(b, c) with the default threshold.
pub fn sample_polya_gamma<T: Real>(b: T, c: T, s: &mut RandomStream) -> Result<T> {
    PolyaGamma::default().sample(b, c, s)
}

/// E[PG(b, c)] = b/(2c) tanh(c/2), with limit b/4 at c = 0.
pub fn pg_mean(b: f64, c: f64) -> f64 {
    let c = c.abs();
    if c < 1e-4 {
        b * 0.25 * (1.0 - c * c / 12.0)
    } else {
        b * (0.5 * c).tanh() / (2.0 * c)
    }
}

/// Var[PG(b, c)] = b (sinh c - c) / (4 c^3 cosh^2(c/2)), with limit b/24.
pub fn pg_variance(b: f64, c: f64) -> f64 {
    let c = c.abs();
    if c < 1e-3 {
        b / 24.0 * (1.0 - c * c / 5.0)
    } else {
        let t = (0.5 * c).tanh();
        b * (2.0 * t - c * (1.0 - t * t)) / (4.0 * c * c * c)
    }
}

fn sample_gaussian_approx(b: f64, c: f64, s: &mut RandomStream) -> f64 {
    let mean = pg_mean(b, c);
    let sd = pg_variance(b, c).sqrt();
    (mean + sd * s.standard_normal()).max(mean * 1e-8)
}

fn sample_series(b: f64, c: f64, s: &mut RandomStream) -> f64 {
    // omega = 1/(2 pi^2) sum_k g_k / ((k - 1/2)^2 + d^2), g_k ~ Gamma(b, 1)
    let d2 = (c / (2.0 * PI)).powi(2);
    let gamma = rand_distr::Gamma::new(b, 1.0).expect("fractional shape is positive");
    let mut acc = 0.0;
    let mut weight_sum = 0.0;
    for k in 1..=SERIES_TERMS {
        let h = k as f64 - 0.5;
        let w = 1.0 / (h * h + d2);
        weight_sum += w;
        acc += w * rand::Rng::sample(s, gamma);
    }
    let c_abs = c.abs();
    let total_weight = if c_abs < 1e-8 { PI2 / 2.0 } else { PI2 * (0.5 * c_abs).tanh() / c_abs };
    let tail = (total_weight - weight_sum).max(0.0);
    (acc + b * tail) / (2.0 * PI2)
}

/// Exact PG(1, c).
fn sample_pg1(c: f64, s: &mut RandomStream) -> f64 {
    let z = 0.5 * c.abs();
    let k = PI2 / 8.0 + 0.5 * z * z;
    let p_exp = exponential_mass(z, k);
    loop {
        let x = if s.uniform() < p_exp {
            TRUNC + s.exp1() / k
        } else {
            truncated_inverse_gaussian(z, s)
        };
        let mut sum = series_coef(0, x);
        let threshold = s.uniform() * sum;
        let mut n = 0;
        loop {
            n += 1;
            let a = series_coef(n, x);
            if n % 2 == 1 {
                sum -= a;
                if threshold <= sum {
                    return 0.25 * x;
                }
            } else {
                sum += a;
                if threshold > sum {
                    break;
                }
            }
        }
    }
}

/// Probability of proposing from the exponential (right) piece.
fn exponential_mass(z: f64, k: f64) -> f64 {
    let rt = (1.0 / TRUNC).sqrt();
    let b = rt * (TRUNC * z - 1.0);
    let a = -rt * (TRUNC * z + 1.0);
    let x0 = k.ln() + k * TRUNC;
    let xb = x0 - z + ln_normal_cdf(b);
    let xa = x0 + z + ln_normal_cdf(a);
    let q_over_p = 4.0 / PI * (xb.exp() + xa.exp());
    1.0 / (1.0 + q_over_p)
}

/// Piecewise coefficient a_n(x) of the alternating series.
fn series_coef(n: u32, x: f64) -> f64 {
    let h = n as f64 + 0.5;
    if x > TRUNC {
        PI * h * (-0.5 * h * h * PI2 * x).exp()
    } else {
        PI * h * (FRAC_2_PI / x).powf(1.5) * (-2.0 * h * h / x).exp()
    }
}

/// Inverse-Gaussian(1/z, 1) truncated to (0, TRUNC).
fn truncated_inverse_gaussian(z: f64, s: &mut RandomStream) -> f64 {
    let mu = if z > 0.0 { 1.0 / z } else { f64::INFINITY };
    if mu > TRUNC {
        loop {
            let (mut e1, mut e2) = (s.exp1(), s.exp1());
            while e1 * e1 > 2.0 * e2 / TRUNC {
                e1 = s.exp1();
                e2 = s.exp1();
            }
            let x = TRUNC / ((1.0 + TRUNC * e1) * (1.0 + TRUNC * e1));
            if s.uniform() <= (-0.5 * z * z * x).exp() {
                return x;
            }
        }
    } else {
        loop {
            let y = s.standard_normal();
            let y = y * y;
            let mut x = mu + 0.5 * mu * mu * y - 0.5 * mu * (4.0 * mu * y + (mu * y) * (mu * y)).sqrt();
            if s.uniform() > mu / (mu + x) {
                x = mu * mu / x;
            }
            if x <= TRUNC {
                return x;
            }
        }
    }
}

/// log Phi(x), accurate in the far left tail.
pub(crate) fn ln_normal_cdf(x: f64) -> f64 {
    if x > -30.0 {
        (0.5 * erfc(-x / std::f64::consts::SQRT_2)).ln()
    } else {
        let x2 = x * x;
        -0.5 * x2 - (-x).ln() - 0.5 * (2.0 * PI).ln() + (1.0 - 1.0 / x2 + 3.0 / (x2 * x2)).ln()
    }
}
