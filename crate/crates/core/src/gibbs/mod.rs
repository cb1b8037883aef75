//! The Gibbs sampler: chain state, full-conditional updates and the chain
//! runner.
//!
//! One iteration updates, in order: `B`, `U`, the negative-binomial
//! dispersions `r`, the Pólya-Gamma weights `W`, the local scales `nu`, their
//! rates `eta`, and the random-effect covariance `Sigma`. Drawing `r` right
//! before `W` keeps the pair `(r, W)` a valid blocked update, since the
//! latent weights of a count cell depend on `r` through `f2 = y + r`.

mod chain;
mod samples;
mod state;
mod updates;

use serde::{Deserialize, Serialize};

use crate::distributions::DEFAULT_GAUSSIAN_THRESHOLD;
use crate::error::{Error, Result};

pub use chain::{run_chain, Block, Chain};
pub use samples::{quantile_sorted, PosteriorSamples};
pub use state::{initialize_state, working_response, ChainState};
pub use updates::{
    update_b, update_eta, update_nu, update_r, update_sigma, update_u, update_w, CHI_FLOOR, PSI_CLAMP,
};

/// Shape of the full conditional of `eta_j`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EtaShape {
    /// `Gamma(a + u, tau + nu_j)`: conjugate to `nu_j | eta_j ~ Gamma(u, eta_j)`.
    #[default]
    APlusU,
    /// `Gamma(a, tau + nu_j)`: drops the `eta_j^u` factor of the `nu_j`
    /// density. Kept only to demonstrate that the joint-distribution test
    /// detects it.
    AOnly,
}

/// Prior hyperparameters.
///
/// Rows of `B` follow `b_j | nu_j ~ N(0, nu_j I)`, `nu_j | eta_j ~ Gamma(u, eta_j)`,
/// `eta_j ~ Gamma(a, tau)`; `Sigma ~ IW(d1, d2 I)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hyperparameters {
    /// Global shrinkage.
    pub tau: f64,
    pub u: f64,
    pub a: f64,
    pub d1: f64,
    pub d2: f64,
    /// Shape at and above which PG draws use the Gaussian moment match.
    pub pg_threshold: u32,
    pub eta_shape: EtaShape,
}

impl Hyperparameters {
    /// Horseshoe row prior with the simulation defaults: `tau = 0.001`,
    /// `u = a = 0.5`, `d1 = q`, `d2 = 10`.
    pub fn horseshoe(q: usize) -> Self {
        Self {
            tau: 0.001,
            u: 0.5,
            a: 0.5,
            d1: q as f64,
            d2: 10.0,
            pg_threshold: DEFAULT_GAUSSIAN_THRESHOLD,
            eta_shape: EtaShape::APlusU,
        }
    }

    pub fn validate(&self, q: usize) -> Result<()> {
        for (name, v) in [("tau", self.tau), ("u", self.u), ("a", self.a), ("d2", self.d2)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::parameter(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.d1 > q as f64 - 1.0 && self.d1.is_finite()) {
            return Err(Error::parameter(format!("d1 must exceed q - 1 = {}, got {}", q as f64 - 1.0, self.d1)));
        }
        if self.pg_threshold == 0 {
            return Err(Error::parameter("pg-threshold must be positive"));
        }
        Ok(())
    }
}

/// Minimum number of retained draws a chain must produce.
pub const MIN_RETAINED: usize = 50;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainConfig {
    pub iterations: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub seed: u64,
    /// Keep the `Sigma` draws alongside `B`.
    pub keep_sigma: bool,
}

impl Default for ChainConfig {
    fn default() -> Self {
        Self { iterations: 3000, burn_in: 1000, thin: 1, seed: 1, keep_sigma: false }
    }
}

impl ChainConfig {
    pub fn retained(&self) -> usize {
        if self.thin == 0 || self.burn_in >= self.iterations {
            0
        } else {
            (self.iterations - self.burn_in) / self.thin
        }
    }

    /// Whether 0-based iteration `t` is kept.
    pub fn keeps(&self, t: usize) -> bool {
        t >= self.burn_in && (t - self.burn_in + 1) % self.thin == 0
    }

    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 || self.thin == 0 {
            return Err(Error::parameter("iterations and thin must be positive"));
        }
        if self.burn_in >= self.iterations {
            return Err(Error::parameter(format!(
                "burn-in {} must be below iterations {}",
                self.burn_in, self.iterations
            )));
        }
        if self.retained() < MIN_RETAINED {
            return Err(Error::parameter(format!(
                "chain retains {} draws; at least {MIN_RETAINED} required",
                self.retained()
            )));
        }
        Ok(())
    }
}
