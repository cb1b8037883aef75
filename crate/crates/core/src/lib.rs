//! Bayesian mixed-type multivariate regression with row-sparse coefficients.
//!
//! Each of `q` responses may be Gaussian, Bernoulli, binomial or negative
//! binomial. Responses share a `p x q` coefficient matrix `B` whose rows carry
//! a global-local (horseshoe family) shrinkage prior, plus a row-level
//! random effect `u_i ~ N(0, Sigma)` that couples the responses. Discrete
//! responses are handled through Pólya-Gamma augmentation, giving a fully
//! conjugate Gibbs sampler; the `B` update uses an `O(n^2 p)` observation-space
//! Gaussian sampler when `p > n`.
//!
//! Everything numeric is generic over [`Real`] (`f32` or `f64`). The `*64`
//! aliases below fix the scalar to `f64`.

pub mod distributions;
pub mod error;
pub mod gibbs;
pub mod linalg;
pub mod model;
pub mod scalar;
pub mod selection;
pub mod simulate;

pub use distributions::RandomStream;
pub use error::{Error, Result};
pub use gibbs::{run_chain, Chain, ChainConfig, ChainState, Hyperparameters, PosteriorSamples};
pub use model::{Dataset, ResponseKind, ResponseSchema, Trials};
pub use scalar::Real;
pub use selection::{two_step_fit, CredibleSummary, SelectionSets, TwoStepEstimate, TwoStepOptions};

pub type Dataset64 = Dataset<f64>;
pub type ChainState64 = ChainState<f64>;
pub type PosteriorSamples64 = PosteriorSamples<f64>;
pub type CredibleSummary64 = CredibleSummary<f64>;
pub type TwoStepEstimate64 = TwoStepEstimate<f64>;
